#include "netdiff/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace netdiff {

using nlohmann::json;

json EvalReport::to_json() const {
  json doc;
  doc["connected_pct"] = connected_pct;
  doc["isolated_pct"] = isolated_pct;
  doc["saturated_nodes_pct"] = saturated_nodes_pct;
  doc["parity_pct"] = parity_pct;
  doc["length_pct"] = length_pct;
  doc["mean_links"] = mean_links;
  doc["mean_link_length"] = mean_link_length;
  doc["saturated_antennas_pct"] = saturated_antennas_pct;
  doc["mean_user_throughput"] = mean_user_throughput;
  doc["sample_count"] = sample_count;
  return doc;
}

EvalReport EvalReport::from_json(const json& doc) {
  EvalReport report;
  report.connected_pct = doc.at("connected_pct").get<double>();
  report.isolated_pct = doc.at("isolated_pct").get<double>();
  report.saturated_nodes_pct = doc.at("saturated_nodes_pct").get<double>();
  report.parity_pct = doc.at("parity_pct").get<double>();
  report.length_pct = doc.at("length_pct").get<double>();
  report.mean_links = doc.at("mean_links").get<double>();
  report.mean_link_length = doc.at("mean_link_length").get<double>();
  report.saturated_antennas_pct = doc.at("saturated_antennas_pct").get<double>();
  report.mean_user_throughput = doc.at("mean_user_throughput").get<double>();
  report.sample_count = doc.at("sample_count").get<int>();
  return report;
}

EvalReport constraint_metrics(const std::vector<DatasetRecord>& batch,
                              const ConstraintConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("constraint_metrics: empty batch");
  cfg.validate();
  EvalReport report;
  report.sample_count = static_cast<int>(batch.size());

  long connected_graphs = 0;
  long total_nodes = 0, isolated = 0, saturated = 0;
  long total_links = 0, cross_parity = 0, within_range = 0;
  for (const DatasetRecord& record : batch) {
    const Topology& topo = record.topology;
    if (connected_components(topo).size() == 1) ++connected_graphs;
    total_nodes += topo.n;
    for (int i = 0; i < topo.n; ++i) {
      const int degree = topo.degree(i);
      if (degree == 0) ++isolated;
      if (degree > cfg.max_links_per_node) ++saturated;
    }
    for (const auto& [i, j] : topo.edge_list()) {
      ++total_links;
      if (topo.parity[i] != topo.parity[j]) ++cross_parity;
      if (link_length(record.nodes, i, j) <= cfg.max_range) ++within_range;
    }
  }
  report.connected_pct = 100.0 * connected_graphs / batch.size();
  report.isolated_pct = 100.0 * isolated / total_nodes;
  report.saturated_nodes_pct = 100.0 * saturated / total_nodes;
  report.parity_pct = total_links > 0 ? 100.0 * cross_parity / total_links : 100.0;
  report.length_pct = total_links > 0 ? 100.0 * within_range / total_links : 100.0;
  return report;
}

EvalReport structural_stats(const std::vector<DatasetRecord>& batch,
                            const ConstraintConfig& cfg) {
  if (batch.empty()) throw std::invalid_argument("structural_stats: empty batch");
  cfg.validate();
  EvalReport report;
  report.sample_count = static_cast<int>(batch.size());

  long total_links = 0;
  double total_length = 0.0;
  long occupied_sectors = 0, saturated_sectors = 0;
  for (const DatasetRecord& record : batch) {
    for (const auto& [i, j] : record.topology.edge_list()) {
      ++total_links;
      total_length += link_length(record.nodes, i, j);
    }
    for (const auto& row : sector_link_counts(record.nodes, record.topology, cfg)) {
      for (int s = 0; s < 4; ++s) {
        if (row[s] >= 1) ++occupied_sectors;
        if (row[s] >= 2) ++saturated_sectors;
      }
    }
  }
  report.mean_links = static_cast<double>(total_links) / batch.size();
  report.mean_link_length = total_links > 0 ? total_length / total_links : 0.0;
  report.saturated_antennas_pct =
      occupied_sectors > 0 ? 100.0 * saturated_sectors / occupied_sectors : 0.0;
  return report;
}

ThroughputResult throughput_sim(const NodeSet& nodes, const Topology& topo,
                                const ConstraintConfig& cfg, double source_rate) {
  nodes.validate();
  topo.validate();
  cfg.validate();
  if (topo.n != nodes.count()) throw std::invalid_argument("throughput_sim: dimension mismatch");
  const int n = topo.n;
  constexpr int kSource = 0;

  // Breadth-first shortest-hop tree; parent is the smallest-index neighbor
  // one hop closer to the source.
  std::vector<int> distance(n, -1);
  std::vector<int> parent(n, -1);
  distance[kSource] = 0;
  std::queue<int> frontier;
  frontier.push(kSource);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < n; ++v) {
      if (topo.edge(u, v) && distance[v] < 0) {
        distance[v] = distance[u] + 1;
        parent[v] = u;
        frontier.push(v);
      }
    }
  }

  // Effective rate per link: divide by the number of links sharing either
  // endpoint's sector (the link itself included once).
  const auto sectors = sector_link_counts(nodes, topo, cfg);
  const auto link_rate = [&](int u, int v) {
    const int su = sector_of(nodes, u, v, cfg);
    const int sv = sector_of(nodes, v, u, cfg);
    const int sharing = sectors[u][su] + sectors[v][sv] - 1;
    return source_rate / std::max(1, sharing);
  };

  // Users whose route traverses each tree link.
  std::vector<std::vector<std::pair<int, int>>> routes(n);
  std::vector<int> link_load(static_cast<size_t>(n) * n, 0);
  for (int user = 0; user < n; ++user) {
    if (user == kSource || distance[user] < 0) continue;
    for (int v = user; v != kSource; v = parent[v]) {
      routes[user].emplace_back(v, parent[v]);
      link_load[static_cast<size_t>(std::min(v, parent[v])) * n + std::max(v, parent[v])] += 1;
    }
  }

  ThroughputResult result;
  result.per_user = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  for (int user = 0; user < n; ++user) {
    if (user == kSource || distance[user] < 0) continue;
    double rate = source_rate;
    for (const auto& [a, b] : routes[user]) {
      const int load =
          link_load[static_cast<size_t>(std::min(a, b)) * n + std::max(a, b)];
      rate = std::min(rate, link_rate(a, b) / std::max(1, load));
    }
    result.per_user(user) = rate;
    total += rate;
  }
  result.mean = n > 1 ? total / (n - 1) : 0.0;
  return result;
}

EvalReport full_report(const std::vector<DatasetRecord>& batch, const ConstraintConfig& cfg) {
  EvalReport report = constraint_metrics(batch, cfg);
  const EvalReport structure = structural_stats(batch, cfg);
  report.mean_links = structure.mean_links;
  report.mean_link_length = structure.mean_link_length;
  report.saturated_antennas_pct = structure.saturated_antennas_pct;
  double throughput_total = 0.0;
  for (const DatasetRecord& record : batch) {
    throughput_total += throughput_sim(record.nodes, record.topology, cfg).mean;
  }
  report.mean_user_throughput = throughput_total / batch.size();
  return report;
}

ComparisonReport compare_report(const std::vector<DatasetRecord>& generated,
                                const std::vector<DatasetRecord>& reference,
                                const ConstraintConfig& cfg) {
  if (generated.empty() || reference.empty()) {
    throw std::invalid_argument("compare_report: both batches must be non-empty");
  }
  const EvalReport gen = full_report(generated, cfg);
  const EvalReport ref = full_report(reference, cfg);

  ComparisonReport report;
  report.structured["generated"] = gen.to_json();
  report.structured["reference"] = ref.to_json();
  json delta;
  for (const auto& [key, value] : report.structured["generated"].items()) {
    if (key == "sample_count") continue;
    delta[key] = value.get<double>() - report.structured["reference"][key].get<double>();
  }
  report.structured["delta"] = std::move(delta);

  std::ostringstream table;
  const auto row = [&table](const std::string& name, double g, double r) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-24s %12.4f %12.4f %12.4f\n", name.c_str(), g, r, g - r);
    table << line;
  };
  char head[128];
  std::snprintf(head, sizeof(head), "%-24s %12s %12s %12s\n", "metric", "generated", "reference",
                "delta");
  table << head;
  row("connected_pct", gen.connected_pct, ref.connected_pct);
  row("isolated_pct", gen.isolated_pct, ref.isolated_pct);
  row("saturated_nodes_pct", gen.saturated_nodes_pct, ref.saturated_nodes_pct);
  row("parity_pct", gen.parity_pct, ref.parity_pct);
  row("length_pct", gen.length_pct, ref.length_pct);
  row("mean_links", gen.mean_links, ref.mean_links);
  row("mean_link_length", gen.mean_link_length, ref.mean_link_length);
  row("saturated_antennas_pct", gen.saturated_antennas_pct, ref.saturated_antennas_pct);
  row("mean_user_throughput", gen.mean_user_throughput, ref.mean_user_throughput);
  report.text = table.str();
  return report;
}

}  // namespace netdiff
