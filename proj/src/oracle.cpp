#include "netdiff/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "netdiff/rng.hpp"

namespace netdiff {

void ScenarioConfig::validate() const {
  if (node_count < 2) throw std::invalid_argument("ScenarioConfig: node_count must be >= 2");
  if (!(area_side > 0.0)) throw std::invalid_argument("ScenarioConfig: area_side must be > 0");
  if (!(max_range > 0.0)) throw std::invalid_argument("ScenarioConfig: max_range must be > 0");
  if (interference_threshold < 0) {
    throw std::invalid_argument("ScenarioConfig: interference_threshold must be >= 0");
  }
  if (sector_capacity < 1) throw std::invalid_argument("ScenarioConfig: sector_capacity must be >= 1");
}

NodeSet sample_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  NodeSet nodes;
  nodes.positions.reserve(cfg.node_count);
  nodes.rotations.reserve(cfg.node_count);
  for (int i = 0; i < cfg.node_count; ++i) {
    const double x = rng.uniform(0.0, cfg.area_side);
    const double y = rng.uniform(0.0, cfg.area_side);
    nodes.positions.push_back({x, y});
  }
  for (int i = 0; i < cfg.node_count; ++i) {
    nodes.rotations.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
  }
  nodes.validate();
  return nodes;
}

std::vector<uint8_t> assign_parity(const NodeSet& nodes, const ScenarioConfig& cfg) {
  nodes.validate();
  const int n = nodes.count();
  if (n < 2) throw std::invalid_argument("assign_parity: need >= 2 nodes");

  // Symmetrized nearest-neighbor graph: {i, nn(i)} for every i whose nearest
  // neighbor is within max_range. Ties go to the smaller index.
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = link_length(nodes, i, j);
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best >= 0 && best_dist <= cfg.max_range) {
      adj[i].push_back(best);
      adj[best].push_back(i);
    }
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }

  std::vector<uint8_t> parity(n, 0);
  std::vector<char> colored(n, 0);
  for (int root = 0; root < n; ++root) {
    if (colored[root]) continue;
    colored[root] = 1;
    parity[root] = 0;
    std::queue<int> frontier;
    frontier.push(root);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v : adj[u]) {
        if (colored[v]) continue;
        colored[v] = 1;
        parity[v] = parity[u] ^ 1;
        frontier.push(v);
      }
    }
  }
  return parity;
}

std::vector<std::pair<int, int>> candidate_links(const NodeSet& nodes,
                                                 const std::vector<uint8_t>& parity,
                                                 const ScenarioConfig& cfg) {
  const int n = nodes.count();
  if (static_cast<int>(parity.size()) != n) {
    throw std::invalid_argument("candidate_links: parity length mismatch");
  }
  struct Candidate {
    double length;
    int i, j;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (parity[i] == parity[j]) continue;
      const double d = link_length(nodes, i, j);
      if (d <= cfg.max_range) cands.push_back({d, i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.length != b.length) return a.length < b.length;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<std::pair<int, int>> out;
  out.reserve(cands.size());
  for (const Candidate& c : cands) out.emplace_back(c.i, c.j);
  return out;
}

namespace {

// Is node p within the transmit wedge of `apex` for the link towards
// `towards`: same antenna sector, distance at most max_range.
bool in_wedge(const NodeSet& nodes, const ConstraintConfig& cfg, int apex, int towards, int p) {
  if (p == apex) return false;
  if (link_length(nodes, apex, p) > cfg.max_range) return false;
  return sector_of(nodes, apex, p, cfg) == sector_of(nodes, apex, towards, cfg);
}

}  // namespace

int interference_count(const NodeSet& nodes, const Topology& topo,
                       std::pair<int, int> candidate, const ScenarioConfig& cfg) {
  const auto [i, j] = candidate;
  if (topo.edge(i, j)) throw std::logic_error("interference_count: candidate already linked");
  const ConstraintConfig constraints = cfg.constraints();

  int count = 0;
  for (int k = 0; k < topo.n; ++k) {
    if (k == i || k == j || topo.degree(k) == 0) continue;
    if (in_wedge(nodes, constraints, i, j, k) || in_wedge(nodes, constraints, j, i, k)) ++count;
  }
  for (const auto& [a, b] : topo.edge_list()) {
    for (int endpoint : {i, j}) {
      if (in_wedge(nodes, constraints, a, b, endpoint)) ++count;
      if (in_wedge(nodes, constraints, b, a, endpoint)) ++count;
    }
  }
  return count;
}

GreedyResult greedy_build(const NodeSet& nodes, const ScenarioConfig& cfg) {
  cfg.validate();
  nodes.validate();
  const int n = nodes.count();
  const ConstraintConfig constraints = cfg.constraints();

  GreedyResult result;
  result.topology = Topology(n);
  result.topology.parity = assign_parity(nodes, cfg);

  std::vector<std::pair<int, int>> remaining =
      candidate_links(nodes, result.topology.parity, cfg);
  std::vector<std::array<int, 4>> sectors(n, {0, 0, 0, 0});

  int theta = cfg.interference_threshold;
  const int theta_ceiling = 9 * n;  // above any reachable interference count
  bool connected = connected_components(result.topology).size() == 1;

  while (!connected && !remaining.empty()) {
    ++result.passes;
    bool added_any = false;
    std::vector<std::pair<int, int>> next_round;
    next_round.reserve(remaining.size());
    for (const auto& cand : remaining) {
      const auto [i, j] = cand;
      const int si = sector_of(nodes, i, j, constraints);
      const int sj = sector_of(nodes, j, i, constraints);
      const bool fits = sectors[i][si] < cfg.sector_capacity &&
                        sectors[j][sj] < cfg.sector_capacity &&
                        result.topology.degree(i) < constraints.max_links_per_node &&
                        result.topology.degree(j) < constraints.max_links_per_node;
      if (fits && interference_count(nodes, result.topology, cand, cfg) <= theta) {
        result.topology.set_edge(i, j, true);
        sectors[i][si] += 1;
        sectors[j][sj] += 1;
        added_any = true;
      } else {
        next_round.push_back(cand);
      }
    }
    remaining = std::move(next_round);
    connected = connected_components(result.topology).size() == 1;
    if (connected) break;
    if (!added_any && theta > theta_ceiling) break;
    theta += 1;
  }

  result.connected = connected;
  result.final_threshold = theta;
  return result;
}

std::vector<DatasetRecord> generate_records(const ScenarioConfig& cfg, int count) {
  if (count < 1) throw std::invalid_argument("generate_records: count must be >= 1");
  cfg.validate();
  std::vector<DatasetRecord> records;
  records.reserve(count);
  uint64_t attempt = 0;
  const uint64_t max_attempts = static_cast<uint64_t>(count) * 1000;
  while (static_cast<int>(records.size()) < count) {
    if (attempt >= max_attempts) {
      throw std::runtime_error("generate_records: too many unconnectable scenarios");
    }
    ScenarioConfig attempt_cfg = cfg;
    attempt_cfg.seed = Rng::mix(cfg.seed, attempt++);
    NodeSet nodes = sample_scenario(attempt_cfg);
    GreedyResult built = greedy_build(nodes, attempt_cfg);
    if (!built.connected) continue;
    records.push_back({std::move(nodes), std::move(built.topology)});
  }
  return records;
}

void build_dataset(const ScenarioConfig& cfg, int count, const std::string& out) {
  std::vector<DatasetRecord> records = generate_records(cfg, count);
  nlohmann::json header;
  header["kind"] = "dataset";
  header["count"] = count;
  header["node_count"] = cfg.node_count;
  header["area_side"] = cfg.area_side;
  header["max_range"] = cfg.max_range;
  header["interference_threshold"] = cfg.interference_threshold;
  header["sector_capacity"] = cfg.sector_capacity;
  header["seed"] = cfg.seed;
  write_dataset(out, records, header);
}

}  // namespace netdiff
