#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "netdiff/io.hpp"

namespace netdiff {

// Benchmark metrics for a batch of graphs. Percentages are in [0, 100].
struct EvalReport {
  double connected_pct = 0.0;        // graphs fully connected
  double isolated_pct = 0.0;         // nodes with degree 0, pooled
  double saturated_nodes_pct = 0.0;  // nodes exceeding the per-node link cap
  double parity_pct = 0.0;           // links joining opposite parities
  double length_pct = 0.0;           // links within max_range
  double mean_links = 0.0;
  double mean_link_length = 0.0;
  double saturated_antennas_pct = 0.0;  // occupied sectors carrying >= 2 links
  double mean_user_throughput = 0.0;    // Mbps under the stand-in simulator
  int sample_count = 0;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& doc);
};

// Connectedness and per-link constraint adherence.
EvalReport constraint_metrics(const std::vector<DatasetRecord>& batch,
                              const ConstraintConfig& cfg);

// Link counts, lengths, and antenna saturation.
EvalReport structural_stats(const std::vector<DatasetRecord>& batch, const ConstraintConfig& cfg);

// Deterministic stand-in throughput model. Node 0 is the source; routes
// follow the breadth-first shortest-hop tree (ties to the smallest parent
// index). A link's rate is source_rate divided by the number of links
// sharing either endpoint's sector, and a user's throughput is the minimum
// over its route of rate / users traversing the link. Nodes outside the
// source's component get 0.
struct ThroughputResult {
  Eigen::VectorXd per_user;  // length n; source entry is 0 and excluded from the mean
  double mean = 0.0;
};

ThroughputResult throughput_sim(const NodeSet& nodes, const Topology& topo,
                                const ConstraintConfig& cfg, double source_rate = 10.0);

// constraint_metrics + structural_stats + mean throughput in one report.
EvalReport full_report(const std::vector<DatasetRecord>& batch, const ConstraintConfig& cfg);

struct ComparisonReport {
  std::string text;          // fixed-width table
  nlohmann::json structured; // {"generated":…, "reference":…, "delta":…}
};

ComparisonReport compare_report(const std::vector<DatasetRecord>& generated,
                                const std::vector<DatasetRecord>& reference,
                                const ConstraintConfig& cfg);

}  // namespace netdiff
