#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netdiff/geometry.hpp"
#include "netdiff/io.hpp"

namespace netdiff {

struct ScenarioConfig {
  int node_count = 16;
  double area_side = 4.0;
  double max_range = 1.5;
  int interference_threshold = 0;  // theta
  int sector_capacity = 1;         // links allowed per antenna sector
  uint64_t seed = 0;

  ConstraintConfig constraints() const {
    ConstraintConfig cfg;
    cfg.max_range = max_range;
    return cfg;
  }

  void validate() const;
};

// Uniform node positions in [0, area_side]^2 and rotations in [0, 2*pi),
// deterministic in cfg.seed.
NodeSet sample_scenario(const ScenarioConfig& cfg);

// Deterministic 2-coloring: BFS over the symmetrized nearest-neighbor graph
// restricted to max_range, root = lowest uncolored index, root color 0.
// Short links end up cross-parity with high probability.
std::vector<uint8_t> assign_parity(const NodeSet& nodes, const ScenarioConfig& cfg);

// All in-range cross-parity pairs, sorted ascending by length with (i, j)
// lexicographic tie-break.
std::vector<std::pair<int, int>> candidate_links(const NodeSet& nodes,
                                                 const std::vector<uint8_t>& parity,
                                                 const ScenarioConfig& cfg);

// Deterministic stand-in interference model. Counts
//   (a) nodes k (not an endpoint) that already carry a link and sit inside
//       either endpoint's transmit wedge for the candidate, and
//   (b) incidences of an endpoint of the candidate sitting inside the
//       transmit wedge of an existing link's endpoint.
// Wedges are the pi/2 antenna sector containing the link, radius max_range.
int interference_count(const NodeSet& nodes, const Topology& topo,
                       std::pair<int, int> candidate, const ScenarioConfig& cfg);

struct GreedyResult {
  Topology topology;
  bool connected = false;
  int passes = 0;          // outer relaxation passes executed
  int final_threshold = 0; // theta after relaxation
};

// Greedy constructor: walks candidates by length, adds a link when its
// interference is within the threshold and both endpoints have a free
// antenna in the relevant sector; relaxes the threshold by +1 per pass
// until the graph connects or no candidate remains addable.
GreedyResult greedy_build(const NodeSet& nodes, const ScenarioConfig& cfg);

// Generates connected records, resampling any scenario whose greedy build
// fails to connect. Deterministic in cfg.seed.
std::vector<DatasetRecord> generate_records(const ScenarioConfig& cfg, int count);

// generate_records plus a headered interchange file at `out`.
void build_dataset(const ScenarioConfig& cfg, int count, const std::string& out);

}  // namespace netdiff
