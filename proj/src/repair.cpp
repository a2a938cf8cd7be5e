#include "netdiff/repair.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace netdiff {

namespace {

int component_count(const Topology& topo) {
  return static_cast<int>(connected_components(topo).size());
}

}  // namespace

Topology prune_sectors(const NodeSet& nodes, const Topology& topo, const ConstraintConfig& cfg,
                       const RepairOptions& opts) {
  nodes.validate();
  topo.validate();
  cfg.validate();
  if (topo.n != nodes.count()) throw std::invalid_argument("prune_sectors: dimension mismatch");

  Topology pruned = topo;
  for (int i = 0; i < pruned.n; ++i) {
    for (int s = 0; s < cfg.sector_count; ++s) {
      // Live view of this sector's partners; earlier prunes already apply.
      std::vector<int> partners;
      for (int j = 0; j < pruned.n; ++j) {
        if (j != i && pruned.edge(i, j) && sector_of(nodes, i, j, cfg) == s) partners.push_back(j);
      }
      if (static_cast<int>(partners.size()) <= 1) continue;
      int keep = partners[0];
      double keep_length = link_length(nodes, i, keep);
      for (size_t p = 1; p < partners.size(); ++p) {
        const double length = link_length(nodes, i, partners[p]);
        if (length < keep_length) {
          keep = partners[p];
          keep_length = length;
        }
      }
      for (int j : partners) {
        if (j == keep) continue;
        if (opts.check_cut) {
          Topology candidate = pruned;
          candidate.set_edge(i, j, false);
          if (component_count(candidate) > component_count(pruned)) continue;
        }
        pruned.set_edge(i, j, false);
      }
    }
  }
  return pruned;
}

namespace {

struct Candidate {
  double length = std::numeric_limits<double>::infinity();
  int i = -1, j = -1;

  bool valid() const { return i >= 0; }

  bool better_than(const Candidate& other) const {
    if (length != other.length) return length < other.length;
    if (i != other.i) return i < other.i;
    return j < other.j;
  }
};

// Relaxation ladder for reconnection: each level keeps the constraints of
// the ones below it minus the named rule.
enum class Level { kStrict, kNoParity, kNoRange, kNoFreeSector };

Candidate best_pair(const NodeSet& nodes, const Topology& topo, const ConstraintConfig& cfg,
                    const std::vector<int>& component_of,
                    const std::vector<std::array<int, 4>>& sectors, Level level,
                    double relaxed_range) {
  Candidate best;
  const int n = topo.n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (component_of[i] == component_of[j]) continue;
      const double length = link_length(nodes, i, j);
      const double cap = level >= Level::kNoRange ? relaxed_range : cfg.max_range;
      if (length > cap) continue;
      if (level < Level::kNoParity && topo.parity[i] == topo.parity[j]) continue;
      if (level < Level::kNoFreeSector) {
        if (sectors[i][sector_of(nodes, i, j, cfg)] != 0) continue;
        if (sectors[j][sector_of(nodes, j, i, cfg)] != 0) continue;
      }
      const Candidate cand{length, i, j};
      if (cand.better_than(best)) best = cand;
    }
  }
  return best;
}

}  // namespace

ConnectResult connect_components_repair(const NodeSet& nodes, const Topology& topo,
                                        const ConstraintConfig& cfg, const RepairOptions& opts) {
  nodes.validate();
  topo.validate();
  cfg.validate();
  if (topo.n != nodes.count()) {
    throw std::invalid_argument("connect_components_repair: dimension mismatch");
  }

  ConnectResult result;
  result.topology = topo;
  const double relaxed_range = opts.range_relax_factor * cfg.max_range;

  for (;;) {
    const auto components = connected_components(result.topology);
    result.stats.connected = components.size() == 1;
    if (result.stats.connected) break;

    std::vector<int> component_of(result.topology.n, -1);
    for (size_t c = 0; c < components.size(); ++c) {
      for (int member : components[c]) component_of[member] = static_cast<int>(c);
    }
    const auto sectors = sector_link_counts(nodes, result.topology, cfg);

    Candidate chosen;
    Level chosen_level = Level::kStrict;
    for (Level level :
         {Level::kStrict, Level::kNoParity, Level::kNoRange, Level::kNoFreeSector}) {
      chosen = best_pair(nodes, result.topology, cfg, component_of, sectors, level, relaxed_range);
      chosen_level = level;
      if (chosen.valid()) break;
    }
    if (opts.strict && (!chosen.valid() || chosen_level != Level::kStrict)) {
      throw std::runtime_error("connect_components_repair: strict reconnection impossible");
    }
    if (!chosen.valid()) break;  // nothing within the relaxed range cap

    result.topology.set_edge(chosen.i, chosen.j, true);
    result.stats.added_links += 1;
    if (chosen_level >= Level::kNoParity &&
        result.topology.parity[chosen.i] == result.topology.parity[chosen.j]) {
      result.stats.relaxed_parity = true;
    }
    if (chosen.length > cfg.max_range) result.stats.relaxed_range = true;
    if (chosen_level >= Level::kNoFreeSector) result.stats.relaxed_sector = true;
  }
  return result;
}

RepairResult repair(const NodeSet& nodes, const Topology& topo, const ConstraintConfig& cfg,
                    const RepairOptions& opts) {
  const Topology pruned = prune_sectors(nodes, topo, cfg, opts);
  ConnectResult connected = connect_components_repair(nodes, pruned, cfg, opts);

  RepairResult result;
  result.stats = connected.stats;
  result.stats.removed_links = topo.edge_count() - pruned.edge_count();
  result.topology = std::move(connected.topology);
  return result;
}

}  // namespace netdiff
