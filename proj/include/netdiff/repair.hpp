#pragma once

#include "netdiff/geometry.hpp"

namespace netdiff {

struct RepairOptions {
  bool strict = false;        // fail instead of relaxing reconnection rules
  bool check_cut = false;     // skip prunes that would disconnect the graph
  double range_relax_factor = 2.0;  // cap for relaxed reconnection distance
};

struct RepairStats {
  int removed_links = 0;
  int added_links = 0;
  bool relaxed_parity = false;   // some link was added ignoring parity
  bool relaxed_range = false;    // some link exceeds max_range (<= relax cap)
  bool relaxed_sector = false;   // some link was added into an occupied sector
  bool connected = false;

  bool degraded() const { return relaxed_parity || relaxed_range || relaxed_sector; }
};

// Drops all but the shortest link in any over-occupied sector, node by node
// in ascending index order; ties keep the smallest partner index.
Topology prune_sectors(const NodeSet& nodes, const Topology& topo, const ConstraintConfig& cfg,
                       const RepairOptions& opts = {});

// Reconnects components with minimum-distance links between free, facing
// sectors; when strict candidates run out the parity rule, then the range
// rule, then the free-sector rule are relaxed in that order (each recorded
// in the stats). Relaxed range is capped at range_relax_factor * max_range;
// components farther apart than that stay disconnected and are flagged.
struct ConnectResult {
  Topology topology;
  RepairStats stats;
};

ConnectResult connect_components_repair(const NodeSet& nodes, const Topology& topo,
                                        const ConstraintConfig& cfg,
                                        const RepairOptions& opts = {});

struct RepairResult {
  Topology topology;
  RepairStats stats;
};

// prune_sectors followed by connect_components_repair.
RepairResult repair(const NodeSet& nodes, const Topology& topo, const ConstraintConfig& cfg,
                    const RepairOptions& opts = {});

}  // namespace netdiff
