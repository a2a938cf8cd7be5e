#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace netdiff {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Node scenario: positions plus each node's antenna-frame rotation.
struct NodeSet {
  std::vector<Point> positions;
  std::vector<double> rotations;  // radians in [0, 2*pi)

  int count() const { return static_cast<int>(positions.size()); }

  // Throws std::invalid_argument on non-finite coordinates, rotations
  // outside [0, 2*pi), or an empty node set.
  void validate() const;
};

// Symmetric binary link matrix plus per-node parity labels.
struct Topology {
  int n = 0;
  std::vector<uint8_t> edges;   // n*n row-major, symmetric, zero diagonal
  std::vector<uint8_t> parity;  // length n, entries in {0,1}

  Topology() = default;
  explicit Topology(int node_count)
      : n(node_count),
        edges(static_cast<size_t>(node_count) * node_count, 0),
        parity(node_count, 0) {}

  bool edge(int i, int j) const { return edges[static_cast<size_t>(i) * n + j] != 0; }
  void set_edge(int i, int j, bool on);
  int degree(int i) const;
  int edge_count() const;
  std::vector<std::pair<int, int>> edge_list() const;  // i<j, lexicographic

  bool operator==(const Topology& other) const = default;

  // Throws std::invalid_argument if symmetry, diagonal, value-range, or
  // size invariants are broken.
  void validate() const;
};

struct ConstraintConfig {
  double max_range = 1.5;
  int max_links_per_node = 4;
  int sector_count = 4;             // fixed by the antenna layout
  double sector_width = 1.5707963267948966;  // pi/2
  bool node_frame_sectors = true;   // false: ignore rotations (world frame)

  void validate() const;
};

struct ViolationReport {
  std::vector<int> isolated_nodes;
  std::vector<int> saturated_nodes;
  std::vector<std::pair<int, int>> same_parity_links;
  std::vector<std::pair<int, int>> over_range_links;
  bool connected = false;

  bool clean() const {
    return isolated_nodes.empty() && saturated_nodes.empty() &&
           same_parity_links.empty() && over_range_links.empty();
  }
};

// Euclidean distance between nodes i and j. Throws std::out_of_range on a
// bad index and std::invalid_argument when i == j.
double link_length(const NodeSet& nodes, int i, int j);

// Full-quadrant angle of the vector c_j - c_i, in (-pi, pi]. Coincident
// nodes raise std::domain_error.
double link_angle(const NodeSet& nodes, int i, int j);

// Antenna sector of node i that contains the link towards j. Sector 0 is
// the node-frame "east" wedge; boundaries are half-open with the lower
// boundary belonging to the sector.
int sector_of(const NodeSet& nodes, int i, int j, const ConstraintConfig& cfg);

// Per-node counts of links in each of the four sectors. Row sums equal
// node degrees.
std::vector<std::array<int, 4>> sector_link_counts(const NodeSet& nodes,
                                                   const Topology& topo,
                                                   const ConstraintConfig& cfg);

// Maximal connected node sets, each sorted ascending, ordered by smallest
// member index.
std::vector<std::vector<int>> connected_components(const Topology& topo);

ViolationReport validate_topology(const NodeSet& nodes, const Topology& topo,
                                  const ConstraintConfig& cfg);

}  // namespace netdiff
