#include "netdiff/geometry.hpp"

#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

namespace netdiff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_index(const NodeSet& nodes, int i) {
  if (i < 0 || i >= nodes.count()) {
    throw std::out_of_range("node index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(nodes.count()) + ")");
  }
}

}  // namespace

void NodeSet::validate() const {
  if (positions.empty()) throw std::invalid_argument("NodeSet: need at least one node");
  if (positions.size() != rotations.size()) {
    throw std::invalid_argument("NodeSet: positions/rotations size mismatch");
  }
  for (const Point& p : positions) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("NodeSet: non-finite coordinate");
    }
  }
  for (double r : rotations) {
    if (!(r >= 0.0 && r < kTwoPi)) {
      throw std::invalid_argument("NodeSet: rotation outside [0, 2*pi)");
    }
  }
}

void Topology::set_edge(int i, int j, bool on) {
  if (i == j) throw std::invalid_argument("Topology: self-loop rejected");
  if (i < 0 || j < 0 || i >= n || j >= n) throw std::out_of_range("Topology: bad edge index");
  edges[static_cast<size_t>(i) * n + j] = on ? 1 : 0;
  edges[static_cast<size_t>(j) * n + i] = on ? 1 : 0;
}

int Topology::degree(int i) const {
  int d = 0;
  for (int j = 0; j < n; ++j) d += edges[static_cast<size_t>(i) * n + j];
  return d;
}

int Topology::edge_count() const {
  int total = 0;
  for (uint8_t e : edges) total += e;
  return total / 2;
}

std::vector<std::pair<int, int>> Topology::edge_list() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (edge(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

void Topology::validate() const {
  if (n < 0) throw std::invalid_argument("Topology: negative node count");
  if (edges.size() != static_cast<size_t>(n) * n || parity.size() != static_cast<size_t>(n)) {
    throw std::invalid_argument("Topology: storage size mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (edges[static_cast<size_t>(i) * n + i] != 0) {
      throw std::invalid_argument("Topology: nonzero diagonal");
    }
    if (parity[i] > 1) throw std::invalid_argument("Topology: parity entry not in {0,1}");
    for (int j = 0; j < n; ++j) {
      const uint8_t e = edges[static_cast<size_t>(i) * n + j];
      if (e > 1) throw std::invalid_argument("Topology: edge entry not in {0,1}");
      if (e != edges[static_cast<size_t>(j) * n + i]) {
        throw std::invalid_argument("Topology: asymmetric edge matrix");
      }
    }
  }
}

void ConstraintConfig::validate() const {
  if (!(max_range > 0.0)) throw std::invalid_argument("ConstraintConfig: max_range must be > 0");
  if (max_links_per_node < 1) {
    throw std::invalid_argument("ConstraintConfig: max_links_per_node must be >= 1");
  }
  if (std::abs(sector_count * sector_width - kTwoPi) > 1e-9) {
    throw std::invalid_argument("ConstraintConfig: sector_count * sector_width != 2*pi");
  }
}

double link_length(const NodeSet& nodes, int i, int j) {
  check_index(nodes, i);
  check_index(nodes, j);
  if (i == j) throw std::invalid_argument("link_length: i == j");
  const Point& a = nodes.positions[i];
  const Point& b = nodes.positions[j];
  return std::hypot(b.x - a.x, b.y - a.y);
}

double link_angle(const NodeSet& nodes, int i, int j) {
  check_index(nodes, i);
  check_index(nodes, j);
  if (i == j) throw std::invalid_argument("link_angle: i == j");
  const Point& a = nodes.positions[i];
  const Point& b = nodes.positions[j];
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  if (dx == 0.0 && dy == 0.0) throw std::domain_error("link_angle: coincident nodes");
  double angle = std::atan2(dy, dx);
  if (angle <= -std::numbers::pi) angle = std::numbers::pi;  // pin range to (-pi, pi]
  return angle;
}

int sector_of(const NodeSet& nodes, int i, int j, const ConstraintConfig& cfg) {
  const double angle = link_angle(nodes, i, j);
  const double frame = cfg.node_frame_sectors ? nodes.rotations[i] : 0.0;
  const double half = cfg.sector_width / 2.0;
  // Shift so that sector k spans [k*width, (k+1)*width) after wrapping.
  double rel = std::fmod(angle - frame + half, kTwoPi);
  if (rel < 0.0) rel += kTwoPi;
  int k = static_cast<int>(std::floor(rel / cfg.sector_width));
  if (k >= cfg.sector_count) k = cfg.sector_count - 1;  // guard fmod edge at 2*pi
  return k;
}

std::vector<std::array<int, 4>> sector_link_counts(const NodeSet& nodes, const Topology& topo,
                                                   const ConstraintConfig& cfg) {
  if (topo.n != nodes.count()) {
    throw std::invalid_argument("sector_link_counts: node count mismatch");
  }
  std::vector<std::array<int, 4>> counts(nodes.count(), {0, 0, 0, 0});
  for (int i = 0; i < topo.n; ++i) {
    for (int j = 0; j < topo.n; ++j) {
      if (j == i || !topo.edge(i, j)) continue;
      counts[i][sector_of(nodes, i, j, cfg)] += 1;
    }
  }
  return counts;
}

std::vector<std::vector<int>> connected_components(const Topology& topo) {
  std::vector<std::vector<int>> components;
  std::vector<char> seen(topo.n, 0);
  for (int root = 0; root < topo.n; ++root) {
    if (seen[root]) continue;
    std::vector<int> comp;
    std::queue<int> frontier;
    frontier.push(root);
    seen[root] = 1;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      comp.push_back(u);
      for (int v = 0; v < topo.n; ++v) {
        if (!seen[v] && topo.edge(u, v)) {
          seen[v] = 1;
          frontier.push(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

ViolationReport validate_topology(const NodeSet& nodes, const Topology& topo,
                                  const ConstraintConfig& cfg) {
  nodes.validate();
  topo.validate();
  if (topo.n != nodes.count()) {
    throw std::invalid_argument("validate_topology: dimension mismatch");
  }
  ViolationReport report;
  for (int i = 0; i < topo.n; ++i) {
    const int d = topo.degree(i);
    if (d == 0) report.isolated_nodes.push_back(i);
    if (d > cfg.max_links_per_node) report.saturated_nodes.push_back(i);
  }
  for (const auto& [i, j] : topo.edge_list()) {
    if (topo.parity[i] == topo.parity[j]) report.same_parity_links.emplace_back(i, j);
    if (link_length(nodes, i, j) > cfg.max_range) report.over_range_links.emplace_back(i, j);
  }
  report.connected = connected_components(topo).size() == 1;
  return report;
}

}  // namespace netdiff
