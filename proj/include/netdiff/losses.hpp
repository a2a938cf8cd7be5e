#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "netdiff/autograd.hpp"
#include "netdiff/geometry.hpp"

namespace netdiff {

struct LossWeights {
  double w_edge = 1.0;
  double w_parity_bce = 1.0;
  double w_sector = 0.5;
  double w_cosine = 0.1;
  double w_odd = 1.0;

  void validate() const {
    for (double w : {w_edge, w_parity_bce, w_sector, w_cosine, w_odd}) {
      if (!(std::isfinite(w) && w >= 0.0)) {
        throw std::invalid_argument("LossWeights: weights must be finite and >= 0");
      }
    }
    if (!(w_edge > 0.0)) throw std::invalid_argument("LossWeights: w_edge must be > 0");
  }
};

constexpr double kProbClamp = 1e-7;

namespace detail {

template <typename S>
ad::Mat<S> upper_mask(int n) {
  ad::Mat<S> mask = ad::Mat<S>::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) mask(i, j) = S(1);
  return mask;
}

template <typename S>
typename ad::Tape<S>::Id bce_elements(ad::Tape<S>& tape, typename ad::Tape<S>::Id probs,
                                      typename ad::Tape<S>::Id labels) {
  using Id = typename ad::Tape<S>::Id;
  Id clamped = tape.clamp(probs, S(kProbClamp), S(1.0 - kProbClamp));
  Id log_p = tape.log(clamped);
  Id log_q = tape.log(tape.add_scalar(tape.scale(clamped, S(-1)), S(1)));
  Id ones_minus_labels = tape.add_scalar(tape.scale(labels, S(-1)), S(1));
  return tape.scale(tape.add(tape.mul(labels, log_p), tape.mul(ones_minus_labels, log_q)), S(-1));
}

}  // namespace detail

// Mean binary cross-entropy over off-diagonal upper-triangle pairs.
template <typename S>
typename ad::Tape<S>::Id edge_bce(ad::Tape<S>& tape, typename ad::Tape<S>::Id edge_probs,
                                  const Topology& truth) {
  const int n = truth.n;
  if (tape.value(edge_probs).rows() != n || tape.value(edge_probs).cols() != n) {
    throw std::invalid_argument("edge_bce: shape mismatch");
  }
  ad::Mat<S> labels = ad::Mat<S>::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) labels(i, j) = truth.edge(i, j) ? S(1) : S(0);
  auto elements = detail::bce_elements(tape, edge_probs, tape.constant(std::move(labels)));
  auto masked = tape.mul(elements, tape.constant(detail::upper_mask<S>(n)));
  const double pair_count = 0.5 * n * (n - 1);
  return tape.scale(tape.sum(masked), S(1.0 / pair_count));
}

template <typename S>
typename ad::Tape<S>::Id parity_bce(ad::Tape<S>& tape, typename ad::Tape<S>::Id parity_probs,
                                    const Topology& truth) {
  const int n = truth.n;
  if (tape.value(parity_probs).rows() != n || tape.value(parity_probs).cols() != 1) {
    throw std::invalid_argument("parity_bce: shape mismatch");
  }
  ad::Mat<S> labels(n, 1);
  for (int i = 0; i < n; ++i) labels(i, 0) = truth.parity[i] ? S(1) : S(0);
  auto elements = detail::bce_elements(tape, parity_probs, tape.constant(std::move(labels)));
  return tape.mean_all(elements);
}

// Soft antenna-occupancy penalty: expected links per sector from the edge
// probabilities, ReLU(count - 1) summed over sectors, averaged over nodes.
// With hard {0,1} probabilities this equals the integer penalty exactly.
template <typename S>
typename ad::Tape<S>::Id sector_loss(ad::Tape<S>& tape, const NodeSet& nodes,
                                     typename ad::Tape<S>::Id edge_probs,
                                     const ConstraintConfig& cfg) {
  using Id = typename ad::Tape<S>::Id;
  const int n = nodes.count();
  if (tape.value(edge_probs).rows() != n || tape.value(edge_probs).cols() != n) {
    throw std::invalid_argument("sector_loss: shape mismatch");
  }
  Id total = -1;
  for (int s = 0; s < cfg.sector_count; ++s) {
    ad::Mat<S> mask = ad::Mat<S>::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && sector_of(nodes, i, j, cfg) == s) mask(i, j) = S(1);
      }
    }
    Id counts = tape.row_sums(tape.mul(edge_probs, tape.constant(std::move(mask))));
    Id over = tape.sum(tape.relu(tape.add_scalar(counts, S(-1))));
    total = total < 0 ? over : tape.add(total, over);
  }
  return tape.scale(total, S(1.0 / n));
}

// Acute-angle penalty. For each node h with neighbor set {j : p_hj > 0.5}
// of size k >= 2, the node term averages the stretch cosines
// (c_j - c_h).(c_h - c_i) / (|c_j - c_h||c_h - c_i|) over neighbor pairs,
// weighted by p_hi p_hj; k < 2 contributes the no-penalty term 1. The loss
// is 1 minus the node-term mean, so collinear continuations cost nothing
// and backtracking links cost the most.
template <typename S>
typename ad::Tape<S>::Id cosine_loss(ad::Tape<S>& tape, const NodeSet& nodes,
                                     typename ad::Tape<S>::Id edge_probs) {
  using Id = typename ad::Tape<S>::Id;
  const int n = nodes.count();
  const auto& probs = tape.value(edge_probs);
  if (probs.rows() != n || probs.cols() != n) {
    throw std::invalid_argument("cosine_loss: shape mismatch");
  }

  Id accumulated = -1;
  double constant_terms = 0.0;
  for (int h = 0; h < n; ++h) {
    std::vector<int> neighbors;
    for (int j = 0; j < n; ++j) {
      if (j != h && probs(h, j) > S(0.5)) neighbors.push_back(j);
    }
    const int k = static_cast<int>(neighbors.size());
    if (k < 2) {
      constant_terms += 1.0;
      continue;
    }
    std::vector<std::pair<int, int>> first_coords, second_coords;
    ad::Mat<S> cosines(static_cast<Eigen::Index>(k) * (k - 1) / 2, 1);
    Eigen::Index pair_idx = 0;
    const Point& ch = nodes.positions[h];
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        const int i = neighbors[a];
        const int j = neighbors[b];
        const Point& ci = nodes.positions[i];
        const Point& cj = nodes.positions[j];
        const double out_x = cj.x - ch.x, out_y = cj.y - ch.y;
        const double in_x = ch.x - ci.x, in_y = ch.y - ci.y;
        const double denom = std::hypot(out_x, out_y) * std::hypot(in_x, in_y);
        cosines(pair_idx, 0) = denom > 0.0 ? S((out_x * in_x + out_y * in_y) / denom) : S(0);
        first_coords.emplace_back(h, i);
        second_coords.emplace_back(h, j);
        ++pair_idx;
      }
    }
    Id weights = tape.mul(tape.gather_elems(edge_probs, std::move(first_coords)),
                          tape.gather_elems(edge_probs, std::move(second_coords)));
    Id term = tape.sum(tape.mul(weights, tape.constant(std::move(cosines))));
    term = tape.scale(term, S(2.0 / (static_cast<double>(k) * (k - 1))));
    accumulated = accumulated < 0 ? term : tape.add(accumulated, term);
  }

  ad::Mat<S> base(1, 1);
  base(0, 0) = S(constant_terms);
  Id total = tape.constant(std::move(base));
  if (accumulated >= 0) total = tape.add(total, accumulated);
  return tape.add_scalar(tape.scale(total, S(-1.0 / n)), S(1));
}

// Same-parity link penalty:
//   sum_{i<j} e_ij (1 - |P_i - P_j|) / (1 + sum_{i<j} e_ij).
template <typename S>
typename ad::Tape<S>::Id odd_loss(ad::Tape<S>& tape, typename ad::Tape<S>::Id edge_probs,
                                  typename ad::Tape<S>::Id parity_probs) {
  using Id = typename ad::Tape<S>::Id;
  const int n = static_cast<int>(tape.value(edge_probs).rows());
  if (tape.value(edge_probs).cols() != n) throw std::invalid_argument("odd_loss: edges not square");
  if (tape.value(parity_probs).rows() != n || tape.value(parity_probs).cols() != 1) {
    throw std::invalid_argument("odd_loss: parity shape mismatch");
  }
  Id ones_row = tape.constant(ad::Mat<S>::Ones(1, n));
  Id spread = tape.matmul(parity_probs, ones_row);  // row i = P_i
  Id diff = tape.abs(tape.sub(spread, tape.transpose(spread)));
  Id agreement = tape.add_scalar(tape.scale(diff, S(-1)), S(1));
  Id mask = tape.constant(detail::upper_mask<S>(n));
  Id numerator = tape.sum(tape.mul(tape.mul(edge_probs, agreement), mask));
  Id denominator = tape.add_scalar(tape.sum(tape.mul(edge_probs, mask)), S(1));
  return tape.mul(numerator, tape.reciprocal(denominator));
}

struct LossBreakdown {
  double edge_bce = 0.0;
  double parity_bce = 0.0;
  double sector = 0.0;
  double cosine = 0.0;
  double odd = 0.0;
  double total = 0.0;
};

template <typename S>
struct TotalLoss {
  typename ad::Tape<S>::Id id;
  LossBreakdown breakdown;
};

template <typename S>
TotalLoss<S> total_loss(ad::Tape<S>& tape, const NodeSet& nodes,
                        typename ad::Tape<S>::Id edge_probs,
                        typename ad::Tape<S>::Id parity_probs, const Topology& truth,
                        const ConstraintConfig& cfg, const LossWeights& weights) {
  using Id = typename ad::Tape<S>::Id;
  weights.validate();

  struct Term {
    const char* name;
    double weight;
    Id id;
    double* slot;
  };
  TotalLoss<S> result;
  Term terms[] = {
      {"edge_bce", weights.w_edge, edge_bce(tape, edge_probs, truth), &result.breakdown.edge_bce},
      {"parity_bce", weights.w_parity_bce, parity_bce(tape, parity_probs, truth),
       &result.breakdown.parity_bce},
      {"sector", weights.w_sector, sector_loss(tape, nodes, edge_probs, cfg),
       &result.breakdown.sector},
      {"cosine", weights.w_cosine, cosine_loss(tape, nodes, edge_probs),
       &result.breakdown.cosine},
      {"odd", weights.w_odd, odd_loss(tape, edge_probs, parity_probs), &result.breakdown.odd},
  };

  Id total = -1;
  for (const Term& term : terms) {
    const double value = static_cast<double>(tape.value(term.id)(0, 0));
    if (!std::isfinite(value)) {
      throw std::runtime_error(std::string("total_loss: non-finite term ") + term.name);
    }
    *term.slot = value;
    Id weighted = tape.scale(term.id, S(term.weight));
    total = total < 0 ? weighted : tape.add(total, weighted);
  }
  result.id = total;
  result.breakdown.total = static_cast<double>(tape.value(total)(0, 0));
  return result;
}

}  // namespace netdiff
