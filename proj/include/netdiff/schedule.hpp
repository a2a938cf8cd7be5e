#pragma once

#include <vector>

#include "netdiff/io.hpp"

namespace netdiff {

// Cosine corruption schedule for the two-state edge/parity chains. The
// transition kernel at step t resamples towards a marginal m with
// probability 1 - alpha_bar(t):  q(e^t = 1 | e^0) = alpha_bar^t e^0 +
// (1 - alpha_bar^t) m.
struct NoiseSchedule {
  int T = 50;
  double s = 0.008;
  std::vector<double> alpha_bar;  // length T+1, alpha_bar[0] == 1 exactly
  double m_edge = 0.25;
  double m_parity = 0.5;

  void validate() const;
};

// Cosine alpha_bar renormalized so alpha_bar[0] == 1; m_edge is the
// dataset's empirical link density scaled by `bias` (default 1.3, pushing
// generation towards supernumerary links) and clamped into (0, 0.5].
NoiseSchedule build_schedule(int T, double s, double link_density, double bias = 1.3);

// Density measured over the records (pooled links / pooled pairs).
NoiseSchedule build_schedule(int T, double s, const std::vector<DatasetRecord>& records,
                             double bias = 1.3);

double dataset_link_density(const std::vector<DatasetRecord>& records);

// Probability of state 1 at step t given the clean bit e0.
double q_t_given_0(int e0, int t, const NoiseSchedule& sched, double m);

// One reverse-posterior update for a single two-state variable:
//   sum_e p_hat(e) q(e^{t-1} = 1 | e^0 = e, e^t)
// with the one-step kernel derived from alpha_bar ratios and the marginal
// target m (the schedule's m for fresh sampling, a previous edge bit for
// the anchored evolution chain).
double posterior_step(int e_t, double p_hat1, int t, const NoiseSchedule& sched, double m);

}  // namespace netdiff
