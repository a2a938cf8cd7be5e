#include "netdiff/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace netdiff {

void NoiseSchedule::validate() const {
  if (T < 1) throw std::invalid_argument("NoiseSchedule: T must be >= 1");
  if (!(s > 0.0)) throw std::invalid_argument("NoiseSchedule: s must be > 0");
  if (static_cast<int>(alpha_bar.size()) != T + 1) {
    throw std::invalid_argument("NoiseSchedule: alpha_bar length mismatch");
  }
  if (!(alpha_bar.front() >= 0.999)) {
    throw std::invalid_argument("NoiseSchedule: alpha_bar[0] must be ~1");
  }
  if (!(alpha_bar.back() <= 1e-6)) {
    throw std::invalid_argument("NoiseSchedule: alpha_bar[T] must be <= 1e-6");
  }
  for (int t = 1; t <= T; ++t) {
    if (!(alpha_bar[t] < alpha_bar[t - 1])) {
      throw std::invalid_argument("NoiseSchedule: alpha_bar must be strictly decreasing");
    }
  }
  if (!(m_edge > 0.0 && m_edge < 1.0)) {
    throw std::invalid_argument("NoiseSchedule: m_edge must be in (0,1)");
  }
  if (!(m_parity > 0.0 && m_parity < 1.0)) {
    throw std::invalid_argument("NoiseSchedule: m_parity must be in (0,1)");
  }
}

NoiseSchedule build_schedule(int T, double s, double link_density, double bias) {
  if (T < 1) throw std::invalid_argument("build_schedule: T must be >= 1");
  if (!(s > 0.0)) throw std::invalid_argument("build_schedule: s must be > 0");
  if (!(link_density >= 0.0 && link_density <= 1.0)) {
    throw std::invalid_argument("build_schedule: link_density must be in [0,1]");
  }
  NoiseSchedule sched;
  sched.T = T;
  sched.s = s;
  sched.alpha_bar.resize(T + 1);
  const auto raw = [T, s](int t) {
    const double arg = 0.5 * std::numbers::pi * (static_cast<double>(t) / T + s) / (1.0 + s);
    const double c = std::cos(arg);
    return c * c;
  };
  const double raw0 = raw(0);
  for (int t = 0; t <= T; ++t) sched.alpha_bar[t] = raw(t) / raw0;
  sched.m_edge = std::min(0.5, std::max(1e-6, bias * link_density));
  sched.validate();
  return sched;
}

double dataset_link_density(const std::vector<DatasetRecord>& records) {
  if (records.empty()) throw std::invalid_argument("dataset_link_density: empty dataset");
  double links = 0.0;
  double pairs = 0.0;
  for (const DatasetRecord& record : records) {
    const int n = record.topology.n;
    links += record.topology.edge_count();
    pairs += 0.5 * n * (n - 1);
  }
  return pairs > 0.0 ? links / pairs : 0.0;
}

NoiseSchedule build_schedule(int T, double s, const std::vector<DatasetRecord>& records,
                             double bias) {
  return build_schedule(T, s, dataset_link_density(records), bias);
}

double q_t_given_0(int e0, int t, const NoiseSchedule& sched, double m) {
  if (t < 0 || t > sched.T) {
    throw std::out_of_range("q_t_given_0: t=" + std::to_string(t) + " outside [0, T]");
  }
  if (e0 != 0 && e0 != 1) throw std::invalid_argument("q_t_given_0: e0 must be 0 or 1");
  const double a = sched.alpha_bar[t];
  return a * e0 + (1.0 - a) * m;
}

double posterior_step(int e_t, double p_hat1, int t, const NoiseSchedule& sched, double m) {
  if (t < 1 || t > sched.T) {
    throw std::out_of_range("posterior_step: t=" + std::to_string(t) + " outside [1, T]");
  }
  if (e_t != 0 && e_t != 1) throw std::invalid_argument("posterior_step: e_t must be 0 or 1");
  if (!(p_hat1 >= 0.0 && p_hat1 <= 1.0)) {
    throw std::invalid_argument("posterior_step: p_hat1 outside [0,1]");
  }
  const double a_prev = sched.alpha_bar[t - 1];
  if (!(a_prev > 0.0)) throw std::runtime_error("posterior_step: alpha_bar[t-1] == 0");
  const double alpha_t = sched.alpha_bar[t] / a_prev;

  // One-step kernel towards m: q(z=1 | y) = alpha_t y + (1 - alpha_t) m.
  const auto q_step = [&](int y, int z) {
    const double p1 = alpha_t * y + (1.0 - alpha_t) * m;
    return z == 1 ? p1 : 1.0 - p1;
  };
  // Closed-form marginal at t-1: q(y=1 | e0) = a_prev e0 + (1 - a_prev) m.
  const auto q_prev = [&](int e0, int y) {
    const double p1 = a_prev * e0 + (1.0 - a_prev) * m;
    return y == 1 ? p1 : 1.0 - p1;
  };

  double mixed = 0.0;
  for (int e0 = 0; e0 <= 1; ++e0) {
    const double w1 = q_step(1, e_t) * q_prev(e0, 1);
    const double w0 = q_step(0, e_t) * q_prev(e0, 0);
    const double denom = w1 + w0;
    if (!(denom > 0.0)) throw std::runtime_error("posterior_step: degenerate posterior");
    const double posterior1 = w1 / denom;
    mixed += (e0 == 1 ? p_hat1 : 1.0 - p_hat1) * posterior1;
  }
  return mixed;
}

}  // namespace netdiff
