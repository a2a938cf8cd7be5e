#include "netdiff/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "netdiff/rng.hpp"

namespace netdiff {

using MatF = ad::Mat<float>;

Topology apply_noise(const Topology& topo, int t, const NoiseSchedule& sched, uint64_t seed) {
  topo.validate();
  if (t < 0 || t > sched.T) throw std::out_of_range("apply_noise: t outside [0, T]");
  Rng rng(seed);
  Topology noisy(topo.n);
  for (int i = 0; i < topo.n; ++i) {
    for (int j = i + 1; j < topo.n; ++j) {
      const double p1 = q_t_given_0(topo.edge(i, j) ? 1 : 0, t, sched, sched.m_edge);
      noisy.set_edge(i, j, rng.bernoulli(p1));
    }
  }
  for (int i = 0; i < topo.n; ++i) {
    const double p1 = q_t_given_0(topo.parity[i], t, sched, sched.m_parity);
    noisy.parity[i] = rng.bernoulli(p1) ? 1 : 0;
  }
  return noisy;
}

namespace {

// Shared reverse loop for sampling and evolution. Per-edge anchors select
// between the schedule marginal (fresh sampling / large movement) and the
// previous-topology target (anchored evolution). guidance_cost[b] is the
// clamped BCE of emitting bit b against the previous edge; lambda scales it.
struct ReverseOptions {
  int t_start;                      // first (largest) diffusion step
  const Topology* edge_anchor = nullptr;   // nullptr: use sched.m_edge
  const Topology* parity_anchor = nullptr; // nullptr: use sched.m_parity
  const Topology* guidance_target = nullptr;
  double lambda = 0.0;
};

constexpr double kAnchorClamp = 1e-12;

double guided_p1(double p1, int target_bit, double lambda) {
  if (std::isinf(lambda)) return target_bit == 1 ? 1.0 : 0.0;
  // BCE of a hard bit against the target, with the usual probability clamp.
  const double cost1 = target_bit == 1 ? -std::log(1.0 - kProbClamp) : -std::log(kProbClamp);
  const double cost0 = target_bit == 0 ? -std::log(1.0 - kProbClamp) : -std::log(kProbClamp);
  const double w1 = p1 * std::exp(-lambda * cost1);
  const double w0 = (1.0 - p1) * std::exp(-lambda * cost0);
  const double denom = w1 + w0;
  return denom > 0.0 ? w1 / denom : (target_bit == 1 ? 1.0 : 0.0);
}

Topology reverse_diffusion(const DenoiserParams& params, const NodeSet& nodes,
                           const NoiseSchedule& sched, Topology state, const ReverseOptions& opt,
                           uint64_t seed) {
  const int n = nodes.count();
  Rng rng(seed);
  for (int t = opt.t_start; t >= 1; --t) {
    const GraphBatch batch =
        encode_inputs(nodes, state, static_cast<double>(t) / sched.T, params.cfg);
    const DenoiserOutput out = forward(params, batch);
    if (!out.edge_logits.allFinite() || !out.parity_logits.allFinite()) {
      throw std::runtime_error("reverse_diffusion: non-finite model output");
    }
    Topology next = state;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double p_hat = 1.0 / (1.0 + std::exp(-out.edge_logits(i, j)));
        if (opt.guidance_target) {
          p_hat = guided_p1(p_hat, opt.guidance_target->edge(i, j) ? 1 : 0, opt.lambda);
        }
        const double anchor =
            opt.edge_anchor
                ? std::clamp(opt.edge_anchor->edge(i, j) ? 1.0 : 0.0, kAnchorClamp,
                             1.0 - kAnchorClamp)
                : sched.m_edge;
        const double post = posterior_step(state.edge(i, j) ? 1 : 0, p_hat, t, sched, anchor);
        const bool bit = t > 1 ? rng.bernoulli(post) : post > 0.5;
        next.set_edge(i, j, bit);
      }
    }
    for (int i = 0; i < n; ++i) {
      const double p_hat = 1.0 / (1.0 + std::exp(-out.parity_logits(i)));
      const double anchor =
          opt.parity_anchor
              ? std::clamp(static_cast<double>(opt.parity_anchor->parity[i]), kAnchorClamp,
                           1.0 - kAnchorClamp)
              : sched.m_parity;
      const double post = posterior_step(state.parity[i], p_hat, t, sched, anchor);
      const bool bit = t > 1 ? rng.bernoulli(post) : post > 0.5;
      next.parity[i] = bit ? 1 : 0;
    }
    state = std::move(next);
  }
  return state;
}

}  // namespace

Topology sample(const DenoiserParams& params, const NodeSet& nodes, const NoiseSchedule& sched,
                uint64_t seed) {
  nodes.validate();
  sched.validate();
  const int n = nodes.count();
  Rng rng(Rng::mix(seed, 0x5a11));
  Topology state(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) state.set_edge(i, j, rng.bernoulli(sched.m_edge));
  }
  for (int i = 0; i < n; ++i) state.parity[i] = rng.bernoulli(sched.m_parity) ? 1 : 0;

  ReverseOptions opt;
  opt.t_start = sched.T;
  return reverse_diffusion(params, nodes, sched, std::move(state), opt, Rng::mix(seed, 0xd1ff));
}

StepGrads forward_loss(const DenoiserParams& params, const DatasetRecord& record,
                       const Topology& noisy, double t_norm, const LossWeights& weights) {
  ad::Tape<float> tape;
  std::vector<int> ids;
  ids.reserve(params.values.size());
  for (const MatF& value : params.values) ids.push_back(tape.leaf(value));

  const GraphBatch batch = encode_inputs(record.nodes, noisy, t_norm, params.cfg);
  const TapeOutputs outs = forward_on_tape(tape, ids, params, batch);
  const TotalLoss<float> loss =
      total_loss(tape, record.nodes, outs.edge_probs, outs.parity_probs, record.topology,
                 params.cfg.constraints, weights);
  tape.backward(loss.id);

  StepGrads result;
  result.losses = loss.breakdown;
  result.grads.reserve(ids.size());
  for (int id : ids) result.grads.push_back(tape.grad(id));
  return result;
}

void TrainConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("TrainConfig: steps must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (!(lr > 0.0) || !(lr_min >= 0.0)) throw std::invalid_argument("TrainConfig: bad learning rate");
  if (checkpoint_every < 1) throw std::invalid_argument("TrainConfig: checkpoint_every must be >= 1");
}

namespace {

struct AdamW {
  std::vector<MatF> m, v;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void init_like(const std::vector<MatF>& values) {
    m.clear();
    v.clear();
    for (const MatF& value : values) {
      m.push_back(MatF::Zero(value.rows(), value.cols()));
      v.push_back(MatF::Zero(value.rows(), value.cols()));
    }
  }

  void update(std::vector<MatF>& values, const std::vector<MatF>& grads, int64_t step,
              double lr, double weight_decay) {
    const float b1 = static_cast<float>(beta1);
    const float b2 = static_cast<float>(beta2);
    const float c1 = static_cast<float>(1.0 - std::pow(beta1, static_cast<double>(step)));
    const float c2 = static_cast<float>(1.0 - std::pow(beta2, static_cast<double>(step)));
    const float lr_f = static_cast<float>(lr);
    const float wd_f = static_cast<float>(weight_decay);
    const float eps_f = static_cast<float>(eps);
    for (size_t p = 0; p < values.size(); ++p) {
      m[p] = b1 * m[p] + (1.0f - b1) * grads[p];
      v[p] = (b2 * v[p].array() + (1.0f - b2) * grads[p].array().square()).matrix();
      const auto m_hat = m[p].array() / c1;
      const auto v_hat = v[p].array() / c2;
      values[p] =
          (values[p].array() - lr_f * (m_hat / (v_hat.sqrt() + eps_f) + wd_f * values[p].array()))
              .matrix();
    }
  }
};

double cosine_lr(double lr, double lr_min, int step, int total_steps) {
  if (total_steps <= 1) return lr;
  const double progress = static_cast<double>(step) / (total_steps - 1);
  return lr_min + 0.5 * (lr - lr_min) * (1.0 + std::cos(progress * 3.14159265358979323846));
}

}  // namespace

TrainResult train(const ModelConfig& model_cfg, const std::vector<DatasetRecord>& dataset,
                  const NoiseSchedule& sched, const LossWeights& weights, const TrainConfig& cfg,
                  std::optional<Checkpoint> resume_from) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  cfg.validate();
  weights.validate();
  sched.validate();

  TrainResult result;
  AdamW opt;
  int start_step = 0;
  if (resume_from) {
    result.params = std::move(resume_from->params);
    start_step = resume_from->meta.value("step", 0);
    if (!resume_from->adam_m.empty()) {
      opt.m = std::move(resume_from->adam_m);
      opt.v = std::move(resume_from->adam_v);
    } else {
      opt.init_like(result.params.values);
    }
  } else {
    result.params = init_params(model_cfg);
    opt.init_like(result.params.values);
  }

  std::ofstream log_file;
  if (!cfg.log_path.empty()) {
    log_file.open(cfg.log_path, std::ios::binary);
    if (!log_file) throw std::runtime_error("train: cannot open log " + cfg.log_path);
  }

  DenoiserParams last_good = result.params;
  std::vector<StepGrads> batch_grads(cfg.batch_size);

  for (int step = start_step; step < cfg.steps; ++step) {
    // All stochastic choices for the step come from one derived stream, so
    // resumed runs replay identically.
    Rng step_rng(Rng::mix(cfg.seed, static_cast<uint64_t>(step)));
    struct Draw {
      int record;
      int t;
      uint64_t noise_seed;
    };
    std::vector<Draw> draws(cfg.batch_size);
    for (int b = 0; b < cfg.batch_size; ++b) {
      draws[b].record = static_cast<int>(step_rng.below(dataset.size()));
      draws[b].t = 1 + static_cast<int>(step_rng.below(sched.T));
      draws[b].noise_seed = step_rng.next();
    }

    bool failed = false;
#pragma omp parallel for schedule(static)
    for (int b = 0; b < cfg.batch_size; ++b) {
      try {
        const DatasetRecord& record = dataset[draws[b].record];
        const Topology noisy =
            apply_noise(record.topology, draws[b].t, sched, draws[b].noise_seed);
        batch_grads[b] = forward_loss(result.params, record,
                                      noisy, static_cast<double>(draws[b].t) / sched.T, weights);
      } catch (...) {
#pragma omp critical
        failed = true;
      }
    }
    if (failed) {
      result.diverged = true;
      break;
    }

    // Deterministic reduction in batch-slot order.
    LossBreakdown mean_losses;
    std::vector<MatF> grads;
    grads.reserve(result.params.values.size());
    for (const MatF& value : result.params.values) grads.push_back(MatF::Zero(value.rows(), value.cols()));
    for (int b = 0; b < cfg.batch_size; ++b) {
      for (size_t p = 0; p < grads.size(); ++p) grads[p] += batch_grads[b].grads[p];
      mean_losses.edge_bce += batch_grads[b].losses.edge_bce;
      mean_losses.parity_bce += batch_grads[b].losses.parity_bce;
      mean_losses.sector += batch_grads[b].losses.sector;
      mean_losses.cosine += batch_grads[b].losses.cosine;
      mean_losses.odd += batch_grads[b].losses.odd;
      mean_losses.total += batch_grads[b].losses.total;
    }
    const float inv_batch = 1.0f / static_cast<float>(cfg.batch_size);
    for (MatF& g : grads) g *= inv_batch;
    mean_losses.edge_bce *= inv_batch;
    mean_losses.parity_bce *= inv_batch;
    mean_losses.sector *= inv_batch;
    mean_losses.cosine *= inv_batch;
    mean_losses.odd *= inv_batch;
    mean_losses.total *= inv_batch;

    if (!std::isfinite(mean_losses.total)) {
      result.diverged = true;
      result.params = last_good;
      break;
    }

    const double lr = cosine_lr(cfg.lr, cfg.lr_min, step, cfg.steps);
    opt.update(result.params.values, grads, step + 1, lr, cfg.weight_decay);
    result.completed_steps = step + 1;
    result.log.push_back({step, lr, mean_losses});
    if (log_file) {
      nlohmann::json line;
      line["step"] = step;
      line["lr"] = lr;
      line["edge_bce"] = mean_losses.edge_bce;
      line["parity_bce"] = mean_losses.parity_bce;
      line["sector"] = mean_losses.sector;
      line["cosine"] = mean_losses.cosine;
      line["odd"] = mean_losses.odd;
      line["total"] = mean_losses.total;
      log_file << line.dump() << '\n';
    }

    const bool checkpoint_now =
        (step + 1) % cfg.checkpoint_every == 0 || step + 1 == cfg.steps;
    if (checkpoint_now) {
      last_good = result.params;
      if (!cfg.checkpoint_path.empty()) {
        nlohmann::json meta;
        meta["step"] = step + 1;
        meta["seed"] = cfg.seed;
        meta["steps"] = cfg.steps;
        save_checkpoint(cfg.checkpoint_path, result.params, meta, &opt.m, &opt.v);
      }
    }
  }
  return result;
}

double movement_metric(const NodeSet& before, const NodeSet& after, const ConstraintConfig& cfg) {
  if (before.count() != after.count()) {
    throw std::invalid_argument("movement_metric: node count mismatch");
  }
  cfg.validate();
  double total = 0.0;
  for (int i = 0; i < before.count(); ++i) {
    total += std::hypot(after.positions[i].x - before.positions[i].x,
                        after.positions[i].y - before.positions[i].y);
  }
  return total / (before.count() * cfg.max_range);
}

void EvolutionConfig::validate(int T) const {
  if (!(movement_gain > 0.0)) throw std::invalid_argument("EvolutionConfig: movement_gain must be > 0");
  if (!(no_noise_threshold >= 0.0)) {
    throw std::invalid_argument("EvolutionConfig: no_noise_threshold must be >= 0");
  }
  if (!(guidance_gain >= 0.0)) throw std::invalid_argument("EvolutionConfig: guidance_gain must be >= 0");
  if (t_min < 1 || t_min > t_max || t_max > T) {
    throw std::invalid_argument("EvolutionConfig: need 1 <= t_min <= t_max <= T");
  }
}

Topology evolve(const DenoiserParams& params, const NodeSet& new_nodes, const Topology& prev,
                double movement, const NoiseSchedule& sched, const EvolutionConfig& evo,
                uint64_t seed) {
  new_nodes.validate();
  prev.validate();
  sched.validate();
  evo.validate(sched.T);
  if (prev.n != new_nodes.count()) throw std::invalid_argument("evolve: node count mismatch");
  if (movement < 0.0) throw std::out_of_range("evolve: negative movement");

  const int t_partial = std::clamp(
      static_cast<int>(std::llround(evo.movement_gain * movement * sched.T)), evo.t_min,
      evo.t_max);

  ReverseOptions opt;
  opt.t_start = t_partial;
  opt.guidance_target = &prev;
  opt.lambda = evo.guidance_gain / (1.0 + movement);
  const bool anchored = movement < evo.no_noise_threshold;
  if (anchored) {
    // Small movement: no fresh noise; the posterior pulls towards the
    // previous edges instead of the schedule marginal.
    opt.edge_anchor = &prev;
    opt.parity_anchor = &prev;
  }
  return reverse_diffusion(params, new_nodes, sched, prev, opt, Rng::mix(seed, 0xe701));
}

}  // namespace netdiff
