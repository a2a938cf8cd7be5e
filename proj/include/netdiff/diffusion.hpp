#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netdiff/io.hpp"
#include "netdiff/losses.hpp"
#include "netdiff/model.hpp"
#include "netdiff/schedule.hpp"

namespace netdiff {

// Forward corruption of edges and parity at step t; symmetric, seeded.
Topology apply_noise(const Topology& topo, int t, const NoiseSchedule& sched, uint64_t seed);

// Reverse-diffusion draw of a fresh topology for the given nodes.
Topology sample(const DenoiserParams& params, const NodeSet& nodes, const NoiseSchedule& sched,
                uint64_t seed);

// One training step's losses and parameter gradients for a single record.
struct StepGrads {
  LossBreakdown losses;
  std::vector<ad::Mat<float>> grads;  // aligned with params.values
};

StepGrads forward_loss(const DenoiserParams& params, const DatasetRecord& record,
                       const Topology& noisy, double t_norm, const LossWeights& weights);

struct TrainConfig {
  int steps = 2000;
  int batch_size = 8;
  double lr = 1e-4;
  double lr_min = 1e-6;
  double weight_decay = 1e-4;
  int checkpoint_every = 500;
  uint64_t seed = 0;
  std::string checkpoint_path;     // empty: keep checkpoints in memory only
  std::string log_path;            // empty: no log file
  void validate() const;
};

struct TrainLogEntry {
  int step = 0;
  double lr = 0.0;
  LossBreakdown losses;
};

struct TrainResult {
  DenoiserParams params;
  std::vector<TrainLogEntry> log;
  int completed_steps = 0;
  bool diverged = false;
};

// AdamW with cosine learning-rate decay. Per-step RNG is derived from
// (seed, step), so a run resumed from a checkpoint replays the remaining
// steps exactly.
TrainResult train(const ModelConfig& model_cfg, const std::vector<DatasetRecord>& dataset,
                  const NoiseSchedule& sched, const LossWeights& weights, const TrainConfig& cfg,
                  std::optional<Checkpoint> resume_from = std::nullopt);

// Total normalized node movement: sum_i |c_i' - c_i| / (n * max_range).
double movement_metric(const NodeSet& before, const NodeSet& after, const ConstraintConfig& cfg);

struct EvolutionConfig {
  double movement_gain = 2.0;     // kappa: movement -> diffusion steps
  double no_noise_threshold = 0.05;  // epsilon: below this, anchored mode
  double guidance_gain = 2.0;     // lambda_0; infinity pins the previous edges
  int t_min = 5;
  int t_max = 50;

  void validate(int T) const;
};

// Partial-diffusion topology update after node movement. Movement D picks
// the step count; small D switches the posterior anchor from the schedule
// marginal to the previous edges (no fresh noise); model predictions are
// reweighted towards the previous topology with strength lambda_0/(1+D).
Topology evolve(const DenoiserParams& params, const NodeSet& new_nodes, const Topology& prev,
                double movement, const NoiseSchedule& sched, const EvolutionConfig& evo,
                uint64_t seed);

}  // namespace netdiff
