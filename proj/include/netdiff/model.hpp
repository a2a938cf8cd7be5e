#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "netdiff/autograd.hpp"
#include "netdiff/geometry.hpp"

namespace netdiff {

enum class CamMode { kOff, kNodes, kNodesEdges };

std::string to_string(CamMode mode);
CamMode cam_mode_from_string(const std::string& text);

struct ModelConfig {
  int blocks = 10;
  int width = 128;
  int heads = 4;
  CamMode cam_mode = CamMode::kNodesEdges;
  uint64_t seed = 0;
  // Feature normalizers; echoed into checkpoints so sampling matches training.
  double area_side = 4.0;
  ConstraintConfig constraints;

  int head_dim() const { return width / heads; }
  void validate() const;
};

// Named dense parameter store. Creation order is fixed by init_params, so a
// seed fully determines the contents.
struct DenoiserParams {
  ModelConfig cfg;
  std::vector<std::string> names;
  std::vector<ad::Mat<float>> values;

  int find(const std::string& name) const;
  const ad::Mat<float>& at(const std::string& name) const;
  size_t parameter_count() const;
};

DenoiserParams init_params(const ModelConfig& cfg);

// Encoded model inputs for one graph.
//
// Node rows: [x/area, y/area, cos rot, sin rot, s0..s3, p^t] where s* are
// sector link counts under the noisy edges and p^t is the noisy parity bit.
// Edge rows (pair p = i*n + j): [e^t_ij, cos 2*psi, sin 2*psi, len/range];
// the doubled angle makes the row identical for (i,j) and (j,i).
struct GraphBatch {
  int n = 0;
  Eigen::MatrixXd node_features;  // n x 9
  Eigen::MatrixXd edge_features;  // n^2 x 4, diagonal rows zero
  double t_norm = 0.0;
};

constexpr int kNodeFeatureDim = 9;
constexpr int kEdgeFeatureDim = 4;
constexpr int kTimeFeatureDim = 16;

GraphBatch encode_inputs(const NodeSet& nodes, const Topology& noisy, double t_norm,
                         const ModelConfig& cfg);

struct DenoiserOutput {
  Eigen::MatrixXd edge_logits;   // n x n, symmetric, diagonal driven to -30
  Eigen::VectorXd parity_logits; // n
};

// Value-only forward pass (no gradient bookkeeping).
DenoiserOutput forward(const DenoiserParams& params, const GraphBatch& batch);

// Tape forward used by training; param_ids must be leaves aligned with
// params.values.
struct TapeOutputs {
  ad::Tape<float>::Id edge_logits;
  ad::Tape<float>::Id parity_logits;
  ad::Tape<float>::Id edge_probs;
  ad::Tape<float>::Id parity_probs;
};

TapeOutputs forward_on_tape(ad::Tape<float>& tape, const std::vector<int>& param_ids,
                            const DenoiserParams& params, const GraphBatch& batch);

// ---- CAM primitives (shared by the model and the unit tests) ----

template <typename S>
struct CamUpdateWeights {
  using Id = typename ad::Tape<S>::Id;
  Id Wq, Wk, Wv;       // cross-attention over nodes
  Id Wke = -1, Wve = -1;  // cross-attention over edges (nodes+edges mode)
  Id Wffn = -1, bffn = -1;  // single affine combining node/edge reads
  Id ln_g, ln_b;
  bool with_edges = false;
};

template <typename S>
struct CamModulateWeights {
  using Id = typename ad::Tape<S>::Id;
  Id Wn, Wc;      // similarity projections
  Id wg, bg;      // scalar -> feature-wise gamma
  Id wb, bb;      // scalar -> feature-wise beta
};

// Cross-attentive token refresh: LayerNorm(read + token), where read is the
// attention-weighted node summary, or an affine map of the concatenated
// node and edge summaries when with_edges is set.
template <typename S>
typename ad::Tape<S>::Id cam_update(ad::Tape<S>& tape, typename ad::Tape<S>::Id token,
                                    typename ad::Tape<S>::Id node_emb,
                                    std::optional<typename ad::Tape<S>::Id> edge_emb,
                                    const CamUpdateWeights<S>& w) {
  using Id = typename ad::Tape<S>::Id;
  const int width = static_cast<int>(tape.value(token).cols());
  const S inv_sqrt_d = S(1) / std::sqrt(static_cast<S>(width));

  const auto attend = [&](Id keys_src, Id wk, Id wv) {
    Id q = tape.matmul(token, w.Wq);
    Id k = tape.matmul(keys_src, wk);
    Id v = tape.matmul(keys_src, wv);
    Id logits = tape.scale(tape.matmul(q, tape.transpose(k)), inv_sqrt_d);
    Id att = tape.softmax_rows(logits);
    return tape.matmul(att, v);
  };

  Id read = attend(node_emb, w.Wk, w.Wv);
  if (w.with_edges) {
    if (!edge_emb) throw std::logic_error("cam_update: edge embeddings required");
    Id edge_read = attend(*edge_emb, w.Wke, w.Wve);
    Id joint = tape.hstack({read, edge_read});
    read = tape.row_broadcast_add(tape.matmul(joint, w.Wffn), w.bffn);
  }
  Id normed = tape.layernorm_rows(tape.add(read, token));
  return tape.row_broadcast_add(tape.row_broadcast_mul(normed, w.ln_g), w.ln_b);
}

// FiLM-style modulation conditioned on the token/embedding dot products:
// sigma_i = (H Wn)_i . (token Wc), gamma_i = wg * sigma_i + bg,
// beta_i = wb * sigma_i + bb, rows_i = gamma_i o H_i + beta_i.
template <typename S>
typename ad::Tape<S>::Id cam_modulate(ad::Tape<S>& tape, typename ad::Tape<S>::Id token,
                                      typename ad::Tape<S>::Id embeddings,
                                      const CamModulateWeights<S>& w) {
  using Id = typename ad::Tape<S>::Id;
  if (tape.value(token).cols() != tape.value(embeddings).cols()) {
    throw std::logic_error("cam_modulate: width mismatch");
  }
  Id projected = tape.matmul(embeddings, w.Wn);              // n x d
  Id token_proj = tape.transpose(tape.matmul(token, w.Wc));  // d x 1
  Id sigma = tape.matmul(projected, token_proj);             // n x 1
  Id gamma = tape.row_broadcast_add(tape.matmul(sigma, w.wg), w.bg);
  Id beta = tape.row_broadcast_add(tape.matmul(sigma, w.wb), w.bb);
  return tape.add(tape.mul(gamma, embeddings), beta);
}

// ---- checkpointing ----

// Binary container: magic "NDC1", u32 version, u64 header length + JSON
// header (config echo + metadata), then named float blobs. Round trips are
// bit-exact.
void save_checkpoint(const std::string& path, const DenoiserParams& params,
                     const nlohmann::json& meta,
                     const std::vector<ad::Mat<float>>* adam_m = nullptr,
                     const std::vector<ad::Mat<float>>* adam_v = nullptr);

struct Checkpoint {
  DenoiserParams params;
  nlohmann::json meta;
  std::vector<ad::Mat<float>> adam_m;  // empty when absent
  std::vector<ad::Mat<float>> adam_v;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace netdiff
