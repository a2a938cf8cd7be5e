#include "netdiff/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "netdiff/rng.hpp"

namespace netdiff {

using json = nlohmann::json;
using Tape = ad::Tape<float>;
using Id = Tape::Id;
using MatF = ad::Mat<float>;

std::string to_string(CamMode mode) {
  switch (mode) {
    case CamMode::kOff: return "off";
    case CamMode::kNodes: return "nodes";
    case CamMode::kNodesEdges: return "nodes+edges";
  }
  throw std::logic_error("to_string: bad CamMode");
}

CamMode cam_mode_from_string(const std::string& text) {
  if (text == "off") return CamMode::kOff;
  if (text == "nodes") return CamMode::kNodes;
  if (text == "nodes+edges") return CamMode::kNodesEdges;
  throw std::invalid_argument("cam mode must be off, nodes, or nodes+edges: got " + text);
}

void ModelConfig::validate() const {
  if (blocks < 1) throw std::invalid_argument("ModelConfig: blocks must be >= 1");
  if (width < 1 || heads < 1) throw std::invalid_argument("ModelConfig: width/heads must be >= 1");
  if (width % heads != 0) throw std::invalid_argument("ModelConfig: width must divide by heads");
  if (!(area_side > 0.0)) throw std::invalid_argument("ModelConfig: area_side must be > 0");
  constraints.validate();
}

int DenoiserParams::find(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

const MatF& DenoiserParams::at(const std::string& name) const {
  const int idx = find(name);
  if (idx < 0) throw std::out_of_range("DenoiserParams: no parameter " + name);
  return values[idx];
}

size_t DenoiserParams::parameter_count() const {
  size_t total = 0;
  for (const MatF& m : values) total += static_cast<size_t>(m.size());
  return total;
}

namespace {

struct ParamBuilder {
  DenoiserParams out;
  Rng rng;

  explicit ParamBuilder(const ModelConfig& cfg) : rng(cfg.seed) { out.cfg = cfg; }

  void add(const std::string& name, int rows, int cols, const char* init) {
    MatF m(rows, cols);
    if (std::strcmp(init, "xavier") == 0) {
      const double limit = std::sqrt(6.0 / (rows + cols));
      for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = static_cast<float>(rng.uniform(-limit, limit));
    } else if (std::strcmp(init, "zeros") == 0) {
      m.setZero();
    } else if (std::strcmp(init, "ones") == 0) {
      m.setOnes();
    } else if (std::strcmp(init, "token") == 0) {
      for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = static_cast<float>(0.02 * rng.normal());
    } else {
      throw std::logic_error("ParamBuilder: unknown init");
    }
    out.names.push_back(name);
    out.values.push_back(std::move(m));
  }
};

std::string blk(int b, const char* suffix) { return "blk" + std::to_string(b) + "." + suffix; }

}  // namespace

DenoiserParams init_params(const ModelConfig& cfg) {
  cfg.validate();
  ParamBuilder b(cfg);
  const int d = cfg.width;
  const int h = cfg.heads;
  const bool cam = cfg.cam_mode != CamMode::kOff;
  const bool cam_edges = cfg.cam_mode == CamMode::kNodesEdges;

  b.add("node_in.W", kNodeFeatureDim, d, "xavier");
  b.add("node_in.b", 1, d, "zeros");
  b.add("edge_in.W", kEdgeFeatureDim, d, "xavier");
  b.add("edge_in.b", 1, d, "zeros");
  if (cam) b.add("cam.token", 1, d, "token");

  for (int k = 0; k < cfg.blocks; ++k) {
    b.add(blk(k, "film.W"), kTimeFeatureDim, 4 * d, "zeros");
    b.add(blk(k, "film.b"), 1, 4 * d, "zeros");
    b.add(blk(k, "attn.Wq"), d, d, "xavier");
    b.add(blk(k, "attn.Wk"), d, d, "xavier");
    b.add(blk(k, "attn.Wv"), d, d, "xavier");
    b.add(blk(k, "attn.Wo"), d, d, "xavier");
    b.add(blk(k, "attn.bo"), 1, d, "zeros");
    b.add(blk(k, "attn.ln_g"), 1, d, "ones");
    b.add(blk(k, "attn.ln_b"), 1, d, "zeros");
    b.add(blk(k, "ebias.W"), d, h, "xavier");
    b.add(blk(k, "eup.W1"), 3 * d + h, d, "xavier");
    b.add(blk(k, "eup.b1"), 1, d, "zeros");
    b.add(blk(k, "eup.W2"), d, d, "xavier");
    b.add(blk(k, "eup.b2"), 1, d, "zeros");
    b.add(blk(k, "eup.ln_g"), 1, d, "ones");
    b.add(blk(k, "eup.ln_b"), 1, d, "zeros");
    b.add(blk(k, "ffn.W1"), d, 2 * d, "xavier");
    b.add(blk(k, "ffn.b1"), 1, 2 * d, "zeros");
    b.add(blk(k, "ffn.W2"), 2 * d, d, "xavier");
    b.add(blk(k, "ffn.b2"), 1, d, "zeros");
    b.add(blk(k, "ffn.ln_g"), 1, d, "ones");
    b.add(blk(k, "ffn.ln_b"), 1, d, "zeros");
    if (cam) {
      b.add(blk(k, "cam.Wq"), d, d, "xavier");
      b.add(blk(k, "cam.Wk"), d, d, "xavier");
      b.add(blk(k, "cam.Wv"), d, d, "xavier");
      if (cam_edges) {
        b.add(blk(k, "cam.Wke"), d, d, "xavier");
        b.add(blk(k, "cam.Wve"), d, d, "xavier");
        b.add(blk(k, "cam.Wffn"), 2 * d, d, "xavier");
        b.add(blk(k, "cam.bffn"), 1, d, "zeros");
      }
      b.add(blk(k, "cam.ln_g"), 1, d, "ones");
      b.add(blk(k, "cam.ln_b"), 1, d, "zeros");
      // Modulation starts as the identity map so CAM is a no-op at init.
      b.add(blk(k, "cam.nmod.Wn"), d, d, "xavier");
      b.add(blk(k, "cam.nmod.Wc"), d, d, "xavier");
      b.add(blk(k, "cam.nmod.wg"), 1, d, "zeros");
      b.add(blk(k, "cam.nmod.bg"), 1, d, "ones");
      b.add(blk(k, "cam.nmod.wb"), 1, d, "zeros");
      b.add(blk(k, "cam.nmod.bb"), 1, d, "zeros");
      if (cam_edges) {
        b.add(blk(k, "cam.emod.Wn"), d, d, "xavier");
        b.add(blk(k, "cam.emod.Wc"), d, d, "xavier");
        b.add(blk(k, "cam.emod.wg"), 1, d, "zeros");
        b.add(blk(k, "cam.emod.bg"), 1, d, "ones");
        b.add(blk(k, "cam.emod.wb"), 1, d, "zeros");
        b.add(blk(k, "cam.emod.bb"), 1, d, "zeros");
      }
    }
  }

  b.add("edge_head.W1", d, d, "xavier");
  b.add("edge_head.b1", 1, d, "zeros");
  b.add("edge_head.W2", d, 1, "xavier");
  b.add("edge_head.b2", 1, 1, "zeros");
  b.add("parity_head.W1", d, d, "xavier");
  b.add("parity_head.b1", 1, d, "zeros");
  b.add("parity_head.W2", d, 1, "xavier");
  b.add("parity_head.b2", 1, 1, "zeros");
  return std::move(b.out);
}

GraphBatch encode_inputs(const NodeSet& nodes, const Topology& noisy, double t_norm,
                         const ModelConfig& cfg) {
  nodes.validate();
  noisy.validate();
  if (noisy.n != nodes.count()) throw std::invalid_argument("encode_inputs: dimension mismatch");
  if (!(t_norm >= 0.0 && t_norm <= 1.0)) {
    throw std::invalid_argument("encode_inputs: t_norm outside [0,1]");
  }
  const int n = nodes.count();
  GraphBatch batch;
  batch.n = n;
  batch.t_norm = t_norm;

  const auto sectors = sector_link_counts(nodes, noisy, cfg.constraints);
  batch.node_features.resize(n, kNodeFeatureDim);
  for (int i = 0; i < n; ++i) {
    batch.node_features(i, 0) = nodes.positions[i].x / cfg.area_side;
    batch.node_features(i, 1) = nodes.positions[i].y / cfg.area_side;
    batch.node_features(i, 2) = std::cos(nodes.rotations[i]);
    batch.node_features(i, 3) = std::sin(nodes.rotations[i]);
    for (int s = 0; s < 4; ++s) batch.node_features(i, 4 + s) = sectors[i][s];
    batch.node_features(i, 8) = noisy.parity[i];
  }

  batch.edge_features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * n, kEdgeFeatureDim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Eigen::Index p = static_cast<Eigen::Index>(i) * n + j;
      const double psi = link_angle(nodes, i, j);
      batch.edge_features(p, 0) = noisy.edge(i, j) ? 1.0 : 0.0;
      batch.edge_features(p, 1) = std::cos(2.0 * psi);
      batch.edge_features(p, 2) = std::sin(2.0 * psi);
      batch.edge_features(p, 3) = link_length(nodes, i, j) / cfg.constraints.max_range;
    }
  }
  return batch;
}

namespace {

MatF time_features(double t_norm) {
  MatF feats(1, kTimeFeatureDim);
  for (int k = 0; k < kTimeFeatureDim / 2; ++k) {
    const double freq = std::numbers::pi * std::pow(2.0, k);
    feats(0, 2 * k) = static_cast<float>(std::sin(freq * t_norm));
    feats(0, 2 * k + 1) = static_cast<float>(std::cos(freq * t_norm));
  }
  return feats;
}

// Leaf/constant lookup helper bound to one forward pass.
struct Wiring {
  Tape& tape;
  const std::vector<int>& ids;
  const DenoiserParams& params;

  Id operator()(const std::string& name) const {
    const int idx = params.find(name);
    if (idx < 0) throw std::out_of_range("forward: missing parameter " + name);
    return ids[idx];
  }
};

Id affine(Tape& tape, Id x, Id w, Id b) {
  return tape.row_broadcast_add(tape.matmul(x, w), b);
}

Id layernorm_affine(Tape& tape, Id x, Id g, Id b) {
  return tape.row_broadcast_add(tape.row_broadcast_mul(tape.layernorm_rows(x), g), b);
}

void check_finite(Tape& tape, Id id, int block) {
  if (!tape.value(id).allFinite()) {
    throw std::runtime_error("forward: non-finite embedding at block " + std::to_string(block));
  }
}

}  // namespace

TapeOutputs forward_on_tape(Tape& tape, const std::vector<int>& param_ids,
                            const DenoiserParams& params, const GraphBatch& batch) {
  const ModelConfig& cfg = params.cfg;
  cfg.validate();
  if (batch.node_features.rows() != batch.n || batch.node_features.cols() != kNodeFeatureDim ||
      batch.edge_features.rows() != static_cast<Eigen::Index>(batch.n) * batch.n ||
      batch.edge_features.cols() != kEdgeFeatureDim) {
    throw std::invalid_argument("forward: malformed batch");
  }
  const int n = batch.n;
  const int d = cfg.width;
  const int heads = cfg.heads;
  const int dk = cfg.head_dim();
  const Wiring w{tape, param_ids, params};

  Id node_x = tape.constant(batch.node_features.cast<float>());
  Id edge_x = tape.constant(batch.edge_features.cast<float>());
  Id t_feats = tape.constant(time_features(batch.t_norm));

  Id H = affine(tape, node_x, w("node_in.W"), w("node_in.b"));
  Id E = affine(tape, edge_x, w("edge_in.W"), w("edge_in.b"));

  std::vector<int> row_of_pair(static_cast<size_t>(n) * n);
  std::vector<int> col_of_pair(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      row_of_pair[static_cast<size_t>(i) * n + j] = i;
      col_of_pair[static_cast<size_t>(i) * n + j] = j;
    }
  }

  const bool cam = cfg.cam_mode != CamMode::kOff;
  const bool cam_edges = cfg.cam_mode == CamMode::kNodesEdges;
  Id token = cam ? w("cam.token") : -1;

  for (int k = 0; k < cfg.blocks; ++k) {
    const auto p = [&](const char* suffix) { return w(blk(k, suffix)); };

    // FiLM timestep conditioning on both streams.
    Id film = affine(tape, t_feats, p("film.W"), p("film.b"));
    Id gn = tape.add_scalar(tape.cols(film, 0, d), 1.0f);
    Id bn = tape.cols(film, d, d);
    Id ge = tape.add_scalar(tape.cols(film, 2 * d, d), 1.0f);
    Id be = tape.cols(film, 3 * d, d);
    H = tape.row_broadcast_add(tape.row_broadcast_mul(H, gn), bn);
    E = tape.row_broadcast_add(tape.row_broadcast_mul(E, ge), be);

    // Multi-head self-attention with an additive per-head edge bias.
    Id Q = tape.matmul(H, p("attn.Wq"));
    Id K = tape.matmul(H, p("attn.Wk"));
    Id V = tape.matmul(H, p("attn.Wv"));
    Id bias = tape.matmul(E, p("ebias.W"));  // n^2 x heads
    std::vector<Id> head_outputs;
    std::vector<Id> head_scores;
    head_outputs.reserve(heads);
    head_scores.reserve(heads);
    for (int hh = 0; hh < heads; ++hh) {
      Id Qh = tape.cols(Q, static_cast<Eigen::Index>(hh) * dk, dk);
      Id Kh = tape.cols(K, static_cast<Eigen::Index>(hh) * dk, dk);
      Id Vh = tape.cols(V, static_cast<Eigen::Index>(hh) * dk, dk);
      Id logits = tape.scale(tape.matmul(Qh, tape.transpose(Kh)),
                             1.0f / std::sqrt(static_cast<float>(dk)));
      Id bias_h = tape.vec_to_square(tape.cols(bias, hh, 1), n);
      Id scores = tape.add(logits, bias_h);
      head_scores.push_back(tape.square_to_vec(scores));
      Id att = tape.softmax_rows(scores);
      head_outputs.push_back(tape.matmul(att, Vh));
    }
    Id attn_out = affine(tape, tape.hstack(head_outputs), p("attn.Wo"), p("attn.bo"));
    H = layernorm_affine(tape, tape.add(H, attn_out), p("attn.ln_g"), p("attn.ln_b"));

    // Edge refresh from pre-softmax attention products and endpoint states.
    Id Hi = tape.gather_rows(H, row_of_pair);
    Id Hj = tape.gather_rows(H, col_of_pair);
    std::vector<Id> edge_inputs = {E};
    edge_inputs.insert(edge_inputs.end(), head_scores.begin(), head_scores.end());
    edge_inputs.push_back(Hi);
    edge_inputs.push_back(Hj);
    Id eup_in = tape.hstack(edge_inputs);
    Id eup = affine(tape, tape.gelu(affine(tape, eup_in, p("eup.W1"), p("eup.b1"))),
                    p("eup.W2"), p("eup.b2"));
    E = layernorm_affine(tape, tape.add(E, eup), p("eup.ln_g"), p("eup.ln_b"));

    // Position-wise feed-forward on nodes.
    Id ffn = affine(tape, tape.gelu(affine(tape, H, p("ffn.W1"), p("ffn.b1"))),
                    p("ffn.W2"), p("ffn.b2"));
    H = layernorm_affine(tape, tape.add(H, ffn), p("ffn.ln_g"), p("ffn.ln_b"));

    if (cam) {
      CamUpdateWeights<float> uw;
      uw.Wq = p("cam.Wq");
      uw.Wk = p("cam.Wk");
      uw.Wv = p("cam.Wv");
      uw.ln_g = p("cam.ln_g");
      uw.ln_b = p("cam.ln_b");
      uw.with_edges = cam_edges;
      if (cam_edges) {
        uw.Wke = p("cam.Wke");
        uw.Wve = p("cam.Wve");
        uw.Wffn = p("cam.Wffn");
        uw.bffn = p("cam.bffn");
      }
      token = cam_update(tape, token, H, cam_edges ? std::optional<Id>(E) : std::nullopt, uw);

      CamModulateWeights<float> nmod{p("cam.nmod.Wn"), p("cam.nmod.Wc"), p("cam.nmod.wg"),
                                     p("cam.nmod.bg"), p("cam.nmod.wb"), p("cam.nmod.bb")};
      H = cam_modulate(tape, token, H, nmod);
      if (cam_edges) {
        CamModulateWeights<float> emod{p("cam.emod.Wn"), p("cam.emod.Wc"), p("cam.emod.wg"),
                                       p("cam.emod.bg"), p("cam.emod.wb"), p("cam.emod.bb")};
        E = cam_modulate(tape, token, E, emod);
      }
    }

    check_finite(tape, H, k);
    check_finite(tape, E, k);
  }

  // Edge head: symmetrized logits with the diagonal driven far negative.
  Id edge_hidden = tape.gelu(affine(tape, E, w("edge_head.W1"), w("edge_head.b1")));
  Id edge_flat = affine(tape, edge_hidden, w("edge_head.W2"), w("edge_head.b2"));
  Id edge_square = tape.vec_to_square(edge_flat, n);
  Id edge_sym = tape.sym_avg(edge_square);
  MatF off_diag = MatF::Ones(n, n) - MatF::Identity(n, n);
  MatF diag_sink = MatF::Identity(n, n) * -30.0f;
  Id edge_logits = tape.add(tape.mul(edge_sym, tape.constant(off_diag)), tape.constant(diag_sink));

  Id parity_hidden = tape.gelu(affine(tape, H, w("parity_head.W1"), w("parity_head.b1")));
  Id parity_logits = affine(tape, parity_hidden, w("parity_head.W2"), w("parity_head.b2"));

  TapeOutputs out;
  out.edge_logits = edge_logits;
  out.parity_logits = parity_logits;
  out.edge_probs = tape.sigmoid(edge_logits);
  out.parity_probs = tape.sigmoid(parity_logits);
  return out;
}

DenoiserOutput forward(const DenoiserParams& params, const GraphBatch& batch) {
  Tape tape;
  tape.set_grad_enabled(false);
  std::vector<int> ids;
  ids.reserve(params.values.size());
  for (const MatF& value : params.values) ids.push_back(tape.constant(value));
  const TapeOutputs outs = forward_on_tape(tape, ids, params, batch);
  DenoiserOutput result;
  result.edge_logits = tape.value(outs.edge_logits).cast<double>();
  result.parity_logits = tape.value(outs.parity_logits).col(0).cast<double>();
  return result;
}

// ---- checkpoint io ----

namespace {

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return value;
}

void write_blob(std::ofstream& out, const std::string& name, const MatF& m) {
  write_pod<uint32_t>(out, static_cast<uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_pod<uint32_t>(out, static_cast<uint32_t>(m.rows()));
  write_pod<uint32_t>(out, static_cast<uint32_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(float) * m.size()));
}

std::pair<std::string, MatF> read_blob(std::ifstream& in) {
  const uint32_t name_len = read_pod<uint32_t>(in);
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  const uint32_t rows = read_pod<uint32_t>(in);
  const uint32_t cols = read_pod<uint32_t>(in);
  MatF m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(float) * m.size()));
  if (!in) throw std::runtime_error("checkpoint: truncated blob");
  return {std::move(name), std::move(m)};
}

json config_to_json(const ModelConfig& cfg) {
  json doc;
  doc["blocks"] = cfg.blocks;
  doc["width"] = cfg.width;
  doc["heads"] = cfg.heads;
  doc["cam_mode"] = to_string(cfg.cam_mode);
  doc["seed"] = cfg.seed;
  doc["area_side"] = cfg.area_side;
  doc["max_range"] = cfg.constraints.max_range;
  doc["max_links_per_node"] = cfg.constraints.max_links_per_node;
  doc["node_frame_sectors"] = cfg.constraints.node_frame_sectors;
  return doc;
}

ModelConfig config_from_json(const json& doc) {
  ModelConfig cfg;
  cfg.blocks = doc.at("blocks").get<int>();
  cfg.width = doc.at("width").get<int>();
  cfg.heads = doc.at("heads").get<int>();
  cfg.cam_mode = cam_mode_from_string(doc.at("cam_mode").get<std::string>());
  cfg.seed = doc.at("seed").get<uint64_t>();
  cfg.area_side = doc.at("area_side").get<double>();
  cfg.constraints.max_range = doc.at("max_range").get<double>();
  cfg.constraints.max_links_per_node = doc.at("max_links_per_node").get<int>();
  cfg.constraints.node_frame_sectors = doc.at("node_frame_sectors").get<bool>();
  return cfg;
}

constexpr char kMagic[4] = {'N', 'D', 'C', '1'};

}  // namespace

void save_checkpoint(const std::string& path, const DenoiserParams& params, const json& meta,
                     const std::vector<MatF>* adam_m, const std::vector<MatF>* adam_v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out.write(kMagic, 4);
  write_pod<uint32_t>(out, 1);

  json header;
  header["model"] = config_to_json(params.cfg);
  header["meta"] = meta;
  header["has_optimizer_state"] = adam_m != nullptr && adam_v != nullptr;
  const std::string header_text = header.dump();
  write_pod<uint64_t>(out, header_text.size());
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));

  write_pod<uint32_t>(out, static_cast<uint32_t>(params.values.size()));
  for (size_t i = 0; i < params.values.size(); ++i) {
    write_blob(out, params.names[i], params.values[i]);
  }
  if (adam_m && adam_v) {
    for (size_t i = 0; i < params.values.size(); ++i) {
      write_blob(out, params.names[i] + ".m", (*adam_m)[i]);
      write_blob(out, params.names[i] + ".v", (*adam_v)[i]);
    }
  }
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("load_checkpoint: bad magic in " + path);
  }
  const uint32_t version = read_pod<uint32_t>(in);
  if (version != 1) throw std::runtime_error("load_checkpoint: unsupported version");

  const uint64_t header_len = read_pod<uint64_t>(in);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw std::runtime_error("load_checkpoint: truncated header");
  const json header = json::parse(header_text);

  Checkpoint ckpt;
  ckpt.params.cfg = config_from_json(header.at("model"));
  ckpt.meta = header.at("meta");

  const uint32_t count = read_pod<uint32_t>(in);
  for (uint32_t i = 0; i < count; ++i) {
    auto [name, m] = read_blob(in);
    ckpt.params.names.push_back(std::move(name));
    ckpt.params.values.push_back(std::move(m));
  }
  if (header.at("has_optimizer_state").get<bool>()) {
    ckpt.adam_m.reserve(count);
    ckpt.adam_v.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
      ckpt.adam_m.push_back(read_blob(in).second);
      ckpt.adam_v.push_back(read_blob(in).second);
    }
  }
  return ckpt;
}

}  // namespace netdiff
