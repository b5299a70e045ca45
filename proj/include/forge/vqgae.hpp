#pragma once

// The vector-quantized graph autoencoder: two mean-aggregation message
// passing layers, nearest-code quantization with straight-through gradients,
// and linear node-feature/edge decoders trained with
// total = edge_recon + feat_recon + codebook + alpha-weighted commitment.
//
// Gradient routing: the codebook moves only through the quantization
// alignment term (embeddings stopped), the encoder through the commitment
// term (codewords stopped) plus the straight-through reconstruction path,
// and the decoders through the reconstruction terms.

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "forge/bipartite.hpp"
#include "forge/common.hpp"
#include "forge/rng.hpp"
#include "forge/tape.hpp"
#include "forge/tensor.hpp"

namespace forge {

struct EncoderParams {
  Tensor w_self1, w_nbr1, b1;  // 10 x d, 10 x d, 1 x d
  Tensor w_self2, w_nbr2, b2;  // d x d, d x d, 1 x d
  int dim() const { return static_cast<int>(w_self2.cols()); }
};

struct Codebook {
  Tensor codewords;  // k x d
  std::vector<long long> usage;
  int size() const { return static_cast<int>(codewords.rows()); }
  int dim() const { return static_cast<int>(codewords.cols()); }
};

struct DecoderParams {
  Tensor w_node, b_node;  // d x 10, 1 x 10
  Tensor w_edge, b_edge;  // d x d_e, 1 x d_e
  int edge_dim() const { return static_cast<int>(w_edge.cols()); }
};

struct VqGaeParams {
  EncoderParams encoder;
  Codebook codebook;
  DecoderParams decoder;
  double alpha = 0.25;
  double negative_ratio = 1.0;  // sampled non-edges per true edge

  int dim() const { return encoder.dim(); }

  std::vector<Tensor*> parameter_list() {
    return {&encoder.w_self1, &encoder.w_nbr1, &encoder.b1,
            &encoder.w_self2, &encoder.w_nbr2, &encoder.b2,
            &codebook.codewords,
            &decoder.w_node,  &decoder.b_node,
            &decoder.w_edge,  &decoder.b_edge};
  }
};

struct LossBreakdown {
  double edge_recon = 0.0;
  double feat_recon = 0.0;
  double codebook = 0.0;
  double commitment = 0.0;  // already alpha-weighted
  double total = 0.0;
  double alpha = 0.0;
};

namespace vq_detail {

inline Tensor xavier(std::int64_t fan_in, std::int64_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return Tensor::rand_uniform(fan_in, fan_out, rng, -limit, limit);
}

// Directed message lists: every edge contributes variable->constraint and
// constraint->variable entries.
struct NeighborIndex {
  std::vector<int> src, dst;
};

inline NeighborIndex neighbor_index(const BipartiteGraph& g) {
  NeighborIndex idx;
  idx.src.reserve(2 * g.edges.size());
  idx.dst.reserve(2 * g.edges.size());
  for (const auto& e : g.edges) {
    idx.src.push_back(g.variable_node(e.variable));
    idx.dst.push_back(e.constraint);
    idx.src.push_back(e.constraint);
    idx.dst.push_back(g.variable_node(e.variable));
  }
  return idx;
}

}  // namespace vq_detail

inline VqGaeParams init_params(int d, int k, int edge_dim, double alpha,
                               std::uint64_t seed) {
  if (k < 2) throw DataError("codebook needs at least 2 codes");
  Rng rng = Rng::split(seed, "param-init");
  VqGaeParams p;
  p.alpha = alpha;
  p.encoder.w_self1 = vq_detail::xavier(kNodeFeatureDim, d, rng);
  p.encoder.w_nbr1 = vq_detail::xavier(kNodeFeatureDim, d, rng);
  p.encoder.b1 = Tensor::zeros(1, d);
  p.encoder.w_self2 = vq_detail::xavier(d, d, rng);
  p.encoder.w_nbr2 = vq_detail::xavier(d, d, rng);
  p.encoder.b2 = Tensor::zeros(1, d);
  p.codebook.codewords = Tensor::zeros(k, d);
  p.codebook.usage.assign(k, 0);
  p.decoder.w_node = vq_detail::xavier(d, kNodeFeatureDim, rng);
  p.decoder.b_node = Tensor::zeros(1, kNodeFeatureDim);
  p.decoder.w_edge = vq_detail::xavier(d, edge_dim, rng);
  p.decoder.b_edge = Tensor::zeros(1, edge_dim);
  return p;
}

// Codebook rows start as sampled encoder outputs plus small noise.
inline void seed_codebook(Codebook& codebook, const Tensor& encoder_outputs,
                          Rng& rng) {
  const int k = codebook.size();
  const int n = static_cast<int>(encoder_outputs.rows());
  if (n == 0) throw DataError("cannot seed a codebook from an empty graph");
  for (int c = 0; c < k; ++c) {
    const int row = rng.below_int(n);
    for (int j = 0; j < codebook.dim(); ++j)
      codebook.codewords.at(c, j) =
          encoder_outputs.at(row, j) + 0.01 * rng.normal();
  }
}

struct EncoderNodes {
  Tape::NodeId w_self1, w_nbr1, b1, w_self2, w_nbr2, b2;
};

inline EncoderNodes register_encoder(Tape& tape, const EncoderParams& p,
                                     bool requires_grad = true) {
  return {tape.input(p.w_self1, requires_grad), tape.input(p.w_nbr1, requires_grad),
          tape.input(p.b1, requires_grad),      tape.input(p.w_self2, requires_grad),
          tape.input(p.w_nbr2, requires_grad),  tape.input(p.b2, requires_grad)};
}

// Two rounds of h' = relu(W_self h + W_nbr mean_{j in N(i)} h_j + b); the
// second round omits the relu. Isolated nodes see a zero neighbor term.
inline Tape::NodeId encode_on_tape(Tape& tape, const BipartiteGraph& graph,
                                   const EncoderNodes& enc, Tape::NodeId features) {
  const auto idx = vq_detail::neighbor_index(graph);
  const int n = graph.num_nodes();
  auto layer = [&](Tape::NodeId h, Tape::NodeId w_self, Tape::NodeId w_nbr,
                   Tape::NodeId bias, bool activate) {
    auto gathered = tape.row_gather(h, idx.src);
    auto agg = tape.segment_mean(gathered, idx.dst, n);
    auto pre = tape.add_rowvec(
        tape.add(tape.matmul(h, w_self), tape.matmul(agg, w_nbr)), bias);
    return activate ? tape.relu(pre) : pre;
  };
  auto h1 = layer(features, enc.w_self1, enc.w_nbr1, enc.b1, true);
  return layer(h1, enc.w_self2, enc.w_nbr2, enc.b2, false);
}

// Value-only encoder pass.
inline Tensor encode_values(const BipartiteGraph& graph, const EncoderParams& p) {
  Tape tape;
  auto enc = register_encoder(tape, p, false);
  auto x = tape.constant(graph.node_features);
  auto h = encode_on_tape(tape, graph, enc, x);
  return tape.value(h);
}

inline std::vector<int> assign_codes(const Tensor& embeddings, const Tensor& codewords) {
  const int n = static_cast<int>(embeddings.rows());
  const int k = static_cast<int>(codewords.rows());
  const int d = static_cast<int>(embeddings.cols());
  std::vector<int> codes(n, 0);
  for (int i = 0; i < n; ++i) {
    double best = kInfinity;
    int best_code = 0;
    for (int c = 0; c < k; ++c) {
      double dist = 0.0;
      for (int j = 0; j < d; ++j) {
        const double diff = embeddings.at(i, j) - codewords.at(c, j);
        dist += diff * diff;
      }
      if (dist < best) {  // strict: ties keep the lowest index
        best = dist;
        best_code = c;
      }
    }
    codes[i] = best_code;
  }
  return codes;
}

struct QuantizeNodes {
  std::vector<int> codes;
  Tape::NodeId selected;       // codeword rows, gradient to the codebook
  Tape::NodeId straight;       // decoder input: H + sg[CW - H]
  Tape::NodeId codebook_loss;  // mean_i ||sg[h_i] - cw_i||^2
  Tape::NodeId commitment;     // alpha * mean_i ||sg[cw_i] - h_i||^2
};

inline QuantizeNodes quantize_on_tape(Tape& tape, Tape::NodeId embeddings,
                                      Tape::NodeId codebook, double alpha) {
  QuantizeNodes out;
  out.codes = assign_codes(tape.value(embeddings), tape.value(codebook));
  const double n = static_cast<double>(tape.value(embeddings).rows());
  out.selected = tape.row_gather(codebook, out.codes);
  auto align = tape.sub(tape.stop_gradient(embeddings), out.selected);
  out.codebook_loss = tape.scale(tape.sum(tape.mul(align, align)), 1.0 / n);
  auto commit = tape.sub(tape.stop_gradient(out.selected), embeddings);
  out.commitment = tape.scale(tape.sum(tape.mul(commit, commit)), alpha / n);
  out.straight =
      tape.add(embeddings, tape.stop_gradient(tape.sub(out.selected, embeddings)));
  return out;
}

struct DecoderNodes {
  Tape::NodeId w_node, b_node, w_edge, b_edge;
};

inline DecoderNodes register_decoder(Tape& tape, const DecoderParams& p,
                                     bool requires_grad = true) {
  return {tape.input(p.w_node, requires_grad), tape.input(p.b_node, requires_grad),
          tape.input(p.w_edge, requires_grad), tape.input(p.b_edge, requires_grad)};
}

enum class EdgeLossMode {
  kSampled,  // all true edges + equally many uniform non-edges, fresh per step
  kDense,    // balanced mean over all edges and all non-edges (N <= 200)
};

struct DecodeNodes {
  Tape::NodeId reconstructed;  // N x 10
  Tape::NodeId feat_recon;
  Tape::NodeId edge_recon;
};

namespace vq_detail {

inline std::vector<std::pair<int, int>> all_non_edges(const BipartiteGraph& g) {
  std::unordered_set<std::int64_t> edge_keys;
  for (const auto& e : g.edges)
    edge_keys.insert(static_cast<std::int64_t>(e.constraint) * g.n_variables +
                     e.variable);
  std::vector<std::pair<int, int>> out;
  for (int c = 0; c < g.n_constraints; ++c)
    for (int v = 0; v < g.n_variables; ++v)
      if (!edge_keys.count(static_cast<std::int64_t>(c) * g.n_variables + v))
        out.push_back({c, v});
  return out;
}

}  // namespace vq_detail

inline DecodeNodes decode_on_tape(Tape& tape, Tape::NodeId codewords,
                                  const BipartiteGraph& graph, Tape::NodeId features,
                                  const DecoderNodes& dec, Rng& rng,
                                  EdgeLossMode mode = EdgeLossMode::kSampled,
                                  double negative_ratio = 1.0) {
  DecodeNodes out;
  const double n = static_cast<double>(graph.num_nodes());
  out.reconstructed =
      tape.add_rowvec(tape.matmul(codewords, dec.w_node), dec.b_node);
  auto err = tape.sub(out.reconstructed, features);
  out.feat_recon = tape.scale(tape.sum(tape.mul(err, err)), 1.0 / n);

  auto z = tape.add_rowvec(tape.matmul(codewords, dec.w_edge), dec.b_edge);

  const auto pair_logits = [&](const std::vector<std::pair<int, int>>& pairs) {
    std::vector<int> left, right;
    left.reserve(pairs.size());
    right.reserve(pairs.size());
    for (const auto& [c, v] : pairs) {
      left.push_back(graph.constraint_node(c));
      right.push_back(graph.variable_node(v));
    }
    return tape.sum_rows(tape.mul(tape.row_gather(z, left), tape.row_gather(z, right)));
  };

  if (graph.edges.empty()) {
    warn("graph '" + graph.name + "' has no edges; edge reconstruction loss is 0");
    out.edge_recon = tape.constant(Tensor::scalar(0.0));
    return out;
  }

  std::vector<std::pair<int, int>> positives;
  positives.reserve(graph.edges.size());
  for (const auto& e : graph.edges) positives.push_back({e.constraint, e.variable});

  if (mode == EdgeLossMode::kDense) {
    if (graph.num_nodes() > 200)
      throw DataError("dense edge loss is restricted to N <= 200");
    const auto negatives = vq_detail::all_non_edges(graph);
    auto pos_bce = tape.bce_with_logits_mean(
        pair_logits(positives),
        Tensor::from_rows(static_cast<std::int64_t>(positives.size()), 1,
                          std::vector<double>(positives.size(), 1.0)));
    if (negatives.empty()) {
      out.edge_recon = pos_bce;
      return out;
    }
    auto neg_bce = tape.bce_with_logits_mean(
        pair_logits(negatives),
        Tensor::zeros(static_cast<std::int64_t>(negatives.size()), 1));
    out.edge_recon = tape.scale(tape.add(pos_bce, neg_bce), 0.5);
    return out;
  }

  // Sampled mode: uniform non-edges with replacement, resampled per call.
  const std::int64_t want = static_cast<std::int64_t>(
      std::llround(negative_ratio * static_cast<double>(positives.size())));
  const std::int64_t cells =
      static_cast<std::int64_t>(graph.n_constraints) * graph.n_variables;
  std::vector<std::pair<int, int>> pairs = positives;
  std::vector<double> targets(positives.size(), 1.0);
  if (cells > static_cast<std::int64_t>(graph.edges.size())) {
    std::unordered_set<std::int64_t> edge_keys;
    for (const auto& e : graph.edges)
      edge_keys.insert(static_cast<std::int64_t>(e.constraint) * graph.n_variables +
                       e.variable);
    const bool sparse_enough =
        static_cast<double>(graph.edges.size()) < 0.5 * static_cast<double>(cells);
    std::vector<std::pair<int, int>> non_edges;
    if (!sparse_enough) non_edges = vq_detail::all_non_edges(graph);
    for (std::int64_t t = 0; t < want; ++t) {
      if (sparse_enough) {
        for (;;) {
          const int c = rng.below_int(graph.n_constraints);
          const int v = rng.below_int(graph.n_variables);
          if (edge_keys.count(static_cast<std::int64_t>(c) * graph.n_variables + v))
            continue;
          pairs.push_back({c, v});
          break;
        }
      } else {
        pairs.push_back(non_edges[rng.below(non_edges.size())]);
      }
      targets.push_back(0.0);
    }
  }
  const std::int64_t pair_count = static_cast<std::int64_t>(targets.size());
  out.edge_recon = tape.bce_with_logits_mean(
      pair_logits(pairs), Tensor::from_rows(pair_count, 1, std::move(targets)));
  return out;
}

struct ForwardNodes {
  EncoderNodes encoder;
  Tape::NodeId codebook;
  DecoderNodes decoder;
  Tape::NodeId features;
  Tape::NodeId embeddings;  // H
  QuantizeNodes quantize;
  DecodeNodes decode;
  Tape::NodeId total;
  LossBreakdown loss;
};

// Full pass: encode -> quantize -> decode, loss terms summed on the tape.
inline ForwardNodes total_loss_on_tape(Tape& tape, const BipartiteGraph& graph,
                                       const VqGaeParams& params, Rng& rng,
                                       EdgeLossMode mode = EdgeLossMode::kSampled) {
  ForwardNodes f;
  f.encoder = register_encoder(tape, params.encoder);
  f.codebook = tape.input(params.codebook.codewords, true);
  f.decoder = register_decoder(tape, params.decoder);
  f.features = tape.constant(graph.node_features);
  f.embeddings = encode_on_tape(tape, graph, f.encoder, f.features);
  f.quantize = quantize_on_tape(tape, f.embeddings, f.codebook, params.alpha);
  f.decode = decode_on_tape(tape, f.quantize.straight, graph, f.features, f.decoder,
                            rng, mode, params.negative_ratio);
  f.total = tape.add(tape.add(f.decode.edge_recon, f.decode.feat_recon),
                     tape.add(f.quantize.codebook_loss, f.quantize.commitment));
  f.loss.edge_recon = tape.value(f.decode.edge_recon).data[0];
  f.loss.feat_recon = tape.value(f.decode.feat_recon).data[0];
  f.loss.codebook = tape.value(f.quantize.codebook_loss).data[0];
  f.loss.commitment = tape.value(f.quantize.commitment).data[0];
  f.loss.total = tape.value(f.total).data[0];
  f.loss.alpha = params.alpha;
  return f;
}

// Mean squared error between the binary adjacency and sigmoid pair scores
// over all constraint x variable cells; value-only diagnostic, N <= 200.
inline double adjacency_mse(const BipartiteGraph& graph, const VqGaeParams& params) {
  if (graph.num_nodes() > 200)
    throw DataError("adjacency_mse is restricted to N <= 200");
  Tape tape;
  auto enc = register_encoder(tape, params.encoder, false);
  auto dec = register_decoder(tape, params.decoder, false);
  auto cb = tape.constant(params.codebook.codewords);
  auto x = tape.constant(graph.node_features);
  auto h = encode_on_tape(tape, graph, enc, x);
  auto q = quantize_on_tape(tape, h, cb, params.alpha);
  auto z = tape.add_rowvec(tape.matmul(q.straight, dec.w_edge), dec.b_edge);
  const Tensor& zv = tape.value(z);

  std::unordered_set<std::int64_t> edge_keys;
  for (const auto& e : graph.edges)
    edge_keys.insert(static_cast<std::int64_t>(e.constraint) * graph.n_variables +
                     e.variable);
  double acc = 0.0;
  long long cells = 0;
  for (int c = 0; c < graph.n_constraints; ++c)
    for (int v = 0; v < graph.n_variables; ++v) {
      double logit = 0.0;
      for (int j = 0; j < zv.cols(); ++j)
        logit += zv.at(c, j) * zv.at(graph.variable_node(v), j);
      const double score = 1.0 / (1.0 + std::exp(-logit));
      const double target =
          edge_keys.count(static_cast<std::int64_t>(c) * graph.n_variables + v) ? 1.0
                                                                                : 0.0;
      acc += (score - target) * (score - target);
      ++cells;
    }
  return cells == 0 ? 0.0 : acc / static_cast<double>(cells);
}

}  // namespace forge
