#pragma once

// Supervised fine-tuning on top of a pre-trained checkpoint.
//
// Gap head: mean readout over codewords -> dense head -> 1 + softplus
// (mirrored for maximization), trained with mean absolute error. The
// quantization terms stay in the objective so the codebook keeps moving
// through its alignment loss exactly as in pre-training; decoders are
// untouched.
//
// Guidance head: per-variable encoder embedding -> dense head -> logit,
// trained with BCE plus an equally weighted triplet hinge whose negatives
// are mined as the nearest zero-solution-count variable in the unsupervised
// embedding space. The head reads the pre-quantization embeddings (the
// straight-through estimator gives the same gradients either way, and the
// quantized values collapse within-instance variation at desk-scale k);
// hint-selection distances stay on the codewords.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "forge/bipartite.hpp"
#include "forge/checkpoint.hpp"
#include "forge/common.hpp"
#include "forge/embeddings.hpp"
#include "forge/minisolve.hpp"
#include "forge/optimizer.hpp"
#include "forge/rng.hpp"
#include "forge/tape.hpp"
#include "forge/trainer.hpp"
#include "forge/vqgae.hpp"

namespace forge {

struct FinetuneOptions {
  int epochs = 10;
  double learning_rate = 1e-4;
  int hidden = 32;
  bool from_scratch = false;  // random weights instead of the checkpoint's
  std::uint64_t seed = 1;

  static FinetuneOptions gap_defaults() { return {}; }
  static FinetuneOptions guidance_defaults() {
    FinetuneOptions o;
    o.epochs = 25;
    o.learning_rate = 1e-5;
    return o;
  }
};

inline constexpr double kTripletMargin = 2.0;

namespace heads_detail {

struct HeadNodes {
  Tape::NodeId w1, b1, w2, b2;
};

inline HeadNodes register_head(Tape& tape, const Tensor& w1, const Tensor& b1,
                               const Tensor& w2, const Tensor& b2) {
  return {tape.input(w1, true), tape.input(b1, true), tape.input(w2, true),
          tape.input(b2, true)};
}

inline Tape::NodeId head_logits(Tape& tape, Tape::NodeId rows, const HeadNodes& h) {
  auto hidden = tape.relu(tape.add_rowvec(tape.matmul(rows, h.w1), h.b1));
  return tape.add_rowvec(tape.matmul(hidden, h.w2), h.b2);
}

// g_hat = 1 + softplus(raw) for minimization, 1 - softplus(raw) otherwise.
inline Tape::NodeId gap_output(Tape& tape, Tape::NodeId raw, bool maximize) {
  return tape.add_const(tape.scale(tape.softplus(raw), maximize ? -1.0 : 1.0), 1.0);
}

}  // namespace heads_detail

// Shared encoder+quantizer forward used by both heads (no decoders).
struct ForwardNodesLite {
  EncoderNodes encoder;
  Tape::NodeId codebook;
  Tape::NodeId features;
  Tape::NodeId embeddings;
  QuantizeNodes quantize;
};

inline ForwardNodesLite encode_quantize_on_tape(Tape& tape,
                                                const BipartiteGraph& graph,
                                                const VqGaeParams& params) {
  ForwardNodesLite f;
  f.encoder = register_encoder(tape, params.encoder);
  f.codebook = tape.input(params.codebook.codewords, true);
  f.features = tape.constant(graph.node_features);
  f.embeddings = encode_on_tape(tape, graph, f.encoder, f.features);
  f.quantize = quantize_on_tape(tape, f.embeddings, f.codebook, params.alpha);
  return f;
}

inline std::vector<Tape::NodeId> lite_param_nodes(const ForwardNodesLite& f) {
  return {f.encoder.w_self1, f.encoder.w_nbr1, f.encoder.b1, f.encoder.w_self2,
          f.encoder.w_nbr2,  f.encoder.b2,     f.codebook};
}

inline std::vector<Tensor*> lite_param_ptrs(VqGaeParams& p) {
  return {&p.encoder.w_self1, &p.encoder.w_nbr1, &p.encoder.b1, &p.encoder.w_self2,
          &p.encoder.w_nbr2,  &p.encoder.b2,     &p.codebook.codewords};
}

// ---------------------------------------------------------------------------
// Integrality-gap head.
// ---------------------------------------------------------------------------

inline Checkpoint finetune_gap(const Checkpoint& base,
                               const std::vector<MipInstance>& instances,
                               const std::vector<double>& labels,
                               const FinetuneOptions& opts) {
  if (instances.empty()) throw DataError("finetune_gap: empty corpus");
  if (instances.size() != labels.size())
    throw DataError("finetune_gap: instance/label count mismatch");

  Checkpoint ckpt = base;
  std::vector<BipartiteGraph> graphs;
  graphs.reserve(instances.size());
  for (const auto& inst : instances)
    graphs.push_back(apply_feature_scale(to_bipartite(inst), ckpt.scale));

  if (opts.from_scratch) {
    ckpt.params = init_params(ckpt.config.d, ckpt.config.k,
                              ckpt.config.effective_edge_dim(), ckpt.config.alpha,
                              splitmix64(opts.seed ^ hash_tag("scratch")));
    Rng cb_rng = Rng::split(opts.seed, "scratch-codebook");
    seed_codebook(ckpt.params.codebook,
                  encode_values(graphs.front(), ckpt.params.encoder), cb_rng);
  }

  Rng init_rng = Rng::split(opts.seed, "gap-head-init");
  GapHeadParams head;
  head.w1 = vq_detail::xavier(ckpt.config.d, opts.hidden, init_rng);
  head.b1 = Tensor::zeros(1, opts.hidden);
  head.w2 = vq_detail::xavier(opts.hidden, 1, init_rng);
  head.b2 = Tensor::zeros(1, 1);

  AdamState opt;
  opt.learning_rate = opts.learning_rate;
  std::vector<int> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
    Rng epoch_rng = Rng::split(opts.seed, "gap-epoch", epoch);
    epoch_rng.shuffle(order);
    for (int idx : order) {
      const BipartiteGraph& g = graphs[idx];
      Tape tape;
      auto f = encode_quantize_on_tape(tape, g, ckpt.params);
      auto h = heads_detail::register_head(tape, head.w1, head.b1, head.w2, head.b2);
      std::vector<int> pool_segments(g.num_nodes(), 0);
      auto pooled = tape.segment_mean(f.quantize.straight, pool_segments, 1);
      auto prediction = heads_detail::gap_output(
          tape, heads_detail::head_logits(tape, pooled, h), g.objective_flipped);
      auto mae = tape.abs(tape.sub(
          prediction, tape.constant(Tensor::from_rows(1, 1, {labels[idx]}))));
      auto loss = tape.add(tape.sum(mae),
                           tape.add(f.quantize.codebook_loss, f.quantize.commitment));
      tape.backward(loss);

      std::vector<Tensor*> params = lite_param_ptrs(ckpt.params);
      params.insert(params.end(), {&head.w1, &head.b1, &head.w2, &head.b2});
      std::vector<Tape::NodeId> nodes = lite_param_nodes(f);
      nodes.insert(nodes.end(), {h.w1, h.b1, h.w2, h.b2});
      std::vector<Tensor> grads;
      grads.reserve(nodes.size());
      for (auto id : nodes) grads.push_back(tape.grad(id));
      adam_step(params, grads, opt);
    }
  }

  // Clamp hulls from the training labels, per objective sense.
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const bool maximize = graphs[i].objective_flipped;
    if (maximize) {
      if (!head.has_max_hull) {
        head.max_lo = head.max_hi = labels[i];
        head.has_max_hull = true;
      }
      head.max_lo = std::min(head.max_lo, labels[i]);
      head.max_hi = std::max(head.max_hi, labels[i]);
    } else {
      if (!head.has_min_hull) {
        head.min_lo = head.min_hi = labels[i];
        head.has_min_hull = true;
      }
      head.min_lo = std::min(head.min_lo, labels[i]);
      head.min_hi = std::max(head.min_hi, labels[i]);
    }
  }

  ckpt.has_gap_head = true;
  ckpt.gap_head = head;
  return ckpt;
}

// Raw (unclamped) head output for a scaled graph.
inline double predict_gap_raw(const Checkpoint& ckpt, const BipartiteGraph& graph) {
  if (!ckpt.has_gap_head) throw DataError("checkpoint has no gap head");
  Tape tape;
  auto enc = register_encoder(tape, ckpt.params.encoder, false);
  auto cb = tape.constant(ckpt.params.codebook.codewords);
  auto x = tape.constant(graph.node_features);
  auto h = encode_on_tape(tape, graph, enc, x);
  auto q = quantize_on_tape(tape, h, cb, ckpt.params.alpha);
  auto w1 = tape.constant(ckpt.gap_head.w1);
  auto b1 = tape.constant(ckpt.gap_head.b1);
  auto w2 = tape.constant(ckpt.gap_head.w2);
  auto b2 = tape.constant(ckpt.gap_head.b2);
  std::vector<int> pool_segments(graph.num_nodes(), 0);
  auto pooled = tape.segment_mean(q.straight, pool_segments, 1);
  auto hidden = tape.relu(tape.add_rowvec(tape.matmul(pooled, w1), b1));
  auto raw = tape.add_rowvec(tape.matmul(hidden, w2), b2);
  auto pred = heads_detail::gap_output(tape, raw, graph.objective_flipped);
  return tape.value(pred).data[0];
}

// Prediction clamped into the hull of training labels for the sense.
inline double predict_gap(const Checkpoint& ckpt, const MipInstance& instance) {
  const BipartiteGraph g = apply_feature_scale(to_bipartite(instance), ckpt.scale);
  double pred = predict_gap_raw(ckpt, g);
  const bool maximize = g.objective_flipped;
  const GapHeadParams& head = ckpt.gap_head;
  if (maximize && head.has_max_hull)
    pred = std::clamp(pred, head.max_lo, head.max_hi);
  else if (!maximize && head.has_min_hull)
    pred = std::clamp(pred, head.min_lo, head.min_hi);
  return pred;
}

struct GapCutResult {
  double predicted_gap = 1.0;
  double z_lp = 0.0;
  double bound = 0.0;
  MipInstance with_cut;
};

// bound = z_LP * (1 + shrink * (g_hat - 1)); shrink 0 degenerates to the
// always-valid LP bound.
inline GapCutResult predict_gap_and_cut(const Checkpoint& ckpt,
                                        const MipInstance& instance,
                                        double safety_shrink) {
  if (safety_shrink < 0.0 || safety_shrink > 1.0)
    throw DataError("safety_shrink must be in [0,1]");
  const LpSolution lp = solve_lp(instance);
  if (lp.status != LpStatus::kOptimal)
    throw DataError("pseudo-cut needs an optimal LP relaxation");
  if (std::abs(lp.objective) < 1e-9)
    throw DataError("pseudo-cut needs a nonzero LP objective");
  GapCutResult out;
  out.z_lp = lp.objective;
  out.predicted_gap = predict_gap(ckpt, instance);
  out.bound = lp.objective * (1.0 + safety_shrink * (out.predicted_gap - 1.0));
  out.with_cut = add_pseudo_cut(instance, out.bound);
  return out;
}

struct GapReportRow {
  std::string instance;
  double z_lp = 0.0;
  double predicted_gap = 0.0;
  double bound = 0.0;
  bool has_label = false;
  double label = 0.0;
};

inline void write_gap_report(const std::vector<GapReportRow>& rows,
                             std::ostream& out) {
  out << "instance,z_lp,predicted_gap,bound,label,abs_error\n";
  for (const auto& r : rows) {
    out << r.instance << "," << r.z_lp << "," << r.predicted_gap << "," << r.bound;
    if (r.has_label)
      out << "," << r.label << "," << std::abs(r.predicted_gap - r.label);
    else
      out << ",,";
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Variable-guidance head.
// ---------------------------------------------------------------------------

struct GuidanceLabels {
  std::vector<int> variable_indices;  // binary variables of the instance
  std::vector<int> group;             // how many pool solutions contain each
  std::vector<char> positive;         // group >= 1
};

// "contains" means value >= 0.5 in a pool solution; groups partition the
// binary variables by containment count 0..pool size.
inline GuidanceLabels build_guidance_labels(const MipInstance& instance,
                                            const std::vector<PoolEntry>& pool,
                                            int expected_pool_size = 5) {
  if (static_cast<int>(pool.size()) < expected_pool_size)
    warn("solution pool for '" + instance.name + "' has " +
         std::to_string(pool.size()) + " entries, expected " +
         std::to_string(expected_pool_size) + "; proceeding");
  GuidanceLabels out;
  for (int j = 0; j < instance.num_variables(); ++j) {
    if (instance.variables[j].type != VarType::kBinary) continue;
    int count = 0;
    for (const auto& entry : pool)
      if (entry.values[j] >= 0.5) ++count;
    out.variable_indices.push_back(j);
    out.group.push_back(count);
    out.positive.push_back(count >= 1 ? 1 : 0);
  }
  if (out.variable_indices.empty())
    throw DataError("guidance labels need binary variables");
  return out;
}

struct Triplet {
  int anchor = 0;    // variable indices into the instance
  int positive = 0;
  int negative = 0;
};

struct TripletSet {
  std::vector<Triplet> triplets;
  double margin = kTripletMargin;
};

// Anchors and positives share a solution-count group; the negative is the
// zero-count variable nearest to the anchor's codeword.
inline TripletSet mine_triplets(const GuidanceLabels& labels,
                                const Tensor& variable_codewords, Rng& rng,
                                int positives_per_anchor = 4, int cap = 10000) {
  TripletSet out;
  std::vector<int> negatives;
  for (std::size_t i = 0; i < labels.variable_indices.size(); ++i)
    if (labels.group[i] == 0) negatives.push_back(labels.variable_indices[i]);
  if (negatives.empty()) {
    warn("no negative variables (all appear in some solution); no triplets mined");
    return out;
  }

  const auto nearest_negative = [&](int anchor_var) {
    double best = kInfinity;
    int best_var = negatives.front();
    for (int neg : negatives) {
      double dist = 0.0;
      for (std::int64_t c = 0; c < variable_codewords.cols(); ++c) {
        const double d =
            variable_codewords.at(anchor_var, c) - variable_codewords.at(neg, c);
        dist += d * d;
      }
      if (dist < best) {
        best = dist;
        best_var = neg;
      }
    }
    return best_var;
  };

  // Collect members per nonzero group.
  std::vector<std::vector<int>> by_group;
  {
    int max_group = 0;
    for (int g : labels.group) max_group = std::max(max_group, g);
    by_group.assign(max_group + 1, {});
    for (std::size_t i = 0; i < labels.variable_indices.size(); ++i)
      if (labels.group[i] >= 1)
        by_group[labels.group[i]].push_back(labels.variable_indices[i]);
  }

  for (const auto& members : by_group) {
    if (members.size() < 2) continue;
    for (int anchor : members) {
      const int negative = nearest_negative(anchor);
      for (int t = 0; t < positives_per_anchor; ++t) {
        int positive = members[rng.below(members.size())];
        while (positive == anchor) positive = members[rng.below(members.size())];
        out.triplets.push_back({anchor, positive, negative});
        if (static_cast<int>(out.triplets.size()) >= cap) return out;
      }
    }
  }
  return out;
}

inline double triplet_hinge(double d_ap, double d_an, double margin = kTripletMargin) {
  return std::max(d_ap - d_an + margin, 0.0);
}

struct GuidanceExample {
  MipInstance instance;
  std::vector<PoolEntry> pool;
};

inline Checkpoint finetune_guidance(const Checkpoint& base,
                                    const std::vector<GuidanceExample>& corpus,
                                    const FinetuneOptions& opts) {
  if (corpus.empty()) throw DataError("finetune_guidance: empty corpus");

  Checkpoint ckpt = base;
  std::vector<BipartiteGraph> graphs;
  std::vector<GuidanceLabels> labels;
  std::vector<TripletSet> triplets;
  graphs.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    graphs.push_back(apply_feature_scale(to_bipartite(corpus[i].instance), ckpt.scale));
    labels.push_back(build_guidance_labels(corpus[i].instance, corpus[i].pool));
    // Hard negatives come from the unsupervised embedding space of `base`.
    NodeEmbeddings nodes = node_embeddings(graphs.back(), base);
    Tensor var_codewords = Tensor::zeros(graphs.back().n_variables, base.params.dim());
    for (int j = 0; j < graphs.back().n_variables; ++j)
      for (int c = 0; c < base.params.dim(); ++c)
        var_codewords.at(j, c) = nodes.codewords.at(graphs.back().variable_node(j), c);
    Rng mine_rng = Rng::split(opts.seed, "mine", i);
    triplets.push_back(mine_triplets(labels.back(), var_codewords, mine_rng));
  }

  Rng init_rng = Rng::split(opts.seed, "guide-head-init");
  GuidanceHeadParams head;
  head.w1 = vq_detail::xavier(ckpt.config.d, opts.hidden, init_rng);
  head.b1 = Tensor::zeros(1, opts.hidden);
  head.w2 = vq_detail::xavier(opts.hidden, 1, init_rng);
  head.b2 = Tensor::zeros(1, 1);

  AdamState opt;
  opt.learning_rate = opts.learning_rate;
  std::vector<int> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= opts.epochs; ++epoch) {
    Rng epoch_rng = Rng::split(opts.seed, "guide-epoch", epoch);
    epoch_rng.shuffle(order);
    for (int idx : order) {
      const BipartiteGraph& g = graphs[idx];
      const GuidanceLabels& lab = labels[idx];
      Tape tape;
      auto f = encode_quantize_on_tape(tape, g, ckpt.params);
      auto h = heads_detail::register_head(tape, head.w1, head.b1, head.w2, head.b2);

      std::vector<int> var_nodes;
      var_nodes.reserve(lab.variable_indices.size());
      for (int j : lab.variable_indices) var_nodes.push_back(g.variable_node(j));
      auto logits = heads_detail::head_logits(
          tape, tape.row_gather(f.embeddings, var_nodes), h);
      Tensor targets = Tensor::zeros(static_cast<std::int64_t>(lab.positive.size()), 1);
      for (std::size_t i = 0; i < lab.positive.size(); ++i)
        targets.data[i] = lab.positive[i] ? 1.0 : 0.0;
      auto bce = tape.bce_with_logits_mean(logits, std::move(targets));

      Tape::NodeId triplet_term;
      const TripletSet& ts = triplets[idx];
      if (ts.triplets.empty()) {
        triplet_term = tape.constant(Tensor::scalar(0.0));
      } else {
        std::vector<int> a_nodes, p_nodes, n_nodes;
        for (const auto& t : ts.triplets) {
          a_nodes.push_back(g.variable_node(t.anchor));
          p_nodes.push_back(g.variable_node(t.positive));
          n_nodes.push_back(g.variable_node(t.negative));
        }
        auto anchor_rows = tape.row_gather(f.embeddings, a_nodes);
        auto pos_rows = tape.row_gather(f.embeddings, p_nodes);
        auto neg_rows = tape.row_gather(f.embeddings, n_nodes);
        auto dp = tape.sub(anchor_rows, pos_rows);
        auto dn = tape.sub(anchor_rows, neg_rows);
        auto d_ap = tape.sqrt_eps(tape.sum_rows(tape.mul(dp, dp)));
        auto d_an = tape.sqrt_eps(tape.sum_rows(tape.mul(dn, dn)));
        triplet_term =
            tape.mean(tape.relu(tape.add_const(tape.sub(d_ap, d_an), ts.margin)));
      }

      auto loss = tape.add(tape.add(bce, triplet_term),
                           tape.add(f.quantize.codebook_loss, f.quantize.commitment));
      tape.backward(loss);

      std::vector<Tensor*> params = lite_param_ptrs(ckpt.params);
      params.insert(params.end(), {&head.w1, &head.b1, &head.w2, &head.b2});
      std::vector<Tape::NodeId> nodes = lite_param_nodes(f);
      nodes.insert(nodes.end(), {h.w1, h.b1, h.w2, h.b2});
      std::vector<Tensor> grads;
      grads.reserve(nodes.size());
      for (auto id : nodes) grads.push_back(tape.grad(id));
      adam_step(params, grads, opt);
    }
  }

  ckpt.has_guidance_head = true;
  ckpt.guidance_head = head;
  return ckpt;
}

// Sigmoid scores per variable (all variables, by instance index).
inline std::vector<double> guidance_scores(const Checkpoint& ckpt,
                                           const BipartiteGraph& scaled_graph) {
  if (!ckpt.has_guidance_head) throw DataError("checkpoint has no guidance head");
  Tape tape;
  auto enc = register_encoder(tape, ckpt.params.encoder, false);
  auto x = tape.constant(scaled_graph.node_features);
  auto h = encode_on_tape(tape, scaled_graph, enc, x);
  std::vector<int> var_nodes;
  for (int j = 0; j < scaled_graph.n_variables; ++j)
    var_nodes.push_back(scaled_graph.variable_node(j));
  auto rows = tape.row_gather(h, var_nodes);
  auto w1 = tape.constant(ckpt.guidance_head.w1);
  auto b1 = tape.constant(ckpt.guidance_head.b1);
  auto w2 = tape.constant(ckpt.guidance_head.w2);
  auto b2 = tape.constant(ckpt.guidance_head.b2);
  auto hidden = tape.relu(tape.add_rowvec(tape.matmul(rows, w1), b1));
  auto scores = tape.sigmoid(tape.add_rowvec(tape.matmul(hidden, w2), b2));
  const Tensor& v = tape.value(scores);
  return std::vector<double>(v.data.begin(), v.data.end());
}

struct HintSet {
  std::vector<std::string> include;  // hint value 1
  std::vector<std::string> exclude;  // hint value 0
};

// Include: within `radius` of a positive anchor's codeword AND in the strict
// top decile of head scores. Exclude: mirrored with negative anchors and the
// bottom decile. Variables qualifying for both are dropped from both.
// Codewords are scaled to unit mean norm so the radius is width-comparable.
inline HintSet select_hints(const Checkpoint& ckpt, const MipInstance& instance,
                            const std::vector<double>& anchor_solution,
                            double radius = 0.1) {
  if (anchor_solution.size() != static_cast<std::size_t>(instance.num_variables()))
    throw DataError("anchor solution length mismatch");
  const BipartiteGraph g = apply_feature_scale(to_bipartite(instance), ckpt.scale);
  const NodeEmbeddings nodes = node_embeddings(g, ckpt);
  const std::vector<double> scores = guidance_scores(ckpt, g);

  std::vector<int> binary_vars;
  for (int j = 0; j < instance.num_variables(); ++j)
    if (instance.variables[j].type == VarType::kBinary) binary_vars.push_back(j);
  if (binary_vars.empty()) return {};

  // Unit-mean-norm scaling over the binary variables' codewords.
  const int d = ckpt.params.dim();
  double mean_norm = 0.0;
  for (int j : binary_vars) {
    double norm = 0.0;
    for (int c = 0; c < d; ++c) {
      const double v = nodes.codewords.at(g.variable_node(j), c);
      norm += v * v;
    }
    mean_norm += std::sqrt(norm);
  }
  mean_norm /= static_cast<double>(binary_vars.size());
  const double inv_scale = mean_norm > 1e-12 ? 1.0 / mean_norm : 1.0;

  std::vector<int> pos_anchors, neg_anchors;
  for (int j : binary_vars)
    (anchor_solution[j] >= 0.5 ? pos_anchors : neg_anchors).push_back(j);

  const auto dist_to = [&](int var, const std::vector<int>& anchors) {
    double best = kInfinity;
    for (int a : anchors) {
      double dist = 0.0;
      for (int c = 0; c < d; ++c) {
        const double diff = (nodes.codewords.at(g.variable_node(var), c) -
                             nodes.codewords.at(g.variable_node(a), c)) *
                            inv_scale;
        dist += diff * diff;
      }
      best = std::min(best, std::sqrt(dist));
    }
    return best;
  };

  // Strict decile thresholds (nearest-rank); uniform scores select nothing.
  std::vector<double> binary_scores;
  for (int j : binary_vars) binary_scores.push_back(scores[j]);
  std::vector<double> sorted = binary_scores;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t last = sorted.size() - 1;
  const double q90 = sorted[static_cast<std::size_t>(0.9 * static_cast<double>(last))];
  const double q10 = sorted[static_cast<std::size_t>(
      std::ceil(0.1 * static_cast<double>(last)))];

  std::vector<std::string> include, exclude;
  for (std::size_t i = 0; i < binary_vars.size(); ++i) {
    const int j = binary_vars[i];
    const bool in_top = binary_scores[i] > q90;
    const bool in_bottom = binary_scores[i] < q10;
    const bool near_pos = !pos_anchors.empty() && dist_to(j, pos_anchors) <= radius;
    const bool near_neg = !neg_anchors.empty() && dist_to(j, neg_anchors) <= radius;
    const bool inc = near_pos && in_top;
    const bool exc = near_neg && in_bottom;
    if (inc && exc) continue;  // conflicting evidence, drop from both
    if (inc) include.push_back(instance.variables[j].name);
    if (exc) exclude.push_back(instance.variables[j].name);
  }
  return {std::move(include), std::move(exclude)};
}

// Hint file: "variable_name value" with 1 for include, 0 for exclude.
inline std::string write_hints(const HintSet& hints) {
  std::ostringstream out;
  for (const auto& name : hints.include) out << name << " 1\n";
  for (const auto& name : hints.exclude) out << name << " 0\n";
  return out.str();
}

}  // namespace forge
