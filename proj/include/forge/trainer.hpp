#pragma once

// Unsupervised pre-training loop. The training set is every manifest
// instance plus one constraint-dropped copy per augmentation fraction; one
// optimizer step per graph in seeded shuffled order. Codes unused for a full
// epoch are reseeded from a reservoir of recent embeddings.

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "forge/bipartite.hpp"
#include "forge/checkpoint.hpp"
#include "forge/generators.hpp"
#include "forge/mps.hpp"
#include "forge/optimizer.hpp"
#include "forge/rng.hpp"
#include "forge/vqgae.hpp"

namespace forge {

inline std::vector<MipInstance> load_corpus(const CorpusManifest& manifest) {
  std::vector<MipInstance> out;
  out.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    std::ifstream in(entry.path);
    if (!in) throw DataError("cannot open instance " + entry.path);
    try {
      out.push_back(parse_mps(in));
    } catch (const ParseError& e) {
      throw DataError(entry.path + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Tape::NodeId> forward_param_nodes(const ForwardNodes& f) {
  // Order matches VqGaeParams::parameter_list().
  return {f.encoder.w_self1, f.encoder.w_nbr1, f.encoder.b1,
          f.encoder.w_self2, f.encoder.w_nbr2, f.encoder.b2,
          f.codebook,
          f.decoder.w_node,  f.decoder.b_node,
          f.decoder.w_edge,  f.decoder.b_edge};
}

// originals first, then one constraint-dropped copy per (instance, fraction).
inline std::vector<BipartiteGraph> build_training_graphs(
    const std::vector<MipInstance>& originals, const TrainConfig& config) {
  std::vector<BipartiteGraph> graphs;
  graphs.reserve(originals.size() * (1 + config.augment_fractions.size()));
  for (const auto& inst : originals) graphs.push_back(to_bipartite(inst));
  for (std::size_t i = 0; i < originals.size(); ++i)
    for (std::size_t fi = 0; fi < config.augment_fractions.size(); ++fi) {
      const std::uint64_t aug_seed =
          splitmix64(config.seed ^ hash_tag("augment") ^
                     splitmix64(i * 131071ULL + fi));
      graphs.push_back(to_bipartite(
          drop_constraints(originals[i], config.augment_fractions[fi], aug_seed)));
    }
  return graphs;
}

inline Checkpoint pretrain(const CorpusManifest& manifest, const TrainConfig& config,
                           std::ostream* log = nullptr) {
  if (config.epochs < 1) throw DataError("epochs must be >= 1");
  if (config.k < 2) throw DataError("codebook size must be >= 2");
  for (double f : config.augment_fractions)
    if (f < 0.0 || f >= 1.0) throw DataError("augment fractions must be in [0,1)");

  const std::vector<MipInstance> originals = load_corpus(manifest);
  if (originals.empty()) throw DataError("empty training corpus");

  std::vector<BipartiteGraph> graphs = build_training_graphs(originals, config);
  const FeatureScale scale = fit_feature_scale(graphs);
  for (auto& g : graphs) g = apply_feature_scale(g, scale);

  Checkpoint ckpt;
  ckpt.config = config;
  ckpt.scale = scale;
  ckpt.params = init_params(config.d, config.k, config.effective_edge_dim(),
                            config.alpha, config.seed);
  ckpt.params.negative_ratio = config.negative_ratio;

  std::vector<int> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng order_rng = Rng::split(config.seed, "epoch-order", 1);
  order_rng.shuffle(order);
  {
    Rng cb_rng = Rng::split(config.seed, "codebook-seed");
    seed_codebook(ckpt.params.codebook,
                  encode_values(graphs[order[0]], ckpt.params.encoder), cb_rng);
  }

  AdamState opt;
  opt.learning_rate = config.learning_rate;
  auto params = ckpt.params.parameter_list();

  // Reservoir of recent embedding rows for dead-code reseeding.
  Tensor reservoir = Tensor::zeros(256, config.d);
  std::int64_t reservoir_fill = 0;

  if (log)
    (*log) << "epoch,edge_recon,feat_recon,codebook,commitment,total,"
              "dead_code_fraction\n";

  long long step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (epoch > 1) {
      Rng epoch_rng = Rng::split(config.seed, "epoch-order", epoch);
      epoch_rng.shuffle(order);
    }
    EpochStats stats;
    std::vector<long long> usage(config.k, 0);
    Rng reservoir_rng = Rng::split(config.seed, "reservoir", epoch);

    for (int idx : order) {
      const BipartiteGraph& g = graphs[idx];
      Tape tape;
      Rng step_rng = Rng::split(config.seed, "step", epoch, step);
      ForwardNodes f = total_loss_on_tape(tape, g, ckpt.params, step_rng);
      tape.backward(f.total);

      std::vector<Tensor> grads;
      grads.reserve(params.size());
      for (auto id : forward_param_nodes(f)) grads.push_back(tape.grad(id));
      adam_step(params, grads, opt);

      for (int code : f.quantize.codes) ++usage[code];
      const Tensor& h = tape.value(f.embeddings);
      for (int t = 0; t < 4 && h.rows() > 0; ++t) {
        const int row = reservoir_rng.below_int(static_cast<int>(h.rows()));
        const std::int64_t slot =
            reservoir_fill < reservoir.rows()
                ? reservoir_fill
                : static_cast<std::int64_t>(reservoir_rng.below(
                      static_cast<std::uint64_t>(reservoir.rows())));
        for (int c = 0; c < config.d; ++c)
          reservoir.at(slot, c) = h.at(row, c);
        if (reservoir_fill < reservoir.rows()) ++reservoir_fill;
      }

      stats.edge_recon += f.loss.edge_recon;
      stats.feat_recon += f.loss.feat_recon;
      stats.codebook += f.loss.codebook;
      stats.commitment += f.loss.commitment;
      stats.total += f.loss.total;
      ++step;
    }

    const double denom = static_cast<double>(graphs.size());
    stats.edge_recon /= denom;
    stats.feat_recon /= denom;
    stats.codebook /= denom;
    stats.commitment /= denom;
    stats.total /= denom;
    int dead = 0;
    for (long long u : usage)
      if (u == 0) ++dead;
    stats.dead_code_fraction = static_cast<double>(dead) / config.k;
    ckpt.history.push_back(stats);
    ckpt.params.codebook.usage = usage;

    if (log)
      (*log) << epoch << "," << stats.edge_recon << "," << stats.feat_recon << ","
             << stats.codebook << "," << stats.commitment << "," << stats.total
             << "," << stats.dead_code_fraction << "\n";

    if (epoch < config.epochs && reservoir_fill > 0) {
      Rng reseed_rng = Rng::split(config.seed, "reseed", epoch);
      for (int code = 0; code < config.k; ++code) {
        if (usage[code] != 0) continue;
        const std::int64_t row = static_cast<std::int64_t>(
            reseed_rng.below(static_cast<std::uint64_t>(reservoir_fill)));
        for (int c = 0; c < config.d; ++c)
          ckpt.params.codebook.codewords.at(code, c) =
              reservoir.at(row, c) + 0.01 * reseed_rng.normal();
      }
    }
  }
  return ckpt;
}

struct CodebookReport {
  std::vector<long long> counts;
  long long total_nodes = 0;
  double dead_fraction = 0.0;
};

inline CodebookReport codebook_report(const Checkpoint& ckpt,
                                      const CorpusManifest& manifest) {
  CodebookReport report;
  report.counts.assign(ckpt.config.k, 0);
  for (const auto& inst : load_corpus(manifest)) {
    const BipartiteGraph g = apply_feature_scale(to_bipartite(inst), ckpt.scale);
    const Tensor h = encode_values(g, ckpt.params.encoder);
    for (int code : assign_codes(h, ckpt.params.codebook.codewords)) {
      ++report.counts[code];
      ++report.total_nodes;
    }
  }
  int dead = 0;
  for (long long c : report.counts)
    if (c == 0) ++dead;
  report.dead_fraction = static_cast<double>(dead) / ckpt.config.k;
  return report;
}

}  // namespace forge
