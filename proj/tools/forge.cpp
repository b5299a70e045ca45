// forge: command-line front end wiring the pipeline together.
//
//   gen            generate a synthetic MPS corpus + manifest
//   pretrain       unsupervised pre-training -> checkpoint + loss CSV
//   embed          code-histogram embedding store (CSV and/or binary)
//   cluster        k-means + NMI against (family,size) truth, with baselines
//   arith          covering/packing embedding arithmetic check
//   finetune-gap   integrality-gap head fine-tuning (labels from minisolve)
//   cut            pseudo-cut emission for one instance
//   finetune-guide variable-guidance head fine-tuning (pools from minisolve)
//   hints          hint file for one instance
//   report         gap-prediction report CSV / codebook usage report
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 numeric failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "forge/analysis.hpp"
#include "forge/embeddings.hpp"
#include "forge/generators.hpp"
#include "forge/heads.hpp"
#include "forge/labeling.hpp"
#include "forge/minisolve.hpp"
#include "forge/mps.hpp"
#include "forge/trainer.hpp"

namespace fs = std::filesystem;
using namespace forge;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FORGE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw DataError("FORGE_SEED is not an integer");
    }
  }
  return 1;
}

CorpusManifest load_manifest_arg(const std::string& corpus) {
  fs::path path(corpus);
  if (fs::is_directory(path)) path /= "manifest.csv";
  return read_manifest(path);
}

std::vector<std::string> split_csv_list(const std::string& arg) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : arg) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Every run drops a small reproducibility manifest next to its main output.
void write_run_manifest(const fs::path& target, const std::string& subcommand,
                        const std::vector<std::string>& inputs,
                        std::uint64_t seed,
                        const std::vector<std::pair<std::string, std::string>>& config) {
  std::ostringstream canon;
  canon << subcommand << "\n";
  for (const auto& [key, value] : config) canon << key << "=" << value << "\n";
  const std::uint64_t hash = hash_tag(canon.str());

  fs::path path = fs::is_directory(target) ? target / "run_manifest.txt"
                                           : fs::path(target.string() + ".run.txt");
  std::ofstream out(path, std::ios::binary);
  out << "subcommand " << subcommand << "\n";
  out << "seed " << seed << "\n";
  out << "config_hash " << std::hex << hash << std::dec << "\n";
  for (const auto& in : inputs) out << "input " << in << "\n";
  for (const auto& [key, value] : config) out << "config " << key << "=" << value << "\n";
}

TrainConfig make_train_config(int d, int k, int edge_dim, double alpha, double lr,
                              int epochs, std::uint64_t seed,
                              const std::string& fractions, double neg_ratio,
                              const std::string& profile) {
  TrainConfig config = profile == "full" ? TrainConfig::full_profile() : TrainConfig{};
  if (d > 0) config.d = d;
  if (k > 0) config.k = k;
  config.edge_dim = edge_dim;
  config.alpha = alpha;
  config.learning_rate = lr;
  config.epochs = epochs;
  config.seed = seed;
  config.negative_ratio = neg_ratio;
  if (!fractions.empty()) {
    config.augment_fractions.clear();
    for (const auto& f : split_csv_list(fractions))
      config.augment_fractions.push_back(std::stod(f));
  }
  return config;
}

struct EmbeddingTable {
  std::vector<InstanceEmbedding> rows;
  std::vector<int> truth_labels;  // (family,size) class ids
};

EmbeddingTable corpus_histograms(const CorpusManifest& manifest, const Checkpoint& ckpt,
                                 bool normalized) {
  EmbeddingTable table;
  std::map<std::pair<std::string, std::string>, int> class_ids;
  for (const auto& entry : manifest.entries) {
    std::ifstream in(entry.path);
    if (!in) throw DataError("cannot open instance " + entry.path);
    const MipInstance inst = parse_mps(in);
    const BipartiteGraph g = apply_feature_scale(to_bipartite(inst), ckpt.scale);
    InstanceEmbedding e = instance_embedding(g, ckpt, normalized);
    e.family_tag = to_string(entry.family);
    e.size_tag = to_string(entry.size);
    table.rows.push_back(std::move(e));
    const auto key = std::make_pair(std::string(to_string(entry.family)),
                                    std::string(to_string(entry.size)));
    auto [it, inserted] = class_ids.emplace(key, static_cast<int>(class_ids.size()));
    table.truth_labels.push_back(it->second);
  }
  return table;
}

Tensor rows_to_tensor(const std::vector<std::vector<double>>& rows) {
  Tensor t = Tensor::zeros(static_cast<std::int64_t>(rows.size()),
                           static_cast<std::int64_t>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      t.at(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)) = rows[i][j];
  return t;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"FORGE: vector-quantized MIP representation pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file (flags take precedence)");
  app.get_config_formatter_base()->comment('#');

  int jobs = 1;
  bool deterministic = false;
  app.add_option("--jobs", jobs, "worker threads for parallel-safe stages");
  app.add_flag("--deterministic", deterministic,
               "force the single-threaded deterministic path");

  // gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a synthetic corpus");
  std::string gen_families = "sc,vc,is";
  std::string gen_sizes = "easy";
  int gen_count = 10;
  std::uint64_t gen_seed = default_seed();
  std::string gen_out = "corpus";
  gen->add_option("--families", gen_families, "comma list: sc,vc,is,bp,ca");
  gen->add_option("--sizes", gen_sizes, "comma list: tiny,easy,medium,hard");
  gen->add_option("--count", gen_count, "instances per (family,size)");
  gen->add_option("--seed", gen_seed, "master seed (env FORGE_SEED fallback)");
  gen->add_option("--out", gen_out, "output directory")->required();

  // pretrain -----------------------------------------------------------
  auto* pre = app.add_subcommand("pretrain", "unsupervised pre-training");
  std::string pre_corpus, pre_out = "ckpt.forge", pre_profile = "desk";
  std::string pre_fractions;
  int pre_d = 0, pre_k = 0, pre_edge_dim = 0, pre_epochs = 10;
  double pre_alpha = 0.25, pre_lr = 1e-4, pre_neg_ratio = 1.0;
  std::uint64_t pre_seed = default_seed();
  pre->add_option("--corpus", pre_corpus, "corpus dir or manifest.csv")->required();
  pre->add_option("--out", pre_out, "checkpoint path");
  pre->add_option("--d", pre_d, "embedding width");
  pre->add_option("--k", pre_k, "codebook size");
  pre->add_option("--edge-dim", pre_edge_dim, "edge-decoder width (0: d)");
  pre->add_option("--alpha", pre_alpha, "commitment weight");
  pre->add_option("--lr", pre_lr, "learning rate");
  pre->add_option("--epochs", pre_epochs, "training epochs");
  pre->add_option("--seed", pre_seed, "master seed");
  pre->add_option("--fractions", pre_fractions, "augment fractions, e.g. 0.05,0.10");
  pre->add_option("--neg-ratio", pre_neg_ratio, "sampled non-edges per edge");
  pre->add_option("--profile", pre_profile, "desk (default) or full (d=1024,k=5000)");

  // embed ----------------------------------------------------------------
  auto* emb = app.add_subcommand("embed", "extract instance embeddings");
  std::string emb_corpus, emb_ckpt, emb_out = "embeddings.csv", emb_bin, emb_mode =
      "normalized";
  std::string emb_dump_dir;
  emb->add_option("--corpus", emb_corpus)->required();
  emb->add_option("--ckpt", emb_ckpt)->required();
  emb->add_option("--out", emb_out, "embedding store CSV");
  emb->add_option("--binary-out", emb_bin, "embedding store binary table");
  emb->add_option("--mode", emb_mode, "normalized or raw histograms");
  emb->add_option("--dump-graphs", emb_dump_dir,
                  "directory for per-instance feature/edge CSV debug dumps");

  // cluster --------------------------------------------------------------
  auto* clu = app.add_subcommand("cluster", "k-means + NMI vs (family,size)");
  std::string clu_corpus, clu_ckpt, clu_out, clu_projection;
  int clu_clusters = 6, clu_runs = 10;
  std::uint64_t clu_seed = default_seed();
  clu->add_option("--corpus", clu_corpus)->required();
  clu->add_option("--ckpt", clu_ckpt)->required();
  clu->add_option("--k-clusters", clu_clusters);
  clu->add_option("--runs", clu_runs);
  clu->add_option("--seed", clu_seed);
  clu->add_option("--out", clu_out, "cluster assignment CSV");
  clu->add_option("--projection", clu_projection, "2-D PCA projection CSV");

  // arith ----------------------------------------------------------------
  auto* ari = app.add_subcommand("arith", "vertex-cover -> independent-set shift");
  std::string ari_corpus, ari_ckpt;
  ari->add_option("--corpus", ari_corpus, "manifest with vc/is/sc/bp entries")
      ->required();
  ari->add_option("--ckpt", ari_ckpt)->required();

  // finetune-gap -----------------------------------------------------------
  auto* fgap = app.add_subcommand("finetune-gap", "integrality-gap head");
  std::string fgap_corpus, fgap_ckpt, fgap_out = "ckpt_gap.forge";
  int fgap_epochs = 10, fgap_hidden = 32;
  long long fgap_nodes = 500;
  double fgap_lr = 1e-4, fgap_split = 0.8, fgap_time = -1.0;
  bool fgap_scratch = false;
  std::uint64_t fgap_seed = default_seed();
  fgap->add_option("--corpus", fgap_corpus)->required();
  fgap->add_option("--ckpt", fgap_ckpt)->required();
  fgap->add_option("--out", fgap_out);
  fgap->add_option("--epochs", fgap_epochs);
  fgap->add_option("--lr", fgap_lr);
  fgap->add_option("--hidden", fgap_hidden);
  fgap->add_option("--node-limit", fgap_nodes, "labeling budget per instance");
  fgap->add_option("--time-limit", fgap_time, "labeling wall-clock budget (s)");
  fgap->add_option("--split", fgap_split, "training fraction of the corpus");
  fgap->add_flag("--from-scratch", fgap_scratch, "ablation: random init");
  fgap->add_option("--seed", fgap_seed);

  // cut ----------------------------------------------------------------
  auto* cut = app.add_subcommand("cut", "emit a pseudo-cut for one instance");
  std::string cut_instance, cut_ckpt, cut_out = "cut.mps";
  double cut_shrink = 0.9;
  cut->add_option("--instance", cut_instance)->required();
  cut->add_option("--ckpt", cut_ckpt)->required();
  cut->add_option("--shrink", cut_shrink, "safety shrink in [0,1]");
  cut->add_option("--out", cut_out);

  // finetune-guide ---------------------------------------------------------
  auto* fgui = app.add_subcommand("finetune-guide", "variable-guidance head");
  std::string fgui_corpus, fgui_ckpt, fgui_out = "ckpt_guide.forge";
  int fgui_epochs = 25, fgui_hidden = 32, fgui_pool = 5;
  long long fgui_nodes = 2000;
  double fgui_lr = 1e-5;
  std::uint64_t fgui_seed = default_seed();
  fgui->add_option("--corpus", fgui_corpus)->required();
  fgui->add_option("--ckpt", fgui_ckpt)->required();
  fgui->add_option("--out", fgui_out);
  fgui->add_option("--epochs", fgui_epochs);
  fgui->add_option("--lr", fgui_lr);
  fgui->add_option("--hidden", fgui_hidden);
  fgui->add_option("--pool-size", fgui_pool);
  fgui->add_option("--node-limit", fgui_nodes, "pooling budget per instance");
  fgui->add_option("--seed", fgui_seed);

  // hints ----------------------------------------------------------------
  auto* hin = app.add_subcommand("hints", "emit variable hints for one instance");
  std::string hin_instance, hin_ckpt, hin_out = "hints.txt", hin_anchor;
  double hin_radius = 0.1;
  long long hin_nodes = 2000;
  hin->add_option("--instance", hin_instance)->required();
  hin->add_option("--ckpt", hin_ckpt)->required();
  hin->add_option("--radius", hin_radius);
  hin->add_option("--anchor", hin_anchor,
                  "solution file for anchors (default: first mini-solver incumbent)");
  hin->add_option("--node-limit", hin_nodes, "anchor search budget");
  hin->add_option("--out", hin_out);

  // report ----------------------------------------------------------------
  auto* rep = app.add_subcommand("report", "gap-prediction / codebook reports");
  std::string rep_corpus, rep_ckpt, rep_out = "report.csv";
  bool rep_codebook = false;
  long long rep_nodes = 500;
  rep->add_option("--corpus", rep_corpus)->required();
  rep->add_option("--ckpt", rep_ckpt)->required();
  rep->add_option("--out", rep_out);
  rep->add_flag("--codebook", rep_codebook, "emit codebook usage instead");
  rep->add_option("--node-limit", rep_nodes, "labeling budget per instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (deterministic) jobs = 1;

  if (gen->parsed()) {
    std::vector<CorpusSpecEntry> spec;
    for (const auto& f : split_csv_list(gen_families))
      for (const auto& s : split_csv_list(gen_sizes))
        spec.push_back({parse_family(f), parse_size_tag(s), gen_count});
    const CorpusManifest manifest = gen_corpus(spec, gen_seed, gen_out);
    write_run_manifest(gen_out, "gen", {},
                       gen_seed,
                       {{"families", gen_families},
                        {"sizes", gen_sizes},
                        {"count", std::to_string(gen_count)}});
    std::cout << "wrote " << manifest.entries.size() << " instances to " << gen_out
              << "\n";
    return 0;
  }

  if (pre->parsed()) {
    const CorpusManifest manifest = load_manifest_arg(pre_corpus);
    const TrainConfig config =
        make_train_config(pre_d, pre_k, pre_edge_dim, pre_alpha, pre_lr, pre_epochs,
                          pre_seed, pre_fractions, pre_neg_ratio, pre_profile);
    std::ofstream loss_csv(pre_out + ".loss.csv");
    const Checkpoint ckpt = pretrain(manifest, config, &loss_csv);
    save_checkpoint_file(ckpt, pre_out);
    write_run_manifest(pre_out, "pretrain", {pre_corpus}, pre_seed,
                       {{"d", std::to_string(config.d)},
                        {"k", std::to_string(config.k)},
                        {"alpha", std::to_string(config.alpha)},
                        {"lr", std::to_string(config.learning_rate)},
                        {"epochs", std::to_string(config.epochs)}});
    std::cout << "checkpoint " << pre_out << " (final total loss "
              << ckpt.history.back().total << ", dead codes "
              << ckpt.history.back().dead_code_fraction << ")\n";
    return 0;
  }

  if (emb->parsed()) {
    const CorpusManifest manifest = load_manifest_arg(emb_corpus);
    const Checkpoint ckpt = load_checkpoint_file(emb_ckpt);
    const bool normalized = emb_mode != "raw";
    const EmbeddingTable table = corpus_histograms(manifest, ckpt, normalized);
    if (!emb_out.empty()) {
      std::ofstream out(emb_out, std::ios::binary);
      write_embeddings_csv(table.rows, out);
    }
    if (!emb_bin.empty()) {
      std::ofstream out(emb_bin, std::ios::binary);
      write_embeddings_binary(table.rows, out);
    }
    if (!emb_dump_dir.empty()) {
      fs::create_directories(emb_dump_dir);
      for (const auto& entry : manifest.entries) {
        std::ifstream in(entry.path);
        const MipInstance inst = parse_mps(in);
        const BipartiteGraph g = to_bipartite(inst);
        const std::string stem = fs::path(entry.path).stem().string();
        std::ofstream feats(fs::path(emb_dump_dir) / (stem + ".features.csv"));
        feats << features_csv(g);
        std::ofstream edges(fs::path(emb_dump_dir) / (stem + ".edges.csv"));
        edges << edges_csv(g);
      }
    }
    write_run_manifest(emb_out, "embed", {emb_corpus, emb_ckpt}, ckpt.config.seed,
                       {{"mode", emb_mode}});
    std::cout << "embedded " << table.rows.size() << " instances (k="
              << ckpt.config.k << ")\n";
    return 0;
  }

  if (clu->parsed()) {
    const CorpusManifest manifest = load_manifest_arg(clu_corpus);
    const Checkpoint ckpt = load_checkpoint_file(clu_ckpt);
    const EmbeddingTable table = corpus_histograms(manifest, ckpt, true);

    std::vector<std::vector<double>> hist_rows, readout_rows, prop_rows;
    for (const auto& e : table.rows) hist_rows.push_back(e.values);
    for (const auto& entry : manifest.entries) {
      std::ifstream in(entry.path);
      const MipInstance inst = parse_mps(in);
      const BipartiteGraph g = apply_feature_scale(to_bipartite(inst), ckpt.scale);
      readout_rows.push_back(mean_readout(g, ckpt));
      prop_rows.push_back(label_propagation_embedding(g));
    }

    const ClusterResult forge_result =
        kmeans(rows_to_tensor(hist_rows), clu_clusters, clu_runs, clu_seed,
               &table.truth_labels);
    const ClusterResult readout_result =
        kmeans(rows_to_tensor(readout_rows), clu_clusters, clu_runs, clu_seed,
               &table.truth_labels);
    const ClusterResult prop_result =
        kmeans(rows_to_tensor(prop_rows), clu_clusters, clu_runs, clu_seed,
               &table.truth_labels);

    std::cout << "nmi forge_histogram " << forge_result.nmi_vs_truth
              << " (best-run " << forge_result.nmi_best_run << ")\n";
    std::cout << "nmi mean_readout " << readout_result.nmi_vs_truth << "\n";
    std::cout << "nmi label_propagation " << prop_result.nmi_vs_truth << "\n";

    if (!clu_out.empty()) {
      std::ofstream out(clu_out, std::ios::binary);
      out << "instance,family,size,cluster\n";
      for (std::size_t i = 0; i < table.rows.size(); ++i)
        out << table.rows[i].name << "," << table.rows[i].family_tag << ","
            << table.rows[i].size_tag << "," << forge_result.assignments[i] << "\n";
    }
    if (!clu_projection.empty()) {
      const PcaResult pca = pca_project(rows_to_tensor(hist_rows), 2);
      std::ofstream out(clu_projection, std::ios::binary);
      out << "instance,x,y\n";
      for (std::size_t i = 0; i < table.rows.size(); ++i)
        out << table.rows[i].name << "," << pca.projected.at(i, 0) << ","
            << pca.projected.at(i, 1) << "\n";
    }
    write_run_manifest(clu_out.empty() ? std::string("cluster.csv") : clu_out,
                       "cluster", {clu_corpus, clu_ckpt}, clu_seed,
                       {{"k_clusters", std::to_string(clu_clusters)},
                        {"runs", std::to_string(clu_runs)}});
    return 0;
  }

  if (ari->parsed()) {
    const CorpusManifest manifest = load_manifest_arg(ari_corpus);
    const Checkpoint ckpt = load_checkpoint_file(ari_ckpt);
    const EmbeddingTable table = corpus_histograms(manifest, ckpt, true);
    std::vector<std::vector<double>> vc, is, sc, bp;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      switch (manifest.entries[i].family) {
        case Family::kVertexCover: vc.push_back(table.rows[i].values); break;
        case Family::kIndependentSet: is.push_back(table.rows[i].values); break;
        case Family::kSetCover: sc.push_back(table.rows[i].values); break;
        case Family::kBinPacking: bp.push_back(table.rows[i].values); break;
        default: break;
      }
    }
    if (vc.empty() || is.empty() || sc.empty() || bp.empty())
      throw DataError("arith needs vc, is, sc and bp instances in the corpus");

    const auto updated = vector_arith(vc, sc, bp);

    // The directional claim is measured in the shared 2-D projection of the
    // four original sets, the space the movement is defined in.
    std::vector<std::vector<double>> all;
    for (const auto* s : {&vc, &is, &sc, &bp})
      for (const auto& r : *s) all.push_back(r);
    const PcaResult pca = pca_project(rows_to_tensor(all), 2);
    std::vector<double> col_mean(all[0].size(), 0.0);
    for (const auto& r : all)
      for (std::size_t j = 0; j < r.size(); ++j) col_mean[j] += r[j];
    for (double& v : col_mean) v /= static_cast<double>(all.size());
    const auto project = [&](const std::vector<double>& row) {
      std::vector<double> out(2, 0.0);
      for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < row.size(); ++j)
          out[c] += (row[j] - col_mean[j]) * pca.axes[c][j];
      return out;
    };

    std::vector<double> is_centroid(2, 0.0);
    for (const auto& row : is) {
      const auto p = project(row);
      is_centroid[0] += p[0];
      is_centroid[1] += p[1];
    }
    for (double& v : is_centroid) v /= static_cast<double>(is.size());

    double before = 0.0, after = 0.0;
    for (std::size_t i = 0; i < vc.size(); ++i) {
      before += cosine_distance(project(vc[i]), is_centroid);
      after += cosine_distance(project(updated[i]), is_centroid);
    }
    before /= static_cast<double>(vc.size());
    after /= static_cast<double>(vc.size());
    std::cout << "mean cosine distance to independent-set centroid: before "
              << before << ", after " << after
              << (after < before ? " (moved closer)" : " (did not move closer)")
              << "\n";
    return after < before ? 0 : 1;
  }

  if (fgap->parsed()) {
    const CorpusManifest manifest = load_manifest_arg(fgap_corpus);
    const Checkpoint base = load_checkpoint_file(fgap_ckpt);
    SolveLimits limits;
    limits.node_limit = fgap_nodes;
    limits.time_limit_s = fgap_time;
    const LabeledGapCorpus labeled = collect_gap_labels(manifest, limits, jobs);
    if (labeled.instances.size() < 2) throw DataError("not enough labeled instances");

    // Deterministic shuffled split.
    std::vector<int> order(labeled.instances.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng = Rng::split(fgap_seed, "gap-split");
    split_rng.shuffle(order);
    const std::size_t n_train =
        std::max<std::size_t>(1, static_cast<std::size_t>(fgap_split * order.size()));
    std::vector<MipInstance> train_x;
    std::vector<double> train_y;
    std::vector<int> held;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i < n_train) {
        train_x.push_back(labeled.instances[order[i]]);
        train_y.push_back(labeled.labels[order[i]]);
      } else {
        held.push_back(order[i]);
      }
    }

    FinetuneOptions opts;
    opts.epochs = fgap_epochs;
    opts.learning_rate = fgap_lr;
    opts.hidden = fgap_hidden;
    opts.from_scratch = fgap_scratch;
    opts.seed = fgap_seed;
    const Checkpoint tuned = finetune_gap(base, train_x, train_y, opts);
    save_checkpoint_file(tuned, fgap_out);

    double train_mean = 0.0;
    for (double y : train_y) train_mean += y;
    train_mean /= static_cast<double>(train_y.size());
    double mae = 0.0, baseline = 0.0;
    for (int idx : held) {
      mae += std::abs(predict_gap(tuned, labeled.instances[idx]) - labeled.labels[idx]);
      baseline += std::abs(train_mean - labeled.labels[idx]);
    }
    if (!held.empty()) {
      mae /= static_cast<double>(held.size());
      baseline /= static_cast<double>(held.size());
      std::cout << "held-out MAE " << mae << " vs predict-train-mean " << baseline
                << "\n";
    }
    write_run_manifest(fgap_out, "finetune-gap", {fgap_corpus, fgap_ckpt}, fgap_seed,
                       {{"epochs", std::to_string(fgap_epochs)},
                        {"lr", std::to_string(fgap_lr)},
                        {"from_scratch", fgap_scratch ? "1" : "0"},
                        {"node_limit", std::to_string(fgap_nodes)}});
    std::cout << "checkpoint " << fgap_out << " (trained on " << train_x.size()
              << " labeled instances)\n";
    return 0;
  }

  if (cut->parsed()) {
    std::ifstream in(cut_instance);
    if (!in) throw DataError("cannot open " + cut_instance);
    const MipInstance inst = parse_mps(in);
    const Checkpoint ckpt = load_checkpoint_file(cut_ckpt);
    const GapCutResult result = predict_gap_and_cut(ckpt, inst, cut_shrink);
    std::ofstream out(cut_out, std::ios::binary);
    out << write_mps(result.with_cut);
    write_run_manifest(cut_out, "cut", {cut_instance, cut_ckpt}, ckpt.config.seed,
                       {{"shrink", std::to_string(cut_shrink)}});
    std::cout << "z_lp " << result.z_lp << " predicted_gap " << result.predicted_gap
              << " bound " << result.bound << " -> " << cut_out << "\n";
    return 0;
  }

  if (fgui->parsed()) {
    const CorpusManifest manifest = load_manifest_arg(fgui_corpus);
    const Checkpoint base = load_checkpoint_file(fgui_ckpt);
    SolveLimits limits;
    limits.node_limit = fgui_nodes;
    const auto corpus = collect_guidance_pools(manifest, limits, fgui_pool, jobs);
    if (corpus.empty()) throw DataError("no instances with solution pools");

    FinetuneOptions opts = FinetuneOptions::guidance_defaults();
    opts.epochs = fgui_epochs;
    opts.learning_rate = fgui_lr;
    opts.hidden = fgui_hidden;
    opts.seed = fgui_seed;
    const Checkpoint tuned = finetune_guidance(base, corpus, opts);
    save_checkpoint_file(tuned, fgui_out);

    std::vector<double> scores;
    std::vector<char> positives;
    for (const auto& ex : corpus) {
      const BipartiteGraph g =
          apply_feature_scale(to_bipartite(ex.instance), tuned.scale);
      const auto s = guidance_scores(tuned, g);
      const GuidanceLabels labels = build_guidance_labels(ex.instance, ex.pool);
      for (std::size_t i = 0; i < labels.variable_indices.size(); ++i) {
        scores.push_back(s[labels.variable_indices[i]]);
        positives.push_back(labels.positive[i]);
      }
    }
    bool have_both = false;
    {
      bool any_pos = false, any_neg = false;
      for (char p : positives) (p ? any_pos : any_neg) = true;
      have_both = any_pos && any_neg;
    }
    if (have_both)
      std::cout << "in-sample AUC " << auc(scores, positives) << "\n";
    write_run_manifest(fgui_out, "finetune-guide", {fgui_corpus, fgui_ckpt}, fgui_seed,
                       {{"epochs", std::to_string(fgui_epochs)},
                        {"lr", std::to_string(fgui_lr)},
                        {"pool_size", std::to_string(fgui_pool)}});
    std::cout << "checkpoint " << fgui_out << " (trained on " << corpus.size()
              << " pooled instances)\n";
    return 0;
  }

  if (hin->parsed()) {
    std::ifstream in(hin_instance);
    if (!in) throw DataError("cannot open " + hin_instance);
    const MipInstance inst = parse_mps(in);
    const Checkpoint ckpt = load_checkpoint_file(hin_ckpt);

    std::vector<double> anchor;
    if (!hin_anchor.empty()) {
      std::ifstream sol_in(hin_anchor);
      if (!sol_in) throw DataError("cannot open " + hin_anchor);
      anchor = read_solution(inst, sol_in).values;
    } else {
      SolveLimits limits;
      limits.node_limit = hin_nodes;
      const MipSolution sol = solve_mip(inst, limits);
      if (sol.values.empty())
        throw DataError("no feasible anchor solution found within the limit");
      anchor = sol.pool.front().values;  // first improving incumbent
    }

    const HintSet hints = select_hints(ckpt, inst, anchor, hin_radius);
    std::ofstream out(hin_out, std::ios::binary);
    out << write_hints(hints);
    write_run_manifest(hin_out, "hints", {hin_instance, hin_ckpt}, ckpt.config.seed,
                       {{"radius", std::to_string(hin_radius)}});
    std::cout << hints.include.size() << " include hints, " << hints.exclude.size()
              << " exclude hints -> " << hin_out << "\n";
    return 0;
  }

  if (rep->parsed()) {
    const CorpusManifest manifest = load_manifest_arg(rep_corpus);
    const Checkpoint ckpt = load_checkpoint_file(rep_ckpt);
    if (rep_codebook) {
      const CodebookReport report = codebook_report(ckpt, manifest);
      std::ofstream out(rep_out, std::ios::binary);
      out << "code,count\n";
      for (std::size_t c = 0; c < report.counts.size(); ++c)
        out << c << "," << report.counts[c] << "\n";
      std::cout << "total nodes " << report.total_nodes << ", dead code fraction "
                << report.dead_fraction << "\n";
      return 0;
    }
    if (!ckpt.has_gap_head)
      throw DataError("gap report needs a checkpoint with a gap head");
    SolveLimits limits;
    limits.node_limit = rep_nodes;
    const LabeledGapCorpus labeled = collect_gap_labels(manifest, limits, jobs);
    std::vector<GapReportRow> rows;
    for (std::size_t i = 0; i < labeled.instances.size(); ++i) {
      GapReportRow row;
      row.instance = labeled.instances[i].name;
      const GapCutResult r = predict_gap_and_cut(ckpt, labeled.instances[i], 0.9);
      row.z_lp = r.z_lp;
      row.predicted_gap = r.predicted_gap;
      row.bound = r.bound;
      row.has_label = true;
      row.label = labeled.labels[i];
      rows.push_back(row);
    }
    std::ofstream out(rep_out, std::ios::binary);
    write_gap_report(rows, out);
    write_run_manifest(rep_out, "report", {rep_corpus, rep_ckpt}, ckpt.config.seed,
                       {{"node_limit", std::to_string(rep_nodes)}});
    std::cout << "wrote " << rows.size() << " rows to " << rep_out << "\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
