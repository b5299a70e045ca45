#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <set>

#include "forge/analysis.hpp"
#include "forge/heads.hpp"
#include "forge/trainer.hpp"

using namespace forge;

namespace {

namespace fs = std::filesystem;

// Pre-trained base checkpoint shared by the head tests (built once).
const Checkpoint& base_checkpoint() {
  static const Checkpoint ckpt = [] {
    const fs::path dir = fs::temp_directory_path() / "forge_heads_base";
    fs::remove_all(dir);
    std::vector<CorpusSpecEntry> spec = {{Family::kVertexCover, SizeTag::kTiny, 6},
                                         {Family::kIndependentSet, SizeTag::kTiny, 6},
                                         {Family::kSetCover, SizeTag::kTiny, 6}};
    CorpusManifest manifest = gen_corpus(spec, 50, dir);
    TrainConfig config;
    config.d = 8;
    config.k = 16;
    config.epochs = 4;
    config.learning_rate = 1e-3;
    config.seed = 4;
    Checkpoint out = pretrain(manifest, config);
    fs::remove_all(dir);
    return out;
  }();
  return ckpt;
}

}  // namespace

TEST_CASE("constant-label corpus converges to that constant", "[heads]") {
  std::vector<MipInstance> corpus;
  std::vector<double> labels;
  for (std::uint64_t s = 1; s <= 6; ++s) {
    corpus.push_back(gen_instance(Family::kVertexCover, SizeTag::kTiny, s));
    labels.push_back(1.37);
  }
  FinetuneOptions opts;
  opts.epochs = 60;
  opts.learning_rate = 1e-2;
  opts.seed = 2;
  Checkpoint tuned = finetune_gap(base_checkpoint(), corpus, labels, opts);
  REQUIRE(tuned.has_gap_head);
  double mae = 0.0;
  for (const auto& inst : corpus) mae += std::abs(predict_gap(tuned, inst) - 1.37);
  mae /= static_cast<double>(corpus.size());
  REQUIRE(mae < 0.01);
}

TEST_CASE("gap predictions respect sense geometry and the training hull", "[heads]") {
  std::vector<MipInstance> corpus;
  std::vector<double> labels;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    corpus.push_back(gen_instance(Family::kVertexCover, SizeTag::kTiny, s));
    labels.push_back(1.2 + 0.05 * static_cast<double>(s));
    corpus.push_back(gen_instance(Family::kIndependentSet, SizeTag::kTiny, s));
    labels.push_back(0.7 - 0.04 * static_cast<double>(s));
  }
  FinetuneOptions opts;
  opts.epochs = 5;
  opts.seed = 3;
  Checkpoint tuned = finetune_gap(base_checkpoint(), corpus, labels, opts);

  REQUIRE(tuned.gap_head.has_min_hull);
  REQUIRE(tuned.gap_head.has_max_hull);
  for (std::uint64_t s = 20; s <= 24; ++s) {
    const MipInstance vc = gen_instance(Family::kVertexCover, SizeTag::kTiny, s);
    const double pred_min = predict_gap(tuned, vc);
    REQUIRE(pred_min >= tuned.gap_head.min_lo);
    REQUIRE(pred_min <= tuned.gap_head.min_hi);
    REQUIRE(pred_min >= 1.0);

    const MipInstance is = gen_instance(Family::kIndependentSet, SizeTag::kTiny, s);
    const double pred_max = predict_gap(tuned, is);
    REQUIRE(pred_max <= 1.0);
    REQUIRE(pred_max >= tuned.gap_head.max_lo);
  }
}

TEST_CASE("pseudo-cut emission", "[heads]") {
  std::vector<MipInstance> corpus;
  std::vector<double> labels;
  for (std::uint64_t s = 1; s <= 6; ++s) {
    const MipInstance inst = gen_instance(Family::kVertexCover, SizeTag::kTiny, s);
    const GapLabel label = integrality_gap_label(inst);
    REQUIRE(label.available);
    corpus.push_back(inst);
    labels.push_back(label.label);
  }
  FinetuneOptions opts;
  opts.epochs = 8;
  opts.seed = 5;
  Checkpoint tuned = finetune_gap(base_checkpoint(), corpus, labels, opts);

  const MipInstance probe = gen_instance(Family::kVertexCover, SizeTag::kTiny, 30);
  SECTION("shrink 0 degenerates to the LP bound") {
    GapCutResult r = predict_gap_and_cut(tuned, probe, 0.0);
    REQUIRE(r.bound == Catch::Approx(r.z_lp));
    REQUIRE(r.with_cut.num_constraints() == probe.num_constraints() + 1);
    REQUIRE(r.with_cut.constraints.back().name == "__forge_pseudo_cut");
    // The LP bound never cuts the optimum.
    const MipSolution before = solve_exhaustive(probe);
    const MipSolution after = solve_exhaustive(r.with_cut);
    REQUIRE(after.objective == Catch::Approx(before.objective));
  }
  SECTION("conservative predictions keep the optimum with shrink 0.9") {
    GapCutResult r = predict_gap_and_cut(tuned, probe, 0.9);
    const MipSolution before = solve_exhaustive(probe);
    const double true_gap = before.objective / r.z_lp;
    if (r.predicted_gap <= true_gap) {
      const MipSolution after = solve_exhaustive(r.with_cut);
      REQUIRE(after.status == MipStatus::kOptimal);
      REQUIRE(after.objective == Catch::Approx(before.objective));
    }
  }
}

TEST_CASE("guidance labels partition binary variables by pool count", "[heads]") {
  const MipInstance inst = gen_instance(Family::kVertexCover, SizeTag::kTiny, 7);
  const MipSolution sol = solve_exhaustive(inst, 5);
  REQUIRE(sol.pool.size() == 5);
  const GuidanceLabels labels = build_guidance_labels(inst, sol.pool);
  REQUIRE(labels.variable_indices.size() ==
          static_cast<std::size_t>(inst.num_variables()));  // all binary
  int group_members = 0;
  for (std::size_t i = 0; i < labels.group.size(); ++i) {
    REQUIRE(labels.group[i] >= 0);
    REQUIRE(labels.group[i] <= 5);
    REQUIRE((labels.positive[i] == 1) == (labels.group[i] >= 1));
    ++group_members;
  }
  REQUIRE(group_members == inst.num_variables());

  SECTION("short pool warns but proceeds") {
    std::string captured;
    auto old = warning_handler();
    warning_handler() = [&](const std::string& msg) { captured = msg; };
    build_guidance_labels(inst, {sol.pool.back()});
    warning_handler() = old;
    REQUIRE(captured.find("pool") != std::string::npos);
  }
}

TEST_CASE("triplet mining", "[heads]") {
  SECTION("two positives and one negative force the unique triplet") {
    GuidanceLabels labels;
    labels.variable_indices = {0, 1, 2};
    labels.group = {2, 2, 0};
    labels.positive = {1, 1, 0};
    Tensor cw = Tensor::from_rows(3, 2, {0, 0, 1, 0, 5, 5});
    Rng rng(1);
    TripletSet ts = mine_triplets(labels, cw, rng, 1);
    REQUIRE(ts.triplets.size() == 2);  // each positive anchors once
    for (const auto& t : ts.triplets) {
      REQUIRE(t.negative == 2);
      REQUIRE(t.anchor != t.positive);
      REQUIRE(std::set<int>{0, 1}.count(t.anchor) == 1);
      REQUIRE(std::set<int>{0, 1}.count(t.positive) == 1);
    }
    REQUIRE(ts.margin == 2.0);
  }
  SECTION("negative selection is the geometrically nearest group-0 variable") {
    GuidanceLabels labels;
    labels.variable_indices = {0, 1, 2, 3, 4};
    labels.group = {3, 3, 0, 0, 0};
    labels.positive = {1, 1, 0, 0, 0};
    Tensor cw = Tensor::from_rows(5, 2, {0, 0, 4, 4, 9, 9, 0.5, 0.5, 3.5, 3.5});
    Rng rng(2);
    TripletSet ts = mine_triplets(labels, cw, rng, 2);
    // Brute-force nearest scan per anchor.
    for (const auto& t : ts.triplets) {
      double best = kInfinity;
      int best_neg = -1;
      for (int neg : {2, 3, 4}) {
        double dist = 0.0;
        for (int c = 0; c < 2; ++c) {
          const double d = cw.at(t.anchor, c) - cw.at(neg, c);
          dist += d * d;
        }
        if (dist < best) {
          best = dist;
          best_neg = neg;
        }
      }
      REQUIRE(t.negative == best_neg);
    }
  }
  SECTION("no negatives yields an empty set with a warning") {
    GuidanceLabels labels;
    labels.variable_indices = {0, 1};
    labels.group = {1, 1};
    labels.positive = {1, 1};
    Tensor cw = Tensor::zeros(2, 2);
    Rng rng(3);
    std::string captured;
    auto old = warning_handler();
    warning_handler() = [&](const std::string& msg) { captured = msg; };
    TripletSet ts = mine_triplets(labels, cw, rng);
    warning_handler() = old;
    REQUIRE(ts.triplets.empty());
    REQUIRE_FALSE(captured.empty());
  }
  SECTION("hinge arithmetic at the margin") {
    REQUIRE(triplet_hinge(0.0, 3.0) == 0.0);   // d(a,p)=0, d(a,n)=3, margin 2
    REQUIRE(triplet_hinge(1.0, 1.5) == 1.5);   // 1 - 1.5 + 2
    REQUIRE(triplet_hinge(2.0, 4.0) == 0.0);
  }
}

TEST_CASE("guidance fine-tuning learns above-chance separation", "[heads]") {
  // Mixed covering/packing corpus: the families' label rates differ, which
  // is the separation the head must pick up.
  std::vector<GuidanceExample> corpus;
  for (std::uint64_t s = 1; s <= 6; ++s) {
    for (Family f : {Family::kVertexCover, Family::kIndependentSet}) {
      GuidanceExample ex;
      ex.instance = gen_instance(f, SizeTag::kTiny, s);
      ex.pool = solve_exhaustive(ex.instance, 5).pool;
      corpus.push_back(std::move(ex));
    }
  }
  FinetuneOptions opts = FinetuneOptions::guidance_defaults();
  opts.epochs = 10;
  opts.learning_rate = 1e-3;
  opts.seed = 6;
  Checkpoint tuned = finetune_guidance(base_checkpoint(), corpus, opts);
  REQUIRE(tuned.has_guidance_head);

  // In-sample AUC over all training variables must beat chance.
  std::vector<double> scores;
  std::vector<char> positives;
  for (const auto& ex : corpus) {
    const BipartiteGraph g = apply_feature_scale(to_bipartite(ex.instance), tuned.scale);
    const auto s = guidance_scores(tuned, g);
    const GuidanceLabels labels = build_guidance_labels(ex.instance, ex.pool);
    for (std::size_t i = 0; i < labels.variable_indices.size(); ++i) {
      scores.push_back(s[labels.variable_indices[i]]);
      positives.push_back(labels.positive[i]);
    }
  }
  REQUIRE(auc(scores, positives) > 0.5);
}

TEST_CASE("hint selection", "[heads]") {
  std::vector<GuidanceExample> corpus;
  for (std::uint64_t s = 1; s <= 6; ++s) {
    GuidanceExample ex;
    ex.instance = gen_instance(Family::kVertexCover, SizeTag::kTiny, s);
    ex.pool = solve_exhaustive(ex.instance, 5).pool;
    corpus.push_back(std::move(ex));
  }
  FinetuneOptions opts = FinetuneOptions::guidance_defaults();
  opts.epochs = 6;
  opts.learning_rate = 1e-3;
  opts.seed = 7;
  Checkpoint tuned = finetune_guidance(base_checkpoint(), corpus, opts);

  const MipInstance probe = gen_instance(Family::kVertexCover, SizeTag::kTiny, 40);
  const MipSolution anchor = solve_mip(probe);
  HintSet hints = select_hints(tuned, probe, anchor.values, 0.5);

  SECTION("include and exclude are disjoint and name real variables") {
    std::set<std::string> names;
    for (const auto& v : probe.variables) names.insert(v.name);
    std::set<std::string> inc(hints.include.begin(), hints.include.end());
    for (const auto& n : hints.include) REQUIRE(names.count(n) == 1);
    for (const auto& n : hints.exclude) {
      REQUIRE(names.count(n) == 1);
      REQUIRE(inc.count(n) == 0);
    }
  }
  SECTION("hint file format") {
    const std::string text = write_hints(hints);
    const long lines = std::count(text.begin(), text.end(), '\n');
    REQUIRE(lines == static_cast<long>(hints.include.size() + hints.exclude.size()));
  }
  SECTION("uniform scores produce an empty hint set") {
    Checkpoint flat = tuned;
    for (double& v : flat.guidance_head.w1.data) v = 0.0;
    for (double& v : flat.guidance_head.b1.data) v = 0.0;
    for (double& v : flat.guidance_head.w2.data) v = 0.0;
    for (double& v : flat.guidance_head.b2.data) v = 0.0;
    HintSet empty = select_hints(flat, probe, anchor.values, 10.0);
    REQUIRE(empty.include.empty());
    REQUIRE(empty.exclude.empty());
  }
}

TEST_CASE("separable labels drive training BCE below 0.1", "[heads]") {
  // Vertex-cover pools hold the all-ones cover (every variable positive);
  // independent-set pools hold the empty set (every variable negative). The
  // two families' embeddings differ, so the labels are separable.
  std::vector<GuidanceExample> corpus;
  for (std::uint64_t s = 1; s <= 6; ++s) {
    GuidanceExample vc;
    vc.instance = gen_instance(Family::kVertexCover, SizeTag::kTiny, s);
    PoolEntry all_ones;
    all_ones.values.assign(vc.instance.num_variables(), 1.0);
    all_ones.objective = vc.instance.num_variables();
    vc.pool = {all_ones};
    corpus.push_back(std::move(vc));

    GuidanceExample is;
    is.instance = gen_instance(Family::kIndependentSet, SizeTag::kTiny, s);
    PoolEntry empty;
    empty.values.assign(is.instance.num_variables(), 0.0);
    empty.objective = 0.0;
    is.pool = {empty};
    corpus.push_back(std::move(is));
  }
  FinetuneOptions opts = FinetuneOptions::guidance_defaults();
  opts.epochs = 40;
  opts.learning_rate = 1e-2;
  opts.seed = 17;
  auto old = warning_handler();
  warning_handler() = [](const std::string&) {};  // short pools are expected
  Checkpoint tuned = finetune_guidance(base_checkpoint(), corpus, opts);
  warning_handler() = old;

  double bce = 0.0;
  long long count = 0;
  for (const auto& ex : corpus) {
    const BipartiteGraph g = apply_feature_scale(to_bipartite(ex.instance), tuned.scale);
    const auto scores = guidance_scores(tuned, g);
    const bool positive = ex.instance.objective_sense == ObjectiveSense::kMinimize;
    for (int j = 0; j < ex.instance.num_variables(); ++j) {
      const double s = std::clamp(scores[j], 1e-12, 1.0 - 1e-12);
      bce += positive ? -std::log(s) : -std::log(1.0 - s);
      ++count;
    }
  }
  bce /= static_cast<double>(count);
  REQUIRE(bce < 0.1);
}
