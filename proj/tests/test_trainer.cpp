#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "forge/embeddings.hpp"
#include "forge/trainer.hpp"

using namespace forge;

namespace {

namespace fs = std::filesystem;

// Small on-disk corpus shared by the trainer tests.
CorpusManifest tiny_corpus(const fs::path& dir, int per_family = 4) {
  std::vector<CorpusSpecEntry> spec = {
      {Family::kVertexCover, SizeTag::kTiny, per_family},
      {Family::kSetCover, SizeTag::kTiny, per_family},
      {Family::kIndependentSet, SizeTag::kTiny, per_family},
  };
  return gen_corpus(spec, 77, dir);
}

TrainConfig tiny_config() {
  TrainConfig config;
  config.d = 8;
  config.k = 12;
  config.epochs = 3;
  config.learning_rate = 1e-3;
  config.seed = 5;
  return config;
}

}  // namespace

TEST_CASE("augmented corpus size is |originals| x (1 + |fractions|)", "[trainer]") {
  std::vector<MipInstance> originals;
  for (std::uint64_t s = 1; s <= 4; ++s)
    originals.push_back(gen_instance(Family::kVertexCover, SizeTag::kTiny, s));
  TrainConfig config;
  const auto graphs = build_training_graphs(originals, config);
  REQUIRE(graphs.size() == 4 * (1 + 2));
  // Augmented graphs never gain constraints.
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(graphs[4 + 2 * i].n_constraints <= graphs[i].n_constraints);
    REQUIRE(graphs[4 + 2 * i].n_variables == graphs[i].n_variables);
  }
}

TEST_CASE("pretraining runs, logs, and reduces the loss", "[trainer]") {
  const fs::path dir = fs::temp_directory_path() / "forge_trainer_test";
  fs::remove_all(dir);
  CorpusManifest manifest = tiny_corpus(dir);
  TrainConfig config = tiny_config();
  config.epochs = 6;

  std::ostringstream log;
  Checkpoint ckpt = pretrain(manifest, config, &log);

  REQUIRE(ckpt.history.size() == 6);
  for (const auto& e : ckpt.history) {
    REQUIRE(std::isfinite(e.total));
    REQUIRE(e.codebook >= 0.0);
    REQUIRE(e.commitment >= 0.0);
  }
  REQUIRE(ckpt.history.back().total < ckpt.history.front().total);
  // CSV log: header plus one line per epoch.
  const std::string log_text = log.str();
  REQUIRE(std::count(log_text.begin(), log_text.end(), '\n') == 1 + 6);
  fs::remove_all(dir);
}

TEST_CASE("identical config and seed give identical loss history", "[trainer]") {
  const fs::path dir = fs::temp_directory_path() / "forge_trainer_det";
  fs::remove_all(dir);
  CorpusManifest manifest = tiny_corpus(dir, 3);
  TrainConfig config = tiny_config();

  Checkpoint a = pretrain(manifest, config);
  Checkpoint b = pretrain(manifest, config);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    REQUIRE(std::memcmp(&a.history[i].total, &b.history[i].total, sizeof(double)) == 0);
    REQUIRE(a.history[i].dead_code_fraction == b.history[i].dead_code_fraction);
  }
  fs::remove_all(dir);
}

TEST_CASE("codebook report counts every node exactly once", "[trainer]") {
  const fs::path dir = fs::temp_directory_path() / "forge_trainer_report";
  fs::remove_all(dir);
  CorpusManifest manifest = tiny_corpus(dir, 3);
  Checkpoint ckpt = pretrain(manifest, tiny_config());

  CodebookReport report = codebook_report(ckpt, manifest);
  long long node_total = 0;
  for (const auto& inst : load_corpus(manifest))
    node_total += inst.num_variables() + inst.num_constraints();
  long long sum = 0;
  for (long long c : report.counts) sum += c;
  REQUIRE(sum == node_total);
  REQUIRE(report.total_nodes == node_total);
  REQUIRE(report.counts.size() == static_cast<std::size_t>(ckpt.config.k));

  // Over-provisioned codebook reports dead codes without failing.
  TrainConfig big = tiny_config();
  big.k = 4096;
  big.epochs = 1;
  Checkpoint over = pretrain(manifest, big);
  CodebookReport over_report = codebook_report(over, manifest);
  REQUIRE(over_report.dead_fraction > 0.0);
  fs::remove_all(dir);
}

TEST_CASE("checkpoint round trip is bit-exact", "[trainer][checkpoint]") {
  const fs::path dir = fs::temp_directory_path() / "forge_ckpt_test";
  fs::remove_all(dir);
  CorpusManifest manifest = tiny_corpus(dir, 2);
  Checkpoint ckpt = pretrain(manifest, tiny_config());

  std::stringstream buffer;
  save_checkpoint(ckpt, buffer);
  Checkpoint loaded = load_checkpoint(buffer);

  const MipInstance probe = gen_instance(Family::kVertexCover, SizeTag::kTiny, 42);
  const BipartiteGraph g = apply_feature_scale(to_bipartite(probe), ckpt.scale);
  const Tensor before = encode_values(g, ckpt.params.encoder);
  const Tensor after = encode_values(g, loaded.params.encoder);
  REQUIRE(before.data.size() == after.data.size());
  REQUIRE(std::memcmp(before.data.data(), after.data.data(),
                      before.data.size() * sizeof(double)) == 0);
  REQUIRE(loaded.config.k == ckpt.config.k);
  REQUIRE(loaded.history.size() == ckpt.history.size());
  fs::remove_all(dir);
}

TEST_CASE("checkpoint integrity errors", "[trainer][checkpoint]") {
  const fs::path dir = fs::temp_directory_path() / "forge_ckpt_err";
  fs::remove_all(dir);
  CorpusManifest manifest = tiny_corpus(dir, 2);
  TrainConfig config = tiny_config();
  config.epochs = 1;
  Checkpoint ckpt = pretrain(manifest, config);
  std::stringstream buffer;
  save_checkpoint(ckpt, buffer);
  const std::string bytes = buffer.str();

  SECTION("truncated file") {
    std::stringstream cut(bytes.substr(0, bytes.size() / 2));
    REQUIRE_THROWS_AS(load_checkpoint(cut), DataError);
  }
  SECTION("bad magic") {
    std::string mangled = bytes;
    mangled[0] = 'X';
    std::stringstream in(mangled);
    REQUIRE_THROWS_AS(load_checkpoint(in), DataError);
  }
  SECTION("version mismatch") {
    std::string mangled = bytes;
    mangled[8] = 99;  // little-endian version field follows the magic
    std::stringstream in(mangled);
    REQUIRE_THROWS_WITH(load_checkpoint(in),
                        Catch::Matchers::ContainsSubstring("version"));
  }
  SECTION("trailing bytes") {
    std::stringstream in(bytes + "x");
    REQUIRE_THROWS_AS(load_checkpoint(in), DataError);
  }
  fs::remove_all(dir);
}
