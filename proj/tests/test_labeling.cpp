#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "forge/labeling.hpp"

using namespace forge;

namespace fs = std::filesystem;

TEST_CASE("label collection is positionally deterministic across job counts",
          "[labeling]") {
  const fs::path dir = fs::temp_directory_path() / "forge_labeling_test";
  fs::remove_all(dir);
  std::vector<CorpusSpecEntry> spec = {{Family::kSetCover, SizeTag::kTiny, 4},
                                       {Family::kIndependentSet, SizeTag::kTiny, 4}};
  CorpusManifest manifest = gen_corpus(spec, 9, dir);
  SolveLimits limits;
  limits.node_limit = 200;

  const LabeledGapCorpus serial = collect_gap_labels(manifest, limits, 1);
  const LabeledGapCorpus parallel = collect_gap_labels(manifest, limits, 2);
  REQUIRE(serial.labels.size() == parallel.labels.size());
  for (std::size_t i = 0; i < serial.labels.size(); ++i) {
    REQUIRE(serial.labels[i] == parallel.labels[i]);
    REQUIRE(serial.instances[i].name == parallel.instances[i].name);
  }

  const auto pools_a = collect_guidance_pools(manifest, limits, 5, 1);
  const auto pools_b = collect_guidance_pools(manifest, limits, 5, 2);
  REQUIRE(pools_a.size() == pools_b.size());
  for (std::size_t i = 0; i < pools_a.size(); ++i) {
    REQUIRE(pools_a[i].pool.size() == pools_b[i].pool.size());
    for (std::size_t j = 0; j < pools_a[i].pool.size(); ++j)
      REQUIRE(pools_a[i].pool[j].values == pools_b[i].pool[j].values);
  }
  fs::remove_all(dir);
}
