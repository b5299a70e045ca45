#pragma once

// Corpus-level label collection for fine-tuning: integrality-gap labels and
// feasible-solution pools from the mini-solver. Parallel across instances;
// results are positionally deterministic.

#include <string>
#include <vector>

#include "forge/generators.hpp"
#include "forge/heads.hpp"
#include "forge/minisolve.hpp"
#include "forge/parallel.hpp"
#include "forge/trainer.hpp"

namespace forge {

struct LabeledGapCorpus {
  std::vector<MipInstance> instances;
  std::vector<double> labels;
  std::vector<std::string> families;
  std::vector<std::string> sizes;
};

// Instances without a usable label (degenerate LP, no incumbent) are
// skipped with a warning from integrality_gap_label.
inline LabeledGapCorpus collect_gap_labels(const CorpusManifest& manifest,
                                           const SolveLimits& limits,
                                           int jobs = 1) {
  const std::vector<MipInstance> instances = load_corpus(manifest);
  std::vector<GapLabel> raw(instances.size());
  parallel_for(instances.size(), jobs,
               [&](std::size_t i) { raw[i] = integrality_gap_label(instances[i], limits); });
  LabeledGapCorpus out;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!raw[i].available) continue;
    out.instances.push_back(instances[i]);
    out.labels.push_back(raw[i].label);
    out.families.push_back(to_string(manifest.entries[i].family));
    out.sizes.push_back(to_string(manifest.entries[i].size));
  }
  return out;
}

// Pools are the branch-and-bound improving incumbents under the given
// limits, mirroring how a solver's solution pool fills up during search.
inline std::vector<GuidanceExample> collect_guidance_pools(
    const CorpusManifest& manifest, const SolveLimits& limits, int pool_size = 5,
    int jobs = 1) {
  const std::vector<MipInstance> instances = load_corpus(manifest);
  std::vector<GuidanceExample> out(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    out[i].instance = instances[i];
    SolveLimits pool_limits = limits;
    pool_limits.pool_size = pool_size;
    pool_limits.diverse_pool = true;
    out[i].pool = solve_mip(instances[i], pool_limits).pool;
  });
  // Drop instances whose pool came back empty.
  std::vector<GuidanceExample> kept;
  for (auto& ex : out) {
    if (ex.pool.empty()) {
      warn("no feasible solutions pooled for '" + ex.instance.name + "'; skipped");
      continue;
    }
    kept.push_back(std::move(ex));
  }
  return kept;
}

}  // namespace forge
