#pragma once

// Synthetic corpus generators for five binary problem families. Every
// instance is feasible by construction and deterministic per
// (family, size, seed). Vertex cover and independent set built from the same
// (size, seed) share the same underlying graph, which is what the embedding
// arithmetic experiments rely on.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "forge/common.hpp"
#include "forge/mip.hpp"
#include "forge/mps.hpp"
#include "forge/rng.hpp"

namespace forge {

enum class Family { kSetCover, kVertexCover, kIndependentSet, kBinPacking, kCombAuction };

// tiny exists for oracle suites that need exhaustively solvable instances.
enum class SizeTag { kTiny, kEasy, kMedium, kHard };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::kSetCover: return "set_cover";
    case Family::kVertexCover: return "vertex_cover";
    case Family::kIndependentSet: return "independent_set";
    case Family::kBinPacking: return "bin_packing";
    case Family::kCombAuction: return "comb_auction";
  }
  return "?";
}

inline const char* to_string(SizeTag s) {
  switch (s) {
    case SizeTag::kTiny: return "tiny";
    case SizeTag::kEasy: return "easy";
    case SizeTag::kMedium: return "medium";
    case SizeTag::kHard: return "hard";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "set_cover" || s == "sc") return Family::kSetCover;
  if (s == "vertex_cover" || s == "vc") return Family::kVertexCover;
  if (s == "independent_set" || s == "is") return Family::kIndependentSet;
  if (s == "bin_packing" || s == "bp") return Family::kBinPacking;
  if (s == "comb_auction" || s == "ca") return Family::kCombAuction;
  throw DataError("unknown family '" + s + "'");
}

inline SizeTag parse_size_tag(const std::string& s) {
  if (s == "tiny") return SizeTag::kTiny;
  if (s == "easy") return SizeTag::kEasy;
  if (s == "medium") return SizeTag::kMedium;
  if (s == "hard") return SizeTag::kHard;
  throw DataError("unknown size tag '" + s + "'");
}

struct ManifestEntry {
  std::string path;
  Family family = Family::kSetCover;
  SizeTag size = SizeTag::kEasy;
  std::uint64_t seed = 0;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
};

namespace gen_detail {

// Primary size knob: target variable count per tag.
inline int pick_count(SizeTag size, Rng& rng) {
  switch (size) {
    case SizeTag::kTiny: return 12 + rng.below_int(7);     // 12..18
    case SizeTag::kEasy: return 20 + rng.below_int(21);    // 20..40
    case SizeTag::kMedium: return 60 + rng.below_int(61);  // 60..120
    case SizeTag::kHard: return 200 + rng.below_int(201);  // 200..400
  }
  return 20;
}

struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

// Erdos-Renyi with density tied to the size tag, plus a Hamiltonian-path
// backbone so no vertex is isolated. Shared by vertex cover and independent
// set: the graph depends on (size, seed) only.
inline double target_degree(SizeTag size, Rng& rng) {
  switch (size) {
    case SizeTag::kTiny: return 3.4 + rng.uniform() * 0.8;
    case SizeTag::kEasy: return 2.2 + rng.uniform() * 0.4;
    case SizeTag::kMedium: return 7.5 + rng.uniform() * 1.0;
    case SizeTag::kHard: return 9.0 + rng.uniform() * 1.5;
  }
  return 3.0;
}

inline Graph random_graph(SizeTag size, std::uint64_t seed) {
  Rng rng = Rng::split(seed, "vcis-graph", static_cast<std::uint64_t>(size));
  Graph g;
  g.n = pick_count(size, rng);
  const double p =
      std::min(0.9, target_degree(size, rng) / std::max(1, g.n - 1));
  for (int u = 0; u < g.n; ++u)
    for (int v = u + 1; v < g.n; ++v) {
      const bool backbone = v == u + 1;
      if (backbone || rng.uniform() < p) g.edges.push_back({u, v});
    }
  return g;
}

inline VariableDef binary_var(std::string name, double obj) {
  VariableDef v;
  v.name = std::move(name);
  v.type = VarType::kBinary;
  v.lower_bound = 0.0;
  v.upper_bound = 1.0;
  v.objective_coeff = obj;
  return v;
}

}  // namespace gen_detail

inline MipInstance gen_instance(Family family, SizeTag size, std::uint64_t seed) {
  using gen_detail::binary_var;
  MipInstance inst;
  inst.name = std::string(to_string(family)) + "_" + to_string(size) + "_" +
              std::to_string(seed);

  switch (family) {
    case Family::kSetCover: {
      Rng rng = Rng::split(seed, "set-cover", static_cast<std::uint64_t>(size));
      const int n_sets = gen_detail::pick_count(size, rng);
      // Element-to-set ratio scales with the size tag, like graph density.
      const double elem_ratio = size == SizeTag::kMedium
                                    ? 1.45
                                    : (size == SizeTag::kHard ? 1.7 : 0.55);
      const int n_elems = std::max(4, static_cast<int>(n_sets * elem_ratio));
      // memberships[e] = sets covering element e
      std::vector<std::vector<int>> members(n_elems);
      for (int s = 0; s < n_sets; ++s) {
        const int span = 2 + rng.below_int(5);
        for (int t = 0; t < span; ++t) members[rng.below_int(n_elems)].push_back(s);
      }
      for (int e = 0; e < n_elems; ++e)
        if (members[e].empty()) members[e].push_back(rng.below_int(n_sets));
      for (int s = 0; s < n_sets; ++s)
        inst.variables.push_back(binary_var("s" + std::to_string(s), 1.0));
      for (int e = 0; e < n_elems; ++e) {
        ConstraintDef c;
        c.name = "e" + std::to_string(e);
        c.sense = Sense::kGreaterEqual;
        c.rhs = 1.0;
        const int row = inst.num_constraints();
        inst.constraints.push_back(c);
        std::vector<bool> used(n_sets, false);
        for (int s : members[e]) {
          if (used[s]) continue;
          used[s] = true;
          inst.coefficients.push_back({row, s, 1.0});
        }
      }
      break;
    }
    case Family::kVertexCover:
    case Family::kIndependentSet: {
      const auto g = gen_detail::random_graph(size, seed);
      const bool cover = family == Family::kVertexCover;
      inst.objective_sense =
          cover ? ObjectiveSense::kMinimize : ObjectiveSense::kMaximize;
      for (int v = 0; v < g.n; ++v)
        inst.variables.push_back(binary_var("x" + std::to_string(v), 1.0));
      int row = 0;
      for (const auto& [u, v] : g.edges) {
        ConstraintDef c;
        c.name = "edge" + std::to_string(row);
        c.sense = cover ? Sense::kGreaterEqual : Sense::kLessEqual;
        c.rhs = 1.0;
        inst.constraints.push_back(c);
        inst.coefficients.push_back({row, u, 1.0});
        inst.coefficients.push_back({row, v, 1.0});
        ++row;
      }
      break;
    }
    case Family::kBinPacking: {
      Rng rng = Rng::split(seed, "bin-packing", static_cast<std::uint64_t>(size));
      const int total = gen_detail::pick_count(size, rng);
      // total ~ items*bins + bins with bins = items.
      int items = 2;
      while ((items + 1) * (items + 2) <= total) ++items;
      const int bins = items;  // one bin per item keeps it feasible
      std::vector<double> weight(items);
      for (auto& w : weight) w = 1 + rng.below_int(10);
      const double capacity = 14.0;
      for (int i = 0; i < items; ++i)
        for (int j = 0; j < bins; ++j)
          inst.variables.push_back(
              binary_var("x_" + std::to_string(i) + "_" + std::to_string(j), 0.0));
      for (int j = 0; j < bins; ++j)
        inst.variables.push_back(binary_var("y" + std::to_string(j), 1.0));
      const auto xvar = [&](int i, int j) { return i * bins + j; };
      const int yvar0 = items * bins;
      for (int i = 0; i < items; ++i) {
        ConstraintDef c;
        c.name = "assign" + std::to_string(i);
        c.sense = Sense::kEqual;
        c.rhs = 1.0;
        const int row = inst.num_constraints();
        inst.constraints.push_back(c);
        for (int j = 0; j < bins; ++j)
          inst.coefficients.push_back({row, xvar(i, j), 1.0});
      }
      for (int j = 0; j < bins; ++j) {
        ConstraintDef c;
        c.name = "cap" + std::to_string(j);
        c.sense = Sense::kLessEqual;
        c.rhs = 0.0;
        const int row = inst.num_constraints();
        inst.constraints.push_back(c);
        for (int i = 0; i < items; ++i)
          inst.coefficients.push_back({row, xvar(i, j), weight[i]});
        inst.coefficients.push_back({row, yvar0 + j, -capacity});
      }
      break;
    }
    case Family::kCombAuction: {
      Rng rng = Rng::split(seed, "comb-auction", static_cast<std::uint64_t>(size));
      const int n_bids = gen_detail::pick_count(size, rng);
      const int n_items = std::max(4, n_bids * 2 / 3);
      inst.objective_sense = ObjectiveSense::kMaximize;
      // Bundle mixes differ by size tag at a matched mean: easy auctions are
      // all 3-item bundles, harder ones mix 2- and 4-item (or 2/5) bundles.
      // Composition separates the tags; the per-instance mean does not.
      const auto draw_bundle = [&](int b) -> int {
        switch (size) {
          case SizeTag::kTiny: return 2 + b % 2;
          case SizeTag::kEasy: return 3;
          case SizeTag::kMedium: return b % 2 ? 2 : 4;  // alternating, mean 3
          case SizeTag::kHard: return b % 2 ? 2 : 5;
        }
        return 3;
      };
      // A small premium-bid population carries heavy-tailed prices, like the
      // outlier coefficients of real corpora.
      std::vector<std::vector<int>> bundles(n_bids);
      for (int b = 0; b < n_bids; ++b) {
        const int bundle = draw_bundle(b);
        const auto picked = rng.sample_without_replacement(n_items, bundle);
        bundles[b] = picked;
        const bool premium = rng.uniform() < 0.08;
        const double price = premium ? rng.uniform(15.0, 25.0)
                                     : bundle + rng.uniform(-0.4, 0.4);
        inst.variables.push_back(binary_var("bid" + std::to_string(b), price));
      }
      std::vector<std::vector<int>> holders(n_items);
      for (int b = 0; b < n_bids; ++b)
        for (int it : bundles[b]) holders[it].push_back(b);
      for (int it = 0; it < n_items; ++it) {
        if (holders[it].empty()) continue;  // unrequested item, no row
        ConstraintDef c;
        c.name = "item" + std::to_string(it);
        c.sense = Sense::kLessEqual;
        c.rhs = 1.0;
        const int row = inst.num_constraints();
        inst.constraints.push_back(c);
        for (int b : holders[it]) inst.coefficients.push_back({row, b, 1.0});
      }
      break;
    }
  }

  inst.validate();
  return inst;
}

struct CorpusSpecEntry {
  Family family;
  SizeTag size;
  int count = 0;
};

inline void write_manifest(const CorpusManifest& manifest,
                           const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest " + csv_path.string());
  out << "path,family,size,seed\n";
  for (const auto& e : manifest.entries)
    out << e.path << "," << to_string(e.family) << "," << to_string(e.size) << ","
        << e.seed << "\n";
}

// Paths in the CSV are relative to the manifest's directory.
inline CorpusManifest read_manifest(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot read manifest " + csv_path.string());
  const auto base = csv_path.parent_path();
  CorpusManifest manifest;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line_no == 1) continue;  // header
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 4)
      throw ParseError("manifest rows need path,family,size,seed", line_no);
    ManifestEntry e;
    e.path = (base / fields[0]).string();
    e.family = parse_family(fields[1]);
    e.size = parse_size_tag(fields[2]);
    e.seed = std::stoull(fields[3]);
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

inline CorpusManifest gen_corpus(const std::vector<CorpusSpecEntry>& spec,
                                 std::uint64_t seed,
                                 const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  CorpusManifest manifest;
  for (const auto& entry : spec) {
    for (int i = 0; i < entry.count; ++i) {
      const std::uint64_t inst_seed =
          splitmix64(seed ^ hash_tag(to_string(entry.family)) ^
                     splitmix64(static_cast<std::uint64_t>(entry.size) * 1315423911ULL +
                                static_cast<std::uint64_t>(i)));
      MipInstance inst = gen_instance(entry.family, entry.size, inst_seed);
      char fname[128];
      std::snprintf(fname, sizeof(fname), "%s_%s_%04d.mps", to_string(entry.family),
                    to_string(entry.size), i);
      const auto path = out_dir / fname;
      std::ofstream out(path, std::ios::binary);
      if (!out) throw DataError("cannot write " + path.string());
      out << write_mps(inst);
      manifest.entries.push_back({fname, entry.family, entry.size, inst_seed});
    }
  }
  write_manifest(manifest, out_dir / "manifest.csv");
  // Re-read so returned paths are resolved like any other consumer's.
  return read_manifest(out_dir / "manifest.csv");
}

}  // namespace forge
