#pragma once

// Versioned binary checkpoint: little-endian, length-prefixed tensors, end
// sentinel for truncation detection. Parameters are stored at the engine's
// native 64-bit precision so a load reproduces forward passes bit-exactly.

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "forge/bipartite.hpp"
#include "forge/common.hpp"
#include "forge/tensor.hpp"
#include "forge/vqgae.hpp"

namespace forge {

struct TrainConfig {
  int d = 64;
  int k = 128;
  int edge_dim = 0;  // 0: use d
  double alpha = 0.25;
  double learning_rate = 1e-4;
  int epochs = 10;
  std::uint64_t seed = 1;
  std::vector<double> augment_fractions = {0.05, 0.10};
  double negative_ratio = 1.0;  // sampled non-edges per true edge

  int effective_edge_dim() const { return edge_dim > 0 ? edge_dim : d; }

  // Full-scale hyperparameters; never required by the test suite.
  static TrainConfig full_profile() {
    TrainConfig c;
    c.d = 1024;
    c.k = 5000;
    return c;
  }
};

struct EpochStats {
  double edge_recon = 0.0;
  double feat_recon = 0.0;
  double codebook = 0.0;
  double commitment = 0.0;
  double total = 0.0;
  double dead_code_fraction = 0.0;
};

struct GapHeadParams {
  Tensor w1, b1, w2, b2;  // d -> hidden -> 1
  // Prediction clamp hulls from the training labels, per objective sense.
  bool has_min_hull = false;
  double min_lo = 1.0, min_hi = 1.0;
  bool has_max_hull = false;
  double max_lo = 1.0, max_hi = 1.0;
};

struct GuidanceHeadParams {
  Tensor w1, b1, w2, b2;  // d -> hidden -> 1, sigmoid applied on use
};

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;
  TrainConfig config;
  FeatureScale scale;
  VqGaeParams params;
  bool has_gap_head = false;
  GapHeadParams gap_head;
  bool has_guidance_head = false;
  GuidanceHeadParams guidance_head;
  std::vector<EpochStats> history;
};

namespace ckpt_detail {

constexpr char kMagic[8] = {'F', 'O', 'R', 'G', 'E', 'C', 'K', 'P'};
constexpr char kEnd[4] = {'F', 'G', 'N', 'D'};

inline void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

inline void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw DataError("truncated checkpoint");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

inline std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8))
    throw DataError("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline void put_tensor(std::ostream& out, const Tensor& t) {
  put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
  for (auto d : t.shape) put_u64(out, static_cast<std::uint64_t>(d));
  for (double v : t.data) put_f64(out, v);
}

inline Tensor get_tensor(std::istream& in) {
  const std::uint32_t ndim = get_u32(in);
  if (ndim > 4) throw DataError("corrupt checkpoint: bad tensor rank");
  std::vector<std::int64_t> shape(ndim);
  for (auto& d : shape) {
    d = static_cast<std::int64_t>(get_u64(in));
    if (d < 0 || d > (1 << 24)) throw DataError("corrupt checkpoint: bad dimension");
  }
  Tensor t(shape);
  for (auto& v : t.data) v = get_f64(in);
  return t;
}

}  // namespace ckpt_detail

inline void save_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  using namespace ckpt_detail;
  out.write(kMagic, 8);
  put_u32(out, Checkpoint::kVersion);
  put_u32(out, 8);  // element width in bytes

  const TrainConfig& c = ckpt.config;
  put_u32(out, static_cast<std::uint32_t>(c.d));
  put_u32(out, static_cast<std::uint32_t>(c.k));
  put_u32(out, static_cast<std::uint32_t>(c.edge_dim));
  put_f64(out, c.alpha);
  put_f64(out, c.learning_rate);
  put_u32(out, static_cast<std::uint32_t>(c.epochs));
  put_u64(out, c.seed);
  put_u32(out, static_cast<std::uint32_t>(c.augment_fractions.size()));
  for (double f : c.augment_fractions) put_f64(out, f);
  put_f64(out, c.negative_ratio);

  for (int col = 0; col < kNodeFeatureDim; ++col) {
    put_f64(out, ckpt.scale.mean[col]);
    put_f64(out, ckpt.scale.stddev[col]);
  }

  put_f64(out, ckpt.params.alpha);
  const VqGaeParams& p = ckpt.params;
  for (const Tensor* t : {&p.encoder.w_self1, &p.encoder.w_nbr1, &p.encoder.b1,
                          &p.encoder.w_self2, &p.encoder.w_nbr2, &p.encoder.b2,
                          &p.codebook.codewords, &p.decoder.w_node, &p.decoder.b_node,
                          &p.decoder.w_edge, &p.decoder.b_edge})
    put_tensor(out, *t);
  put_u32(out, static_cast<std::uint32_t>(p.codebook.usage.size()));
  for (long long u : p.codebook.usage) put_u64(out, static_cast<std::uint64_t>(u));

  put_u32(out, ckpt.has_gap_head ? 1 : 0);
  if (ckpt.has_gap_head) {
    const GapHeadParams& h = ckpt.gap_head;
    put_tensor(out, h.w1);
    put_tensor(out, h.b1);
    put_tensor(out, h.w2);
    put_tensor(out, h.b2);
    put_u32(out, h.has_min_hull ? 1 : 0);
    put_f64(out, h.min_lo);
    put_f64(out, h.min_hi);
    put_u32(out, h.has_max_hull ? 1 : 0);
    put_f64(out, h.max_lo);
    put_f64(out, h.max_hi);
  }
  put_u32(out, ckpt.has_guidance_head ? 1 : 0);
  if (ckpt.has_guidance_head) {
    const GuidanceHeadParams& h = ckpt.guidance_head;
    put_tensor(out, h.w1);
    put_tensor(out, h.b1);
    put_tensor(out, h.w2);
    put_tensor(out, h.b2);
  }

  put_u32(out, static_cast<std::uint32_t>(ckpt.history.size()));
  for (const auto& e : ckpt.history) {
    put_f64(out, e.edge_recon);
    put_f64(out, e.feat_recon);
    put_f64(out, e.codebook);
    put_f64(out, e.commitment);
    put_f64(out, e.total);
    put_f64(out, e.dead_code_fraction);
  }
  out.write(kEnd, 4);
  if (!out) throw DataError("checkpoint write failed");
}

inline Checkpoint load_checkpoint(std::istream& in) {
  using namespace ckpt_detail;
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw DataError("not a forge checkpoint");
  const std::uint32_t version = get_u32(in);
  if (version != Checkpoint::kVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t width = get_u32(in);
  if (width != 8) throw DataError("unsupported checkpoint element width");

  Checkpoint ckpt;
  TrainConfig& c = ckpt.config;
  c.d = static_cast<int>(get_u32(in));
  c.k = static_cast<int>(get_u32(in));
  c.edge_dim = static_cast<int>(get_u32(in));
  c.alpha = get_f64(in);
  c.learning_rate = get_f64(in);
  c.epochs = static_cast<int>(get_u32(in));
  c.seed = get_u64(in);
  c.augment_fractions.resize(get_u32(in));
  for (auto& f : c.augment_fractions) f = get_f64(in);
  c.negative_ratio = get_f64(in);

  for (int col = 0; col < kNodeFeatureDim; ++col) {
    ckpt.scale.mean[col] = get_f64(in);
    ckpt.scale.stddev[col] = get_f64(in);
  }

  ckpt.params.alpha = get_f64(in);
  VqGaeParams& p = ckpt.params;
  for (Tensor* t : {&p.encoder.w_self1, &p.encoder.w_nbr1, &p.encoder.b1,
                    &p.encoder.w_self2, &p.encoder.w_nbr2, &p.encoder.b2,
                    &p.codebook.codewords, &p.decoder.w_node, &p.decoder.b_node,
                    &p.decoder.w_edge, &p.decoder.b_edge})
    *t = get_tensor(in);
  p.codebook.usage.resize(get_u32(in));
  for (auto& u : p.codebook.usage) u = static_cast<long long>(get_u64(in));

  ckpt.has_gap_head = get_u32(in) != 0;
  if (ckpt.has_gap_head) {
    GapHeadParams& h = ckpt.gap_head;
    h.w1 = get_tensor(in);
    h.b1 = get_tensor(in);
    h.w2 = get_tensor(in);
    h.b2 = get_tensor(in);
    h.has_min_hull = get_u32(in) != 0;
    h.min_lo = get_f64(in);
    h.min_hi = get_f64(in);
    h.has_max_hull = get_u32(in) != 0;
    h.max_lo = get_f64(in);
    h.max_hi = get_f64(in);
  }
  ckpt.has_guidance_head = get_u32(in) != 0;
  if (ckpt.has_guidance_head) {
    GuidanceHeadParams& h = ckpt.guidance_head;
    h.w1 = get_tensor(in);
    h.b1 = get_tensor(in);
    h.w2 = get_tensor(in);
    h.b2 = get_tensor(in);
  }

  ckpt.history.resize(get_u32(in));
  for (auto& e : ckpt.history) {
    e.edge_recon = get_f64(in);
    e.feat_recon = get_f64(in);
    e.codebook = get_f64(in);
    e.commitment = get_f64(in);
    e.total = get_f64(in);
    e.dead_code_fraction = get_f64(in);
  }

  char end[4];
  if (!in.read(end, 4) || std::memcmp(end, kEnd, 4) != 0)
    throw DataError("truncated checkpoint");
  char extra;
  if (in.read(&extra, 1)) throw DataError("trailing bytes after checkpoint");
  return ckpt;
}

inline void save_checkpoint_file(const Checkpoint& ckpt,
                                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  save_checkpoint(ckpt, out);
}

inline Checkpoint load_checkpoint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace forge
