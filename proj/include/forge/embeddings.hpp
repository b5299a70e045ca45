#pragma once

// Instance- and node-level embeddings from a checkpoint, plus the two
// training-free baselines (mean readout, two-hop label propagation).

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "forge/bipartite.hpp"
#include "forge/checkpoint.hpp"
#include "forge/common.hpp"
#include "forge/vqgae.hpp"

namespace forge {

struct InstanceEmbedding {
  std::string name;
  std::string family_tag;
  std::string size_tag;
  bool normalized = false;
  std::vector<double> values;  // length k
};

inline std::vector<double> histogram_from_codes(const std::vector<int>& codes, int k,
                                                bool normalized) {
  std::vector<double> hist(k, 0.0);
  for (int code : codes) {
    if (code < 0 || code >= k) throw DataError("code outside [0, k)");
    hist[code] += 1.0;
  }
  if (normalized && !codes.empty())
    for (double& v : hist) v /= static_cast<double>(codes.size());
  return hist;
}

struct NodeEmbeddings {
  std::vector<int> codes;  // per node
  Tensor codewords;        // N x d, row i = codeword of node i's code
  Tensor encoder_outputs;  // N x d
};

inline NodeEmbeddings node_embeddings(const BipartiteGraph& scaled_graph,
                                      const Checkpoint& ckpt) {
  if (!scaled_graph.scaled)
    throw DataError("node_embeddings expects a feature-scaled graph");
  NodeEmbeddings out;
  out.encoder_outputs = encode_values(scaled_graph, ckpt.params.encoder);
  out.codes = assign_codes(out.encoder_outputs, ckpt.params.codebook.codewords);
  out.codewords = Tensor::zeros(out.encoder_outputs.rows(), ckpt.params.dim());
  for (std::int64_t i = 0; i < out.codewords.rows(); ++i)
    for (int c = 0; c < ckpt.params.dim(); ++c)
      out.codewords.at(i, c) = ckpt.params.codebook.codewords.at(out.codes[i], c);
  return out;
}

inline InstanceEmbedding instance_embedding(const BipartiteGraph& scaled_graph,
                                            const Checkpoint& ckpt, bool normalized) {
  InstanceEmbedding out;
  out.name = scaled_graph.name;
  out.normalized = normalized;
  const NodeEmbeddings nodes = node_embeddings(scaled_graph, ckpt);
  out.values = histogram_from_codes(nodes.codes, ckpt.config.k, normalized);
  return out;
}

inline std::vector<double> mean_readout(const BipartiteGraph& scaled_graph,
                                        const Checkpoint& ckpt) {
  const Tensor h = encode_values(scaled_graph, ckpt.params.encoder);
  std::vector<double> mean(h.cols(), 0.0);
  for (std::int64_t r = 0; r < h.rows(); ++r)
    for (std::int64_t c = 0; c < h.cols(); ++c) mean[c] += h.at(r, c);
  if (h.rows() > 0)
    for (double& v : mean) v /= static_cast<double>(h.rows());
  return mean;
}

// Two rounds of lazy propagation x_i <- mean over {i} u N(i), then a mean
// readout over nodes. Operates on the static 10-dim features.
inline std::vector<double> label_propagation_embedding(const BipartiteGraph& graph) {
  const int n = graph.num_nodes();
  std::vector<std::vector<int>> nbr(n);
  for (const auto& e : graph.edges) {
    nbr[e.constraint].push_back(graph.variable_node(e.variable));
    nbr[graph.variable_node(e.variable)].push_back(e.constraint);
  }
  Tensor x = graph.node_features;
  for (int hop = 0; hop < 2; ++hop) {
    Tensor next = Tensor::zeros(n, kNodeFeatureDim);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < kNodeFeatureDim; ++c) next.at(i, c) = x.at(i, c);
      for (int j : nbr[i])
        for (int c = 0; c < kNodeFeatureDim; ++c) next.at(i, c) += x.at(j, c);
      const double inv = 1.0 / static_cast<double>(1 + nbr[i].size());
      for (int c = 0; c < kNodeFeatureDim; ++c) next.at(i, c) *= inv;
    }
    x = std::move(next);
  }
  std::vector<double> mean(kNodeFeatureDim, 0.0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < kNodeFeatureDim; ++c) mean[c] += x.at(r, c);
  if (n > 0)
    for (double& v : mean) v /= static_cast<double>(n);
  return mean;
}

// Embedding store, CSV flavor: name,family,size then k value columns.
inline void write_embeddings_csv(const std::vector<InstanceEmbedding>& embs,
                                 std::ostream& out) {
  out << "name,family,size,k,values...\n";
  for (const auto& e : embs) {
    out << e.name << "," << e.family_tag << "," << e.size_tag << ","
        << e.values.size();
    char buf[40];
    for (double v : e.values) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out << buf;
    }
    out << "\n";
  }
}

// Embedding store, binary flavor: length-prefixed records.
inline void write_embeddings_binary(const std::vector<InstanceEmbedding>& embs,
                                    std::ostream& out) {
  const char magic[8] = {'F', 'O', 'R', 'G', 'E', 'E', 'M', 'B'};
  out.write(magic, 8);
  auto put_u32 = [&](std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
  };
  auto put_str = [&](const std::string& s) {
    put_u32(static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  };
  put_u32(1);  // version
  put_u32(static_cast<std::uint32_t>(embs.size()));
  for (const auto& e : embs) {
    put_str(e.name);
    put_str(e.family_tag);
    put_str(e.size_tag);
    put_u32(e.normalized ? 1 : 0);
    put_u32(static_cast<std::uint32_t>(e.values.size()));
    for (double v : e.values) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      char b[8];
      for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
      out.write(b, 8);
    }
  }
}

inline std::vector<InstanceEmbedding> read_embeddings_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, "FORGEEMB", 8) != 0)
    throw DataError("not an embedding store");
  auto get_u32 = [&]() {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
      throw DataError("truncated embedding store");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  };
  auto get_str = [&]() {
    const std::uint32_t len = get_u32();
    std::string s(len, '\0');
    if (len && !in.read(s.data(), len)) throw DataError("truncated embedding store");
    return s;
  };
  if (get_u32() != 1) throw DataError("unsupported embedding store version");
  const std::uint32_t count = get_u32();
  std::vector<InstanceEmbedding> out(count);
  for (auto& e : out) {
    e.name = get_str();
    e.family_tag = get_str();
    e.size_tag = get_str();
    e.normalized = get_u32() != 0;
    e.values.resize(get_u32());
    for (double& v : e.values) {
      unsigned char b[8];
      if (!in.read(reinterpret_cast<char*>(b), 8))
        throw DataError("truncated embedding store");
      std::uint64_t bits = 0;
      for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
      std::memcpy(&v, &bits, 8);
    }
  }
  return out;
}

}  // namespace forge
