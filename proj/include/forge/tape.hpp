#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "forge/common.hpp"
#include "forge/tensor.hpp"

namespace forge {

// Reverse-mode tape over dense tensors. Forward values are computed eagerly
// as nodes are appended, so data-dependent decisions (nearest-code lookup,
// negative sampling) can read values mid-construction. backward() walks the
// record once in reverse. stop_gradient blocks flow exactly: downstream
// contributions through that edge are zero, and recompute_forward() keeps the
// recorded value of stop_gradient nodes frozen, which is the function the
// tape differentiates (used by the finite-difference checks).
class Tape {
 public:
  using NodeId = int;

  enum class Op {
    kInput,
    kMatmul,
    kAdd,
    kAddRowVec,
    kSub,
    kMul,
    kScale,
    kAddConst,
    kRelu,
    kSigmoid,
    kSoftplus,
    kAbs,
    kSqrtEps,
    kRowGather,
    kSegmentMean,
    kConcatRows,
    kSum,
    kSumRows,
    kMean,
    kMse,
    kStopGrad,
    kBceLogitsMean,
  };

  NodeId input(Tensor value, bool requires_grad) {
    Node n;
    n.op = Op::kInput;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    return push(std::move(n));
  }

  NodeId constant(Tensor value) { return input(std::move(value), false); }

  NodeId matmul(NodeId a, NodeId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.cols() != tb.rows())
      throw DataError("matmul shape mismatch " + ta.shape_str() + " * " +
                      tb.shape_str());
    Node n = binary(Op::kMatmul, a, b);
    n.value = Tensor::zeros(ta.rows(), tb.cols());
    matmul_into(ta, tb, n.value);
    return push(std::move(n));
  }

  NodeId add(NodeId a, NodeId b) { return elementwise(Op::kAdd, a, b); }
  NodeId sub(NodeId a, NodeId b) { return elementwise(Op::kSub, a, b); }
  NodeId mul(NodeId a, NodeId b) { return elementwise(Op::kMul, a, b); }

  // (N x d) + (1 x d), bias broadcast over rows.
  NodeId add_rowvec(NodeId a, NodeId bias) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(bias);
    if (tb.rows() != 1 || tb.cols() != ta.cols())
      throw DataError("add_rowvec bias shape mismatch");
    Node n = binary(Op::kAddRowVec, a, bias);
    n.value = ta;
    for (std::int64_t r = 0; r < ta.rows(); ++r)
      for (std::int64_t c = 0; c < ta.cols(); ++c)
        n.value.at(r, c) += tb.at(0, c);
    return push(std::move(n));
  }

  NodeId scale(NodeId a, double s) {
    Node n = unary(Op::kScale, a);
    n.scalar = s;
    n.value = value(a);
    for (auto& v : n.value.data) v *= s;
    return push(std::move(n));
  }

  NodeId add_const(NodeId a, double c) {
    Node n = unary(Op::kAddConst, a);
    n.scalar = c;
    n.value = value(a);
    for (auto& v : n.value.data) v += c;
    return push(std::move(n));
  }

  NodeId relu(NodeId a) {
    Node n = unary(Op::kRelu, a);
    n.value = value(a);
    for (auto& v : n.value.data) v = v > 0.0 ? v : 0.0;
    return push(std::move(n));
  }

  NodeId sigmoid(NodeId a) {
    Node n = unary(Op::kSigmoid, a);
    n.value = value(a);
    for (auto& v : n.value.data) v = sigmoid_stable(v);
    return push(std::move(n));
  }

  NodeId softplus(NodeId a) {
    Node n = unary(Op::kSoftplus, a);
    n.value = value(a);
    for (auto& v : n.value.data) v = softplus_stable(v);
    return push(std::move(n));
  }

  NodeId abs(NodeId a) {
    Node n = unary(Op::kAbs, a);
    n.value = value(a);
    for (auto& v : n.value.data) v = std::abs(v);
    return push(std::move(n));
  }

  // sqrt(x + 1e-12); the epsilon keeps the derivative finite at zero
  // distances (coincident embeddings in the triplet loss).
  NodeId sqrt_eps(NodeId a) {
    Node n = unary(Op::kSqrtEps, a);
    n.value = value(a);
    for (auto& v : n.value.data) v = std::sqrt(v + kSqrtEpsilon);
    return push(std::move(n));
  }

  NodeId row_gather(NodeId a, std::vector<int> idx) {
    const Tensor& ta = value(a);
    for (int i : idx)
      if (i < 0 || i >= ta.rows()) throw DataError("row_gather index out of range");
    Node n = unary(Op::kRowGather, a);
    n.indices = std::move(idx);
    n.value = Tensor::zeros(static_cast<std::int64_t>(n.indices.size()), ta.cols());
    for (std::size_t r = 0; r < n.indices.size(); ++r)
      for (std::int64_t c = 0; c < ta.cols(); ++c)
        n.value.at(static_cast<std::int64_t>(r), c) = ta.at(n.indices[r], c);
    return push(std::move(n));
  }

  // Row s of the output is the mean of input rows with segment id s; empty
  // segments yield zero rows.
  NodeId segment_mean(NodeId a, std::vector<int> segments, int num_segments) {
    const Tensor& ta = value(a);
    if (static_cast<std::int64_t>(segments.size()) != ta.rows())
      throw DataError("segment_mean needs one segment id per row");
    for (int s : segments)
      if (s < 0 || s >= num_segments) throw DataError("segment id out of range");
    Node n = unary(Op::kSegmentMean, a);
    n.indices = std::move(segments);
    n.aux_int = num_segments;
    n.value = Tensor::zeros(num_segments, ta.cols());
    n.counts.assign(num_segments, 0);
    for (std::size_t r = 0; r < n.indices.size(); ++r) {
      ++n.counts[n.indices[r]];
      for (std::int64_t c = 0; c < ta.cols(); ++c)
        n.value.at(n.indices[r], c) += ta.at(static_cast<std::int64_t>(r), c);
    }
    for (int s = 0; s < num_segments; ++s)
      if (n.counts[s] > 0)
        for (std::int64_t c = 0; c < ta.cols(); ++c)
          n.value.at(s, c) /= n.counts[s];
    return push(std::move(n));
  }

  NodeId concat_rows(NodeId a, NodeId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (ta.cols() != tb.cols()) throw DataError("concat_rows column mismatch");
    Node n = binary(Op::kConcatRows, a, b);
    n.value = Tensor::zeros(ta.rows() + tb.rows(), ta.cols());
    std::copy(ta.data.begin(), ta.data.end(), n.value.data.begin());
    std::copy(tb.data.begin(), tb.data.end(),
              n.value.data.begin() + ta.data.size());
    return push(std::move(n));
  }

  NodeId sum(NodeId a) {
    Node n = unary(Op::kSum, a);
    double acc = 0.0;
    for (double v : value(a).data) acc += v;
    n.value = Tensor::scalar(acc);
    return push(std::move(n));
  }

  NodeId sum_rows(NodeId a) {
    const Tensor& ta = value(a);
    Node n = unary(Op::kSumRows, a);
    n.value = Tensor::zeros(ta.rows(), 1);
    for (std::int64_t r = 0; r < ta.rows(); ++r) {
      double acc = 0.0;
      for (std::int64_t c = 0; c < ta.cols(); ++c) acc += ta.at(r, c);
      n.value.at(r, 0) = acc;
    }
    return push(std::move(n));
  }

  NodeId mean(NodeId a) {
    Node n = unary(Op::kMean, a);
    double acc = 0.0;
    for (double v : value(a).data) acc += v;
    n.value = Tensor::scalar(acc / static_cast<double>(value(a).numel()));
    return push(std::move(n));
  }

  // Mean over all elements of the squared difference.
  NodeId mse(NodeId a, NodeId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (!ta.same_shape(tb)) throw DataError("mse shape mismatch");
    Node n = binary(Op::kMse, a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < ta.data.size(); ++i) {
      const double d = ta.data[i] - tb.data[i];
      acc += d * d;
    }
    n.value = Tensor::scalar(acc / static_cast<double>(ta.numel()));
    return push(std::move(n));
  }

  NodeId stop_gradient(NodeId a) {
    Node n;
    n.op = Op::kStopGrad;
    n.a = a;
    n.value = value(a);
    n.requires_grad = false;
    return push(std::move(n));
  }

  // Numerically stable mean binary cross-entropy on logits; targets fixed.
  NodeId bce_with_logits_mean(NodeId logits, Tensor targets) {
    const Tensor& tl = value(logits);
    if (!tl.same_shape(targets)) throw DataError("bce target shape mismatch");
    Node n = unary(Op::kBceLogitsMean, logits);
    n.aux = std::move(targets);
    double acc = 0.0;
    for (std::size_t i = 0; i < tl.data.size(); ++i) {
      const double s = tl.data[i];
      const double t = n.aux.data[i];
      acc += std::max(s, 0.0) - s * t + std::log1p(std::exp(-std::abs(s)));
    }
    n.value = Tensor::scalar(acc / static_cast<double>(tl.numel()));
    return push(std::move(n));
  }

  const Tensor& value(NodeId id) const { return nodes_[id].value; }

  // Leaf mutation hook for the finite-difference oracle.
  Tensor& leaf_value(NodeId id) {
    if (nodes_[id].op != Op::kInput)
      throw DataError("leaf_value on a non-leaf node");
    return nodes_[id].value;
  }

  bool requires_grad(NodeId id) const { return nodes_[id].requires_grad; }

  // Gradient of the last backward() target; zeros for untouched nodes.
  const Tensor& grad(NodeId id) {
    Node& n = nodes_[id];
    if (n.grad.shape != n.value.shape) {
      n.grad = Tensor(n.value.shape);
    }
    return n.grad;
  }

  void backward(NodeId loss) {
    if (!value(loss).is_scalar())
      throw DataError("backward requires a scalar loss");
    for (auto& n : nodes_) n.grad = Tensor();
    ensure_grad(loss);
    nodes_[loss].grad.data[0] = 1.0;
    for (int id = loss; id >= 0; --id) {
      Node& n = nodes_[id];
      if (n.grad.data.empty()) continue;  // not reached from the loss
      if (!n.requires_grad && n.op != Op::kInput) continue;
      accumulate_inputs(id);
    }
  }

  // Re-runs the forward pass in recorded order from current leaf values.
  // stop_gradient nodes keep their recorded values, so the recomputed
  // function is exactly the one backward() differentiates.
  void recompute_forward() {
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
      Node& n = nodes_[id];
      switch (n.op) {
        case Op::kInput:
        case Op::kStopGrad:
          break;
        default:
          recompute_node(static_cast<NodeId>(id));
      }
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  static constexpr double kSqrtEpsilon = 1e-12;

  struct Node {
    Op op = Op::kInput;
    int a = -1;
    int b = -1;
    bool requires_grad = false;
    double scalar = 0.0;
    int aux_int = 0;
    std::vector<int> indices;
    std::vector<int> counts;
    Tensor aux;
    Tensor value;
    Tensor grad;
  };

  static double sigmoid_stable(double x) {
    if (x >= 0.0) {
      const double e = std::exp(-x);
      return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
  }

  static double softplus_stable(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
  }

  static void matmul_into(const Tensor& a, const Tensor& b, Tensor& out) {
    const std::int64_t m = a.rows(), k = a.cols(), n = b.cols();
    for (std::int64_t i = 0; i < m; ++i) {
      for (std::int64_t p = 0; p < k; ++p) {
        const double av = a.at(i, p);
        if (av == 0.0) continue;
        for (std::int64_t j = 0; j < n; ++j) out.at(i, j) += av * b.at(p, j);
      }
    }
  }

  Node unary(Op op, NodeId a) {
    Node n;
    n.op = op;
    n.a = a;
    n.requires_grad = nodes_[a].requires_grad;
    return n;
  }

  Node binary(Op op, NodeId a, NodeId b) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.requires_grad = nodes_[a].requires_grad || nodes_[b].requires_grad;
    return n;
  }

  NodeId elementwise(Op op, NodeId a, NodeId b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (!ta.same_shape(tb))
      throw DataError("elementwise shape mismatch " + ta.shape_str() + " vs " +
                      tb.shape_str());
    Node n = binary(op, a, b);
    n.value = ta;
    switch (op) {
      case Op::kAdd:
        for (std::size_t i = 0; i < tb.data.size(); ++i) n.value.data[i] += tb.data[i];
        break;
      case Op::kSub:
        for (std::size_t i = 0; i < tb.data.size(); ++i) n.value.data[i] -= tb.data[i];
        break;
      case Op::kMul:
        for (std::size_t i = 0; i < tb.data.size(); ++i) n.value.data[i] *= tb.data[i];
        break;
      default:
        throw DataError("bad elementwise op");
    }
    return push(std::move(n));
  }

  NodeId push(Node n) {
    if (!n.value.all_finite())
      throw NumericError("non-finite value produced by tape op");
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  void ensure_grad(NodeId id) {
    Node& n = nodes_[id];
    if (n.grad.shape != n.value.shape) n.grad = Tensor(n.value.shape);
  }

  void add_into(NodeId id, const Tensor& g) {
    ensure_grad(id);
    Node& n = nodes_[id];
    for (std::size_t i = 0; i < g.data.size(); ++i) n.grad.data[i] += g.data[i];
  }

  void accumulate_inputs(NodeId id) {
    Node& n = nodes_[id];
    const Tensor& g = n.grad;
    const auto want = [&](int in) {
      return in >= 0 && (nodes_[in].requires_grad || nodes_[in].op == Op::kInput);
    };
    switch (n.op) {
      case Op::kInput:
      case Op::kStopGrad:
        return;
      case Op::kMatmul: {
        const Tensor& a = nodes_[n.a].value;
        const Tensor& b = nodes_[n.b].value;
        if (want(n.a)) {
          ensure_grad(n.a);
          Tensor& da = nodes_[n.a].grad;
          for (std::int64_t i = 0; i < a.rows(); ++i)
            for (std::int64_t j = 0; j < b.cols(); ++j) {
              const double gv = g.at(i, j);
              if (gv == 0.0) continue;
              for (std::int64_t p = 0; p < a.cols(); ++p)
                da.at(i, p) += gv * b.at(p, j);
            }
        }
        if (want(n.b)) {
          ensure_grad(n.b);
          Tensor& db = nodes_[n.b].grad;
          for (std::int64_t i = 0; i < a.rows(); ++i)
            for (std::int64_t p = 0; p < a.cols(); ++p) {
              const double av = a.at(i, p);
              if (av == 0.0) continue;
              for (std::int64_t j = 0; j < b.cols(); ++j)
                db.at(p, j) += av * g.at(i, j);
            }
        }
        return;
      }
      case Op::kAdd:
        if (want(n.a)) add_into(n.a, g);
        if (want(n.b)) add_into(n.b, g);
        return;
      case Op::kAddRowVec: {
        if (want(n.a)) add_into(n.a, g);
        if (want(n.b)) {
          ensure_grad(n.b);
          Tensor& db = nodes_[n.b].grad;
          for (std::int64_t r = 0; r < g.rows(); ++r)
            for (std::int64_t c = 0; c < g.cols(); ++c) db.at(0, c) += g.at(r, c);
        }
        return;
      }
      case Op::kSub: {
        if (want(n.a)) add_into(n.a, g);
        if (want(n.b)) {
          ensure_grad(n.b);
          Tensor& db = nodes_[n.b].grad;
          for (std::size_t i = 0; i < g.data.size(); ++i) db.data[i] -= g.data[i];
        }
        return;
      }
      case Op::kMul: {
        if (want(n.a)) {
          ensure_grad(n.a);
          Tensor& da = nodes_[n.a].grad;
          const Tensor& b = nodes_[n.b].value;
          for (std::size_t i = 0; i < g.data.size(); ++i)
            da.data[i] += g.data[i] * b.data[i];
        }
        if (want(n.b)) {
          ensure_grad(n.b);
          Tensor& db = nodes_[n.b].grad;
          const Tensor& a = nodes_[n.a].value;
          for (std::size_t i = 0; i < g.data.size(); ++i)
            db.data[i] += g.data[i] * a.data[i];
        }
        return;
      }
      case Op::kScale: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        for (std::size_t i = 0; i < g.data.size(); ++i)
          da.data[i] += g.data[i] * n.scalar;
        return;
      }
      case Op::kAddConst:
        if (want(n.a)) add_into(n.a, g);
        return;
      case Op::kRelu: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        const Tensor& x = nodes_[n.a].value;
        for (std::size_t i = 0; i < g.data.size(); ++i)
          if (x.data[i] > 0.0) da.data[i] += g.data[i];
        return;
      }
      case Op::kSigmoid: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          const double y = n.value.data[i];
          da.data[i] += g.data[i] * y * (1.0 - y);
        }
        return;
      }
      case Op::kSoftplus: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        const Tensor& x = nodes_[n.a].value;
        for (std::size_t i = 0; i < g.data.size(); ++i)
          da.data[i] += g.data[i] * sigmoid_stable(x.data[i]);
        return;
      }
      case Op::kAbs: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        const Tensor& x = nodes_[n.a].value;
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          const double s = x.data[i] > 0.0 ? 1.0 : (x.data[i] < 0.0 ? -1.0 : 0.0);
          da.data[i] += g.data[i] * s;
        }
        return;
      }
      case Op::kSqrtEps: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        for (std::size_t i = 0; i < g.data.size(); ++i)
          da.data[i] += g.data[i] * 0.5 / n.value.data[i];
        return;
      }
      case Op::kRowGather: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        for (std::size_t r = 0; r < n.indices.size(); ++r)
          for (std::int64_t c = 0; c < g.cols(); ++c)
            da.at(n.indices[r], c) += g.at(static_cast<std::int64_t>(r), c);
        return;
      }
      case Op::kSegmentMean: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        for (std::size_t r = 0; r < n.indices.size(); ++r) {
          const int s = n.indices[r];
          const double inv = 1.0 / n.counts[s];
          for (std::int64_t c = 0; c < g.cols(); ++c)
            da.at(static_cast<std::int64_t>(r), c) += g.at(s, c) * inv;
        }
        return;
      }
      case Op::kConcatRows: {
        const std::int64_t ra = nodes_[n.a].value.rows();
        if (want(n.a)) {
          ensure_grad(n.a);
          Tensor& da = nodes_[n.a].grad;
          for (std::int64_t r = 0; r < ra; ++r)
            for (std::int64_t c = 0; c < g.cols(); ++c) da.at(r, c) += g.at(r, c);
        }
        if (want(n.b)) {
          ensure_grad(n.b);
          Tensor& db = nodes_[n.b].grad;
          for (std::int64_t r = ra; r < g.rows(); ++r)
            for (std::int64_t c = 0; c < g.cols(); ++c)
              db.at(r - ra, c) += g.at(r, c);
        }
        return;
      }
      case Op::kSum: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        const double gv = g.data[0];
        for (auto& v : da.data) v += gv;
        return;
      }
      case Op::kSumRows: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        for (std::int64_t r = 0; r < da.rows(); ++r) {
          const double gv = g.at(r, 0);
          for (std::int64_t c = 0; c < da.cols(); ++c) da.at(r, c) += gv;
        }
        return;
      }
      case Op::kMean: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        const double gv = g.data[0] / static_cast<double>(da.numel());
        for (auto& v : da.data) v += gv;
        return;
      }
      case Op::kMse: {
        const Tensor& a = nodes_[n.a].value;
        const Tensor& b = nodes_[n.b].value;
        const double scale = 2.0 * g.data[0] / static_cast<double>(a.numel());
        if (want(n.a)) {
          ensure_grad(n.a);
          Tensor& da = nodes_[n.a].grad;
          for (std::size_t i = 0; i < a.data.size(); ++i)
            da.data[i] += scale * (a.data[i] - b.data[i]);
        }
        if (want(n.b)) {
          ensure_grad(n.b);
          Tensor& db = nodes_[n.b].grad;
          for (std::size_t i = 0; i < a.data.size(); ++i)
            db.data[i] -= scale * (a.data[i] - b.data[i]);
        }
        return;
      }
      case Op::kBceLogitsMean: {
        if (!want(n.a)) return;
        ensure_grad(n.a);
        Tensor& da = nodes_[n.a].grad;
        const Tensor& s = nodes_[n.a].value;
        const double gv = g.data[0] / static_cast<double>(s.numel());
        for (std::size_t i = 0; i < s.data.size(); ++i)
          da.data[i] += gv * (sigmoid_stable(s.data[i]) - n.aux.data[i]);
        return;
      }
    }
  }

  void recompute_node(NodeId id) {
    Node& n = nodes_[id];
    const auto& va = nodes_[n.a].value;
    switch (n.op) {
      case Op::kMatmul: {
        Tensor out = Tensor::zeros(va.rows(), nodes_[n.b].value.cols());
        matmul_into(va, nodes_[n.b].value, out);
        n.value = std::move(out);
        break;
      }
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul: {
        const Tensor& vb = nodes_[n.b].value;
        n.value = va;
        for (std::size_t i = 0; i < vb.data.size(); ++i) {
          if (n.op == Op::kAdd) n.value.data[i] += vb.data[i];
          else if (n.op == Op::kSub) n.value.data[i] -= vb.data[i];
          else n.value.data[i] *= vb.data[i];
        }
        break;
      }
      case Op::kAddRowVec: {
        const Tensor& vb = nodes_[n.b].value;
        n.value = va;
        for (std::int64_t r = 0; r < va.rows(); ++r)
          for (std::int64_t c = 0; c < va.cols(); ++c)
            n.value.at(r, c) += vb.at(0, c);
        break;
      }
      case Op::kScale:
        n.value = va;
        for (auto& v : n.value.data) v *= n.scalar;
        break;
      case Op::kAddConst:
        n.value = va;
        for (auto& v : n.value.data) v += n.scalar;
        break;
      case Op::kRelu:
        n.value = va;
        for (auto& v : n.value.data) v = v > 0.0 ? v : 0.0;
        break;
      case Op::kSigmoid:
        n.value = va;
        for (auto& v : n.value.data) v = sigmoid_stable(v);
        break;
      case Op::kSoftplus:
        n.value = va;
        for (auto& v : n.value.data) v = softplus_stable(v);
        break;
      case Op::kAbs:
        n.value = va;
        for (auto& v : n.value.data) v = std::abs(v);
        break;
      case Op::kSqrtEps:
        n.value = va;
        for (auto& v : n.value.data) v = std::sqrt(v + kSqrtEpsilon);
        break;
      case Op::kRowGather:
        for (std::size_t r = 0; r < n.indices.size(); ++r)
          for (std::int64_t c = 0; c < va.cols(); ++c)
            n.value.at(static_cast<std::int64_t>(r), c) = va.at(n.indices[r], c);
        break;
      case Op::kSegmentMean: {
        n.value = Tensor::zeros(n.aux_int, va.cols());
        for (std::size_t r = 0; r < n.indices.size(); ++r)
          for (std::int64_t c = 0; c < va.cols(); ++c)
            n.value.at(n.indices[r], c) += va.at(static_cast<std::int64_t>(r), c);
        for (int s = 0; s < n.aux_int; ++s)
          if (n.counts[s] > 0)
            for (std::int64_t c = 0; c < va.cols(); ++c) n.value.at(s, c) /= n.counts[s];
        break;
      }
      case Op::kConcatRows: {
        const Tensor& vb = nodes_[n.b].value;
        std::copy(va.data.begin(), va.data.end(), n.value.data.begin());
        std::copy(vb.data.begin(), vb.data.end(),
                  n.value.data.begin() + va.data.size());
        break;
      }
      case Op::kSum: {
        double acc = 0.0;
        for (double v : va.data) acc += v;
        n.value.data[0] = acc;
        break;
      }
      case Op::kSumRows:
        for (std::int64_t r = 0; r < va.rows(); ++r) {
          double acc = 0.0;
          for (std::int64_t c = 0; c < va.cols(); ++c) acc += va.at(r, c);
          n.value.at(r, 0) = acc;
        }
        break;
      case Op::kMean: {
        double acc = 0.0;
        for (double v : va.data) acc += v;
        n.value.data[0] = acc / static_cast<double>(va.numel());
        break;
      }
      case Op::kMse: {
        const Tensor& vb = nodes_[n.b].value;
        double acc = 0.0;
        for (std::size_t i = 0; i < va.data.size(); ++i) {
          const double d = va.data[i] - vb.data[i];
          acc += d * d;
        }
        n.value.data[0] = acc / static_cast<double>(va.numel());
        break;
      }
      case Op::kBceLogitsMean: {
        double acc = 0.0;
        for (std::size_t i = 0; i < va.data.size(); ++i) {
          const double s = va.data[i];
          const double t = n.aux.data[i];
          acc += std::max(s, 0.0) - s * t + std::log1p(std::exp(-std::abs(s)));
        }
        n.value.data[0] = acc / static_cast<double>(va.numel());
        break;
      }
      case Op::kInput:
      case Op::kStopGrad:
        break;
    }
    if (!n.value.all_finite())
      throw NumericError("non-finite value produced during forward recompute");
  }

  std::vector<Node> nodes_;
};

}  // namespace forge
