#pragma once

// MIP -> bipartite variable/constraint graph with the 10-dim static node
// features. Column layout (constraints own 0..3, variables own 4..9):
//   0..2  one-hot sense (<=, >=, =)
//   3     rhs
//   4..6  one-hot type (binary, integer, continuous)
//   7,8   lower/upper bound (infinities clipped to +-1e6)
//   9     objective coefficient (negated for maximization, flag recorded)

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "forge/common.hpp"
#include "forge/mip.hpp"
#include "forge/tensor.hpp"

namespace forge {

inline constexpr int kNodeFeatureDim = 10;
inline constexpr double kBoundClip = 1e6;

struct BipartiteGraph {
  std::string name;
  int n_constraints = 0;
  int n_variables = 0;
  Tensor node_features;  // N x 10, constraint nodes first

  struct Edge {
    int constraint = 0;
    int variable = 0;
    double weight = 0.0;
  };
  std::vector<Edge> edges;

  bool objective_flipped = false;  // original sense was maximize
  bool scaled = false;

  int num_nodes() const { return n_constraints + n_variables; }
  int constraint_node(int i) const { return i; }
  int variable_node(int j) const { return n_constraints + j; }
};

inline BipartiteGraph to_bipartite(const MipInstance& instance) {
  instance.validate();
  BipartiteGraph g;
  g.name = instance.name;
  g.n_constraints = instance.num_constraints();
  g.n_variables = instance.num_variables();
  g.objective_flipped = instance.objective_sense == ObjectiveSense::kMaximize;
  g.node_features = Tensor::zeros(g.num_nodes(), kNodeFeatureDim);

  const auto clip = [](double v) {
    if (v > kBoundClip) return kBoundClip;
    if (v < -kBoundClip) return -kBoundClip;
    return v;
  };

  for (int i = 0; i < g.n_constraints; ++i) {
    const ConstraintDef& c = instance.constraints[i];
    const int sense_col = c.sense == Sense::kLessEqual
                              ? 0
                              : (c.sense == Sense::kGreaterEqual ? 1 : 2);
    g.node_features.at(i, sense_col) = 1.0;
    g.node_features.at(i, 3) = c.rhs;
  }
  const double obj_sign = g.objective_flipped ? -1.0 : 1.0;
  for (int j = 0; j < g.n_variables; ++j) {
    const VariableDef& v = instance.variables[j];
    const int row = g.variable_node(j);
    const int type_col = v.type == VarType::kBinary
                             ? 4
                             : (v.type == VarType::kInteger ? 5 : 6);
    g.node_features.at(row, type_col) = 1.0;
    g.node_features.at(row, 7) = clip(v.lower_bound);
    g.node_features.at(row, 8) = clip(v.upper_bound);
    g.node_features.at(row, 9) = obj_sign * v.objective_coeff;
  }

  g.edges.reserve(instance.coefficients.size());
  for (const auto& coef : instance.coefficients)
    g.edges.push_back({coef.constraint, coef.variable, coef.value});
  return g;
}

// Zero-mean/unit-variance statistics for the numeric columns, computed over
// the owning node kind only (rhs over constraint rows, bounds/objective over
// variable rows) so the other kind's zero padding stays exactly zero.
struct FeatureScale {
  std::array<double, kNodeFeatureDim> mean{};
  std::array<double, kNodeFeatureDim> stddev{1, 1, 1, 1, 1, 1, 1, 1, 1, 1};

  static constexpr bool is_constraint_column(int c) { return c == 3; }
  static constexpr bool is_variable_column(int c) { return c >= 7; }
};

inline FeatureScale fit_feature_scale(const std::vector<BipartiteGraph>& corpus) {
  if (corpus.empty()) throw DataError("fit_feature_scale needs a non-empty corpus");
  FeatureScale scale;
  for (int col = 0; col < kNodeFeatureDim; ++col) {
    const bool constraint_col = FeatureScale::is_constraint_column(col);
    const bool variable_col = FeatureScale::is_variable_column(col);
    if (!constraint_col && !variable_col) continue;  // one-hot, untouched
    double sum = 0.0, sum_sq = 0.0;
    long long count = 0;
    for (const auto& g : corpus) {
      const int begin = constraint_col ? 0 : g.n_constraints;
      const int end = constraint_col ? g.n_constraints : g.num_nodes();
      for (int r = begin; r < end; ++r) {
        const double v = g.node_features.at(r, col);
        sum += v;
        sum_sq += v * v;
        ++count;
      }
    }
    if (count == 0) continue;
    const double mean = sum / static_cast<double>(count);
    const double var = std::max(0.0, sum_sq / static_cast<double>(count) - mean * mean);
    scale.mean[col] = mean;
    scale.stddev[col] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return scale;
}

inline BipartiteGraph apply_feature_scale(const BipartiteGraph& graph,
                                          const FeatureScale& scale) {
  if (graph.scaled) throw DataError("graph is already feature-scaled");
  BipartiteGraph out = graph;
  for (int col = 0; col < kNodeFeatureDim; ++col) {
    const bool constraint_col = FeatureScale::is_constraint_column(col);
    const bool variable_col = FeatureScale::is_variable_column(col);
    if (!constraint_col && !variable_col) continue;
    const int begin = constraint_col ? 0 : out.n_constraints;
    const int end = constraint_col ? out.n_constraints : out.num_nodes();
    for (int r = begin; r < end; ++r)
      out.node_features.at(r, col) =
          (out.node_features.at(r, col) - scale.mean[col]) / scale.stddev[col];
  }
  out.scaled = true;
  return out;
}

// Debug dumps (edge list + per-node features), one CSV each.
inline std::string features_csv(const BipartiteGraph& g) {
  std::ostringstream out;
  out << "node,kind";
  for (int c = 0; c < kNodeFeatureDim; ++c) out << ",f" << c;
  out << "\n";
  for (int r = 0; r < g.num_nodes(); ++r) {
    out << r << "," << (r < g.n_constraints ? "constraint" : "variable");
    for (int c = 0; c < kNodeFeatureDim; ++c) out << "," << g.node_features.at(r, c);
    out << "\n";
  }
  return out.str();
}

inline std::string edges_csv(const BipartiteGraph& g) {
  std::ostringstream out;
  out << "constraint_node,variable_node,weight\n";
  for (const auto& e : g.edges)
    out << e.constraint << "," << g.variable_node(e.variable) << "," << e.weight << "\n";
  return out.str();
}

}  // namespace forge
