#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "forge/common.hpp"
#include "forge/rng.hpp"

namespace forge {

enum class VarType { kBinary, kInteger, kContinuous };
enum class Sense { kLessEqual, kGreaterEqual, kEqual };
enum class ObjectiveSense { kMinimize, kMaximize };

struct VariableDef {
  std::string name;
  VarType type = VarType::kContinuous;
  double lower_bound = 0.0;
  double upper_bound = kInfinity;
  double objective_coeff = 0.0;
};

struct ConstraintDef {
  std::string name;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

struct Coefficient {
  int constraint = 0;
  int variable = 0;
  double value = 0.0;
};

// In-memory MIP. Immutable after construction by convention; the mutating
// helpers below return modified copies.
struct MipInstance {
  std::string name;
  ObjectiveSense objective_sense = ObjectiveSense::kMinimize;
  std::vector<VariableDef> variables;
  std::vector<ConstraintDef> constraints;
  std::vector<Coefficient> coefficients;

  int num_variables() const { return static_cast<int>(variables.size()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }

  bool is_integral(int var) const {
    return variables[var].type != VarType::kContinuous;
  }

  bool pure_binary() const {
    for (const auto& v : variables)
      if (v.type != VarType::kBinary) return false;
    return true;
  }

  void validate() const {
    auto check_name = [](const std::string& n, const char* what) {
      if (n.empty()) throw DataError(std::string(what) + " with empty name");
      for (char c : n)
        if (std::isspace(static_cast<unsigned char>(c)))
          throw DataError(std::string(what) + " name contains whitespace: '" + n + "'");
    };
    std::unordered_set<std::string> seen;
    for (const auto& v : variables) {
      check_name(v.name, "variable");
      if (!seen.insert(v.name).second)
        throw DataError("duplicate variable name '" + v.name + "'");
      if (std::isnan(v.lower_bound) || std::isnan(v.upper_bound))
        throw DataError("NaN bound on variable '" + v.name + "'");
      if (v.lower_bound > v.upper_bound)
        throw DataError("variable '" + v.name + "' has lower bound above upper bound");
      if (!is_finite(v.objective_coeff))
        throw DataError("variable '" + v.name + "' has non-finite objective coefficient");
      if (v.type == VarType::kBinary &&
          (v.lower_bound != 0.0 || v.upper_bound != 1.0))
        throw DataError("binary variable '" + v.name + "' must have bounds [0,1]");
      if (v.type == VarType::kInteger &&
          (!is_finite(v.lower_bound) || !is_finite(v.upper_bound)))
        throw DataError("integer variable '" + v.name + "' must have finite bounds");
    }
    seen.clear();
    for (const auto& c : constraints) {
      check_name(c.name, "constraint");
      if (!seen.insert(c.name).second)
        throw DataError("duplicate constraint name '" + c.name + "'");
      if (!is_finite(c.rhs))
        throw DataError("constraint '" + c.name + "' has non-finite rhs");
    }
    std::unordered_set<std::int64_t> pairs;
    for (const auto& coef : coefficients) {
      if (coef.constraint < 0 || coef.constraint >= num_constraints())
        throw DataError("coefficient references invalid constraint index " +
                        std::to_string(coef.constraint));
      if (coef.variable < 0 || coef.variable >= num_variables())
        throw DataError("coefficient references invalid variable index " +
                        std::to_string(coef.variable));
      if (!is_finite(coef.value)) throw DataError("non-finite coefficient value");
      if (coef.value == 0.0)
        throw DataError("explicit zero coefficient for (" +
                        constraints[coef.constraint].name + ", " +
                        variables[coef.variable].name + "); omit it instead");
      const std::int64_t key =
          static_cast<std::int64_t>(coef.constraint) * num_variables() + coef.variable;
      if (!pairs.insert(key).second)
        throw DataError("duplicate coefficient for (" +
                        constraints[coef.constraint].name + ", " +
                        variables[coef.variable].name + ")");
    }
  }
};

inline const char* to_string(Sense s) {
  switch (s) {
    case Sense::kLessEqual: return "<=";
    case Sense::kGreaterEqual: return ">=";
    case Sense::kEqual: return "=";
  }
  return "?";
}

// Appends one constraint over the objective coefficients bounding the
// integral objective: c^T x >= bound when minimizing, <= when maximizing.
// The constraint is named __forge_pseudo_cut (suffixed if already taken).
inline MipInstance add_pseudo_cut(const MipInstance& instance, double bound) {
  if (!is_finite(bound)) throw DataError("pseudo-cut bound must be finite");
  bool any_nonzero = false;
  for (const auto& v : instance.variables)
    if (v.objective_coeff != 0.0) any_nonzero = true;
  if (!any_nonzero)
    throw DataError("pseudo-cut on an all-zero objective");

  MipInstance out = instance;
  std::string cut_name = "__forge_pseudo_cut";
  std::unordered_set<std::string> names;
  for (const auto& c : out.constraints) names.insert(c.name);
  for (int k = 2; names.count(cut_name); ++k)
    cut_name = "__forge_pseudo_cut_" + std::to_string(k);

  ConstraintDef cut;
  cut.name = cut_name;
  cut.sense = instance.objective_sense == ObjectiveSense::kMinimize
                  ? Sense::kGreaterEqual
                  : Sense::kLessEqual;
  cut.rhs = bound;
  const int row = out.num_constraints();
  out.constraints.push_back(cut);
  for (int j = 0; j < out.num_variables(); ++j)
    if (out.variables[j].objective_coeff != 0.0)
      out.coefficients.push_back({row, j, out.variables[j].objective_coeff});
  return out;
}

// Removes floor(fraction * m) uniformly sampled constraints. Deterministic
// per seed; survivors keep their relative order.
inline MipInstance drop_constraints(const MipInstance& instance, double fraction,
                                    std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0)
    throw DataError("drop fraction must be in [0,1]");
  const int m = instance.num_constraints();
  const int drop_count = static_cast<int>(fraction * m);
  MipInstance out = instance;
  if (drop_count == 0) return out;

  Rng rng = Rng::split(seed, "drop-constraints");
  const std::vector<int> dropped = rng.sample_without_replacement(m, drop_count);
  std::vector<bool> keep(m, true);
  for (int idx : dropped) keep[idx] = false;

  std::vector<int> remap(m, -1);
  out.constraints.clear();
  for (int i = 0; i < m; ++i) {
    if (!keep[i]) continue;
    remap[i] = static_cast<int>(out.constraints.size());
    out.constraints.push_back(instance.constraints[i]);
  }
  out.coefficients.clear();
  for (const auto& coef : instance.coefficients)
    if (keep[coef.constraint])
      out.coefficients.push_back({remap[coef.constraint], coef.variable, coef.value});
  return out;
}

}  // namespace forge
