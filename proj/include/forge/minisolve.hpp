#pragma once

// Desk-scale exact solver used as the labeling and verification oracle:
// dense bounded-variable two-phase primal simplex, depth-first
// branch-and-bound with most-fractional branching, and a pure-binary
// exhaustive mode. Correctness over speed throughout.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "forge/common.hpp"
#include "forge/mip.hpp"

namespace forge {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };
enum class MipStatus { kOptimal, kFeasible, kInfeasible, kLimit };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;
};

struct PoolEntry {
  double objective = 0.0;
  std::vector<double> values;
};

struct MipSolution {
  MipStatus status = MipStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;
  std::vector<PoolEntry> pool;  // distinct feasible solutions, best last
  long long nodes_explored = 0;
};

struct SolveLimits {
  long long node_limit = -1;    // <0: unlimited
  double time_limit_s = -1.0;   // <0: unlimited
  int pool_size = 5;
  // Dive toward the objective-pessimistic child first so the incumbent pool
  // spans the objective range; costs nodes, so off for plain solving.
  bool diverse_pool = false;
};

namespace simplex_detail {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;
constexpr double kCostTol = 1e-9;

enum class VarState { kBasic, kAtLower, kAtUpper, kFree };

// min c^T x over A x (sense) b, l <= x <= u, with per-call bound overrides.
// Dense full tableau; Dantzig pricing with a Bland fallback after stalls.
class Simplex {
 public:
  Simplex(const MipInstance& inst, const std::vector<double>& lower,
          const std::vector<double>& upper, double obj_sign)
      : m_(inst.num_constraints()), n_(inst.num_variables()) {
    const int total = n_ + m_ + m_;  // structural, slack, artificial
    cols_ = total;
    art0_ = n_ + m_;
    lo_.assign(total, 0.0);
    up_.assign(total, kInfinity);
    cost_.assign(total, 0.0);
    dense_.assign(static_cast<std::size_t>(m_) * total, 0.0);

    for (int j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      up_[j] = upper[j];
      cost_[j] = obj_sign * inst.variables[j].objective_coeff;
    }
    for (int i = 0; i < m_; ++i) {
      switch (inst.constraints[i].sense) {
        case Sense::kLessEqual:
          lo_[n_ + i] = 0.0;
          up_[n_ + i] = kInfinity;
          break;
        case Sense::kGreaterEqual:
          lo_[n_ + i] = -kInfinity;
          up_[n_ + i] = 0.0;
          break;
        case Sense::kEqual:
          lo_[n_ + i] = 0.0;
          up_[n_ + i] = 0.0;
          break;
      }
      at(i, n_ + i) = 1.0;
    }
    for (const auto& c : inst.coefficients) at(c.constraint, c.variable) = c.value;
    rhs_.resize(m_);
    for (int i = 0; i < m_; ++i) rhs_[i] = inst.constraints[i].rhs;
  }

  LpStatus solve(std::vector<double>& structural_values, double& objective) {
    init_start_basis();
    // Phase 1: minimize the artificial sum.
    std::vector<double> phase1_cost(cols_, 0.0);
    for (int j = art0_; j < cols_; ++j) phase1_cost[j] = 1.0;
    if (!iterate(phase1_cost, /*allow_artificials=*/true))
      throw NumericError("simplex iteration limit exceeded (phase 1)");
    if (current_objective(phase1_cost) > kFeasTol) return LpStatus::kInfeasible;
    expel_artificials();

    bool bounded = iterate(cost_, /*allow_artificials=*/false);
    if (!bounded) return LpStatus::kUnbounded;

    structural_values.assign(n_, 0.0);
    std::vector<double> full = nonbasic_values();
    for (int i = 0; i < m_; ++i) full[basis_[i]] = xb_[i];
    for (int j = 0; j < n_; ++j) structural_values[j] = full[j];
    objective = 0.0;
    for (int j = 0; j < n_; ++j) objective += cost_[j] * full[j];
    return LpStatus::kOptimal;
  }

 private:
  double& at(int r, int c) { return dense_[static_cast<std::size_t>(r) * cols_ + c]; }
  double at(int r, int c) const {
    return dense_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::vector<double> nonbasic_values() const {
    std::vector<double> v(cols_, 0.0);
    for (int j = 0; j < cols_; ++j) {
      switch (state_[j]) {
        case VarState::kAtLower: v[j] = lo_[j]; break;
        case VarState::kAtUpper: v[j] = up_[j]; break;
        case VarState::kFree: v[j] = 0.0; break;
        case VarState::kBasic: break;  // filled by caller
      }
    }
    return v;
  }

  void init_start_basis() {
    state_.assign(cols_, VarState::kAtLower);
    for (int j = 0; j < n_ + m_; ++j) {
      if (std::isfinite(lo_[j]))
        state_[j] = VarState::kAtLower;
      else if (std::isfinite(up_[j]))
        state_[j] = VarState::kAtUpper;
      else
        state_[j] = VarState::kFree;
    }
    // Residuals of the start point decide artificial signs so every
    // artificial starts basic and nonnegative.
    std::vector<double> x0 = nonbasic_values();
    basis_.resize(m_);
    xb_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      double act = 0.0;
      for (int j = 0; j < n_ + m_; ++j)
        if (x0[j] != 0.0) act += at(i, j) * x0[j];
      const double resid = rhs_[i] - act;
      const double sign = resid >= 0.0 ? 1.0 : -1.0;
      at(i, art0_ + i) = sign;
      if (sign < 0.0)
        for (int j = 0; j < cols_; ++j) at(i, j) = -at(i, j);
      double scaled_rhs = sign * resid;
      basis_[i] = art0_ + i;
      state_[art0_ + i] = VarState::kBasic;
      xb_[i] = scaled_rhs;
      lo_[art0_ + i] = 0.0;
      up_[art0_ + i] = kInfinity;
    }
  }

  double current_objective(const std::vector<double>& cost) const {
    std::vector<double> full = nonbasic_values();
    for (int i = 0; i < m_; ++i) full[basis_[i]] = xb_[i];
    double obj = 0.0;
    for (int j = 0; j < cols_; ++j)
      if (full[j] != 0.0) obj += cost[j] * full[j];
    return obj;
  }

  void compute_reduced_costs(const std::vector<double>& cost,
                             std::vector<double>& d) const {
    d = cost;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &dense_[static_cast<std::size_t>(i) * cols_];
      for (int j = 0; j < cols_; ++j) d[j] -= cb * row[j];
    }
  }

  bool eligible(int j, double dj, bool allow_artificials, int& dir) const {
    if (!allow_artificials && j >= art0_) return false;
    if (state_[j] == VarState::kBasic) return false;
    if (lo_[j] == up_[j]) return false;  // fixed
    switch (state_[j]) {
      case VarState::kAtLower:
        if (dj < -kCostTol) { dir = +1; return true; }
        return false;
      case VarState::kAtUpper:
        if (dj > kCostTol) { dir = -1; return true; }
        return false;
      case VarState::kFree:
        if (dj < -kCostTol) { dir = +1; return true; }
        if (dj > kCostTol) { dir = -1; return true; }
        return false;
      case VarState::kBasic:
        return false;
    }
    return false;
  }

  // Returns false on unboundedness. Throws past the iteration cap.
  bool iterate(const std::vector<double>& cost, bool allow_artificials) {
    std::vector<double> d;
    compute_reduced_costs(cost, d);
    int stall = 0;
    bool bland = false;
    for (long long iter = 0; iter < kMaxIterations; ++iter) {
      if (iter > 0 && iter % 512 == 0) compute_reduced_costs(cost, d);  // drift refresh

      int q = -1, dir = 0;
      if (bland) {
        for (int j = 0; j < cols_ && q < 0; ++j) {
          int dj_dir;
          if (eligible(j, d[j], allow_artificials, dj_dir)) {
            q = j;
            dir = dj_dir;
          }
        }
      } else {
        double best = kCostTol;
        for (int j = 0; j < cols_; ++j) {
          int dj_dir;
          if (!eligible(j, d[j], allow_artificials, dj_dir)) continue;
          const double score = std::abs(d[j]);
          if (score > best) {
            best = score;
            q = j;
            dir = dj_dir;
          }
        }
      }
      if (q < 0) return true;  // optimal for this phase

      // Ratio test.
      double t_star = kInfinity;
      int leave_row = -1;
      bool leave_at_upper = false;
      const double own_span = up_[q] - lo_[q];
      if (std::isfinite(own_span)) t_star = own_span;
      for (int i = 0; i < m_; ++i) {
        const double rate = -dir * at(i, q);
        if (rate > kPivotTol) {
          if (!std::isfinite(up_[basis_[i]])) continue;
          const double limit = (up_[basis_[i]] - xb_[i]) / rate;
          if (limit < t_star - 1e-12 ||
              (limit < t_star + 1e-12 &&
               (leave_row < 0 ||
                (bland ? basis_[i] < basis_[leave_row]
                       : std::abs(at(i, q)) > std::abs(at(leave_row, q)))))) {
            t_star = std::max(0.0, limit);
            leave_row = i;
            leave_at_upper = true;
          }
        } else if (rate < -kPivotTol) {
          if (!std::isfinite(lo_[basis_[i]])) continue;
          const double limit = (lo_[basis_[i]] - xb_[i]) / rate;
          if (limit < t_star - 1e-12 ||
              (limit < t_star + 1e-12 &&
               (leave_row < 0 ||
                (bland ? basis_[i] < basis_[leave_row]
                       : std::abs(at(i, q)) > std::abs(at(leave_row, q)))))) {
            t_star = std::max(0.0, limit);
            leave_row = i;
            leave_at_upper = false;
          }
        }
      }
      if (!std::isfinite(t_star)) return false;  // unbounded ray

      if (t_star <= 1e-12) {
        if (++stall > 64) bland = true;
      } else {
        stall = 0;
        bland = false;
      }

      // Move basic values along the ray.
      if (t_star != 0.0)
        for (int i = 0; i < m_; ++i) xb_[i] -= dir * t_star * at(i, q);

      if (leave_row < 0) {
        // Bound flip, no basis change.
        state_[q] = dir > 0 ? VarState::kAtUpper : VarState::kAtLower;
        continue;
      }

      const int leaving = basis_[leave_row];
      double entering_value;
      switch (state_[q]) {
        case VarState::kAtLower: entering_value = lo_[q] + t_star; break;
        case VarState::kAtUpper: entering_value = up_[q] - t_star; break;
        default: entering_value = dir * t_star; break;
      }
      state_[leaving] = leave_at_upper ? VarState::kAtUpper : VarState::kAtLower;
      state_[q] = VarState::kBasic;
      basis_[leave_row] = q;
      xb_[leave_row] = entering_value;
      pivot(leave_row, q, d);
    }
    throw NumericError("simplex iteration limit exceeded");
  }

  void pivot(int r, int q, std::vector<double>& d) {
    double* prow = &dense_[static_cast<std::size_t>(r) * cols_];
    const double inv = 1.0 / prow[q];
    for (int j = 0; j < cols_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &dense_[static_cast<std::size_t>(i) * cols_];
      const double factor = row[q];
      if (factor == 0.0) continue;
      for (int j = 0; j < cols_; ++j) row[j] -= factor * prow[j];
      row[q] = 0.0;
    }
    const double dq = d[q];
    if (dq != 0.0) {
      for (int j = 0; j < cols_; ++j) d[j] -= dq * prow[j];
      d[q] = 0.0;
    }
  }

  // Degenerate pivots drive basic artificials out; all-zero rows are
  // redundant and their artificials stay basic at zero forever.
  void expel_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < art0_) continue;
      int q = -1;
      for (int j = 0; j < art0_; ++j) {
        if (state_[j] == VarState::kBasic) continue;
        if (std::abs(at(i, j)) > kPivotTol) {
          q = j;
          break;
        }
      }
      if (q < 0) continue;
      // Null pivot: the entering variable keeps its nonbasic value, the
      // artificial leaves at its lower bound (it is ~0 already).
      double entering_value = 0.0;
      if (state_[q] == VarState::kAtLower) entering_value = lo_[q];
      else if (state_[q] == VarState::kAtUpper) entering_value = up_[q];
      state_[basis_[i]] = VarState::kAtLower;
      state_[q] = VarState::kBasic;
      basis_[i] = q;
      std::vector<double> dummy(cols_, 0.0);
      pivot(i, q, dummy);
      xb_[i] = entering_value;
    }
  }

  static constexpr long long kMaxIterations = 200000;

  int m_, n_, cols_, art0_;
  std::vector<double> dense_;
  std::vector<double> rhs_;
  std::vector<double> lo_, up_, cost_;
  std::vector<double> xb_;
  std::vector<int> basis_;
  std::vector<VarState> state_;
};

}  // namespace simplex_detail

inline LpSolution solve_lp_with_bounds(const MipInstance& instance,
                                       const std::vector<double>& lower,
                                       const std::vector<double>& upper) {
  const double sign =
      instance.objective_sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
  for (int j = 0; j < instance.num_variables(); ++j)
    if (lower[j] > upper[j]) return {LpStatus::kInfeasible, 0.0, {}};
  simplex_detail::Simplex solver(instance, lower, upper, sign);
  LpSolution out;
  double obj = 0.0;
  out.status = solver.solve(out.values, obj);
  if (out.status == LpStatus::kOptimal) out.objective = sign * obj;
  return out;
}

inline LpSolution solve_lp(const MipInstance& instance) {
  std::vector<double> lo(instance.num_variables()), up(instance.num_variables());
  for (int j = 0; j < instance.num_variables(); ++j) {
    lo[j] = instance.variables[j].lower_bound;
    up[j] = instance.variables[j].upper_bound;
  }
  return solve_lp_with_bounds(instance, lo, up);
}

namespace solve_detail {

constexpr double kIntTol = 1e-6;

inline bool solution_feasible(const MipInstance& inst,
                              const std::vector<double>& x, double tol = 1e-7) {
  std::vector<double> activity(inst.num_constraints(), 0.0);
  for (const auto& c : inst.coefficients)
    activity[c.constraint] += c.value * x[c.variable];
  for (int i = 0; i < inst.num_constraints(); ++i) {
    const auto& c = inst.constraints[i];
    if (c.sense == Sense::kLessEqual && activity[i] > c.rhs + tol) return false;
    if (c.sense == Sense::kGreaterEqual && activity[i] < c.rhs - tol) return false;
    if (c.sense == Sense::kEqual && std::abs(activity[i] - c.rhs) > tol) return false;
  }
  for (int j = 0; j < inst.num_variables(); ++j) {
    if (x[j] < inst.variables[j].lower_bound - tol) return false;
    if (x[j] > inst.variables[j].upper_bound + tol) return false;
  }
  return true;
}

inline double objective_value(const MipInstance& inst, const std::vector<double>& x) {
  double obj = 0.0;
  for (int j = 0; j < inst.num_variables(); ++j)
    obj += inst.variables[j].objective_coeff * x[j];
  return obj;
}

inline bool binary_distinct(const MipInstance& inst, const std::vector<double>& a,
                            const std::vector<double>& b) {
  for (int j = 0; j < inst.num_variables(); ++j) {
    if (inst.variables[j].type != VarType::kBinary) continue;
    if ((a[j] >= 0.5) != (b[j] >= 0.5)) return true;
  }
  return false;
}

}  // namespace solve_detail

// Depth-first branch and bound over LP relaxations with most-fractional
// branching and bound pruning. The pool keeps the most recent pool_size
// improving incumbents (each distinct from the others in at least one
// binary assignment); the final entry is the best solution found.
inline MipSolution solve_mip(const MipInstance& instance,
                             const SolveLimits& limits = {}) {
  using solve_detail::kIntTol;
  const auto start_time = std::chrono::steady_clock::now();
  const double sense_sign =
      instance.objective_sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;

  struct Node {
    std::vector<double> lo, up;
  };
  std::vector<Node> stack;
  {
    Node root;
    root.lo.resize(instance.num_variables());
    root.up.resize(instance.num_variables());
    for (int j = 0; j < instance.num_variables(); ++j) {
      root.lo[j] = instance.variables[j].lower_bound;
      root.up[j] = instance.variables[j].upper_bound;
    }
    stack.push_back(std::move(root));
  }

  MipSolution out;
  bool have_incumbent = false;
  double best_min_obj = kInfinity;  // in minimize convention
  bool limit_hit = false;

  while (!stack.empty()) {
    if (limits.node_limit >= 0 && out.nodes_explored >= limits.node_limit) {
      limit_hit = true;
      break;
    }
    if (limits.time_limit_s >= 0) {
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
              .count();
      if (elapsed > limits.time_limit_s) {
        limit_hit = true;
        break;
      }
    }

    Node node = std::move(stack.back());
    stack.pop_back();
    ++out.nodes_explored;

    LpSolution lp = solve_lp_with_bounds(instance, node.lo, node.up);
    if (lp.status == LpStatus::kInfeasible) continue;
    if (lp.status == LpStatus::kUnbounded)
      throw DataError("unbounded LP relaxation in branch and bound");
    const double lp_min_obj = sense_sign * lp.objective;
    if (have_incumbent && lp_min_obj >= best_min_obj - 1e-9) continue;

    // Most fractional integral variable.
    int branch_var = -1;
    double best_frac = kIntTol;
    for (int j = 0; j < instance.num_variables(); ++j) {
      if (!instance.is_integral(j)) continue;
      const double f = lp.values[j] - std::floor(lp.values[j]);
      const double dist = std::min(f, 1.0 - f);
      if (dist > best_frac) {
        best_frac = dist;
        branch_var = j;
      }
    }

    if (branch_var < 0) {
      // Integral relaxation: candidate incumbent.
      std::vector<double> x = lp.values;
      for (int j = 0; j < instance.num_variables(); ++j)
        if (instance.is_integral(j)) x[j] = std::round(x[j]);
      if (!solve_detail::solution_feasible(instance, x)) continue;
      const double min_obj = sense_sign * solve_detail::objective_value(instance, x);
      if (!have_incumbent || min_obj < best_min_obj - 1e-9) {
        best_min_obj = min_obj;
        have_incumbent = true;
        out.values = x;
        bool distinct = true;
        for (const auto& entry : out.pool)
          if (!solve_detail::binary_distinct(instance, entry.values, x))
            distinct = false;
        if (distinct) {
          out.pool.push_back({sense_sign * min_obj, x});
          if (static_cast<int>(out.pool.size()) > limits.pool_size)
            out.pool.erase(out.pool.begin());
        }
      }
      continue;
    }

    const double xval = lp.values[branch_var];
    Node down = node;
    down.up[branch_var] = std::floor(xval);
    Node up = std::move(node);
    up.lo[branch_var] = std::ceil(xval);
    const bool up_degrades =
        sense_sign * instance.variables[branch_var].objective_coeff > 0.0;
    const bool up_first = limits.diverse_pool ? up_degrades : !up_degrades;
    if (up_first) {
      stack.push_back(std::move(down));
      stack.push_back(std::move(up));  // popped first
    } else {
      stack.push_back(std::move(up));
      stack.push_back(std::move(down));
    }
  }

  if (have_incumbent) {
    out.objective = sense_sign * best_min_obj;
    out.status = limit_hit ? MipStatus::kLimit : MipStatus::kOptimal;
  } else {
    out.status = limit_hit ? MipStatus::kLimit : MipStatus::kInfeasible;
  }
  return out;
}

// Exact enumeration over all 2^n binary assignments; pool holds the
// pool_size best distinct solutions (best last). Pure-binary, n <= 30.
inline MipSolution solve_exhaustive(const MipInstance& instance, int pool_size = 5) {
  if (!instance.pure_binary())
    throw DataError("exhaustive mode requires a pure-binary instance");
  const int n = instance.num_variables();
  if (n > 30) throw DataError("exhaustive mode capped at 30 variables");
  const double sense_sign =
      instance.objective_sense == ObjectiveSense::kMaximize ? -1.0 : 1.0;
  const int m = instance.num_constraints();

  // Column view for incremental activity updates.
  std::vector<std::vector<std::pair<int, double>>> cols(n);
  for (const auto& c : instance.coefficients)
    cols[c.variable].push_back({c.constraint, c.value});

  std::vector<double> activity(m, 0.0);
  std::vector<double> x(n, 0.0);
  // Worst-first ordered pool of (min-sense objective, assignment).
  std::vector<PoolEntry> pool;

  MipSolution out;
  std::uint64_t assignment = 0;
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t code = 0; code < total; ++code) {
    // Gray-code step: flip exactly one variable per visit.
    if (code != 0) {
      const std::uint64_t gray = code ^ (code >> 1);
      const std::uint64_t prev_gray = (code - 1) ^ ((code - 1) >> 1);
      const int flip = static_cast<int>(std::countr_zero(gray ^ prev_gray));
      const double delta = x[flip] > 0.5 ? -1.0 : 1.0;
      x[flip] += delta;
      for (const auto& [row, value] : cols[flip]) activity[row] += delta * value;
      assignment = gray;
    }
    (void)assignment;

    bool feasible = true;
    for (int i = 0; i < m && feasible; ++i) {
      const auto& c = instance.constraints[i];
      switch (c.sense) {
        case Sense::kLessEqual: feasible = activity[i] <= c.rhs + 1e-9; break;
        case Sense::kGreaterEqual: feasible = activity[i] >= c.rhs - 1e-9; break;
        case Sense::kEqual: feasible = std::abs(activity[i] - c.rhs) <= 1e-9; break;
      }
    }
    if (!feasible) continue;

    const double min_obj = sense_sign * solve_detail::objective_value(instance, x);
    if (static_cast<int>(pool.size()) < pool_size ||
        min_obj < pool.front().objective - 1e-12) {
      PoolEntry entry{min_obj, x};
      pool.push_back(std::move(entry));
      std::sort(pool.begin(), pool.end(), [](const PoolEntry& a, const PoolEntry& b) {
        return a.objective > b.objective;  // worst first
      });
      if (static_cast<int>(pool.size()) > pool_size) pool.erase(pool.begin());
    }
  }

  if (pool.empty()) {
    out.status = MipStatus::kInfeasible;
    return out;
  }
  out.status = MipStatus::kOptimal;
  out.values = pool.back().values;
  out.objective = sense_sign * pool.back().objective;
  out.pool = std::move(pool);
  for (auto& entry : out.pool) entry.objective = sense_sign * entry.objective;
  out.nodes_explored = static_cast<long long>(total);
  return out;
}

struct GapLabel {
  bool available = false;
  double label = 0.0;
  double z_lp = 0.0;
  double z_incumbent = 0.0;
};

// Conservative integrality-gap label: best incumbent at the limit over the
// LP optimum. Unavailable (with a warning) when the LP is degenerate.
inline GapLabel integrality_gap_label(const MipInstance& instance,
                                      const SolveLimits& limits = {}) {
  GapLabel out;
  const LpSolution lp = solve_lp(instance);
  if (lp.status != LpStatus::kOptimal) {
    warn("gap label skipped for '" + instance.name + "': LP not optimal");
    return out;
  }
  if (std::abs(lp.objective) < 1e-9) {
    warn("gap label skipped for '" + instance.name + "': z_LP is zero");
    return out;
  }
  const MipSolution mip = solve_mip(instance, limits);
  if (mip.values.empty()) {
    warn("gap label skipped for '" + instance.name + "': no incumbent at limit");
    return out;
  }
  out.available = true;
  out.z_lp = lp.objective;
  out.z_incumbent = mip.objective;
  out.label = mip.objective / lp.objective;
  return out;
}

// |obj - best| / max(|obj|, |best|, eps), clamped into [0, 1].
inline double primal_gap(double objective, double best_known) {
  if (!is_finite(objective) || !is_finite(best_known))
    throw DataError("primal_gap needs finite inputs");
  if (objective == best_known) return 0.0;
  const double denom =
      std::max({std::abs(objective), std::abs(best_known), 1e-10});
  return std::min(1.0, std::abs(objective - best_known) / denom);
}

inline const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::kOptimal: return "optimal";
    case MipStatus::kFeasible: return "feasible";
    case MipStatus::kInfeasible: return "infeasible";
    case MipStatus::kLimit: return "limit";
  }
  return "?";
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string write_solution(const MipInstance& instance,
                                  const MipSolution& solution) {
  std::ostringstream out;
  out << "status " << to_string(solution.status) << "\n";
  if (!solution.values.empty()) {
    out << "objective " << format_number(solution.objective) << "\n";
    for (int j = 0; j < instance.num_variables(); ++j)
      out << instance.variables[j].name << " "
          << format_number(solution.values[j]) << "\n";
  }
  return out.str();
}

// Reads a solution written by write_solution or an external solver. Unknown
// variable names are errors; variables missing from the file default to 0.
inline MipSolution read_solution(const MipInstance& instance, std::istream& in) {
  std::unordered_map<std::string, int> index;
  for (int j = 0; j < instance.num_variables(); ++j)
    index[instance.variables[j].name] = j;
  MipSolution out;
  out.values.assign(instance.num_variables(), 0.0);
  std::string line;
  int line_no = 0;
  bool have_status = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "status") {
      std::string s;
      ls >> s;
      if (s == "optimal") out.status = MipStatus::kOptimal;
      else if (s == "feasible") out.status = MipStatus::kFeasible;
      else if (s == "infeasible") out.status = MipStatus::kInfeasible;
      else if (s == "limit") out.status = MipStatus::kLimit;
      else throw ParseError("unknown status '" + s + "'", line_no);
      have_status = true;
      continue;
    }
    double value = 0.0;
    if (!(ls >> value)) throw ParseError("expected '<name> <value>'", line_no);
    if (key == "objective") {
      out.objective = value;
      continue;
    }
    auto it = index.find(key);
    if (it == index.end())
      throw ParseError("unknown variable '" + key + "' in solution", line_no);
    out.values[it->second] = value;
  }
  if (!have_status) throw ParseError("solution file missing status line", 1);
  return out;
}

}  // namespace forge
