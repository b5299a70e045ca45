#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "forge/generators.hpp"
#include "forge/minisolve.hpp"
#include "forge/mps.hpp"

using namespace forge;

namespace {

MipInstance triangle(Family family) {
  // Same triangle graph for cover (>=) and independent set (<=).
  MipInstance inst;
  inst.name = "triangle";
  const bool cover = family == Family::kVertexCover;
  inst.objective_sense = cover ? ObjectiveSense::kMinimize : ObjectiveSense::kMaximize;
  for (int v = 0; v < 3; ++v) {
    VariableDef x;
    x.name = "x" + std::to_string(v);
    x.type = VarType::kBinary;
    x.lower_bound = 0;
    x.upper_bound = 1;
    x.objective_coeff = 1.0;
    inst.variables.push_back(x);
  }
  int row = 0;
  for (auto [u, v] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
    ConstraintDef c;
    c.name = "e" + std::to_string(row);
    c.sense = cover ? Sense::kGreaterEqual : Sense::kLessEqual;
    c.rhs = 1.0;
    inst.constraints.push_back(c);
    inst.coefficients.push_back({row, u, 1.0});
    inst.coefficients.push_back({row, v, 1.0});
    ++row;
  }
  return inst;
}

}  // namespace

TEST_CASE("lp basics", "[solver]") {
  SECTION("max x+y subject to x+y <= 1 in the unit box") {
    MipInstance inst;
    inst.objective_sense = ObjectiveSense::kMaximize;
    for (const char* n : {"x", "y"}) {
      VariableDef v;
      v.name = n;
      v.upper_bound = 1.0;
      v.objective_coeff = 1.0;
      inst.variables.push_back(v);
    }
    ConstraintDef c;
    c.name = "cap";
    c.sense = Sense::kLessEqual;
    c.rhs = 1.0;
    inst.constraints.push_back(c);
    inst.coefficients.push_back({0, 0, 1.0});
    inst.coefficients.push_back({0, 1, 1.0});
    LpSolution lp = solve_lp(inst);
    REQUIRE(lp.status == LpStatus::kOptimal);
    REQUIRE(lp.objective == Catch::Approx(1.0));
  }

  SECTION("triangle vertex cover relaxation has optimum 1.5 at x=0.5") {
    LpSolution lp = solve_lp(triangle(Family::kVertexCover));
    REQUIRE(lp.status == LpStatus::kOptimal);
    REQUIRE(lp.objective == Catch::Approx(1.5).margin(1e-8));
    for (double v : lp.values) REQUIRE(v == Catch::Approx(0.5).margin(1e-7));
  }

  SECTION("x >= 2 with x <= 1 is infeasible") {
    MipInstance inst;
    VariableDef x;
    x.name = "x";
    x.objective_coeff = 1.0;
    inst.variables.push_back(x);
    ConstraintDef c1{"lo", Sense::kGreaterEqual, 2.0};
    ConstraintDef c2{"hi", Sense::kLessEqual, 1.0};
    inst.constraints = {c1, c2};
    inst.coefficients = {{0, 0, 1.0}, {1, 0, 1.0}};
    REQUIRE(solve_lp(inst).status == LpStatus::kInfeasible);
  }

  SECTION("unbounded ray is reported") {
    MipInstance inst;
    VariableDef x;
    x.name = "x";
    x.objective_coeff = -1.0;  // min -x, x in [0, inf)
    inst.variables.push_back(x);
    REQUIRE(solve_lp(inst).status == LpStatus::kUnbounded);
  }

  SECTION("free and negative variables") {
    // min x + 2y with x free, y in [-3, inf), x + y >= 4.
    MipInstance inst;
    VariableDef x, y;
    x.name = "x";
    x.lower_bound = -kInfinity;
    x.objective_coeff = 1.0;
    y.name = "y";
    y.lower_bound = -3.0;
    y.objective_coeff = 2.0;
    inst.variables = {x, y};
    ConstraintDef c{"c", Sense::kGreaterEqual, 4.0};
    inst.constraints = {c};
    inst.coefficients = {{0, 0, 1.0}, {0, 1, 1.0}};
    LpSolution lp = solve_lp(inst);
    REQUIRE(lp.status == LpStatus::kOptimal);
    REQUIRE(lp.objective == Catch::Approx(1.0));  // y at -3, x = 7
    REQUIRE(lp.values[1] == Catch::Approx(-3.0));
  }

  SECTION("equality constraints are honored") {
    MipInstance inst;
    VariableDef x, y;
    x.name = "x";
    x.objective_coeff = 1.0;
    y.name = "y";
    y.objective_coeff = 3.0;
    inst.variables = {x, y};
    ConstraintDef c{"fix", Sense::kEqual, 2.0};
    inst.constraints = {c};
    inst.coefficients = {{0, 0, 1.0}, {0, 1, 1.0}};
    LpSolution lp = solve_lp(inst);
    REQUIRE(lp.status == LpStatus::kOptimal);
    REQUIRE(lp.objective == Catch::Approx(2.0));  // all on x
  }
}

TEST_CASE("simplex optimum is invariant to row permutation", "[solver]") {
  MipInstance inst = gen_instance(Family::kSetCover, SizeTag::kEasy, 31);
  LpSolution base = solve_lp(inst);
  MipInstance permuted = inst;
  std::reverse(permuted.constraints.begin(), permuted.constraints.end());
  const int m = inst.num_constraints();
  for (auto& c : permuted.coefficients) c.constraint = m - 1 - c.constraint;
  LpSolution flipped = solve_lp(permuted);
  REQUIRE(base.status == LpStatus::kOptimal);
  REQUIRE(flipped.objective == Catch::Approx(base.objective).margin(1e-7));
}

TEST_CASE("branch and bound solves the triangle instances", "[solver]") {
  SECTION("vertex cover optimum 2") {
    MipSolution sol = solve_mip(triangle(Family::kVertexCover));
    REQUIRE(sol.status == MipStatus::kOptimal);
    REQUIRE(sol.objective == Catch::Approx(2.0));
    MipSolution oracle = solve_exhaustive(triangle(Family::kVertexCover));
    REQUIRE(oracle.objective == Catch::Approx(2.0));
  }
  SECTION("independent set optimum 1") {
    MipSolution sol = solve_mip(triangle(Family::kIndependentSet));
    REQUIRE(sol.status == MipStatus::kOptimal);
    REQUIRE(sol.objective == Catch::Approx(1.0));
    MipSolution oracle = solve_exhaustive(triangle(Family::kIndependentSet));
    REQUIRE(oracle.objective == Catch::Approx(1.0));
  }
}

TEST_CASE("branch and bound equals exhaustive enumeration on tiny corpora",
          "[solver][oracle]") {
  const Family families[] = {Family::kSetCover, Family::kVertexCover,
                             Family::kIndependentSet, Family::kBinPacking,
                             Family::kCombAuction};
  int checked = 0;
  for (Family f : families) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      MipInstance inst = gen_instance(f, SizeTag::kTiny, seed);
      if (inst.num_variables() > 20) continue;
      MipSolution bnb = solve_mip(inst);
      MipSolution brute = solve_exhaustive(inst);
      INFO(inst.name);
      REQUIRE(bnb.status == MipStatus::kOptimal);
      REQUIRE(bnb.objective == Catch::Approx(brute.objective).margin(1e-6));

      // Weak duality in the minimize convention.
      LpSolution lp = solve_lp(inst);
      REQUIRE(lp.status == LpStatus::kOptimal);
      const double sign = inst.objective_sense == ObjectiveSense::kMaximize ? -1 : 1;
      REQUIRE(sign * lp.objective <= sign * brute.objective + 1e-6);
      ++checked;
    }
  }
  REQUIRE(checked >= 10);
}

TEST_CASE("solution pools are distinct and ordered", "[solver]") {
  MipInstance inst = gen_instance(Family::kVertexCover, SizeTag::kTiny, 2);
  MipSolution sol = solve_exhaustive(inst, 5);
  REQUIRE(sol.pool.size() == 5);
  // Best last, all feasible, pairwise distinct in some binary variable.
  REQUIRE(sol.pool.back().objective == Catch::Approx(sol.objective));
  for (std::size_t i = 0; i < sol.pool.size(); ++i) {
    REQUIRE(solve_detail::solution_feasible(inst, sol.pool[i].values));
    for (std::size_t j = i + 1; j < sol.pool.size(); ++j)
      REQUIRE(solve_detail::binary_distinct(inst, sol.pool[i].values,
                                            sol.pool[j].values));
  }
  for (std::size_t i = 1; i < sol.pool.size(); ++i)
    REQUIRE(sol.pool[i - 1].objective >= sol.pool[i].objective - 1e-9);
}

TEST_CASE("node limit yields limit status with best incumbent", "[solver]") {
  MipInstance inst = gen_instance(Family::kSetCover, SizeTag::kEasy, 12);
  SolveLimits limits;
  limits.node_limit = 3;
  MipSolution sol = solve_mip(inst, limits);
  REQUIRE(sol.status == MipStatus::kLimit);
}

TEST_CASE("integrality gap labels", "[solver]") {
  SECTION("integral LP gives label 1") {
    MipInstance inst;
    VariableDef x;
    x.name = "x";
    x.type = VarType::kBinary;
    x.upper_bound = 1.0;
    x.objective_coeff = 1.0;
    inst.variables = {x};
    ConstraintDef c{"need", Sense::kGreaterEqual, 1.0};
    inst.constraints = {c};
    inst.coefficients = {{0, 0, 1.0}};
    GapLabel label = integrality_gap_label(inst);
    REQUIRE(label.available);
    REQUIRE(label.label == Catch::Approx(1.0));
  }
  SECTION("triangle vertex cover gives 2 / 1.5") {
    GapLabel label = integrality_gap_label(triangle(Family::kVertexCover));
    REQUIRE(label.available);
    REQUIRE(label.label == Catch::Approx(2.0 / 1.5));
  }
  SECTION("tight limits never shrink the minimization label") {
    MipInstance inst = gen_instance(Family::kSetCover, SizeTag::kEasy, 8);
    SolveLimits tight;
    tight.node_limit = 4;
    GapLabel quick = integrality_gap_label(inst, tight);
    GapLabel full = integrality_gap_label(inst);
    if (quick.available && full.available)
      REQUIRE(quick.label >= full.label - 1e-9);
  }
  SECTION("zero LP objective is skipped with a warning") {
    MipInstance inst;
    VariableDef x;
    x.name = "x";
    x.type = VarType::kBinary;
    x.upper_bound = 1.0;
    x.objective_coeff = 1.0;
    inst.variables = {x};
    // min x with no lower pressure: LP optimum 0.
    std::string captured;
    auto old = warning_handler();
    warning_handler() = [&](const std::string& msg) { captured = msg; };
    GapLabel label = integrality_gap_label(inst);
    warning_handler() = old;
    REQUIRE_FALSE(label.available);
    REQUIRE(captured.find("z_LP") != std::string::npos);
  }
}

TEST_CASE("primal gap formula", "[solver]") {
  REQUIRE(primal_gap(5.0, 5.0) == 0.0);
  REQUIRE(primal_gap(150.0, 100.0) == Catch::Approx(1.0 / 3.0));
  REQUIRE(primal_gap(-5.0, 5.0) == 1.0);  // capped
}

TEST_CASE("solution files round trip", "[solver]") {
  MipInstance inst = triangle(Family::kVertexCover);
  MipSolution sol = solve_mip(inst);
  const std::string text = write_solution(inst, sol);
  std::istringstream in(text);
  MipSolution again = read_solution(inst, in);
  REQUIRE(again.status == sol.status);
  REQUIRE(again.objective == Catch::Approx(sol.objective));
  for (int j = 0; j < inst.num_variables(); ++j)
    REQUIRE(again.values[j] == Catch::Approx(sol.values[j]));

  std::istringstream bad("status optimal\nnope 1\n");
  REQUIRE_THROWS_AS(read_solution(inst, bad), ParseError);
}

TEST_CASE("pseudo-cut keeps the optimum feasible when conservative", "[solver][mip]") {
  // bound = z_LP * g_hat with g_hat under the true gap never cuts the optimum.
  MipInstance inst = gen_instance(Family::kSetCover, SizeTag::kTiny, 17);
  LpSolution lp = solve_lp(inst);
  MipSolution brute = solve_exhaustive(inst);
  REQUIRE(lp.status == LpStatus::kOptimal);
  const double true_gap = brute.objective / lp.objective;
  const double g_hat = 1.0 + 0.6 * (true_gap - 1.0);  // under-estimate
  MipInstance cut = add_pseudo_cut(inst, lp.objective * g_hat);
  MipSolution after = solve_exhaustive(cut);
  REQUIRE(after.status == MipStatus::kOptimal);
  REQUIRE(after.objective == Catch::Approx(brute.objective).margin(1e-9));
}
