#include <catch2/catch_amalgamated.hpp>

#include "forge/bipartite.hpp"
#include "forge/generators.hpp"
#include "forge/mps.hpp"

using namespace forge;

namespace {

MipInstance two_var_le() {
  // x + y <= 5, minimize x + 2y with one binary and one continuous variable.
  MipInstance inst;
  VariableDef x, y;
  x.name = "x";
  x.type = VarType::kBinary;
  x.upper_bound = 1.0;
  x.objective_coeff = 2.0;
  y.name = "y";
  y.objective_coeff = 1.0;
  inst.variables = {x, y};
  ConstraintDef c{"cap", Sense::kLessEqual, 5.0};
  inst.constraints = {c};
  inst.coefficients = {{0, 0, 1.0}, {0, 1, 1.0}};
  return inst;
}

}  // namespace

TEST_CASE("constraint and variable features are transcribed", "[bigraph]") {
  BipartiteGraph g = to_bipartite(two_var_le());
  REQUIRE(g.n_constraints == 1);
  REQUIRE(g.n_variables == 2);

  // "<=" constraint with rhs 5: [1,0,0,5, 0,0,0,0,0,0]
  const double expect_c[10] = {1, 0, 0, 5, 0, 0, 0, 0, 0, 0};
  for (int col = 0; col < 10; ++col)
    REQUIRE(g.node_features.at(0, col) == expect_c[col]);

  // binary variable with objective coefficient 2: [0,0,0,0, 1,0,0, 0,1, 2]
  const double expect_x[10] = {0, 0, 0, 0, 1, 0, 0, 0, 1, 2};
  for (int col = 0; col < 10; ++col)
    REQUIRE(g.node_features.at(g.variable_node(0), col) == expect_x[col]);

  // continuous variable, default bounds: upper clipped to 1e6.
  REQUIRE(g.node_features.at(g.variable_node(1), 6) == 1.0);
  REQUIRE(g.node_features.at(g.variable_node(1), 8) == kBoundClip);
}

TEST_CASE("triangle vertex cover graph has 6 nodes and 6 unit edges", "[bigraph]") {
  MipInstance vc = gen_instance(Family::kVertexCover, SizeTag::kTiny, 1);
  BipartiteGraph g = to_bipartite(vc);
  REQUIRE(g.edges.size() == vc.coefficients.size());
  for (const auto& e : g.edges) REQUIRE(e.weight == 1.0);

  // Column support is disjoint by node kind.
  for (int r = 0; r < g.num_nodes(); ++r) {
    const bool is_constraint = r < g.n_constraints;
    for (int col = 0; col < 10; ++col) {
      const bool constraint_col = col <= 3;
      if (is_constraint != constraint_col)
        REQUIRE(g.node_features.at(r, col) == 0.0);
    }
  }
}

TEST_CASE("maximization is converted to minimization with a flag", "[bigraph]") {
  MipInstance is = gen_instance(Family::kIndependentSet, SizeTag::kTiny, 2);
  BipartiteGraph g = to_bipartite(is);
  REQUIRE(g.objective_flipped);
  for (int j = 0; j < g.n_variables; ++j)
    REQUIRE(g.node_features.at(g.variable_node(j), 9) ==
            -is.variables[j].objective_coeff);
}

TEST_CASE("feature scaling", "[bigraph]") {
  SECTION("column with values {0, 10} maps to {-1, +1}") {
    MipInstance a = two_var_le();
    a.constraints[0].rhs = 0.0;
    MipInstance b = two_var_le();
    b.constraints[0].rhs = 10.0;
    std::vector<BipartiteGraph> corpus = {to_bipartite(a), to_bipartite(b)};
    FeatureScale scale = fit_feature_scale(corpus);
    BipartiteGraph sa = apply_feature_scale(corpus[0], scale);
    BipartiteGraph sb = apply_feature_scale(corpus[1], scale);
    REQUIRE(sa.node_features.at(0, 3) == Catch::Approx(-1.0));
    REQUIRE(sb.node_features.at(0, 3) == Catch::Approx(1.0));
  }
  SECTION("constant rhs column maps to zero everywhere") {
    std::vector<BipartiteGraph> corpus = {to_bipartite(two_var_le()),
                                          to_bipartite(two_var_le())};
    FeatureScale scale = fit_feature_scale(corpus);
    BipartiteGraph s = apply_feature_scale(corpus[0], scale);
    REQUIRE(s.node_features.at(0, 3) == 0.0);
  }
  SECTION("one-hot columns keep their bit patterns") {
    std::vector<BipartiteGraph> corpus = {to_bipartite(two_var_le())};
    FeatureScale scale = fit_feature_scale(corpus);
    BipartiteGraph s = apply_feature_scale(corpus[0], scale);
    for (int r = 0; r < s.num_nodes(); ++r)
      for (int col : {0, 1, 2, 4, 5, 6})
        REQUIRE(s.node_features.at(r, col) == corpus[0].node_features.at(r, col));
  }
  SECTION("padding stays exactly zero after scaling") {
    std::vector<BipartiteGraph> corpus;
    for (std::uint64_t s = 1; s <= 3; ++s)
      corpus.push_back(to_bipartite(gen_instance(Family::kCombAuction, SizeTag::kTiny, s)));
    FeatureScale scale = fit_feature_scale(corpus);
    for (const auto& g : corpus) {
      BipartiteGraph scaled = apply_feature_scale(g, scale);
      for (int r = 0; r < scaled.num_nodes(); ++r) {
        const bool is_constraint = r < scaled.n_constraints;
        for (int col = 0; col < 10; ++col) {
          const bool constraint_col = col <= 3;
          if (is_constraint != constraint_col)
            REQUIRE(scaled.node_features.at(r, col) == 0.0);
        }
      }
    }
  }
  SECTION("double scaling is rejected") {
    std::vector<BipartiteGraph> corpus = {to_bipartite(two_var_le())};
    FeatureScale scale = fit_feature_scale(corpus);
    BipartiteGraph once = apply_feature_scale(corpus[0], scale);
    REQUIRE_THROWS_AS(apply_feature_scale(once, scale), DataError);
  }
}

TEST_CASE("distinct coefficients give distinct graphs", "[bigraph]") {
  MipInstance a = two_var_le();
  MipInstance b = two_var_le();
  b.coefficients[1].value = 3.0;
  BipartiteGraph ga = to_bipartite(a);
  BipartiteGraph gb = to_bipartite(b);
  bool differ = false;
  for (std::size_t i = 0; i < ga.edges.size(); ++i)
    if (ga.edges[i].weight != gb.edges[i].weight) differ = true;
  REQUIRE(differ);
}

TEST_CASE("debug CSV dumps cover every node and edge", "[bigraph]") {
  BipartiteGraph g = to_bipartite(two_var_le());
  const std::string feats = features_csv(g);
  const std::string edges = edges_csv(g);
  REQUIRE(std::count(feats.begin(), feats.end(), '\n') == 1 + g.num_nodes());
  REQUIRE(std::count(edges.begin(), edges.end(), '\n') ==
          1 + static_cast<long>(g.edges.size()));
}
