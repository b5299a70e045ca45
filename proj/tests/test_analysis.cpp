#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "forge/analysis.hpp"
#include "forge/rng.hpp"

using namespace forge;

TEST_CASE("nmi unit correctness", "[analysis]") {
  SECTION("identical labelings score 1") {
    REQUIRE(nmi({0, 0, 1, 1, 2}, {0, 0, 1, 1, 2}) == Catch::Approx(1.0));
  }
  SECTION("constant prediction scores 0") {
    REQUIRE(nmi({0, 0, 1, 1}, {7, 7, 7, 7}) == 0.0);
  }
  SECTION("label permutation invariance") {
    REQUIRE(nmi({0, 0, 1, 1}, {1, 1, 0, 0}) == Catch::Approx(1.0));
  }
  SECTION("symmetry") {
    const std::vector<int> a = {0, 0, 1, 1, 2, 2};
    const std::vector<int> b = {0, 1, 1, 1, 2, 2};
    REQUIRE(nmi(a, b) == Catch::Approx(nmi(b, a)));
  }
  SECTION("both constant is the 0/0 case, defined as 0") {
    REQUIRE(nmi({3, 3, 3}, {5, 5, 5}) == 0.0);
  }
  SECTION("length mismatch is an error") {
    REQUIRE_THROWS_AS(nmi({0, 1}, {0}), DataError);
  }
}

namespace {

// Three well-separated planted blobs in 2-D.
Tensor blobs(int per_blob, double spread, Rng& rng, std::vector<int>* labels) {
  const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
  Tensor x = Tensor::zeros(3 * per_blob, 2);
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < per_blob; ++i) {
      const int row = b * per_blob + i;
      x.at(row, 0) = centers[b][0] + spread * rng.normal();
      x.at(row, 1) = centers[b][1] + spread * rng.normal();
      if (labels) labels->push_back(b);
    }
  return x;
}

}  // namespace

TEST_CASE("kmeans separates planted blobs", "[analysis]") {
  Rng rng(4);
  std::vector<int> truth;
  Tensor x = blobs(20, 0.5, rng, &truth);

  SECTION("two blobs, k=2, perfect NMI") {
    // Use only the first two blobs.
    Tensor sub = Tensor::zeros(40, 2);
    std::copy(x.data.begin(), x.data.begin() + 80, sub.data.begin());
    std::vector<int> t(truth.begin(), truth.begin() + 40);
    ClusterResult r = kmeans(sub, 2, 5, 11, &t);
    REQUIRE(r.nmi_vs_truth == Catch::Approx(1.0));
  }
  SECTION("k=1 against any labels gives NMI 0") {
    ClusterResult r = kmeans(x, 1, 3, 11, &truth);
    REQUIRE(r.nmi_vs_truth == 0.0);
  }
  SECTION("best-of-runs inertia never exceeds a single run") {
    ClusterResult many = kmeans(x, 3, 10, 11, &truth);
    ClusterResult one = kmeans(x, 3, 1, 11, &truth);
    REQUIRE(many.inertia <= one.inertia + 1e-9);
  }
  SECTION("degenerate k above distinct points errors") {
    Tensor dup = Tensor::zeros(4, 2);  // four identical points
    REQUIRE_THROWS_AS(kmeans(dup, 2, 1, 1), DataError);
  }
  SECTION("assignments are invariant to translation and uniform scaling") {
    ClusterResult base = kmeans(x, 3, 3, 19, &truth);
    Tensor moved = x;
    for (std::int64_t i = 0; i < moved.rows(); ++i)
      for (std::int64_t j = 0; j < moved.cols(); ++j)
        moved.at(i, j) = 4.0 * moved.at(i, j) + 100.0;
    ClusterResult shifted = kmeans(moved, 3, 3, 19, &truth);
    REQUIRE(nmi(base.assignments, shifted.assignments) == Catch::Approx(1.0));
  }
}

TEST_CASE("pca projection", "[analysis]") {
  SECTION("a plane embedded in 5-D explains all variance in 2 components") {
    Rng rng(9);
    Tensor x = Tensor::zeros(40, 5);
    for (std::int64_t i = 0; i < 40; ++i) {
      const double a = rng.normal(), b = rng.normal();
      // columns are fixed linear combinations of two latent factors
      x.at(i, 0) = a;
      x.at(i, 1) = 2 * a - b;
      x.at(i, 2) = b;
      x.at(i, 3) = a + b;
      x.at(i, 4) = -a;
    }
    PcaResult p = pca_project(x, 2);
    REQUIRE(p.explained_ratio.size() == 2);
    REQUIRE(p.explained_ratio[0] + p.explained_ratio[1] ==
            Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("duplicate rows leave zero variance for later components") {
    Tensor x = Tensor::zeros(6, 3);
    for (std::int64_t i = 0; i < 6; ++i) x.at(i, 0) = i < 3 ? 1.0 : -1.0;
    PcaResult p = pca_project(x, 2);
    REQUIRE(p.explained_ratio[0] == Catch::Approx(1.0));
    REQUIRE(p.explained_ratio[1] == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("hand-checked 3-point case") {
    // Points (0,0), (1,1), (2,2): a line with direction (1,1)/sqrt(2);
    // centered scores are -sqrt(2), 0, +sqrt(2).
    Tensor x = Tensor::from_rows(3, 2, {0, 0, 1, 1, 2, 2});
    PcaResult p = pca_project(x, 2);
    REQUIRE(p.explained_ratio[0] == Catch::Approx(1.0));
    REQUIRE(std::abs(p.projected.at(0, 0)) == Catch::Approx(std::sqrt(2.0)));
    REQUIRE(p.projected.at(1, 0) == Catch::Approx(0.0).margin(1e-12));
    // Sign convention: largest loading positive, so scores ascend.
    REQUIRE(p.projected.at(2, 0) > 0.0);
  }
}

TEST_CASE("vector arithmetic", "[analysis]") {
  const std::vector<std::vector<double>> vc = {{1, 2, 3}, {2, 3, 4}};
  SECTION("equal means leave the input unchanged") {
    const std::vector<std::vector<double>> same = {{5, 5, 5}};
    const auto out = vector_arith(vc, same, same);
    REQUIRE(out == vc);
  }
  SECTION("row shift by -(mu_sub - mu_add)") {
    const std::vector<std::vector<double>> sub = {{2, 0, 0}, {4, 0, 0}};
    const std::vector<std::vector<double>> add = {{1, 1, 1}};
    const auto out = vector_arith(vc, sub, add);
    // direction = (3,0,0) - (1,1,1) = (2,-1,-1)
    REQUIRE(out[0] == std::vector<double>{-1, 3, 4});
    REQUIRE(out[1] == std::vector<double>{0, 4, 5});
  }
  SECTION("applying the negated direction inverts exactly") {
    const std::vector<std::vector<double>> sub = {{2, 0, 1}};
    const std::vector<std::vector<double>> add = {{0, 1, 5}};
    const auto shifted = vector_arith(vc, sub, add);
    const auto back = vector_arith(shifted, add, sub);
    for (std::size_t i = 0; i < vc.size(); ++i)
      for (std::size_t j = 0; j < vc[i].size(); ++j)
        REQUIRE(back[i][j] == Catch::Approx(vc[i][j]).margin(1e-12));
  }
  SECTION("empty sets are rejected") {
    REQUIRE_THROWS_AS(vector_arith(vc, {}, vc), DataError);
  }
}
