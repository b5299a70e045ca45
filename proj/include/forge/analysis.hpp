#pragma once

// Clustering-side evaluation: k-means (k-means++ seeding, best of several
// runs), normalized mutual information, a 2-D PCA projection, and the
// embedding-space vector arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "forge/common.hpp"
#include "forge/rng.hpp"
#include "forge/tensor.hpp"

namespace forge {

// I(T;P) normalized by the arithmetic mean of the entropies, natural logs;
// 0/0 is defined as 0.
inline double nmi(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw DataError("nmi: length mismatch");
  if (truth.empty()) throw DataError("nmi: empty labelings");
  const double n = static_cast<double>(truth.size());
  std::map<int, double> pt, pp;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    pt[truth[i]] += 1.0;
    pp[predicted[i]] += 1.0;
    joint[{truth[i], predicted[i]}] += 1.0;
  }
  // Identical partitions score exactly 1 (the 0/0 single-class case stays 0).
  if (joint.size() == pt.size() && joint.size() == pp.size() && pt.size() > 1)
    return 1.0;
  double ht = 0.0, hp = 0.0, mi = 0.0;
  for (auto& [label, count] : pt) {
    const double p = count / n;
    ht -= p * std::log(p);
  }
  for (auto& [label, count] : pp) {
    const double p = count / n;
    hp -= p * std::log(p);
  }
  for (auto& [pair, count] : joint) {
    const double p = count / n;
    const double marg = (pt[pair.first] / n) * (pp[pair.second] / n);
    mi += p * std::log(p / marg);
  }
  const double denom = 0.5 * (ht + hp);
  if (denom <= 0.0) return 0.0;
  return std::max(0.0, std::min(1.0, mi / denom));
}

struct ClusterResult {
  std::vector<int> assignments;  // best-inertia run
  double inertia = 0.0;
  double nmi_vs_truth = 0.0;  // mean over runs (when truth given)
  double nmi_best_run = 0.0;  // NMI of the best-inertia run
  int runs = 0;
  std::uint64_t seed = 0;
};

namespace kmeans_detail {

inline double sq_dist(const Tensor& x, std::int64_t row, const std::vector<double>& c) {
  double acc = 0.0;
  for (std::int64_t j = 0; j < x.cols(); ++j) {
    const double d = x.at(row, j) - c[j];
    acc += d * d;
  }
  return acc;
}

struct SingleRun {
  std::vector<int> assignments;
  double inertia = 0.0;
};

inline SingleRun lloyd(const Tensor& x, int k, Rng& rng) {
  const std::int64_t n = x.rows();
  const std::int64_t d = x.cols();
  std::vector<std::vector<double>> centers;

  // k-means++ seeding.
  std::vector<double> dist2(n, kInfinity);
  {
    const std::int64_t first = static_cast<std::int64_t>(rng.below(n));
    centers.emplace_back(x.data.begin() + first * d, x.data.begin() + (first + 1) * d);
  }
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i], sq_dist(x, i, centers.back()));
      total += dist2[i];
    }
    std::int64_t pick = -1;
    if (total <= 0.0) {
      // All mass on existing centers: take the first point not on one.
      for (std::int64_t i = 0; i < n && pick < 0; ++i)
        if (dist2[i] > 0.0) pick = i;
      if (pick < 0) throw DataError("k-means: fewer distinct points than clusters");
    } else {
      double r = rng.uniform() * total;
      for (std::int64_t i = 0; i < n; ++i) {
        r -= dist2[i];
        if (r <= 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;
    }
    centers.emplace_back(x.data.begin() + pick * d, x.data.begin() + (pick + 1) * d);
  }

  SingleRun run;
  run.assignments.assign(n, 0);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    for (std::int64_t i = 0; i < n; ++i) {
      double best = kInfinity;
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double dd = sq_dist(x, i, centers[c]);
        if (dd < best) {
          best = dd;
          best_c = c;
        }
      }
      if (run.assignments[i] != best_c) {
        run.assignments[i] = best_c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
    std::vector<std::int64_t> counts(k, 0);
    for (std::int64_t i = 0; i < n; ++i) {
      ++counts[run.assignments[i]];
      for (std::int64_t j = 0; j < d; ++j) sums[run.assignments[i]][j] += x.at(i, j);
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster at the point farthest from its center.
        double worst = -1.0;
        std::int64_t worst_i = 0;
        for (std::int64_t i = 0; i < n; ++i) {
          const double dd = sq_dist(x, i, centers[run.assignments[i]]);
          if (dd > worst) {
            worst = dd;
            worst_i = i;
          }
        }
        for (std::int64_t j = 0; j < d; ++j) centers[c][j] = x.at(worst_i, j);
        continue;
      }
      for (std::int64_t j = 0; j < d; ++j)
        centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
    }
  }

  run.inertia = 0.0;
  for (std::int64_t i = 0; i < n; ++i)
    run.inertia += sq_dist(x, i, centers[run.assignments[i]]);
  return run;
}

}  // namespace kmeans_detail

inline ClusterResult kmeans(const Tensor& x, int k_clusters, int runs,
                            std::uint64_t seed,
                            const std::vector<int>* truth = nullptr) {
  if (x.rows() < k_clusters)
    throw DataError("k-means needs at least as many rows as clusters");
  {
    std::set<std::vector<double>> distinct;
    for (std::int64_t i = 0; i < x.rows(); ++i)
      distinct.insert(std::vector<double>(x.data.begin() + i * x.cols(),
                                          x.data.begin() + (i + 1) * x.cols()));
    if (static_cast<int>(distinct.size()) < k_clusters)
      throw DataError("k-means: fewer distinct points than clusters");
  }

  ClusterResult out;
  out.runs = runs;
  out.seed = seed;
  double best_inertia = kInfinity;
  double nmi_sum = 0.0;
  for (int run = 0; run < runs; ++run) {
    Rng rng = Rng::split(seed, "kmeans-run", static_cast<std::uint64_t>(run));
    auto result = kmeans_detail::lloyd(x, k_clusters, rng);
    double run_nmi = 0.0;
    if (truth) {
      run_nmi = nmi(*truth, result.assignments);
      nmi_sum += run_nmi;
    }
    if (result.inertia < best_inertia) {
      best_inertia = result.inertia;
      out.assignments = result.assignments;
      out.inertia = result.inertia;
      out.nmi_best_run = run_nmi;
    }
  }
  if (truth && runs > 0) out.nmi_vs_truth = nmi_sum / runs;
  return out;
}

struct PcaResult {
  Tensor projected;                       // n x dims
  std::vector<double> explained_ratio;    // per component, of total variance
  std::vector<std::vector<double>> axes;  // component loading vectors
};

// Centered projection onto the top principal axes via power iteration with
// deflation. Component signs follow the largest-absolute-loading-positive
// convention.
inline PcaResult pca_project(const Tensor& x, int dims = 2) {
  if (x.rows() < 2) throw DataError("pca needs at least 2 rows");
  const std::int64_t n = x.rows(), d = x.cols();
  Tensor centered = x;
  for (std::int64_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::int64_t i = 0; i < n; ++i) mean += x.at(i, j);
    mean /= static_cast<double>(n);
    for (std::int64_t i = 0; i < n; ++i) centered.at(i, j) -= mean;
  }

  // Covariance (population) kept implicit: C v = X^T (X v) / n.
  double total_var = 0.0;
  for (double v : centered.data) total_var += v * v;
  total_var /= static_cast<double>(n);

  PcaResult out;
  out.projected = Tensor::zeros(n, dims);
  Tensor residual = centered;
  for (int comp = 0; comp < dims; ++comp) {
    std::vector<double> v(d, 0.0);
    // Deterministic start: direction of the largest-norm residual row.
    std::int64_t seed_row = 0;
    double best_norm = -1.0;
    for (std::int64_t i = 0; i < n; ++i) {
      double norm = 0.0;
      for (std::int64_t j = 0; j < d; ++j) norm += residual.at(i, j) * residual.at(i, j);
      if (norm > best_norm) {
        best_norm = norm;
        seed_row = i;
      }
    }
    if (best_norm <= 1e-24) {
      out.explained_ratio.push_back(0.0);
      out.axes.push_back(v);
      continue;  // no variance left
    }
    for (std::int64_t j = 0; j < d; ++j) v[j] = residual.at(seed_row, j);

    double eigenvalue = 0.0;
    for (int iter = 0; iter < 1000; ++iter) {
      // w = X^T (X v) / n
      std::vector<double> xv(n, 0.0);
      for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < d; ++j) xv[i] += residual.at(i, j) * v[j];
      std::vector<double> w(d, 0.0);
      for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < d; ++j) w[j] += residual.at(i, j) * xv[i];
      double norm = 0.0;
      for (double val : w) norm += val * val;
      norm = std::sqrt(norm);
      if (norm <= 1e-30) break;
      double delta = 0.0;
      for (std::int64_t j = 0; j < d; ++j) {
        const double next = w[j] / norm;
        delta = std::max(delta, std::abs(next - v[j]));
        v[j] = next;
      }
      eigenvalue = norm / static_cast<double>(n);
      if (delta < 1e-13) break;
    }

    // Sign convention.
    std::int64_t max_j = 0;
    for (std::int64_t j = 1; j < d; ++j)
      if (std::abs(v[j]) > std::abs(v[max_j])) max_j = j;
    if (v[max_j] < 0.0)
      for (auto& val : v) val = -val;

    for (std::int64_t i = 0; i < n; ++i) {
      double score = 0.0;
      for (std::int64_t j = 0; j < d; ++j) score += residual.at(i, j) * v[j];
      out.projected.at(i, comp) = score;
      for (std::int64_t j = 0; j < d; ++j) residual.at(i, j) -= score * v[j];
    }
    out.explained_ratio.push_back(total_var > 0 ? eigenvalue / total_var : 0.0);
    out.axes.push_back(v);
  }
  return out;
}

// updated = minuend - (mean(subtrahend) - mean(addend)), applied row-wise.
inline std::vector<std::vector<double>> vector_arith(
    const std::vector<std::vector<double>>& minuend,
    const std::vector<std::vector<double>>& subtrahend_mean_source,
    const std::vector<std::vector<double>>& addend_mean_source) {
  if (minuend.empty() || subtrahend_mean_source.empty() || addend_mean_source.empty())
    throw DataError("vector_arith: empty embedding sets");
  const std::size_t dim = minuend[0].size();
  auto column_mean = [&](const std::vector<std::vector<double>>& rows) {
    std::vector<double> mean(dim, 0.0);
    for (const auto& r : rows) {
      if (r.size() != dim) throw DataError("vector_arith: length mismatch");
      for (std::size_t j = 0; j < dim; ++j) mean[j] += r[j];
    }
    for (double& v : mean) v /= static_cast<double>(rows.size());
    return mean;
  };
  const auto mu_sub = column_mean(subtrahend_mean_source);
  const auto mu_add = column_mean(addend_mean_source);
  std::vector<std::vector<double>> out = minuend;
  for (auto& row : out) {
    if (row.size() != dim) throw DataError("vector_arith: length mismatch");
    for (std::size_t j = 0; j < dim; ++j) row[j] -= mu_sub[j] - mu_add[j];
  }
  return out;
}

// Area under the ROC curve via the rank statistic, ties averaged.
inline double auc(const std::vector<double>& scores,
                  const std::vector<char>& positive) {
  if (scores.size() != positive.size()) throw DataError("auc: length mismatch");
  std::size_t n_pos = 0, n_neg = 0;
  for (char p : positive) (p ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0)
    throw DataError("auc needs both positive and negative examples");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks over tied scores.
  std::vector<double> rank(scores.size(), 0.0);
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = avg;
    i = j + 1;
  }
  double rank_sum = 0.0;
  for (std::size_t t = 0; t < scores.size(); ++t)
    if (positive[t]) rank_sum += rank[t];
  return (rank_sum - 0.5 * static_cast<double>(n_pos) * (n_pos + 1)) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline double cosine_distance(const std::vector<double>& a,
                              const std::vector<double>& b) {
  if (a.size() != b.size()) throw DataError("cosine_distance: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 1.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace forge
