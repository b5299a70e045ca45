#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forge/common.hpp"
#include "forge/rng.hpp"

namespace forge {

// Dense row-major tensor. Rank 2 throughout the model; scalars are {1}.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::int64_t> s) : shape(std::move(s)) {
    data.assign(static_cast<std::size_t>(numel_of(shape)), 0.0);
  }

  static std::int64_t numel_of(const std::vector<std::int64_t>& s) {
    std::int64_t n = 1;
    for (auto d : s) n *= d;
    return n;
  }

  static Tensor zeros(std::int64_t rows, std::int64_t cols) {
    return Tensor({rows, cols});
  }

  static Tensor scalar(double v) {
    Tensor t({1});
    t.data[0] = v;
    return t;
  }

  static Tensor from_rows(std::int64_t rows, std::int64_t cols,
                          std::vector<double> values) {
    Tensor t;
    t.shape = {rows, cols};
    if (static_cast<std::int64_t>(values.size()) != rows * cols)
      throw DataError("tensor literal size mismatch");
    t.data = std::move(values);
    return t;
  }

  static Tensor randn(std::int64_t rows, std::int64_t cols, Rng& rng,
                      double stddev = 1.0) {
    Tensor t = zeros(rows, cols);
    for (auto& v : t.data) v = rng.normal() * stddev;
    return t;
  }

  static Tensor rand_uniform(std::int64_t rows, std::int64_t cols, Rng& rng,
                             double lo, double hi) {
    Tensor t = zeros(rows, cols);
    for (auto& v : t.data) v = rng.uniform(lo, hi);
    return t;
  }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }
  bool is_scalar() const { return numel() == 1; }
  std::int64_t rows() const { return shape.empty() ? 1 : shape[0]; }
  std::int64_t cols() const {
    return shape.size() < 2 ? (shape.empty() ? 1 : 1) : shape[1];
  }

  double& at(std::int64_t r, std::int64_t c) {
    return data[static_cast<std::size_t>(r * cols() + c)];
  }
  double at(std::int64_t r, std::int64_t c) const {
    return data[static_cast<std::size_t>(r * cols() + c)];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  std::string shape_str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }
};

}  // namespace forge
