#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "forge/optimizer.hpp"
#include "forge/tensor.hpp"

using forge::AdamState;
using forge::Tensor;

TEST_CASE("zero gradient leaves parameters unchanged", "[adam]") {
  Tensor p = Tensor::from_rows(2, 2, {1.0, -2.0, 3.0, 0.5});
  const Tensor before = p;
  AdamState state;
  std::vector<Tensor*> params{&p};
  std::vector<Tensor> grads{Tensor::zeros(2, 2)};
  adam_step(params, grads, state);
  REQUIRE(state.step_count == 1);
  for (std::size_t i = 0; i < p.data.size(); ++i)
    REQUIRE(p.data[i] == before.data[i]);
}

TEST_CASE("constant gradient drives update magnitude to the learning rate", "[adam]") {
  // With g constant, bias-corrected mhat = g and vhat = g^2, so the step
  // tends to lr * g / |g| = lr in magnitude.
  Tensor p = Tensor::scalar(0.0);
  AdamState state;
  state.learning_rate = 1e-3;
  std::vector<Tensor*> params{&p};
  std::vector<Tensor> grads{Tensor::scalar(0.37)};
  double prev = p.data[0];
  double last_step = 0.0;
  for (int i = 0; i < 200; ++i) {
    adam_step(params, grads, state);
    last_step = std::abs(p.data[0] - prev);
    prev = p.data[0];
  }
  REQUIRE(last_step == Catch::Approx(state.learning_rate).epsilon(1e-4));
}

TEST_CASE("quadratic bowl reaches loss below 1e-3 within 100 steps", "[adam]") {
  Tensor p = Tensor::from_rows(1, 4, {1.0, -1.0, 0.7, -0.4});
  const Tensor target = Tensor::from_rows(1, 4, {0.2, 0.1, -0.3, 0.25});
  AdamState state;
  state.learning_rate = 0.02;
  std::vector<Tensor*> params{&p};
  double loss = 0.0;
  for (int step = 0; step < 100; ++step) {
    Tensor g = Tensor::zeros(1, 4);
    loss = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double d = p.data[i] - target.data[i];
      loss += d * d / 4.0;
      g.data[i] = 2.0 * d / 4.0;
    }
    std::vector<Tensor> grads{g};
    adam_step(params, grads, state);
  }
  REQUIRE(loss < 1e-3);
}

TEST_CASE("NaN gradient is rejected", "[adam]") {
  Tensor p = Tensor::scalar(1.0);
  AdamState state;
  std::vector<Tensor*> params{&p};
  std::vector<Tensor> grads{Tensor::scalar(std::nan(""))};
  REQUIRE_THROWS_AS(adam_step(params, grads, state), forge::NumericError);
}
