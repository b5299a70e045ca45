#pragma once

#include <cmath>
#include <vector>

#include "forge/common.hpp"
#include "forge/tensor.hpp"

namespace forge {

// Adam with bias correction. Moment buffers are created on first use and
// stay aligned with the parameter list passed to every step.
struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long long step_count = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
};

inline void adam_step(std::vector<Tensor*>& params,
                      const std::vector<Tensor>& grads, AdamState& state) {
  if (params.size() != grads.size())
    throw DataError("adam_step: parameter/gradient count mismatch");
  if (state.first_moment.empty()) {
    for (const Tensor* p : params) {
      state.first_moment.emplace_back(p->shape);
      state.second_moment.emplace_back(p->shape);
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(grads[i]))
      throw DataError("adam_step: gradient shape mismatch");
    if (!grads[i].all_finite()) throw NumericError("adam_step: NaN/Inf gradient");
  }
  ++state.step_count;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = grads[i];
    Tensor& m = state.first_moment[i];
    Tensor& v = state.second_moment[i];
    for (std::size_t j = 0; j < p.data.size(); ++j) {
      m.data[j] = state.beta1 * m.data[j] + (1.0 - state.beta1) * g.data[j];
      v.data[j] = state.beta2 * v.data[j] + (1.0 - state.beta2) * g.data[j] * g.data[j];
      const double mhat = m.data[j] / bc1;
      const double vhat = v.data[j] / bc2;
      p.data[j] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

}  // namespace forge
