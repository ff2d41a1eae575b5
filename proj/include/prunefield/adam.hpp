#pragma once

#include "prunefield/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace prunefield {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Moment accumulators for one parameter tensor.
struct AdamState {
  AdamState() = default;
  AdamState(std::size_t rows, std::size_t cols, AdamConfig cfg = {});

  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
  AdamConfig cfg;
};

/// Bias-corrected Adam update in place; increments state.step.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);
void adam_step(Matrix& params, const Matrix& grads, AdamState& state);

}  // namespace prunefield
