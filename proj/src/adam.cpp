#include "prunefield/adam.hpp"

#include "prunefield/errors.hpp"

#include <cmath>
#include <string>

namespace prunefield {

AdamState::AdamState(std::size_t r, std::size_t c, AdamConfig config)
    : rows(r), cols(c), m(r * c, 0.0), v(r * c, 0.0), cfg(config) {}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      state.v.size() != state.m.size()) {
    throw ShapeError("adam_step: params " + std::to_string(params.size()) + ", grads " +
                     std::to_string(grads.size()) + ", state " + std::to_string(state.m.size()));
  }
  if (state.step < 0) throw InvalidArgument("adam_step: negative step counter");

  const AdamConfig& c = state.cfg;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    params[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

void adam_step(Matrix& params, const Matrix& grads, AdamState& state) {
  if (params.rows() != grads.rows() || params.cols() != grads.cols() ||
      static_cast<std::size_t>(params.rows()) != state.rows ||
      static_cast<std::size_t>(params.cols()) != state.cols) {
    throw ShapeError("adam_step: parameter, gradient and state shapes differ");
  }
  adam_step(std::span<double>(params.data(), static_cast<std::size_t>(params.size())),
            std::span<const double>(grads.data(), static_cast<std::size_t>(grads.size())), state);
}

}  // namespace prunefield
