#pragma once

#include "prunefield/tensor.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace prunefield {

/// Length of the encoding of a d-vector.
constexpr std::size_t encoded_length(std::size_t d, std::size_t n_freqs, bool include_input) {
  return 2 * n_freqs * d + (include_input ? d : 0);
}

/// Sinusoidal lifting: optionally p itself, then for k in [0, n_freqs) and
/// each component c the pair sin(2^k pi c), cos(2^k pi c).
std::vector<double> positional_encode(std::span<const double> p, std::size_t n_freqs,
                                      bool include_input = true);

/// Row-wise encoding of a batch of points.
Matrix positional_encode(const Matrix& points, std::size_t n_freqs, bool include_input = true);

}  // namespace prunefield
