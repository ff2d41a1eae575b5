#include "prunefield/encoding.hpp"

#include <cmath>
#include <numbers>

namespace prunefield {
namespace {

template <class Out>
void encode_into(const double* p, std::size_t d, std::size_t n_freqs, bool include_input, Out out) {
  std::size_t pos = 0;
  if (include_input) {
    for (std::size_t c = 0; c < d; ++c) out(pos++, p[c]);
  }
  double freq = std::numbers::pi;
  for (std::size_t k = 0; k < n_freqs; ++k, freq *= 2.0) {
    for (std::size_t c = 0; c < d; ++c) {
      const double x = freq * p[c];
      out(pos++, std::sin(x));
      out(pos++, std::cos(x));
    }
  }
}

}  // namespace

std::vector<double> positional_encode(std::span<const double> p, std::size_t n_freqs,
                                      bool include_input) {
  std::vector<double> out(encoded_length(p.size(), n_freqs, include_input));
  encode_into(p.data(), p.size(), n_freqs, include_input,
              [&](std::size_t i, double v) { out[i] = v; });
  return out;
}

Matrix positional_encode(const Matrix& points, std::size_t n_freqs, bool include_input) {
  const auto d = static_cast<std::size_t>(points.cols());
  Matrix out(points.rows(), static_cast<Eigen::Index>(encoded_length(d, n_freqs, include_input)));
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    encode_into(points.row(r).data(), d, n_freqs, include_input,
                [&](std::size_t i, double v) { out(r, static_cast<Eigen::Index>(i)) = v; });
  }
  return out;
}

}  // namespace prunefield
