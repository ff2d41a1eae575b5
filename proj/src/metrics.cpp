#include "prunefield/metrics.hpp"

#include "prunefield/errors.hpp"
#include "prunefield/report.hpp"

#include <cmath>
#include <stdexcept>

namespace prunefield {

double Psnr::db() const {
  if (infinite_) throw std::logic_error("Psnr::db: value is infinite");
  return db_;
}

std::string Psnr::to_string() const { return infinite_ ? "inf" : format_double(db_); }

double mse(const RgbImage& reference, const RgbImage& candidate) {
  if (reference.width != candidate.width || reference.height != candidate.height ||
      reference.data.size() != candidate.data.size()) {
    throw ShapeError("mse: images differ in size");
  }
  if (reference.data.empty()) throw ShapeError("mse: empty images");
  double sum = 0.0;
  for (std::size_t i = 0; i < reference.data.size(); ++i) {
    const double d = reference.data[i] - candidate.data[i];
    sum += d * d;
  }
  return sum / static_cast<double>(reference.data.size());
}

Psnr psnr_from_mse(double mse_value, double max_value) {
  if (!(max_value > 0.0)) throw InvalidArgument("psnr: max_value must be positive");
  if (mse_value < 0.0 || std::isnan(mse_value)) throw InvalidArgument("psnr: invalid mse");
  if (mse_value == 0.0) return Psnr::infinite();
  return Psnr::finite(10.0 * std::log10(max_value * max_value / mse_value));
}

Psnr psnr(const RgbImage& reference, const RgbImage& candidate, double max_value) {
  return psnr_from_mse(mse(reference, candidate), max_value);
}

std::size_t param_count(const MlpModel& model) {
  std::size_t n = 0;
  for (const DenseLayer& l : model.layers) {
    n += static_cast<std::size_t>(l.weights.size() + l.biases.size());
  }
  return n;
}

std::size_t arch_param_count(const ArchSpec& a) {
  a.validate();
  const std::size_t enc = a.encoded_dim();
  const auto& w = a.widths;
  std::size_t n = enc * w[0] + w[0];
  for (std::size_t k = 1; k < a.depth; ++k) {
    const std::size_t fan_in = w[k - 1] + (k == a.skip_at ? enc : 0);
    n += fan_in * w[k] + w[k];
  }
  const std::size_t top = w[a.depth - 1];
  if (!a.view_branch) return n + top * a.output_dim + a.output_dim;
  const std::size_t feature = w[a.depth];
  const std::size_t view = w[a.depth + 1];
  n += top + 1;                                        // density
  n += top * feature + feature;                        // feature
  n += (feature + a.view_encoded_dim()) * view + view;  // view
  n += view * a.output_dim + a.output_dim;             // rgb
  return n;
}

std::size_t checkpoint_header_bytes(const ArchSpec& arch) {
  // magic, nine fixed u32 fields, then the width and frozen lists
  return 8 + 4 * (9 + arch.widths.size() + arch.frozen.size());
}

std::size_t model_size_bytes(const MlpModel& model) {
  return checkpoint_header_bytes(model.arch) + 4 * param_count(model);
}

}  // namespace prunefield
