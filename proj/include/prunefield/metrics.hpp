#pragma once

#include "prunefield/arch.hpp"
#include "prunefield/image.hpp"
#include "prunefield/model.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace prunefield {

/// PSNR in dB, or the distinguished infinite value for a zero-error pair.
class Psnr {
 public:
  static Psnr finite(double db) { return Psnr(db, false); }
  static Psnr infinite() { return Psnr(0.0, true); }

  bool is_infinite() const noexcept { return infinite_; }
  /// Throws std::logic_error for the infinite value.
  double db() const;

  std::string to_string() const;

  bool operator==(const Psnr&) const = default;

 private:
  Psnr(double db, bool inf) : db_(db), infinite_(inf) {}
  double db_;
  bool infinite_;
};

/// Mean over every pixel and channel of the squared difference.
double mse(const RgbImage& reference, const RgbImage& candidate);

Psnr psnr_from_mse(double mse_value, double max_value = 1.0);
Psnr psnr(const RgbImage& reference, const RgbImage& candidate, double max_value = 1.0);

/// Weight + bias entries actually held by the model.
std::size_t param_count(const MlpModel& model);

/// Parameter count implied by the architecture alone.
std::size_t arch_param_count(const ArchSpec& arch);

/// Bytes of the checkpoint header for this architecture.
std::size_t checkpoint_header_bytes(const ArchSpec& arch);

/// Checkpoint file size: header + 4 bytes per parameter.
std::size_t model_size_bytes(const MlpModel& model);

}  // namespace prunefield
