#pragma once

#include "prunefield/model.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace prunefield {

/// Binary checkpoint layout, all integers u32 little-endian, all values f32
/// little-endian:
///
///   "PRNFLD01"
///   input_dim, n_freqs, depth, n_widths, widths[n_widths], skip_at,
///   output_dim, flags (bit 0 raw input prepended, bit 1 view branch),
///   view_freqs, n_frozen, frozen[n_frozen]
///   per layer in model order: weights (row-major), then biases
///
/// Layer shapes follow from the architecture block, so the file length is
/// exactly header + 4 * param_count.
inline constexpr char kCheckpointMagic[8] = {'P', 'R', 'N', 'F', 'L', 'D', '0', '1'};

std::vector<std::uint8_t> encode_checkpoint(const MlpModel& model);
MlpModel decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_checkpoint(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace prunefield
