#pragma once

#include "prunefield/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace prunefield {

/// Row-major RGB image, components in [0, 1].
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> data;  // height * width * 3

  RgbImage() = default;
  RgbImage(std::size_t w, std::size_t h, double fill = 0.0)
      : width(w), height(h), data(w * h * 3, fill) {}

  double& at(std::size_t row, std::size_t col, std::size_t ch) {
    return data[(row * width + col) * 3 + ch];
  }
  double at(std::size_t row, std::size_t col, std::size_t ch) const {
    return data[(row * width + col) * 3 + ch];
  }
};

/// Coordinate-to-colour training samples. Sample r is pixel (r / width,
/// r % width); coords hold (x, y) at pixel centres mapped to [-1, 1].
struct PixelDataset {
  std::size_t width = 0;
  std::size_t height = 0;
  Matrix coords;  // N x 2
  Matrix rgb;     // N x 3

  std::size_t size() const { return static_cast<std::size_t>(coords.rows()); }
};

/// Centre of pixel i out of n along one axis, mapped to [-1, 1].
inline double pixel_center(std::size_t i, std::size_t n) {
  return (2.0 * (static_cast<double>(i) + 0.5)) / static_cast<double>(n) - 1.0;
}

/// Pixel-centre coordinates of a width x height grid, row-major.
Matrix pixel_grid(std::size_t width, std::size_t height);

/// Binary P6, maxval 255. Throws ParseError with the failing byte offset.
RgbImage parse_ppm(std::span<const std::uint8_t> bytes);
RgbImage load_ppm(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_ppm(const RgbImage& image);
void save_ppm(const RgbImage& image, const std::filesystem::path& path);

/// Round-trips the image through 8-bit storage.
RgbImage quantize8(const RgbImage& image);

PixelDataset dataset_from_image(const RgbImage& image);
PixelDataset load_image_dataset(const std::filesystem::path& path);

}  // namespace prunefield
