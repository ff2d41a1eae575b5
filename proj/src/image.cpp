#include "prunefield/image.hpp"

#include "prunefield/checkpoint.hpp"
#include "prunefield/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace prunefield {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t read_uint(const char* field) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > (1u << 24)) throw ParseError(std::string("PPM: ") + field + " too large", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("PPM: expected ") + field, start);
    return value;
  }

  void expect_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ParseError("PPM: expected whitespace after maxval", pos_);
    }
    ++pos_;
  }

  void expect_magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '6') {
      throw ParseError("PPM: missing P6 magic", 0);
    }
    pos_ = 2;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Matrix pixel_grid(std::size_t width, std::size_t height) {
  Matrix coords(static_cast<Eigen::Index>(width * height), 2);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const auto i = static_cast<Eigen::Index>(r * width + c);
      coords(i, 0) = pixel_center(c, width);
      coords(i, 1) = pixel_center(r, height);
    }
  }
  return coords;
}

RgbImage parse_ppm(std::span<const std::uint8_t> bytes) {
  HeaderReader reader(bytes);
  reader.expect_magic();
  const std::size_t dims_at = reader.pos();
  const std::size_t width = reader.read_uint("width");
  const std::size_t height = reader.read_uint("height");
  if (width == 0 || height == 0) throw ParseError("PPM: zero image dimension", dims_at);
  const std::size_t maxval_at = reader.pos();
  const std::size_t maxval = reader.read_uint("maxval");
  if (maxval != 255) {
    throw ParseError("PPM: only 8-bit images (maxval 255) are supported, got " +
                         std::to_string(maxval),
                     maxval_at);
  }
  reader.expect_single_space();
  const std::size_t offset = reader.pos();
  const std::size_t need = width * height * 3;
  if (bytes.size() - offset < need) {
    throw ParseError("PPM: truncated payload, need " + std::to_string(need) + " bytes, have " +
                         std::to_string(bytes.size() - offset),
                     bytes.size());
  }
  RgbImage img(width, height);
  for (std::size_t i = 0; i < need; ++i) img.data[i] = bytes[offset + i] / 255.0;
  return img;
}

RgbImage load_ppm(const std::filesystem::path& path) { return parse_ppm(read_file(path)); }

std::vector<std::uint8_t> encode_ppm(const RgbImage& image) {
  const std::string header =
      "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + image.data.size());
  for (double v : image.data) {
    out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  }
  return out;
}

void save_ppm(const RgbImage& image, const std::filesystem::path& path) {
  write_file(path, encode_ppm(image));
}

RgbImage quantize8(const RgbImage& image) {
  RgbImage out = image;
  for (double& v : out.data) v = static_cast<double>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)) / 255.0;
  return out;
}

PixelDataset dataset_from_image(const RgbImage& image) {
  PixelDataset ds;
  ds.width = image.width;
  ds.height = image.height;
  ds.coords = pixel_grid(image.width, image.height);
  ds.rgb.resize(static_cast<Eigen::Index>(image.width * image.height), 3);
  for (std::size_t i = 0; i < image.data.size(); ++i) ds.rgb.data()[i] = image.data[i];
  return ds;
}

PixelDataset load_image_dataset(const std::filesystem::path& path) {
  return dataset_from_image(load_ppm(path));
}

}  // namespace prunefield
