#include "prunefield/arch.hpp"

#include "prunefield/encoding.hpp"
#include "prunefield/errors.hpp"

#include <algorithm>
#include <string>

namespace prunefield {

ArchSpec ArchSpec::proxy(std::size_t width, std::size_t depth, std::size_t skip_at,
                         std::size_t n_freqs) {
  ArchSpec a;
  a.input_dim = 2;
  a.n_freqs = n_freqs;
  a.include_input = true;
  a.depth = depth;
  a.widths.assign(depth, width);
  a.skip_at = skip_at;
  a.output_dim = 3;
  a.view_branch = false;
  a.view_freqs = 0;
  return a;
}

ArchSpec ArchSpec::nerf_replica(std::size_t width) {
  ArchSpec a;
  a.input_dim = 3;
  a.n_freqs = 10;
  a.include_input = true;
  a.depth = 8;
  a.skip_at = 5;
  a.output_dim = 3;
  a.view_branch = true;
  a.view_freqs = 4;
  a.frozen = {4, 7};
  a.widths.assign(a.depth, width);
  for (std::size_t k : a.frozen) a.widths[k] = 256;
  a.widths.push_back(256);  // feature
  a.widths.push_back(128);  // view
  return a;
}

std::size_t ArchSpec::encoded_dim() const {
  return encoded_length(input_dim, n_freqs, include_input);
}

std::size_t ArchSpec::view_encoded_dim() const {
  return view_branch ? encoded_length(3, view_freqs, include_input) : 0;
}

std::size_t ArchSpec::layer_count() const { return depth + (view_branch ? 4 : 1); }

bool ArchSpec::is_frozen(std::size_t hidden) const {
  return std::find(frozen.begin(), frozen.end(), hidden) != frozen.end();
}

void ArchSpec::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidArgument("ArchSpec: " + msg); };
  if (input_dim == 0) fail("input_dim must be positive");
  if (output_dim == 0) fail("output_dim must be positive");
  if (depth < 2) fail("depth must be at least 2");
  if (skip_at == 0 || skip_at >= depth) fail("skip_at must lie in (0, depth)");
  const std::size_t expected = depth + (view_branch ? 2 : 0);
  if (widths.size() != expected) {
    fail("expected " + std::to_string(expected) + " widths, got " + std::to_string(widths.size()));
  }
  for (std::size_t w : widths) {
    if (w == 0) fail("widths must be positive");
  }
  for (std::size_t k : frozen) {
    if (k >= depth) fail("frozen layer " + std::to_string(k) + " is not a trunk layer");
  }
}

std::vector<LayerShape> ArchSpec::layer_shapes() const {
  std::vector<LayerShape> shapes;
  shapes.reserve(layer_count());
  const std::size_t enc = encoded_dim();
  for (std::size_t k = 0; k < depth; ++k) {
    std::size_t fan_in = k == 0 ? enc : widths[k - 1];
    if (k == skip_at) fan_in += enc;
    shapes.push_back({widths[k], fan_in});
  }
  const std::size_t trunk_out = widths[depth - 1];
  if (!view_branch) {
    shapes.push_back({output_dim, trunk_out});
  } else {
    const std::size_t feature = widths[depth];
    const std::size_t view = widths[depth + 1];
    shapes.push_back({1, trunk_out});
    shapes.push_back({feature, trunk_out});
    shapes.push_back({view, feature + view_encoded_dim()});
    shapes.push_back({output_dim, view});
  }
  return shapes;
}

std::vector<Consumer> ArchSpec::consumers(std::size_t hidden) const {
  if (hidden >= depth) {
    throw InvalidArgument("consumers: layer " + std::to_string(hidden) + " is not a trunk layer");
  }
  if (hidden + 1 < depth) return {{hidden + 1, 0}};
  if (!view_branch) return {{depth, 0}};
  return {{depth, 0}, {depth + 1, 0}};
}

}  // namespace prunefield
