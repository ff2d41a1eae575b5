#pragma once

#include <cstddef>
#include <vector>

namespace prunefield {

/// Weight matrix shape of one dense layer, stored out x in.
struct LayerShape {
  std::size_t rows = 0;  // neurons produced
  std::size_t cols = 0;  // fan-in

  bool operator==(const LayerShape&) const = default;
};

/// A layer reading a hidden layer's activations, and where in its (possibly
/// concatenated) input those activations start.
struct Consumer {
  std::size_t layer = 0;
  std::size_t offset = 0;
};

/// Architecture of the coordinate MLP.
///
/// Layer order in MlpModel::layers: trunk layers 0..depth-1, then the heads.
/// Without a view branch there is one head (trunk -> output_dim, sigmoid).
/// With a view branch the heads are density (trunk -> 1), feature
/// (trunk -> widths[depth]), view (feature + encoded direction ->
/// widths[depth + 1]) and rgb (view -> output_dim).
///
/// The trunk layer at index skip_at reads [h(skip_at - 1), encoded input];
/// the hidden activations come first so that column offsets of hidden
/// neurons are the same as in an ordinary layer.
struct ArchSpec {
  std::size_t input_dim = 2;
  std::size_t n_freqs = 10;
  bool include_input = true;
  std::size_t depth = 8;
  /// Neurons per trunk layer; the view-branch geometry appends the feature
  /// and view widths.
  std::vector<std::size_t> widths;
  std::size_t skip_at = 4;
  std::size_t output_dim = 3;
  bool view_branch = false;
  std::size_t view_freqs = 0;
  /// Trunk layers that structured pruning leaves at full width.
  std::vector<std::size_t> frozen;

  bool operator==(const ArchSpec&) const = default;

  /// The trainable 2D coordinate -> RGB network: depth 8, skip at 4,
  /// 10 frequencies with the raw coordinate prepended.
  static ArchSpec proxy(std::size_t width = 256, std::size_t depth = 8, std::size_t skip_at = 4,
                        std::size_t n_freqs = 10);

  /// Accounting-only replica of the original radiance-field MLP: 3D input
  /// (63-dim encoding), 8 trunk layers with the skip into layer 5, density
  /// head, 256-wide feature layer, 27-dim direction encoding, 128-wide view
  /// layer, rgb head. 595,844 parameters at width 256.
  ///
  /// Trunk layers 4 (feeding the skip concatenation) and 7 (feeding the
  /// heads) are frozen at 256 along with the head layers; shrinking the
  /// remaining six trunk layers gives 284,036 params at width 128 and
  /// 177,284 at 64. Shrinking every trunk layer instead would give 158,660
  /// at 128, well short of the 288K target.
  static ArchSpec nerf_replica(std::size_t width = 256);

  std::size_t encoded_dim() const;
  std::size_t view_encoded_dim() const;
  std::size_t layer_count() const;
  bool is_frozen(std::size_t hidden) const;

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;

  std::vector<LayerShape> layer_shapes() const;
  std::vector<Consumer> consumers(std::size_t hidden) const;
};

}  // namespace prunefield
