#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace prunefield {

/// Deterministic xoshiro256** stream seeded through splitmix64.
///
/// All derived draws (bounded integers, unit doubles) are computed here
/// rather than through <random> distributions, so a seed produces the same
/// sequence on every platform and standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

  /// Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Independent stream keyed by (seed, index); does not consume from *this.
  RngStream substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
};

/// m indices in [0, n). Without replacement they are all distinct (partial
/// Fisher-Yates, in draw order); throws InvalidArgument when m > n.
std::vector<std::size_t> rng_uniform_indices(RngStream& rng, std::size_t n, std::size_t m,
                                             bool with_replacement);

}  // namespace prunefield
