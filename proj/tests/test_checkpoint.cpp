#include "prunefield/checkpoint.hpp"
#include "prunefield/errors.hpp"
#include "prunefield/metrics.hpp"
#include "prunefield/pruning.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

using namespace prunefield;

namespace {

MlpModel as_float(MlpModel m) {
  for (auto& l : m.layers) {
    l.weights = l.weights.cast<float>().cast<double>();
    l.biases = l.biases.cast<float>().cast<double>();
  }
  return m;
}

std::uint32_t u32_at(const std::vector<std::uint8_t>& b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | static_cast<std::uint32_t>(b[off + 1]) << 8 |
         static_cast<std::uint32_t>(b[off + 2]) << 16 | static_cast<std::uint32_t>(b[off + 3]) << 24;
}

}  // namespace

TEST(Checkpoint, LayoutAndLength) {
  RngStream rng(1);
  const MlpModel m = init_model(ArchSpec::proxy(16, 3, 1, 2), rng);
  const auto bytes = encode_checkpoint(m);
  EXPECT_EQ(bytes.size(), model_size_bytes(m));
  EXPECT_EQ(std::memcmp(bytes.data(), "PRNFLD01", 8), 0);
  EXPECT_EQ(u32_at(bytes, 8), 2u);    // input_dim
  EXPECT_EQ(u32_at(bytes, 12), 2u);   // n_freqs
  EXPECT_EQ(u32_at(bytes, 16), 3u);   // depth
  EXPECT_EQ(u32_at(bytes, 20), 3u);   // n_widths
  EXPECT_EQ(u32_at(bytes, 24), 16u);
  // First payload value is the first weight of layer 0 as f32.
  float first;
  std::memcpy(&first, bytes.data() + checkpoint_header_bytes(m.arch), 4);
  EXPECT_EQ(first, static_cast<float>(m.layers[0].weights(0, 0)));
}

TEST(Checkpoint, ByteAndValueRoundTrip) {
  RngStream rng(2);
  for (const ArchSpec& a : {ArchSpec::proxy(32, 4, 2, 3), ArchSpec::nerf_replica(64), ArchSpec::proxy(256)}) {
    const MlpModel m = as_float(init_model(a, rng));
    const auto bytes = encode_checkpoint(m);
    const MlpModel back = decode_checkpoint(bytes);
    EXPECT_EQ(back.arch, m.arch);
    for (std::size_t k = 0; k < m.layers.size(); ++k) {
      EXPECT_EQ(back.layers[k].weights, m.layers[k].weights);
      EXPECT_EQ(back.layers[k].biases, m.layers[k].biases);
    }
    EXPECT_EQ(encode_checkpoint(back), bytes);
  }
}

TEST(Checkpoint, PrunedModelRoundTrips) {
  RngStream rng(3);
  const MlpModel m = init_model(ArchSpec::proxy(32, 4, 2, 3), rng);
  const MlpModel p = prune_model(m, {Strategy::coreset, 8, 3.0, true, 1}).model;
  const auto bytes = encode_checkpoint(p);
  EXPECT_EQ(bytes.size(), model_size_bytes(p));
  EXPECT_EQ(encode_checkpoint(decode_checkpoint(bytes)), bytes);
}

TEST(Checkpoint, FileRoundTrip) {
  RngStream rng(4);
  const MlpModel m = init_model(ArchSpec::proxy(8, 3, 1, 2), rng);
  const auto dir = std::filesystem::temp_directory_path() / "prunefield_ckpt";
  std::filesystem::create_directories(dir);
  save_checkpoint(m, dir / "m.ckpt");
  EXPECT_EQ(read_file(dir / "m.ckpt"), encode_checkpoint(m));
  EXPECT_EQ(encode_checkpoint(load_checkpoint(dir / "m.ckpt")), encode_checkpoint(m));
  EXPECT_THROW(load_checkpoint(dir / "absent.ckpt"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, CorruptInputs) {
  RngStream rng(5);
  const auto bytes = encode_checkpoint(init_model(ArchSpec::proxy(8, 3, 1, 2), rng));

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad_magic), ParseError);

  const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 3);
  EXPECT_THROW(decode_checkpoint(truncated), ParseError);

  const std::vector<std::uint8_t> header_cut(bytes.begin(), bytes.begin() + 10);
  EXPECT_THROW(decode_checkpoint(header_cut), ParseError);

  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(decode_checkpoint(trailing), ParseError);

  auto bad_arch = bytes;
  bad_arch[16] = 0;  // depth 0
  EXPECT_THROW(decode_checkpoint(bad_arch), ParseError);

  auto nan_payload = bytes;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan_payload.data() + nan_payload.size() - 4, &nan, 4);
  EXPECT_THROW(decode_checkpoint(nan_payload), ParseError);

  EXPECT_THROW(decode_checkpoint({}), ParseError);
}
