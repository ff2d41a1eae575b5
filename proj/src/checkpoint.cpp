#include "prunefield/checkpoint.hpp"

#include "prunefield/errors.hpp"
#include "prunefield/metrics.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace prunefield {
namespace {

constexpr std::uint32_t kFlagRawInput = 1u << 0;
constexpr std::uint32_t kFlagViewBranch = 1u << 1;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u32(std::size_t value) {
    if (value > 0xFFFFFFFFu) throw InvalidArgument("checkpoint: value exceeds u32");
    put(static_cast<std::uint32_t>(value));
  }
  void f32(double value) { put(std::bit_cast<std::uint32_t>(static_cast<float>(value))); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint32_t u32(const char* field) {
    if (remaining() < 4) throw ParseError(std::string("checkpoint: truncated at ") + field, pos_);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f32() { return static_cast<double>(std::bit_cast<float>(u32("payload"))); }

  void magic() {
    if (bytes_.size() < 8 || std::memcmp(bytes_.data(), kCheckpointMagic, 8) != 0) {
      throw ParseError("checkpoint: bad magic", 0);
    }
    pos_ = 8;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const MlpModel& model) {
  const ArchSpec& a = model.arch;
  Writer w;
  w.bytes(kCheckpointMagic, 8);
  w.u32(a.input_dim);
  w.u32(a.n_freqs);
  w.u32(a.depth);
  w.u32(a.widths.size());
  for (std::size_t width : a.widths) w.u32(width);
  w.u32(a.skip_at);
  w.u32(a.output_dim);
  w.u32((a.include_input ? kFlagRawInput : 0) | (a.view_branch ? kFlagViewBranch : 0));
  w.u32(a.view_freqs);
  w.u32(a.frozen.size());
  for (std::size_t k : a.frozen) w.u32(k);
  if (!model.layers.empty()) check_model(model);
  for (const DenseLayer& l : model.layers) {
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) w.f32(l.weights.data()[i]);
    for (Eigen::Index i = 0; i < l.biases.size(); ++i) w.f32(l.biases[i]);
  }
  return w.take();
}

MlpModel decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.magic();
  MlpModel model;
  ArchSpec& a = model.arch;
  a.input_dim = r.u32("input_dim");
  a.n_freqs = r.u32("n_freqs");
  a.depth = r.u32("depth");
  const std::size_t list_at = r.pos();
  const std::uint32_t n_widths = r.u32("n_widths");
  if (n_widths > r.remaining() / 4) throw ParseError("checkpoint: width list overruns file", list_at);
  a.widths.resize(n_widths);
  for (auto& width : a.widths) width = r.u32("widths");
  a.skip_at = r.u32("skip_at");
  a.output_dim = r.u32("output_dim");
  const std::size_t flags_at = r.pos();
  const std::uint32_t flags = r.u32("flags");
  if (flags & ~(kFlagRawInput | kFlagViewBranch)) throw ParseError("checkpoint: unknown flags", flags_at);
  a.include_input = flags & kFlagRawInput;
  a.view_branch = flags & kFlagViewBranch;
  a.view_freqs = r.u32("view_freqs");
  const std::size_t frozen_at = r.pos();
  const std::uint32_t n_frozen = r.u32("n_frozen");
  if (n_frozen > r.remaining() / 4) throw ParseError("checkpoint: frozen list overruns file", frozen_at);
  a.frozen.resize(n_frozen);
  for (auto& k : a.frozen) k = r.u32("frozen");

  const std::size_t header_end = r.pos();
  if (a.depth == 0 && a.widths.empty()) {
    if (r.remaining() != 0) throw ParseError("checkpoint: payload after empty model", header_end);
    return model;
  }
  try {
    a.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), header_end);
  }
  const std::size_t expected = arch_param_count(a) * 4;
  if (r.remaining() != expected) {
    throw ParseError("checkpoint: payload is " + std::to_string(r.remaining()) +
                         " bytes, architecture needs " + std::to_string(expected),
                     header_end);
  }
  for (const LayerShape& s : a.layer_shapes()) {
    DenseLayer l;
    l.weights.resize(static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(s.cols));
    l.biases.resize(static_cast<Eigen::Index>(s.rows));
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) l.weights.data()[i] = r.f32();
    for (Eigen::Index i = 0; i < l.biases.size(); ++i) l.biases[i] = r.f32();
    if (!all_finite(l.weights) || !l.biases.allFinite()) {
      throw ParseError("checkpoint: non-finite value in layer " + std::to_string(model.layers.size()),
                       header_end);
    }
    model.layers.push_back(std::move(l));
  }
  return model;
}

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path) {
  write_file(path, encode_checkpoint(model));
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace prunefield
