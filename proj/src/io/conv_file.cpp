#include <bit>
#include <cstring>
#include <string>

#include "patchwarp/error.hpp"
#include "patchwarp/io.hpp"

namespace patchwarp::io {

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(Bytes& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }

  float f32() { return std::bit_cast<float>(u32()); }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(ErrorCode::Parse, "conv params file truncated");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Bytes encode_conv_params(const ConvParams& params) {
  params.validate();
  Bytes out(kConvMagic.begin(), kConvMagic.end());
  put_u32(out, kConvVersion);
  put_u32(out, static_cast<std::uint32_t>(params.out_channels));
  put_u32(out, static_cast<std::uint32_t>(params.in_channels));
  put_u32(out, static_cast<std::uint32_t>(params.kernel));
  for (float w : params.weights) put_f32(out, w);
  for (float b : params.bias) put_f32(out, b);
  put_u64(out, fnv1a64(out));
  return out;
}

ConvParams decode_conv_params(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kConvMagic.data(), 4) != 0) {
    throw Error(ErrorCode::Parse, "conv params file has bad magic");
  }
  Reader r(bytes.subspan(4));
  const std::uint32_t version = r.u32();
  if (version != kConvVersion) throw Error(ErrorCode::Parse, "unsupported conv params version " + std::to_string(version));
  ConvParams p;
  const std::uint32_t out = r.u32();
  const std::uint32_t in = r.u32();
  const std::uint32_t k = r.u32();
  if (out == 0 || in == 0 || out > 4096 || in > 4096 || (k != 1 && k != 3 && k != 5)) {
    throw Error(ErrorCode::Parse, "conv params header has invalid dimensions");
  }
  p.out_channels = static_cast<int>(out);
  p.in_channels = static_cast<int>(in);
  p.kernel = static_cast<int>(k);
  const std::size_t n_weights = static_cast<std::size_t>(out) * in * k * k;
  if (r.remaining() != 4 * (n_weights + out) + 8) {
    throw Error(ErrorCode::Parse, "conv params payload size does not match header");
  }
  p.weights.resize(n_weights);
  for (float& w : p.weights) w = r.f32();
  p.bias.resize(out);
  for (float& b : p.bias) b = r.f32();
  const std::size_t checked = 4 + r.pos();
  const std::uint64_t stored = r.u64();
  if (stored != fnv1a64(bytes.first(checked))) throw Error(ErrorCode::Parse, "conv params checksum mismatch");
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  return p;
}

ConvParams read_conv_params(const std::filesystem::path& path) {
  const Bytes raw = read_file(path);
  try {
    return decode_conv_params(raw);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void write_conv_params(const std::filesystem::path& path, const ConvParams& params) {
  write_file_atomic(path, encode_conv_params(params));
}

}  // namespace patchwarp::io
