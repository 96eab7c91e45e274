#include "rfk/tensor_io.hpp"

#include <cstring>

#include "rfk/errors.hpp"
#include "rfk/png_io.hpp"

namespace rfk {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> serialize_feature_map(const FeatureMap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + map.size() * 8);
  static constexpr char kMagic[4] = {'F', 'M', 'A', 'P'};
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(map.width()));
  put_u32(out, static_cast<std::uint32_t>(map.height()));
  put_u32(out, static_cast<std::uint32_t>(map.channels()));
  for (double v : map.data()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
  }
  return out;
}

FeatureMap deserialize_feature_map(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "FMAP", 4) != 0) {
    throw ParseError("feature map: bad magic");
  }
  const std::uint8_t* p = bytes.data() + 4;
  int w = static_cast<int>(get_u32(p));
  int h = static_cast<int>(get_u32(p + 4));
  int c = static_cast<int>(get_u32(p + 8));
  p += 12;
  if (w < 1 || h < 1 || c < 1) throw ParseError("feature map: bad dimensions");
  const std::size_t n = static_cast<std::size_t>(w) * h * c;
  if (bytes.size() != 16 + n * 8) throw ParseError("feature map: truncated payload");
  std::vector<double> data(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int j = 0; j < 8; ++j) bits |= std::uint64_t(p[i * 8 + j]) << (8 * j);
    std::memcpy(&data[i], &bits, 8);
  }
  // The FeatureMap constructor rejects non-finite payloads.
  return FeatureMap(w, h, c, std::move(data));
}

void write_feature_map(const FeatureMap& map, const std::string& path) {
  std::vector<std::uint8_t> bytes = serialize_feature_map(map);
  write_binary_file(path, bytes.data(), bytes.size());
}

FeatureMap read_feature_map(const std::string& path) {
  return deserialize_feature_map(read_binary_file(path));
}

}  // namespace rfk
