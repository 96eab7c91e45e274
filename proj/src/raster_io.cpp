#include "rfk/raster_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "rfk/errors.hpp"
#include "rfk/png_io.hpp"

namespace rfk {

namespace {

constexpr bool kLittleEndian = std::endian::native == std::endian::little;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

void append_f32_plane(std::vector<std::uint8_t>& out, const std::vector<float>& plane) {
  if constexpr (kLittleEndian) {
    const std::size_t offset = out.size();
    out.resize(offset + plane.size() * 4);
    std::memcpy(out.data() + offset, plane.data(), plane.size() * 4);
  } else {
    for (float v : plane) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put_u32(out, bits);
    }
  }
}

void read_f32_plane(const std::uint8_t*& p, std::vector<float>& plane, std::size_t n) {
  plane.resize(n);
  if constexpr (kLittleEndian) {
    std::memcpy(plane.data(), p, n * 4);
    p += n * 4;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t bits = get_u32(p);
      p += 4;
      std::memcpy(&plane[i], &bits, 4);
    }
  }
}

}  // namespace

void serialize_raster_into(const RadarRaster& raster, std::vector<std::uint8_t>& out) {
  out.clear();
  const std::size_t n = RadarRaster::plane_size(raster.width, raster.height);
  out.reserve(16 + n * 17);
  static constexpr char kMagic[4] = {'R', 'R', 'A', 'S'};
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(raster.width));
  put_u32(out, static_cast<std::uint32_t>(raster.height));
  append_f32_plane(out, raster.distance);
  append_f32_plane(out, raster.rcs);
  append_f32_plane(out, raster.vx);
  append_f32_plane(out, raster.vy);
  out.insert(out.end(), raster.occupancy.begin(), raster.occupancy.end());
}

std::vector<std::uint8_t> serialize_raster(const RadarRaster& raster) {
  std::vector<std::uint8_t> out;
  serialize_raster_into(raster, out);
  return out;
}

RadarRaster deserialize_raster(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), "RRAS", 4) != 0) {
    throw ParseError("raster: bad magic");
  }
  const std::uint8_t* p = bytes.data() + 4;
  std::uint32_t version = get_u32(p);
  p += 4;
  if (version != 1) throw ParseError("raster: unsupported version " + std::to_string(version));
  std::uint32_t w = get_u32(p);
  p += 4;
  std::uint32_t h = get_u32(p);
  p += 4;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() != 16 + n * 17) throw ParseError("raster: truncated payload");
  RadarRaster raster;
  raster.width = static_cast<int>(w);
  raster.height = static_cast<int>(h);
  read_f32_plane(p, raster.distance, n);
  read_f32_plane(p, raster.rcs, n);
  read_f32_plane(p, raster.vx, n);
  read_f32_plane(p, raster.vy, n);
  raster.occupancy.assign(p, p + n);
  return raster;
}

void write_raster(const RadarRaster& raster, const std::string& path) {
  std::vector<std::uint8_t> bytes = serialize_raster(raster);
  write_binary_file(path, bytes.data(), bytes.size());
}

RadarRaster read_raster(const std::string& path) {
  return deserialize_raster(read_binary_file(path));
}

std::string export_raster_pngs(const RadarRaster& raster, const std::string& path_prefix) {
  struct Channel {
    const char* name;
    const std::vector<float>* plane;
  };
  const Channel channels[] = {{"d", &raster.distance},
                              {"r", &raster.rcs},
                              {"vx", &raster.vx},
                              {"vy", &raster.vy}};
  nlohmann::ordered_json sidecar;
  sidecar["width"] = raster.width;
  sidecar["height"] = raster.height;
  for (const Channel& ch : channels) {
    float lo = 0.0f;
    float hi = 0.0f;
    if (!ch.plane->empty()) {
      auto [mn, mx] = std::minmax_element(ch.plane->begin(), ch.plane->end());
      lo = *mn;
      hi = *mx;
    }
    const double span = (hi > lo) ? static_cast<double>(hi) - lo : 1.0;
    std::vector<std::uint16_t> samples(ch.plane->size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double unit = (static_cast<double>((*ch.plane)[i]) - lo) / span;
      samples[i] = static_cast<std::uint16_t>(std::lround(unit * 65535.0));
    }
    std::vector<std::uint8_t> png = encode_png_gray16(raster.width, raster.height, samples);
    std::string path = path_prefix + "." + ch.name + ".png";
    write_binary_file(path, png.data(), png.size());
    sidecar["channels"][ch.name] = {{"file", path}, {"min", lo}, {"max", hi}};
  }
  std::string sidecar_path = path_prefix + ".scales.json";
  std::ofstream out(sidecar_path, std::ios::trunc);
  if (!out) throw IoError("cannot create sidecar: " + sidecar_path);
  out << sidecar.dump(2) << "\n";
  return sidecar_path;
}

}  // namespace rfk
