#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfk/raster.hpp"

namespace rfk {

// RRAS binary layout, little-endian: magic "RRAS", u32 version = 1, u32
// width, u32 height, four f32 planes (d, r, vx, vy) row-major, then the
// occupancy plane as u8.
std::vector<std::uint8_t> serialize_raster(const RadarRaster& raster);
// Clears and fills `out`, keeping its capacity across calls.
void serialize_raster_into(const RadarRaster& raster, std::vector<std::uint8_t>& out);
RadarRaster deserialize_raster(const std::vector<std::uint8_t>& bytes);

void write_raster(const RadarRaster& raster, const std::string& path);
RadarRaster read_raster(const std::string& path);

// Per-channel 16-bit grayscale PNGs (min-max scaled) plus a sidecar JSON
// recording the scaling, for visual inspection. Returns the sidecar path.
std::string export_raster_pngs(const RadarRaster& raster, const std::string& path_prefix);

}  // namespace rfk
