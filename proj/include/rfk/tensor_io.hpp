#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfk/tensor.hpp"

namespace rfk {

// FMAP binary layout, little-endian: magic "FMAP", u32 width, u32 height,
// u32 channels, then f64 data row-major with the channel index innermost.
std::vector<std::uint8_t> serialize_feature_map(const FeatureMap& map);
FeatureMap deserialize_feature_map(const std::vector<std::uint8_t>& bytes);

void write_feature_map(const FeatureMap& map, const std::string& path);
FeatureMap read_feature_map(const std::string& path);

}  // namespace rfk
