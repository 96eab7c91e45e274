#pragma once

#include <string>

#include "rfk/scene.hpp"

namespace rfk {

// Scene-set JSON: {"frames": [...], "meta": {...}}. Each frame carries an
// image (filesystem path or "data:image/png;base64,..." inline), pinhole
// calibration with a 16-entry row-major radar->camera extrinsic, radar
// points, 2D boxes, and a condition tag. All numbers are 64-bit floats.
SceneSet load_scene_set(const std::string& path, const RadarDomains& domains = RadarDomains{});
SceneSet parse_scene_set(const std::string& text, const std::string& base_dir,
                         const RadarDomains& domains = RadarDomains{});

void write_scene_set(const SceneSet& scenes, const std::string& path);
std::string write_scene_set_to_string(const SceneSet& scenes);

}  // namespace rfk
