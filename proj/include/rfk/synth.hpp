#pragma once

#include <cstdint>

#include "rfk/scene.hpp"

namespace rfk {

// Desk-scale synthetic street scenes: boxy objects standing on the radar
// ground plane, viewed by a forward camera. Object RCS tracks object height
// with a configurable correlation, so adaptive height estimation has signal
// to work with; ground-truth 2D boxes are exact pinhole projections of the
// 3D extents.
struct SynthConfig {
  int frame_count = 50;
  int min_objects = 4;
  int max_objects = 8;
  int min_points_per_object = 1;
  int max_points_per_object = 3;
  double clutter_rate = 1.0;  // expected clutter points per frame (Poisson)

  // Object heights: height_min + (height_max - height_min) * Beta(1, 7),
  // i.e. car-heavy with a thin tall tail, mean ~1.5 m.
  double height_min = 1.0;
  double height_max = 5.0;
  double rcs_height_correlation = 0.8;  // Pearson target in [0, 1]

  int image_width = 640;
  int image_height = 360;
  double focal = 500.0;          // fx = fy, pixels
  double camera_height = 1.5;    // meters above the radar ground plane

  double object_distance_min = 10.0;
  double object_distance_max = 60.0;
  double object_width_min = 1.0;   // lateral extent, meters
  double object_width_max = 2.6;
  double object_depth_min = 0.8;   // along-range extent, meters
  double object_depth_max = 4.0;

  double clutter_distance_min = 5.0;
  double clutter_distance_max = 100.0;
};

void validate(const SynthConfig& config);

// Deterministic for a given (seed, config): identical output bit for bit.
// meta carries per-object (height, rcs) pairs for correlation checks.
SceneSet generate_synthetic(std::uint64_t seed, const SynthConfig& config = SynthConfig{});

// The extrinsic used by the generator: camera camera_height meters above
// the radar origin, X right, Y down, Z forward along the radar x axis.
Mat4 forward_camera_extrinsic(double camera_height);

}  // namespace rfk
