#pragma once

#include <optional>
#include <vector>

#include "rfk/scene.hpp"

namespace rfk {

struct ProjectedPoint {
  double u = 0.0;      // pixels, sub-pixel
  double v = 0.0;      // pixels, sub-pixel
  double depth = 0.0;  // camera-frame Z, meters
  int source_index = 0;
};

// Applies the extrinsic, then u = cx + fx*X/Z, v = cy + fy*Y/Z. Returns
// nullopt (culled) when Z <= 0 or (u, v) falls outside the image grown by
// `margin` pixels on each side.
std::optional<ProjectedPoint> project_point(const RadarPoint& point, const CameraCalibration& cal,
                                            double margin = 0.0);

// Projects every radar point of the frame; culled points are dropped and
// source_index keeps the original point index.
std::vector<ProjectedPoint> project_frame(const Frame& frame, double margin = 0.0);

// fy * h / depth, unclipped. Throws ValidationError for depth <= 0 or h < 0.
double meters_to_pixel_height(double h, double depth, const CameraCalibration& cal);

// Azimuth of the viewing ray through column u: atan((u - cx) / fx).
double pixel_column_angle(double u, const CameraCalibration& cal);

}  // namespace rfk
