#include "rfk/projection.hpp"

#include <cmath>

#include "rfk/errors.hpp"

namespace rfk {

std::optional<ProjectedPoint> project_point(const RadarPoint& point, const CameraCalibration& cal,
                                            double margin) {
  Vec3 cam = cal.extrinsic.apply(Vec3{point.x, point.y, point.z});
  if (!(cam.z > 0.0)) return std::nullopt;
  double u = cal.cx + cal.fx * cam.x / cam.z;
  double v = cal.cy + cal.fy * cam.y / cam.z;
  if (!std::isfinite(u) || !std::isfinite(v)) return std::nullopt;
  if (u < -margin || u > cal.image_width - 1 + margin) return std::nullopt;
  if (v < -margin || v > cal.image_height - 1 + margin) return std::nullopt;
  return ProjectedPoint{u, v, cam.z, 0};
}

std::vector<ProjectedPoint> project_frame(const Frame& frame, double margin) {
  std::vector<ProjectedPoint> out;
  out.reserve(frame.radar_points.size());
  for (std::size_t i = 0; i < frame.radar_points.size(); ++i) {
    if (auto p = project_point(frame.radar_points[i], frame.calibration, margin)) {
      p->source_index = static_cast<int>(i);
      out.push_back(*p);
    }
  }
  return out;
}

double meters_to_pixel_height(double h, double depth, const CameraCalibration& cal) {
  if (!(depth > 0.0)) throw ValidationError("meters_to_pixel_height: depth must be positive");
  if (h < 0.0) throw ValidationError("meters_to_pixel_height: height must be non-negative");
  return cal.fy * h / depth;
}

double pixel_column_angle(double u, const CameraCalibration& cal) {
  return std::atan((u - cal.cx) / cal.fx);
}

}  // namespace rfk
