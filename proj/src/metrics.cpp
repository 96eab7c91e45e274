#include "rfk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rfk/errors.hpp"

namespace rfk {

namespace {

// Intersects the viewing ray through pixel (u, v) with the radar-frame
// ground plane z = 0. Returns nullopt when the ray is parallel to or points
// away from the plane.
std::optional<Vec3> backproject_to_ground(double u, double v, const CameraCalibration& cal) {
  Mat4 cam_to_radar = cal.extrinsic.inverse_rigid();
  Vec3 dir_cam{(u - cal.cx) / cal.fx, (v - cal.cy) / cal.fy, 1.0};
  Vec3 origin{cam_to_radar.at(0, 3), cam_to_radar.at(1, 3), cam_to_radar.at(2, 3)};
  Vec3 dir{
      cam_to_radar.at(0, 0) * dir_cam.x + cam_to_radar.at(0, 1) * dir_cam.y +
          cam_to_radar.at(0, 2) * dir_cam.z,
      cam_to_radar.at(1, 0) * dir_cam.x + cam_to_radar.at(1, 1) * dir_cam.y +
          cam_to_radar.at(1, 2) * dir_cam.z,
      cam_to_radar.at(2, 0) * dir_cam.x + cam_to_radar.at(2, 1) * dir_cam.y +
          cam_to_radar.at(2, 2) * dir_cam.z,
  };
  if (std::abs(dir.z) < 1e-12) return std::nullopt;
  double s = -origin.z / dir.z;
  if (s <= 0.0) return std::nullopt;
  return Vec3{origin.x + s * dir.x, origin.y + s * dir.y, 0.0};
}

}  // namespace

FrameMse projection_mse(const RadarRaster& raster, const std::vector<Box2D>& boxes,
                        const std::string& frame_id) {
  FrameMse out;
  out.frame_id = frame_id;
  for (int y = 0; y < raster.height; ++y) {
    for (int x = 0; x < raster.width; ++x) {
      if (!raster.occupancy[raster.index(x, y)]) continue;
      ++out.n_total;
      for (const Box2D& box : boxes) {
        if (box.contains(x, y)) {
          ++out.n_inside;
          break;
        }
      }
    }
  }
  if (out.n_total == 0) {
    out.empty = true;
    out.mse = 0.0;
  } else {
    double miss = static_cast<double>(out.n_total - out.n_inside);
    double total = static_cast<double>(out.n_total);
    out.mse = (miss * miss) / (total * total);
  }
  return out;
}

FrameHeightError height_error(const Frame& frame,
                              const std::vector<ExtendedDetection>& detections) {
  FrameHeightError out;
  out.frame_id = frame.id;
  out.per_point.reserve(detections.size());

  std::vector<std::optional<Vec3>> ground_centers;
  ground_centers.reserve(frame.boxes.size());
  for (const Box2D& box : frame.boxes) {
    ground_centers.push_back(
        backproject_to_ground(0.5 * (box.x1 + box.x2), box.y2, frame.calibration));
  }

  for (const ExtendedDetection& det : detections) {
    const double px = static_cast<double>(std::lround(det.base.u));
    const double py = static_cast<double>(std::lround(det.base.v));
    const RadarPoint& point = frame.radar_points[static_cast<std::size_t>(det.base.source_index)];

    const Box2D* chosen = nullptr;
    double best_dist = 0.0;
    for (std::size_t b = 0; b < frame.boxes.size(); ++b) {
      const Box2D& box = frame.boxes[b];
      if (!box.contains(px, py)) continue;
      double dist;
      if (const auto& ground = ground_centers[b]) {
        double dx = ground->x - point.x;
        double dy = ground->y - point.y;
        dist = dx * dx + dy * dy;
      } else {
        // Degenerate geometry: fall back to pixel distance from the box center.
        double dx = 0.5 * (box.x1 + box.x2) - px;
        double dy = 0.5 * (box.y1 + box.y2) - py;
        dist = dx * dx + dy * dy;
      }
      if (!chosen || dist < best_dist) {
        chosen = &box;
        best_dist = dist;
      }
    }

    double dh;
    if (chosen) {
      if (!chosen->box3d_height) {
        throw ValidationError("height_error: frame '" + frame.id +
                              "' has a detection inside a box without a 3D height");
      }
      dh = std::abs(*chosen->box3d_height - det.est_height);
    } else {
      dh = det.est_height;
    }
    out.per_point.push_back(dh);
  }

  if (!out.per_point.empty()) {
    double acc = 0.0;
    for (double v : out.per_point) acc += v;
    out.mean = acc / static_cast<double>(out.per_point.size());
  }
  return out;
}

DistributionSummary summarize(std::vector<double> values) {
  if (values.empty()) throw ValidationError("summarize: empty input");
  DistributionSummary out;
  out.count = values.size();
  double acc = 0.0;
  for (double v : values) acc += v;
  out.mean = acc / static_cast<double>(values.size());

  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    double h = p * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, values.size() - 1);
    double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  out.q1 = quantile(0.25);
  out.median = quantile(0.5);
  out.q3 = quantile(0.75);
  return out;
}

}  // namespace rfk
