#include "rfk/extension.hpp"

#include <algorithm>
#include <cmath>

#include "rfk/errors.hpp"

namespace rfk {

void validate(const HeightParams& params) {
  if (params.mode == HeightMode::fixed && !(params.fixed_height > 0.0)) {
    throw ValidationError("height params: fixed height must be positive");
  }
  if (!(params.ah.h_min > 0.0)) {
    throw ValidationError("height params: h_min must be positive");
  }
}

void validate(const AzimuthParams& params) {
  if (params.half_width < 0) throw ValidationError("azimuth params: half_width must be >= 0");
  if (!(params.sigma > 0.0)) throw ValidationError("azimuth params: sigma must be positive");
}

double estimate_height_fh(double fixed_height) {
  if (!(fixed_height > 0.0)) throw ValidationError("fixed height must be positive");
  return fixed_height;
}

double estimate_height_ah(double d, double rcs, const AhParams& params) {
  if (params.stats.point_count == 0) {
    throw ValidationError("adaptive height needs dataset statistics over at least one point");
  }
  if (!(d > 0.0)) throw ValidationError("adaptive height: distance must be positive");
  double by_distance = params.alpha - d / params.stats.mean_distance;
  double by_rcs = params.beta + rcs / params.stats.mean_rcs;
  return std::max(params.h_min, std::min(by_distance, by_rcs));
}

double estimate_height(double d, double rcs, const HeightParams& params) {
  if (params.mode == HeightMode::fixed) return estimate_height_fh(params.fixed_height);
  return estimate_height_ah(d, rcs, params.ah);
}

std::vector<ColumnWeight> azimuth_weights(const AzimuthParams& params,
                                          const CameraCalibration& cal, double u_center) {
  validate(params);
  if (params.mode == AzimuthMode::none) return {ColumnWeight{0, 1.0}};

  std::vector<ColumnWeight> out;
  out.reserve(static_cast<std::size_t>(2 * params.half_width + 1));
  double center_angle = pixel_column_angle(u_center, cal);
  for (int offset = -params.half_width; offset <= params.half_width; ++offset) {
    double w = 1.0;
    if (params.mode == AzimuthMode::aue && offset != 0) {
      double dtheta = pixel_column_angle(u_center + offset, cal) - center_angle;
      w = std::exp(-(dtheta * dtheta) / (2.0 * params.sigma * params.sigma));
    }
    out.push_back(ColumnWeight{offset, w});
  }
  return out;
}

ExtendedDetection extend(const ProjectedPoint& projected, const HeightParams& height,
                         const AzimuthParams& azimuth, const CameraCalibration& cal,
                         const RadarPoint& raw) {
  validate(height);
  ExtendedDetection det;
  det.base = projected;
  det.est_height = estimate_height(raw.distance(), raw.rcs, height);
  det.pixel_height = meters_to_pixel_height(det.est_height, projected.depth, cal);
  det.column_weights = azimuth_weights(azimuth, cal, projected.u);
  return det;
}

}  // namespace rfk
