#pragma once

#include <vector>

#include "rfk/projection.hpp"
#include "rfk/scene.hpp"

namespace rfk {

enum class HeightMode { fixed, adaptive };
enum class AzimuthMode { none, ae, aue };

constexpr double kDefaultAzimuthSigmaRad = 0.3 * 3.14159265358979323846 / 180.0;

struct AhParams {
  double h_min = 1.0;
  double alpha = 6.0;
  double beta = 0.5;
  DatasetStats stats;
};

struct HeightParams {
  HeightMode mode = HeightMode::adaptive;
  double fixed_height = 3.0;  // meters, HeightMode::fixed only
  AhParams ah;
};

struct AzimuthParams {
  AzimuthMode mode = AzimuthMode::none;
  int half_width = 3;                     // pixels on each side
  double sigma = kDefaultAzimuthSigmaRad; // radians, sensor angle accuracy
};

void validate(const HeightParams& params);
void validate(const AzimuthParams& params);

struct ColumnWeight {
  int offset = 0;          // pixels relative to the projected column
  double rcs_weight = 1.0; // applied to the rcs channel only
};

struct ExtendedDetection {
  ProjectedPoint base;
  double est_height = 0.0;   // meters
  double pixel_height = 0.0; // pixels, unrounded
  std::vector<ColumnWeight> column_weights;
};

// Returns the constant, independent of the point.
double estimate_height_fh(double fixed_height);

// max(h_min, min(alpha - d/mu_d, beta + r/mu_r)).
double estimate_height_ah(double d, double rcs, const AhParams& params);

double estimate_height(double d, double rcs, const HeightParams& params);

// Per-column rcs weights around u_center. none: a single unit column.
// ae: 2*half_width + 1 unit columns. aue: exp(-dtheta^2 / (2 sigma^2)) with
// dtheta the exact viewing-angle offset of each column; the center column
// weight is exactly 1.
std::vector<ColumnWeight> azimuth_weights(const AzimuthParams& params,
                                          const CameraCalibration& cal, double u_center);

ExtendedDetection extend(const ProjectedPoint& projected, const HeightParams& height,
                         const AzimuthParams& azimuth, const CameraCalibration& cal,
                         const RadarPoint& raw);

}  // namespace rfk
