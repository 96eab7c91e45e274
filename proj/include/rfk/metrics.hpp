#pragma once

#include <string>
#include <vector>

#include "rfk/extension.hpp"
#include "rfk/raster.hpp"
#include "rfk/scene.hpp"

namespace rfk {

struct FrameMse {
  std::string frame_id;
  std::size_t n_total = 0;   // pixels carrying radar information
  std::size_t n_inside = 0;  // subset inside any ground-truth box
  double mse = 0.0;          // ((n_total - n_inside) / n_total)^2
  bool empty = false;        // no occupied pixels; mse reported as 0
};

struct FrameHeightError {
  std::string frame_id;
  std::vector<double> per_point;  // meters, one per detection
  double mean = 0.0;
};

struct DistributionSummary {
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  std::size_t count = 0;
};

// Counts occupied raster pixels and how many of them sit inside any box
// (boundary-inclusive on integer pixel coordinates).
FrameMse projection_mse(const RadarRaster& raster, const std::vector<Box2D>& boxes,
                        const std::string& frame_id = {});

// Per-detection height error: inside a box, |box 3D height - estimate|;
// outside every box, the estimate itself. When the base pixel lies in
// several boxes the one whose ground-plane center (bottom-center pixel
// back-projected onto the radar ground plane) is nearest to the radar point
// is used. Throws ValidationError when a containing box lacks a 3D height.
FrameHeightError height_error(const Frame& frame,
                              const std::vector<ExtendedDetection>& detections);

// Mean plus linear-interpolation quartiles (inclusive method).
DistributionSummary summarize(std::vector<double> values);

}  // namespace rfk
