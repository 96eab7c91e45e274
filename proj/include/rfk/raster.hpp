#pragma once

#include <cstdint>
#include <vector>

#include "rfk/extension.hpp"
#include "rfk/scene.hpp"
#include "rfk/tensor.hpp"

namespace rfk {

// Image-aligned four-channel radar tensor. Unoccupied pixels are exactly
// zero in every channel; the occupancy plane is the authoritative record of
// which pixels carry radar information.
struct RadarRaster {
  int width = 0;
  int height = 0;
  std::vector<float> distance;
  std::vector<float> rcs;
  std::vector<float> vx;
  std::vector<float> vy;
  std::vector<std::uint8_t> occupancy;

  RadarRaster() = default;
  RadarRaster(int w, int h)
      : width(w), height(h), distance(plane_size(w, h), 0.0f), rcs(plane_size(w, h), 0.0f),
        vx(plane_size(w, h), 0.0f), vy(plane_size(w, h), 0.0f),
        occupancy(plane_size(w, h), 0) {}

  static std::size_t plane_size(int w, int h) {
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  std::size_t occupied_count() const;

  bool operator==(const RadarRaster&) const = default;
};

// Fills, for every detection, the vertical span that starts at the rounded
// base pixel and grows upward by the rounded pixel height, across the
// detection's columns, clipped to the image. The rcs channel is scaled by
// the per-column weight; d, vx, vy are copied as-is. On collision the
// contributor with the smaller radar distance wins; ties go to the smaller
// source index, so the result does not depend on input order.
RadarRaster rasterize(const Frame& frame, const std::vector<ExtendedDetection>& detections);

// Reusable rasterization buffers. Rasters are sparse, so between calls only
// the pixels touched by the previous frame are cleared; workers that keep
// one scratch per thread avoid re-mapping megabytes of planes per frame.
class RasterScratch {
 public:
  // The returned reference remains valid until the next call.
  const RadarRaster& rasterize(const Frame& frame,
                               const std::vector<ExtendedDetection>& detections);
  RadarRaster take() { return std::move(raster_); }

 private:
  void reset_for(int width, int height);

  RadarRaster raster_{0, 0};
  std::vector<double> best_distance_;
  std::vector<std::int32_t> best_source_;
  std::vector<std::uint32_t> touched_;
};

// Shifts [0, 255] pixel values to [-127.5, 127.5].
FeatureMap normalize_image(const FeatureMap& image);
FeatureMap normalize_image(const Image& image);

FeatureMap image_to_feature_map(const Image& image);

// Bilinear resample (half-pixel center convention).
Image resize_image(const Image& image, int target_width, int target_height);

// Resampled image plus intrinsics and box coordinates scaled by the same
// factors, so projections stay consistent with the resized pixels.
Frame resize_frame(const Frame& frame, int target_width, int target_height);

}  // namespace rfk
