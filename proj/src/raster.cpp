#include "rfk/raster.hpp"

#include <algorithm>
#include <cmath>

#include "rfk/errors.hpp"

namespace rfk {

std::size_t RadarRaster::occupied_count() const {
  std::size_t n = 0;
  for (std::uint8_t o : occupancy) n += o;
  return n;
}

void RasterScratch::reset_for(int width, int height) {
  if (raster_.width != width || raster_.height != height) {
    raster_ = RadarRaster(width, height);
    best_distance_.assign(RadarRaster::plane_size(width, height), 0.0);
    best_source_.assign(RadarRaster::plane_size(width, height), -1);
    touched_.clear();
    return;
  }
  for (std::uint32_t i : touched_) {
    raster_.occupancy[i] = 0;
    raster_.distance[i] = 0.0f;
    raster_.rcs[i] = 0.0f;
    raster_.vx[i] = 0.0f;
    raster_.vy[i] = 0.0f;
    best_distance_[i] = 0.0;
    best_source_[i] = -1;
  }
  touched_.clear();
}

const RadarRaster& RasterScratch::rasterize(const Frame& frame,
                                            const std::vector<ExtendedDetection>& detections) {
  const int w = frame.calibration.image_width;
  const int h = frame.calibration.image_height;
  reset_for(w, h);

  for (const ExtendedDetection& det : detections) {
    const RadarPoint& point = frame.radar_points[static_cast<std::size_t>(det.base.source_index)];
    const double d = point.distance();
    const auto df = static_cast<float>(d);
    const auto vxf = static_cast<float>(point.vx);
    const auto vyf = static_cast<float>(point.vy);

    const long base_col = std::lround(det.base.u);
    const long base_row = std::lround(det.base.v);
    const long extent = std::lround(det.pixel_height);
    long row_top = base_row - extent;
    long row_bottom = base_row;
    if (row_bottom < 0 || row_top > h - 1) continue;
    row_top = std::max(row_top, 0L);
    row_bottom = std::min(row_bottom, static_cast<long>(h - 1));

    for (const ColumnWeight& col : det.column_weights) {
      const long x = base_col + col.offset;
      if (x < 0 || x >= w) continue;
      const auto rcsf = static_cast<float>(point.rcs * col.rcs_weight);
      for (long y = row_top; y <= row_bottom; ++y) {
        const std::size_t i = raster_.index(static_cast<int>(x), static_cast<int>(y));
        if (raster_.occupancy[i]) {
          if (best_distance_[i] < d) continue;
          if (best_distance_[i] == d && best_source_[i] <= det.base.source_index) continue;
        } else {
          raster_.occupancy[i] = 1;
          touched_.push_back(static_cast<std::uint32_t>(i));
        }
        best_distance_[i] = d;
        best_source_[i] = det.base.source_index;
        raster_.distance[i] = df;
        raster_.rcs[i] = rcsf;
        raster_.vx[i] = vxf;
        raster_.vy[i] = vyf;
      }
    }
  }
  return raster_;
}

RadarRaster rasterize(const Frame& frame, const std::vector<ExtendedDetection>& detections) {
  RasterScratch scratch;
  scratch.rasterize(frame, detections);
  return scratch.take();
}

FeatureMap normalize_image(const FeatureMap& image) {
  for (double v : image.data()) {
    if (!(v >= 0.0 && v <= 255.0)) {
      throw ValidationError("normalize_image: values must lie in [0, 255]");
    }
  }
  FeatureMap out(image.width(), image.height(), image.channels());
  const auto& src = image.data();
  auto& dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] - 127.5;
  return out;
}

FeatureMap image_to_feature_map(const Image& image) {
  FeatureMap out(image.width, image.height, 3);
  auto& dst = out.data();
  for (std::size_t i = 0; i < image.rgb.size(); ++i) dst[i] = static_cast<double>(image.rgb[i]);
  return out;
}

FeatureMap normalize_image(const Image& image) { return normalize_image(image_to_feature_map(image)); }

Image resize_image(const Image& image, int target_width, int target_height) {
  if (target_width <= 0 || target_height <= 0) {
    throw ValidationError("resize_image: target dimensions must be positive");
  }
  if (target_width == image.width && target_height == image.height) return image;
  Image out;
  out.width = target_width;
  out.height = target_height;
  out.rgb.resize(static_cast<std::size_t>(target_width) * target_height * 3);
  const double sx = static_cast<double>(image.width) / target_width;
  const double sy = static_cast<double>(image.height) / target_height;
  for (int y = 0; y < target_height; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double wy = fy - y0;
    int y1 = std::min(y0 + 1, image.height - 1);
    y0 = std::clamp(y0, 0, image.height - 1);
    for (int x = 0; x < target_width; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double wx = fx - x0;
      int x1 = std::min(x0 + 1, image.width - 1);
      x0 = std::clamp(x0, 0, image.width - 1);
      for (int c = 0; c < 3; ++c) {
        double v00 = image.rgb[image.index(x0, y0) + c];
        double v10 = image.rgb[image.index(x1, y0) + c];
        double v01 = image.rgb[image.index(x0, y1) + c];
        double v11 = image.rgb[image.index(x1, y1) + c];
        double v = (1.0 - wy) * ((1.0 - wx) * v00 + wx * v10) +
                   wy * ((1.0 - wx) * v01 + wx * v11);
        out.rgb[out.index(x, y) + c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
  return out;
}

Frame resize_frame(const Frame& frame, int target_width, int target_height) {
  if (target_width <= 0 || target_height <= 0) {
    throw ValidationError("resize_frame: target dimensions must be positive");
  }
  if (target_width == frame.calibration.image_width &&
      target_height == frame.calibration.image_height) {
    return frame;
  }
  const double sx = static_cast<double>(target_width) / frame.calibration.image_width;
  const double sy = static_cast<double>(target_height) / frame.calibration.image_height;

  Frame out = frame;
  out.image_source = ImageSource::from_pixels(resize_image(frame.image(), target_width, target_height));
  out.calibration.fx *= sx;
  out.calibration.cx *= sx;
  out.calibration.fy *= sy;
  out.calibration.cy *= sy;
  out.calibration.image_width = target_width;
  out.calibration.image_height = target_height;
  std::vector<Box2D> boxes;
  boxes.reserve(out.boxes.size());
  for (Box2D box : out.boxes) {
    box.x1 = std::clamp(box.x1 * sx, 0.0, static_cast<double>(target_width - 1));
    box.x2 = std::clamp(box.x2 * sx, 0.0, static_cast<double>(target_width - 1));
    box.y1 = std::clamp(box.y1 * sy, 0.0, static_cast<double>(target_height - 1));
    box.y2 = std::clamp(box.y2 * sy, 0.0, static_cast<double>(target_height - 1));
    // Boxes that collapse to a line under the new grid are dropped.
    if (box.x1 < box.x2 && box.y1 < box.y2) boxes.push_back(box);
  }
  out.boxes = std::move(boxes);
  return out;
}

}  // namespace rfk
