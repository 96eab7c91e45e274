#include "rfk/scene.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "rfk/errors.hpp"
#include "rfk/png_io.hpp"

namespace rfk {

namespace {
std::string describe(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
}  // namespace

void validate(const RadarPoint& point, const RadarDomains& domains) {
  double d = point.distance();
  if (!std::isfinite(d) || d <= 0.0) {
    throw ValidationError("radar point distance must be finite and positive, got " + describe(d));
  }
  if (!domains.distance.contains(d)) {
    throw ValidationError("radar point distance " + describe(d) + " outside domain (" +
                          describe(domains.distance.lo) + ", " + describe(domains.distance.hi) +
                          ")");
  }
  if (!std::isfinite(point.rcs) || !domains.rcs.contains(point.rcs)) {
    throw ValidationError("radar point rcs " + describe(point.rcs) + " outside domain (" +
                          describe(domains.rcs.lo) + ", " + describe(domains.rcs.hi) + ")");
  }
  for (double v : {point.z, point.vx, point.vy}) {
    if (!std::isfinite(v)) throw ValidationError("radar point has a non-finite field");
  }
}

void validate(const CameraCalibration& cal) {
  if (cal.image_width <= 0 || cal.image_height <= 0) {
    throw ValidationError("calibration: image dimensions must be positive");
  }
  if (!(cal.fx > 0.0) || !(cal.fy > 0.0)) {
    throw ValidationError("calibration: focal lengths must be positive");
  }
  if (!(cal.cx >= 0.0 && cal.cx < cal.image_width)) {
    throw ValidationError("calibration: cx out of image");
  }
  if (!(cal.cy >= 0.0 && cal.cy < cal.image_height)) {
    throw ValidationError("calibration: cy out of image");
  }
  if (cal.extrinsic.rotation_orthonormality_error() > 1e-6) {
    throw ValidationError("calibration: extrinsic rotation block is not orthonormal");
  }
  if (cal.extrinsic.at(3, 0) != 0.0 || cal.extrinsic.at(3, 1) != 0.0 ||
      cal.extrinsic.at(3, 2) != 0.0 || cal.extrinsic.at(3, 3) != 1.0) {
    throw ValidationError("calibration: extrinsic last row must be 0 0 0 1");
  }
}

const char* to_string(ConditionTag tag) {
  switch (tag) {
    case ConditionTag::day:
      return "day";
    case ConditionTag::night:
      return "night";
    case ConditionTag::rain:
      return "rain";
  }
  return "day";
}

std::optional<ConditionTag> tag_from_string(const std::string& name) {
  if (name == "day") return ConditionTag::day;
  if (name == "night") return ConditionTag::night;
  if (name == "rain") return ConditionTag::rain;
  return std::nullopt;
}

void validate_and_clip(Box2D& box, int image_width, int image_height) {
  box.x1 = std::clamp(box.x1, 0.0, static_cast<double>(image_width - 1));
  box.x2 = std::clamp(box.x2, 0.0, static_cast<double>(image_width - 1));
  box.y1 = std::clamp(box.y1, 0.0, static_cast<double>(image_height - 1));
  box.y2 = std::clamp(box.y2, 0.0, static_cast<double>(image_height - 1));
  if (!(box.x1 < box.x2) || !(box.y1 < box.y2)) {
    throw ValidationError("box degenerate after clipping");
  }
  if (box.box3d_height && !(*box.box3d_height > 0.0)) {
    throw ValidationError("box 3D height must be positive");
  }
}

ImageSource ImageSource::from_png_bytes(std::vector<std::uint8_t> png) {
  ImageSource src;
  src.kind_ = Kind::inline_png;
  PngHeader header = peek_png_header(png.data(), png.size());
  src.width_ = header.width;
  src.height_ = header.height;
  src.png_ = std::move(png);
  return src;
}

ImageSource ImageSource::from_path(std::string path, std::string base_dir) {
  ImageSource src;
  src.kind_ = Kind::path;
  std::filesystem::path full = std::filesystem::path(base_dir) / path;
  std::vector<std::uint8_t> head = read_binary_file(full.string());
  PngHeader header = peek_png_header(head.data(), head.size());
  src.width_ = header.width;
  src.height_ = header.height;
  src.path_ = std::move(path);
  // Keep the bytes we already read; decode stays lazy.
  src.png_ = std::move(head);
  return src;
}

ImageSource ImageSource::from_pixels(Image pixels) {
  ImageSource src;
  src.kind_ = Kind::memory;
  src.width_ = pixels.width;
  src.height_ = pixels.height;
  std::call_once(src.cache_->once, [] {});
  src.cache_->image = std::move(pixels);
  return src;
}

const Image& ImageSource::pixels() const {
  std::call_once(cache_->once, [this] { cache_->image = decode_png(png_); });
  return cache_->image;
}

std::vector<std::uint8_t> ImageSource::encoded_png() const {
  if (!png_.empty()) return png_;
  return encode_png(pixels());
}

void validate(const Frame& frame, const RadarDomains& domains) {
  validate(frame.calibration);
  if (frame.image_source.width() != frame.calibration.image_width ||
      frame.image_source.height() != frame.calibration.image_height) {
    throw ValidationError("frame '" + frame.id + "': image dimensions (" +
                          std::to_string(frame.image_source.width()) + "x" +
                          std::to_string(frame.image_source.height()) +
                          ") do not match calibration (" +
                          std::to_string(frame.calibration.image_width) + "x" +
                          std::to_string(frame.calibration.image_height) + ")");
  }
  for (std::size_t i = 0; i < frame.radar_points.size(); ++i) {
    try {
      validate(frame.radar_points[i], domains);
    } catch (const ValidationError& e) {
      throw ValidationError("frame '" + frame.id + "' point " + std::to_string(i) + ": " +
                            e.what());
    }
  }
  for (std::size_t i = 0; i < frame.boxes.size(); ++i) {
    const Box2D& box = frame.boxes[i];
    if (!(box.x1 < box.x2) || !(box.y1 < box.y2)) {
      throw ValidationError("frame '" + frame.id + "' box " + std::to_string(i) +
                            ": degenerate coordinates");
    }
    if (box.x1 < 0 || box.y1 < 0 || box.x2 > frame.calibration.image_width - 1 ||
        box.y2 > frame.calibration.image_height - 1) {
      throw ValidationError("frame '" + frame.id + "' box " + std::to_string(i) +
                            ": outside image bounds");
    }
  }
}

void validate(const SceneSet& scenes) {
  for (const Frame& frame : scenes.frames) validate(frame, scenes.domains);
}

DatasetStats compute_stats(const SceneSet& scenes) {
  double sum_d = 0.0;
  double sum_r = 0.0;
  std::size_t n = 0;
  for (const Frame& frame : scenes.frames) {
    for (const RadarPoint& p : frame.radar_points) {
      sum_d += p.distance();
      sum_r += p.rcs;
      ++n;
    }
  }
  if (n == 0) throw ValidationError("compute_stats: scene set has no radar points");
  return DatasetStats{sum_d / static_cast<double>(n), sum_r / static_cast<double>(n), n};
}

}  // namespace rfk
