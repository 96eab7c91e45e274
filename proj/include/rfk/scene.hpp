#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfk/geometry.hpp"
#include "rfk/image.hpp"

namespace rfk {

// Open-interval measurement domain; values on the bounds are out of range.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v > lo && v < hi; }
};

struct RadarDomains {
  Interval distance{0.0, 260.0};
  Interval rcs{-5.0, 53.0};
};

struct RadarPoint {
  double x = 0.0;  // meters, sensor frame, forward
  double y = 0.0;  // meters, sensor frame, lateral (left positive)
  double z = 0.0;  // meters; 0 for radars without elevation
  double vx = 0.0;
  double vy = 0.0;
  double rcs = 0.0;  // dBsm

  double distance() const { return std::sqrt(x * x + y * y); }
  double azimuth() const { return std::atan2(y, x); }

  bool operator==(const RadarPoint&) const = default;
};

void validate(const RadarPoint& point, const RadarDomains& domains);

struct CameraCalibration {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  Mat4 extrinsic;  // radar frame -> camera frame (X right, Y down, Z forward)
  int image_width = 0;
  int image_height = 0;
};

void validate(const CameraCalibration& cal);

enum class ConditionTag { day, night, rain };
const char* to_string(ConditionTag tag);
std::optional<ConditionTag> tag_from_string(const std::string& name);

struct Box2D {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;
  int class_id = 0;
  std::optional<double> box3d_height;  // meters, from the source 3D annotation

  bool contains(double px, double py) const {
    return px >= x1 && px <= x2 && py >= y1 && py <= y2;
  }
};

// Clips to [0, w-1] x [0, h-1] and checks ordering.
void validate_and_clip(Box2D& box, int image_width, int image_height);

// Where a frame's pixels come from. Inline PNG bytes are preserved verbatim
// across a load/write round trip; path images are read relative to the scene
// file; memory images are encoded on write.
class ImageSource {
 public:
  static ImageSource from_png_bytes(std::vector<std::uint8_t> png);
  static ImageSource from_path(std::string path, std::string base_dir);
  static ImageSource from_pixels(Image pixels);

  int width() const { return width_; }
  int height() const { return height_; }

  // Decoded pixels; computed lazily and cached.
  const Image& pixels() const;

  bool is_inline_png() const { return kind_ == Kind::inline_png; }
  bool is_path() const { return kind_ == Kind::path; }
  const std::vector<std::uint8_t>& png_bytes() const { return png_; }
  const std::string& path() const { return path_; }

  // PNG encoding of the pixels: stored bytes when available, otherwise a
  // fresh encode.
  std::vector<std::uint8_t> encoded_png() const;

 private:
  enum class Kind { inline_png, path, memory };

  struct Cache {
    std::once_flag once;
    Image image;
  };

  Kind kind_ = Kind::memory;
  std::vector<std::uint8_t> png_;
  std::string path_;
  int width_ = 0;
  int height_ = 0;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

struct Frame {
  std::string id;
  ImageSource image_source = ImageSource::from_pixels(Image{1, 1, {0, 0, 0}});
  std::vector<RadarPoint> radar_points;
  CameraCalibration calibration;
  std::vector<Box2D> boxes;
  ConditionTag tag = ConditionTag::day;

  const Image& image() const { return image_source.pixels(); }
};

void validate(const Frame& frame, const RadarDomains& domains);

struct SceneSet {
  std::vector<Frame> frames;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  RadarDomains domains;
};

void validate(const SceneSet& scenes);

struct DatasetStats {
  double mean_distance = 0.0;  // meters
  double mean_rcs = 0.0;       // dBsm
  std::size_t point_count = 0;
};

// Arithmetic means over every radar point of every frame. Throws
// ValidationError when the set has no points.
DatasetStats compute_stats(const SceneSet& scenes);

}  // namespace rfk
