#include "rfk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rfk/errors.hpp"
#include "rfk/png_io.hpp"
#include "rfk/projection.hpp"
#include "rfk/rng.hpp"

namespace rfk {

namespace {

constexpr double kRcsPerMeter = 9.0;     // dBsm per meter of height above 0.5 m
constexpr double kRcsClampLo = -4.9;     // keep samples inside the open domain
constexpr double kRcsClampHi = 52.9;

// Beta(1, 7) via its inverse CDF; most mass near 0, thin tail to 1.
double sample_height_unit(Rng& rng) { return 1.0 - std::pow(1.0 - rng.uniform(), 1.0 / 7.0); }

struct ObjectSample {
  double x, y;          // footprint center, radar frame
  double width, depth;  // lateral / along-range extent
  double height;
  double rcs;
  double vx, vy;
};

int class_from_height(double h) {
  if (h < 2.0) return 0;
  if (h < 3.0) return 1;
  if (h < 4.0) return 2;
  return 3;
}

}  // namespace

Mat4 forward_camera_extrinsic(double camera_height) {
  // Radar frame: x forward, y left, z up. Camera frame: X right, Y down,
  // Z forward, centered camera_height above the radar origin.
  Mat4 e;
  e.m = {0, -1, 0, 0,
         0, 0, -1, camera_height,
         1, 0, 0, 0,
         0, 0, 0, 1};
  return e;
}

void validate(const SynthConfig& c) {
  auto fail = [](const char* msg) { throw ConfigError(msg); };
  if (c.frame_count < 0) fail("synth: frame_count must be >= 0");
  if (c.min_objects < 0 || c.max_objects < c.min_objects) fail("synth: bad object count range");
  if (c.min_points_per_object < 1 || c.max_points_per_object < c.min_points_per_object) {
    fail("synth: bad points-per-object range");
  }
  if (c.clutter_rate < 0.0) fail("synth: clutter_rate must be >= 0");
  if (!(c.height_min > 0.0) || !(c.height_max >= c.height_min)) fail("synth: bad height range");
  if (c.rcs_height_correlation < 0.0 || c.rcs_height_correlation > 1.0) {
    fail("synth: correlation must lie in [0, 1]");
  }
  if (c.image_width < 16 || c.image_height < 16) fail("synth: image too small");
  if (!(c.focal > 0.0)) fail("synth: focal must be positive");
  if (!(c.camera_height > 0.0)) fail("synth: camera height must be positive");
  if (!(c.object_distance_min > 0.0) || c.object_distance_max < c.object_distance_min) {
    fail("synth: bad object distance range");
  }
  if (!(c.object_width_min > 0.0) || c.object_width_max < c.object_width_min ||
      !(c.object_depth_min > 0.0) || c.object_depth_max < c.object_depth_min) {
    fail("synth: bad object extent range");
  }
  if (!(c.clutter_distance_min > 0.0) || c.clutter_distance_max < c.clutter_distance_min) {
    fail("synth: bad clutter distance range");
  }
}

namespace {

struct FrameBuilder {
  const SynthConfig& cfg;
  CameraCalibration cal;
  Rng& rng;
  double height_mean;
  double height_sd;

  ObjectSample sample_object() {
    ObjectSample obj{};
    double unit = sample_height_unit(rng);
    obj.height = cfg.height_min + (cfg.height_max - cfg.height_min) * unit;

    // Correlated RCS: standardize the height, mix with independent noise so
    // the Pearson correlation hits the configured value, then map to dBsm.
    double z_height = (height_sd > 0.0) ? (obj.height - height_mean) / height_sd : 0.0;
    double c = cfg.rcs_height_correlation;
    double z = c * z_height + std::sqrt(std::max(0.0, 1.0 - c * c)) * rng.normal();
    obj.rcs = kRcsPerMeter * (height_mean - 0.5) + kRcsPerMeter * height_sd * z;
    obj.rcs = std::clamp(obj.rcs, kRcsClampLo, kRcsClampHi);

    obj.width = rng.uniform(cfg.object_width_min, cfg.object_width_max);
    obj.depth = rng.uniform(cfg.object_depth_min, cfg.object_depth_max);
    double distance = rng.uniform(cfg.object_distance_min, cfg.object_distance_max);
    double fov_half = std::atan(0.5 * cfg.image_width / cfg.focal);
    double azimuth = rng.uniform(-0.8 * fov_half, 0.8 * fov_half);
    obj.x = distance * std::cos(azimuth);
    obj.y = distance * std::sin(azimuth);
    obj.vx = rng.uniform(-10.0, 10.0);
    obj.vy = rng.uniform(-10.0, 10.0);
    return obj;
  }

  // 2D box as the exact pinhole projection of the eight 3D corners;
  // nullopt when any corner is off-image (caller retries).
  std::optional<Box2D> project_box(const ObjectSample& obj) const {
    double min_u = 1e30, min_v = 1e30, max_u = -1e30, max_v = -1e30;
    for (int ix = 0; ix < 2; ++ix) {
      for (int iy = 0; iy < 2; ++iy) {
        for (int iz = 0; iz < 2; ++iz) {
          Vec3 corner{obj.x + (ix ? 0.5 : -0.5) * obj.depth,
                      obj.y + (iy ? 0.5 : -0.5) * obj.width,
                      iz ? obj.height : 0.0};
          Vec3 cam = cal.extrinsic.apply(corner);
          if (!(cam.z > 0.1)) return std::nullopt;
          double u = cal.cx + cal.fx * cam.x / cam.z;
          double v = cal.cy + cal.fy * cam.y / cam.z;
          min_u = std::min(min_u, u);
          max_u = std::max(max_u, u);
          min_v = std::min(min_v, v);
          max_v = std::max(max_v, v);
        }
      }
    }
    if (min_u < 2.0 || min_v < 2.0 || max_u > cal.image_width - 3.0 ||
        max_v > cal.image_height - 3.0) {
      return std::nullopt;
    }
    Box2D box;
    box.x1 = min_u;
    box.y1 = min_v;
    box.x2 = max_u;
    box.y2 = max_v;
    box.class_id = class_from_height(obj.height);
    box.box3d_height = obj.height;
    return box;
  }

  ObjectSample placed_object(Box2D* box_out) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      ObjectSample obj = sample_object();
      if (auto box = project_box(obj)) {
        *box_out = *box;
        return obj;
      }
    }
    // Deterministic fallback: small, short, straight ahead and far.
    ObjectSample obj{};
    obj.height = cfg.height_min;
    obj.rcs = std::clamp(kRcsPerMeter * (obj.height - 0.5), kRcsClampLo, kRcsClampHi);
    obj.width = cfg.object_width_min;
    obj.depth = cfg.object_depth_min;
    obj.x = cfg.object_distance_max;
    obj.y = 0.0;
    obj.vx = obj.vy = 0.0;
    auto box = project_box(obj);
    if (!box) throw ConfigError("synth: camera geometry cannot see any object");
    *box_out = *box;
    return obj;
  }

  RadarPoint clutter_point() {
    double fov_half = std::atan(0.5 * cfg.image_width / cfg.focal);
    for (int attempt = 0; attempt < 32; ++attempt) {
      double distance = rng.uniform(cfg.clutter_distance_min, cfg.clutter_distance_max);
      double azimuth = rng.uniform(-0.85 * fov_half, 0.85 * fov_half);
      RadarPoint p;
      p.x = distance * std::cos(azimuth);
      p.y = distance * std::sin(azimuth);
      p.z = 0.0;
      p.vx = rng.uniform(-3.0, 3.0);
      p.vy = rng.uniform(-3.0, 3.0);
      p.rcs = rng.uniform(-4.5, 8.0);
      if (project_point(p, cal)) return p;
    }
    RadarPoint p;
    p.x = cfg.clutter_distance_max;
    p.y = 0.0;
    p.vx = p.vy = 0.0;
    p.rcs = 0.0;
    return p;
  }
};

Image render_scene_image(const CameraCalibration& cal, const std::vector<Box2D>& boxes,
                         ConditionTag tag) {
  Image img;
  img.width = cal.image_width;
  img.height = cal.image_height;
  img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  const int horizon = static_cast<int>(cal.cy);
  const bool dark = tag == ConditionTag::night;
  const bool wet = tag == ConditionTag::rain;
  for (int y = 0; y < img.height; ++y) {
    std::uint8_t r, g, b;
    if (y < horizon) {
      double t = static_cast<double>(y) / std::max(1, horizon);
      r = static_cast<std::uint8_t>(120 + 30 * t);
      g = static_cast<std::uint8_t>(150 + 20 * t);
      b = static_cast<std::uint8_t>(200 + 20 * t);
    } else {
      double t = static_cast<double>(y - horizon) / std::max(1, img.height - horizon);
      r = g = b = static_cast<std::uint8_t>(80 + 40 * t);
    }
    if (dark) {
      r /= 4;
      g /= 4;
      b = static_cast<std::uint8_t>(b / 3);
    } else if (wet) {
      r = static_cast<std::uint8_t>(r * 3 / 4);
      g = static_cast<std::uint8_t>(g * 3 / 4);
    }
    for (int x = 0; x < img.width; ++x) {
      std::size_t i = img.index(x, y);
      img.rgb[i] = r;
      img.rgb[i + 1] = g;
      img.rgb[i + 2] = b;
    }
  }
  static const std::uint8_t palette[4][3] = {
      {200, 60, 60}, {60, 160, 60}, {60, 80, 200}, {200, 160, 40}};
  for (const Box2D& box : boxes) {
    const auto& color = palette[box.class_id & 3];
    int x1 = static_cast<int>(box.x1), x2 = static_cast<int>(box.x2);
    int y1 = static_cast<int>(box.y1), y2 = static_cast<int>(box.y2);
    for (int y = y1; y <= y2; ++y) {
      for (int x = x1; x <= x2; ++x) {
        std::size_t i = img.index(x, y);
        img.rgb[i] = dark ? color[0] / 3 : color[0];
        img.rgb[i + 1] = dark ? color[1] / 3 : color[1];
        img.rgb[i + 2] = dark ? color[2] / 3 : color[2];
      }
    }
  }
  return img;
}

}  // namespace

SceneSet generate_synthetic(std::uint64_t seed, const SynthConfig& cfg) {
  validate(cfg);
  Rng rng(seed);

  CameraCalibration cal;
  cal.fx = cal.fy = cfg.focal;
  cal.cx = cfg.image_width / 2.0;
  cal.cy = cfg.image_height / 2.0;
  cal.image_width = cfg.image_width;
  cal.image_height = cfg.image_height;
  cal.extrinsic = forward_camera_extrinsic(cfg.camera_height);

  const double span = cfg.height_max - cfg.height_min;
  FrameBuilder builder{cfg, cal, rng,
                       cfg.height_min + span / 8.0,          // Beta(1,7) mean
                       span * std::sqrt(7.0) / 24.0};        // Beta(1,7) sd

  SceneSet scenes;
  nlohmann::ordered_json objects_meta = nlohmann::ordered_json::array();

  for (int f = 0; f < cfg.frame_count; ++f) {
    Frame frame;
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%05d", f);
    frame.id = buf;
    frame.calibration = cal;

    double tag_draw = rng.uniform();
    frame.tag = tag_draw < 0.6 ? ConditionTag::day
                               : (tag_draw < 0.8 ? ConditionTag::night : ConditionTag::rain);

    int object_count = rng.uniform_int(cfg.min_objects, cfg.max_objects);
    for (int o = 0; o < object_count; ++o) {
      Box2D box;
      ObjectSample obj = builder.placed_object(&box);
      frame.boxes.push_back(box);
      objects_meta.push_back({obj.height, obj.rcs});

      int point_count = rng.uniform_int(cfg.min_points_per_object, cfg.max_points_per_object);
      for (int p = 0; p < point_count; ++p) {
        RadarPoint point;
        point.x = obj.x + rng.uniform(-0.5, 0.5) * obj.depth;
        point.y = obj.y + rng.uniform(-0.5, 0.5) * obj.width;
        point.z = 0.0;
        point.vx = obj.vx;
        point.vy = obj.vy;
        point.rcs = obj.rcs;
        frame.radar_points.push_back(point);
      }
    }

    int clutter_count = cfg.clutter_rate > 0.0 ? rng.poisson(cfg.clutter_rate) : 0;
    for (int cidx = 0; cidx < clutter_count; ++cidx) {
      frame.radar_points.push_back(builder.clutter_point());
    }

    Image pixels = render_scene_image(cal, frame.boxes, frame.tag);
    frame.image_source = ImageSource::from_png_bytes(encode_png(pixels));
    scenes.frames.push_back(std::move(frame));
  }

  scenes.meta["generator"] = "rfk-synth";
  scenes.meta["seed"] = static_cast<double>(seed);
  scenes.meta["frame_count"] = static_cast<double>(cfg.frame_count);
  scenes.meta["correlation"] = cfg.rcs_height_correlation;
  scenes.meta["objects"] = std::move(objects_meta);

  validate(scenes);
  return scenes;
}

}  // namespace rfk
