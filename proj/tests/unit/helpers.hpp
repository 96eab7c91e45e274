#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "rfk/scene.hpp"
#include "rfk/synth.hpp"

namespace rfk::test {

// Calibration whose extrinsic is the identity: radar coordinates are camera
// coordinates (x right, y down, z forward), convenient for pinhole math.
inline CameraCalibration camera_frame_cal(double fx = 500.0, double fy = 500.0, double cx = 320.0,
                                          double cy = 180.0, int w = 640, int h = 360) {
  CameraCalibration cal;
  cal.fx = fx;
  cal.fy = fy;
  cal.cx = cx;
  cal.cy = cy;
  cal.image_width = w;
  cal.image_height = h;
  cal.extrinsic = Mat4::identity();
  return cal;
}

// Forward-looking camera above the radar plane, as used by the generator.
inline CameraCalibration forward_cal(double fx = 500.0, double cam_height = 1.5, int w = 640,
                                     int h = 360) {
  CameraCalibration cal;
  cal.fx = cal.fy = fx;
  cal.cx = w / 2.0;
  cal.cy = h / 2.0;
  cal.image_width = w;
  cal.image_height = h;
  cal.extrinsic = forward_camera_extrinsic(cam_height);
  return cal;
}

inline Image flat_image(int w, int h, std::uint8_t value = 128) {
  Image img;
  img.width = w;
  img.height = h;
  img.rgb.assign(static_cast<std::size_t>(w) * h * 3, value);
  return img;
}

inline Frame make_frame(const CameraCalibration& cal, std::string id = "f0") {
  Frame frame;
  frame.id = std::move(id);
  frame.calibration = cal;
  frame.image_source = ImageSource::from_pixels(flat_image(cal.image_width, cal.image_height));
  return frame;
}

// Small-image generator config that keeps unit tests fast.
inline SynthConfig small_synth(int frames) {
  SynthConfig cfg;
  cfg.frame_count = frames;
  cfg.image_width = 128;
  cfg.image_height = 96;
  cfg.focal = 100.0;
  return cfg;
}

struct TempDir {
  std::filesystem::path path;

  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto candidate = base / ("rfk_test_" + std::to_string(rd()));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace rfk::test
