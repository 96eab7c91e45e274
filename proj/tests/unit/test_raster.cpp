#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rfk/errors.hpp"
#include "rfk/pipeline.hpp"
#include "rfk/png_io.hpp"
#include "rfk/raster.hpp"
#include "rfk/raster_io.hpp"

using namespace rfk;

namespace {

// Identity-extrinsic frame: radar coordinates are camera coordinates.
Frame small_frame() {
  return test::make_frame(test::camera_frame_cal(20, 20, 32, 24, 64, 48));
}

ExtendedDetection simple_detection(const ProjectedPoint& base, double pixel_height,
                                   std::vector<ColumnWeight> cols = {ColumnWeight{0, 1.0}}) {
  ExtendedDetection det;
  det.base = base;
  det.est_height = 1.0;
  det.pixel_height = pixel_height;
  det.column_weights = std::move(cols);
  return det;
}

}  // namespace

TEST_CASE("collision keeps the point closest to the radar") {
  Frame frame = small_frame();
  // both project to pixel (48, 36); planar distances 10 and 20
  frame.radar_points = {RadarPoint{8, 6, 10, 1, 2, 30.0}, RadarPoint{16, 12, 20, -1, -2, 40.0}};
  auto projected = project_frame(frame);
  REQUIRE(projected.size() == 2);
  std::vector<ExtendedDetection> dets = {simple_detection(projected[0], 2.0),
                                         simple_detection(projected[1], 2.0)};
  RadarRaster raster = rasterize(frame, dets);
  std::size_t i = raster.index(48, 36);
  CHECK(raster.occupancy[i] == 1);
  CHECK(raster.distance[i] == doctest::Approx(10.0f));
  CHECK(raster.rcs[i] == doctest::Approx(30.0f));
  CHECK(raster.vx[i] == doctest::Approx(1.0f));
  CHECK(raster.vy[i] == doctest::Approx(2.0f));

  SUBCASE("input order does not matter") {
    std::swap(dets[0], dets[1]);
    RadarRaster again = rasterize(frame, dets);
    CHECK(again == raster);
  }
}

TEST_CASE("equal-distance ties go to the smaller source index") {
  Frame frame = small_frame();
  frame.radar_points = {RadarPoint{8, 6, 10, 0, 0, 11.0}, RadarPoint{8, 6, 10, 0, 0, 22.0}};
  auto projected = project_frame(frame);
  std::vector<ExtendedDetection> dets = {simple_detection(projected[0], 1.0),
                                         simple_detection(projected[1], 1.0)};
  RadarRaster a = rasterize(frame, dets);
  std::swap(dets[0], dets[1]);
  RadarRaster b = rasterize(frame, dets);
  CHECK(a == b);
  CHECK(a.rcs[a.index(48, 36)] == doctest::Approx(11.0f));
}

TEST_CASE("no detections yields an all-zero raster") {
  Frame frame = small_frame();
  RadarRaster raster = rasterize(frame, {});
  CHECK(raster.occupied_count() == 0);
  CHECK(std::all_of(raster.distance.begin(), raster.distance.end(),
                    [](float v) { return v == 0.0f; }));
}

TEST_CASE("vertical span pixel count matches the geometry") {
  Frame frame = test::make_frame(test::camera_frame_cal());
  frame.radar_points = {RadarPoint{0, 0, 10, 0, 0, 5.0}};
  auto projected = project_frame(frame);
  REQUIRE(projected.size() == 1);

  SUBCASE("unclipped: height px + 1 pixels in one column") {
    ProjectedPoint base = projected[0];
    base.v = 200.0;
    RadarRaster raster = rasterize(frame, {simple_detection(base, 150.0)});
    CHECK(raster.occupied_count() == 151);
    for (int y = 50; y <= 200; ++y) CHECK(raster.occupancy[raster.index(320, y)] == 1);
  }

  SUBCASE("clipped at the top of the image") {
    ProjectedPoint base = projected[0];
    base.v = 100.0;
    RadarRaster raster = rasterize(frame, {simple_detection(base, 150.0)});
    CHECK(raster.occupied_count() == 101);  // rows 0..100
  }

  SUBCASE("fully above the image contributes nothing") {
    ProjectedPoint base = projected[0];
    base.v = -5.0;  // margin-retained points can sit slightly off image
    RadarRaster raster = rasterize(frame, {simple_detection(base, 10.0)});
    CHECK(raster.occupied_count() == 0);
  }
}

TEST_CASE("flank columns scale only the rcs channel") {
  Frame frame = small_frame();
  frame.radar_points = {RadarPoint{8, 6, 10, 3, 4, 20.0}};
  auto projected = project_frame(frame);
  std::vector<ColumnWeight> cols = {ColumnWeight{-1, 0.5}, ColumnWeight{0, 1.0},
                                    ColumnWeight{1, 0.5}};
  RadarRaster raster = rasterize(frame, {simple_detection(projected[0], 0.4, cols)});
  std::size_t center = raster.index(48, 36);
  std::size_t left = raster.index(47, 36);
  CHECK(raster.rcs[center] == doctest::Approx(20.0f));
  CHECK(raster.rcs[left] == doctest::Approx(10.0f));
  CHECK(raster.distance[left] == raster.distance[center]);
  CHECK(raster.vx[left] == raster.vx[center]);
  CHECK(raster.vy[left] == raster.vy[center]);
}

TEST_CASE("occupancy is authoritative even for zero-valued channels") {
  Frame frame = small_frame();
  frame.radar_points = {RadarPoint{8, 6, 10, 0, 0, 0.0}};  // rcs and velocities zero
  auto projected = project_frame(frame);
  RadarRaster raster = rasterize(frame, {simple_detection(projected[0], 0.0)});
  std::size_t i = raster.index(48, 36);
  CHECK(raster.occupancy[i] == 1);
  CHECK(raster.rcs[i] == 0.0f);
  CHECK(raster.distance[i] > 0.0f);
}

TEST_CASE("rasterization is order independent on generated scenes") {
  SceneSet scenes = generate_synthetic(31, test::small_synth(3));
  PreprocessConfig cfg;
  cfg.azimuth.mode = AzimuthMode::aue;
  cfg = with_stats(cfg, compute_stats(scenes));
  std::mt19937_64 rng(4);
  for (const Frame& frame : scenes.frames) {
    std::vector<ExtendedDetection> dets = extend_frame(frame, cfg);
    RadarRaster expected = rasterize(frame, dets);
    for (int trial = 0; trial < 3; ++trial) {
      std::shuffle(dets.begin(), dets.end(), rng);
      CHECK(rasterize(frame, dets) == expected);
    }
  }
}

TEST_CASE("azimuth extension multiplies occupancy by at most 2w+1") {
  SceneSet scenes = generate_synthetic(32, test::small_synth(4));
  PreprocessConfig none = with_stats(PreprocessConfig{}, compute_stats(scenes));
  PreprocessConfig ae = none;
  ae.azimuth.mode = AzimuthMode::ae;
  ae.azimuth.half_width = 3;
  for (const Frame& frame : scenes.frames) {
    std::size_t base = rasterize_frame(frame, none).occupied_count();
    std::size_t spread = rasterize_frame(frame, ae).occupied_count();
    CHECK(spread >= base);
    CHECK(spread <= 7 * base);
  }
}

TEST_CASE("normalize_image shifts the value range") {
  FeatureMap img(2, 1, 3, {0.0, 255.0, 127.5, 10.0, 200.0, 64.0});
  FeatureMap out = normalize_image(img);
  CHECK(out.at(0, 0, 0) == -127.5);
  CHECK(out.at(0, 0, 1) == 127.5);
  CHECK(out.at(0, 0, 2) == 0.0);
  CHECK(out.at(1, 0, 0) == doctest::Approx(-117.5));

  CHECK_THROWS_AS(normalize_image(FeatureMap(1, 1, 1, {256.0})), ValidationError);
  CHECK_THROWS_AS(normalize_image(FeatureMap(1, 1, 1, {-1.0})), ValidationError);

  SUBCASE("8-bit image overload") {
    Image raw = test::flat_image(4, 3, 255);
    FeatureMap n = normalize_image(raw);
    CHECK(n.at(0, 0, 0) == 127.5);
    CHECK(n.channels() == 3);
  }
}

TEST_CASE("resize to the same size is the identity") {
  SceneSet scenes = generate_synthetic(33, test::small_synth(1));
  const Frame& frame = scenes.frames[0];
  Frame same = resize_frame(frame, frame.calibration.image_width, frame.calibration.image_height);
  CHECK(same.image().rgb == frame.image().rgb);
  CHECK(same.calibration.fx == frame.calibration.fx);
  CHECK(same.boxes.size() == frame.boxes.size());
}

TEST_CASE("halving the resolution halves the intrinsics and boxes") {
  CameraCalibration cal = test::camera_frame_cal(1000, 1000, 640, 360, 1280, 720);
  Frame frame = test::make_frame(cal);
  frame.boxes.push_back(Box2D{100, 50, 300, 200, 0, 1.8});
  Frame resized = resize_frame(frame, 640, 360);
  CHECK(resized.calibration.fx == doctest::Approx(500.0));
  CHECK(resized.calibration.fy == doctest::Approx(500.0));
  CHECK(resized.calibration.cx == doctest::Approx(320.0));
  CHECK(resized.calibration.cy == doctest::Approx(180.0));
  CHECK(resized.boxes[0].x1 == doctest::Approx(50.0));
  CHECK(resized.boxes[0].y2 == doctest::Approx(100.0));
  CHECK(resized.image().width == 640);
}

TEST_CASE("projections scale with the resize factors") {
  SceneSet scenes = generate_synthetic(34, test::small_synth(2));
  for (const Frame& frame : scenes.frames) {
    Frame resized = resize_frame(frame, 64, 48);
    const double sx = 64.0 / frame.calibration.image_width;
    const double sy = 48.0 / frame.calibration.image_height;
    for (const RadarPoint& p : frame.radar_points) {
      auto orig = project_point(p, frame.calibration);
      if (!orig) continue;
      auto scaled = project_point(p, resized.calibration, 1.0);
      REQUIRE(scaled.has_value());
      CHECK(std::abs(scaled->u - orig->u * sx) < 0.5);
      CHECK(std::abs(scaled->v - orig->v * sy) < 0.5);
    }
  }
}

TEST_CASE("rras serialization round trips") {
  SceneSet scenes = generate_synthetic(35, test::small_synth(1));
  PreprocessConfig cfg = with_stats(PreprocessConfig{}, compute_stats(scenes));
  cfg.azimuth.mode = AzimuthMode::aue;
  RadarRaster raster = rasterize_frame(scenes.frames[0], cfg);
  CHECK(raster.occupied_count() > 0);

  std::vector<std::uint8_t> bytes = serialize_raster(raster);
  CHECK(deserialize_raster(bytes) == raster);

  test::TempDir dir;
  write_raster(raster, dir.file("a.rras"));
  CHECK(read_raster(dir.file("a.rras")) == raster);

  SUBCASE("bad magic is rejected") {
    bytes[0] = 'X';
    CHECK_THROWS_AS(deserialize_raster(bytes), ParseError);
  }
  SUBCASE("truncated payload is rejected") {
    bytes.pop_back();
    CHECK_THROWS_AS(deserialize_raster(bytes), ParseError);
  }
}

TEST_CASE("png export writes four channels plus a sidecar") {
  SceneSet scenes = generate_synthetic(36, test::small_synth(1));
  PreprocessConfig cfg = with_stats(PreprocessConfig{}, compute_stats(scenes));
  RadarRaster raster = rasterize_frame(scenes.frames[0], cfg);
  test::TempDir dir;
  std::string sidecar = export_raster_pngs(raster, dir.file("frame"));
  CHECK(std::filesystem::exists(sidecar));
  for (const char* ch : {"d", "r", "vx", "vy"}) {
    std::string path = dir.file(std::string("frame.") + ch + ".png");
    REQUIRE(std::filesystem::exists(path));
    int w = 0, h = 0;
    auto samples = decode_png_gray16(read_binary_file(path), &w, &h);
    CHECK(w == raster.width);
    CHECK(h == raster.height);
    CHECK(samples.size() == RadarRaster::plane_size(w, h));
  }
}
