#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rfk/errors.hpp"
#include "rfk/extension.hpp"
#include "rfk/fusion.hpp"
#include "rfk/losses.hpp"
#include "rfk/metrics.hpp"
#include "rfk/pipeline.hpp"
#include "rfk/raster_io.hpp"
#include "rfk/scene_io.hpp"
#include "rfk/synth.hpp"
#include "rfk/tensor_io.hpp"

namespace py = pybind11;
using namespace rfk;

namespace {

FeatureMap feature_map_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 3) throw ValidationError("expected an (H, W, C) array");
  const int h = static_cast<int>(arr.shape(0));
  const int w = static_cast<int>(arr.shape(1));
  const int c = static_cast<int>(arr.shape(2));
  std::vector<double> data(arr.data(), arr.data() + arr.size());
  return FeatureMap(w, h, c, std::move(data));
}

py::array_t<double> feature_map_to_array(const FeatureMap& m) {
  py::array_t<double> out({m.height(), m.width(), m.channels()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<float> plane_to_array(const std::vector<float>& plane, int w, int h) {
  py::array_t<float> out({h, w});
  std::copy(plane.begin(), plane.end(), out.mutable_data());
  return out;
}

py::dict raster_to_dict(const RadarRaster& r) {
  py::dict out;
  out["d"] = plane_to_array(r.distance, r.width, r.height);
  out["r"] = plane_to_array(r.rcs, r.width, r.height);
  out["vx"] = plane_to_array(r.vx, r.width, r.height);
  out["vy"] = plane_to_array(r.vy, r.width, r.height);
  py::array_t<std::uint8_t> occ({r.height, r.width});
  std::copy(r.occupancy.begin(), r.occupancy.end(), occ.mutable_data());
  out["occupancy"] = occ;
  return out;
}

PreprocessConfig config_from_kwargs(const std::string& variant, double fh_height, double hmin,
                                    double alpha, double beta, int half_width, double sigma_deg) {
  PreprocessConfig base;
  base.height.fixed_height = fh_height;
  base.height.ah.h_min = hmin;
  base.height.ah.alpha = alpha;
  base.height.ah.beta = beta;
  base.azimuth.half_width = half_width;
  base.azimuth.sigma = sigma_deg * 3.14159265358979323846 / 180.0;
  return parse_variant(variant, base);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radar-camera alignment and fusion kernels";

  py::register_exception<ValidationError>(m, "RfkValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "RfkIoError", PyExc_IOError);
  py::register_exception<ConfigError>(m, "RfkConfigError", PyExc_ValueError);

  py::class_<RadarPoint>(m, "RadarPoint")
      .def(py::init([](double x, double y, double z, double vx, double vy, double rcs) {
             return RadarPoint{x, y, z, vx, vy, rcs};
           }),
           py::arg("x"), py::arg("y"), py::arg("z") = 0.0, py::arg("vx") = 0.0,
           py::arg("vy") = 0.0, py::arg("rcs") = 0.0)
      .def_readwrite("x", &RadarPoint::x)
      .def_readwrite("y", &RadarPoint::y)
      .def_readwrite("z", &RadarPoint::z)
      .def_readwrite("vx", &RadarPoint::vx)
      .def_readwrite("vy", &RadarPoint::vy)
      .def_readwrite("rcs", &RadarPoint::rcs)
      .def_property_readonly("distance", &RadarPoint::distance)
      .def_property_readonly("azimuth", &RadarPoint::azimuth);

  py::class_<CameraCalibration>(m, "CameraCalibration")
      .def(py::init([](double fx, double fy, double cx, double cy, int width, int height,
                       const std::array<double, 16>& extrinsic) {
             CameraCalibration cal{fx, fy, cx, cy, Mat4::from_row_major(extrinsic), width, height};
             validate(cal);
             return cal;
           }),
           py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"), py::arg("width"),
           py::arg("height"),
           py::arg("extrinsic") = std::array<double, 16>{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1})
      .def_readonly("fx", &CameraCalibration::fx)
      .def_readonly("fy", &CameraCalibration::fy)
      .def_readonly("cx", &CameraCalibration::cx)
      .def_readonly("cy", &CameraCalibration::cy)
      .def_readonly("width", &CameraCalibration::image_width)
      .def_readonly("height", &CameraCalibration::image_height);

  py::class_<Box2D>(m, "Box2D")
      .def(py::init([](double x1, double y1, double x2, double y2, int class_id,
                       std::optional<double> h3d) {
             Box2D b{x1, y1, x2, y2, class_id, h3d};
             return b;
           }),
           py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"), py::arg("class_id") = 0,
           py::arg("h3d") = std::nullopt)
      .def_readwrite("x1", &Box2D::x1)
      .def_readwrite("y1", &Box2D::y1)
      .def_readwrite("x2", &Box2D::x2)
      .def_readwrite("y2", &Box2D::y2)
      .def_readwrite("class_id", &Box2D::class_id)
      .def_readwrite("h3d", &Box2D::box3d_height);

  py::class_<DatasetStats>(m, "DatasetStats")
      .def(py::init([](double mean_distance, double mean_rcs, std::size_t n) {
             return DatasetStats{mean_distance, mean_rcs, n};
           }),
           py::arg("mean_distance"), py::arg("mean_rcs"), py::arg("point_count"))
      .def_readonly("mean_distance", &DatasetStats::mean_distance)
      .def_readonly("mean_rcs", &DatasetStats::mean_rcs)
      .def_readonly("point_count", &DatasetStats::point_count);

  py::class_<Frame>(m, "Frame")
      .def_readonly("id", &Frame::id)
      .def_readonly("radar_points", &Frame::radar_points)
      .def_readonly("calibration", &Frame::calibration)
      .def_readonly("boxes", &Frame::boxes)
      .def_property_readonly("tag", [](const Frame& f) { return std::string(to_string(f.tag)); })
      .def_property_readonly("image", [](const Frame& f) {
        const Image& img = f.image();
        py::array_t<std::uint8_t> out({img.height, img.width, 3});
        std::copy(img.rgb.begin(), img.rgb.end(), out.mutable_data());
        return out;
      });

  py::class_<SceneSet>(m, "SceneSet")
      .def_readonly("frames", &SceneSet::frames)
      .def_property_readonly("meta", [](const SceneSet& s) { return s.meta.dump(); });

  py::class_<SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("frame_count", &SynthConfig::frame_count)
      .def_readwrite("min_objects", &SynthConfig::min_objects)
      .def_readwrite("max_objects", &SynthConfig::max_objects)
      .def_readwrite("min_points_per_object", &SynthConfig::min_points_per_object)
      .def_readwrite("max_points_per_object", &SynthConfig::max_points_per_object)
      .def_readwrite("clutter_rate", &SynthConfig::clutter_rate)
      .def_readwrite("height_min", &SynthConfig::height_min)
      .def_readwrite("height_max", &SynthConfig::height_max)
      .def_readwrite("rcs_height_correlation", &SynthConfig::rcs_height_correlation)
      .def_readwrite("image_width", &SynthConfig::image_width)
      .def_readwrite("image_height", &SynthConfig::image_height)
      .def_readwrite("focal", &SynthConfig::focal)
      .def_readwrite("camera_height", &SynthConfig::camera_height);

  m.def("load_scene_set", [](const std::string& path) { return load_scene_set(path); },
        py::arg("path"));
  m.def("write_scene_set", &write_scene_set, py::arg("scenes"), py::arg("path"));
  m.def("generate_synthetic",
        [](std::uint64_t seed, const SynthConfig& cfg) { return generate_synthetic(seed, cfg); },
        py::arg("seed"), py::arg("config") = SynthConfig{});
  m.def("compute_stats", &compute_stats, py::arg("scenes"));

  m.def("project_point",
        [](const RadarPoint& p, const CameraCalibration& cal, double margin) -> py::object {
          auto res = project_point(p, cal, margin);
          if (!res) return py::none();
          return py::make_tuple(res->u, res->v, res->depth);
        },
        py::arg("point"), py::arg("calibration"), py::arg("margin") = 0.0,
        "Returns (u, v, depth) or None when the point is culled");
  m.def("meters_to_pixel_height", &meters_to_pixel_height, py::arg("h"), py::arg("depth"),
        py::arg("calibration"));
  m.def("pixel_column_angle", &pixel_column_angle, py::arg("u"), py::arg("calibration"));

  m.def("estimate_height_fh", &estimate_height_fh, py::arg("fixed_height"));
  m.def("estimate_height_ah",
        [](double d, double rcs, double hmin, double alpha, double beta, const DatasetStats& stats) {
          return estimate_height_ah(d, rcs, AhParams{hmin, alpha, beta, stats});
        },
        py::arg("d"), py::arg("rcs"), py::arg("hmin"), py::arg("alpha"), py::arg("beta"),
        py::arg("stats"));
  m.def("azimuth_weights",
        [](const std::string& mode, int half_width, double sigma_deg, const CameraCalibration& cal,
           double u_center) {
          AzimuthParams p;
          p.mode = mode == "none" ? AzimuthMode::none
                                  : (mode == "ae" ? AzimuthMode::ae : AzimuthMode::aue);
          p.half_width = half_width;
          p.sigma = sigma_deg * 3.14159265358979323846 / 180.0;
          std::vector<std::pair<int, double>> out;
          for (const ColumnWeight& cw : azimuth_weights(p, cal, u_center)) {
            out.emplace_back(cw.offset, cw.rcs_weight);
          }
          return out;
        },
        py::arg("mode"), py::arg("half_width"), py::arg("sigma_deg"), py::arg("calibration"),
        py::arg("u_center"));

  m.def("rasterize_frame",
        [](const Frame& frame, const std::string& variant, double fh_height, double hmin,
           double alpha, double beta, int half_width, double sigma_deg,
           std::optional<DatasetStats> stats) {
          PreprocessConfig cfg =
              config_from_kwargs(variant, fh_height, hmin, alpha, beta, half_width, sigma_deg);
          if (stats) cfg = with_stats(cfg, *stats);
          return raster_to_dict(rasterize_frame(frame, cfg));
        },
        py::arg("frame"), py::arg("variant") = "ah+aue", py::arg("fh_height") = 3.0,
        py::arg("hmin") = 1.0, py::arg("alpha") = 6.0, py::arg("beta") = 0.5,
        py::arg("half_width") = 3, py::arg("sigma_deg") = 0.3, py::arg("stats") = std::nullopt,
        "Rasterize one frame; returns a dict of (H, W) channel planes");

  m.def("read_raster", [](const std::string& path) { return raster_to_dict(read_raster(path)); },
        py::arg("path"));

  m.def("projection_mse",
        [](const Frame& frame, const std::string& variant, double fh_height, double hmin,
           double alpha, double beta, int half_width, double sigma_deg,
           std::optional<DatasetStats> stats) {
          PreprocessConfig cfg =
              config_from_kwargs(variant, fh_height, hmin, alpha, beta, half_width, sigma_deg);
          if (stats) cfg = with_stats(cfg, *stats);
          FrameMse mse = projection_mse(rasterize_frame(frame, cfg), frame.boxes, frame.id);
          py::dict out;
          out["n_t"] = mse.n_total;
          out["n_in"] = mse.n_inside;
          out["mse"] = mse.mse;
          out["empty"] = mse.empty;
          return out;
        },
        py::arg("frame"), py::arg("variant") = "ah", py::arg("fh_height") = 3.0,
        py::arg("hmin") = 1.0, py::arg("alpha") = 6.0, py::arg("beta") = 0.5,
        py::arg("half_width") = 3, py::arg("sigma_deg") = 0.3, py::arg("stats") = std::nullopt);

  m.def("summarize", [](const std::vector<double>& values) {
    DistributionSummary s = summarize(values);
    py::dict out;
    out["mean"] = s.mean;
    out["q1"] = s.q1;
    out["median"] = s.median;
    out["q3"] = s.q3;
    out["count"] = s.count;
    return out;
  });

  m.def("normalize_image",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
          return feature_map_to_array(normalize_image(feature_map_from_array(arr)));
        },
        py::arg("image"), "Shift an (H, W, C) array from [0, 255] to [-127.5, 127.5]");

  m.def("swfb",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& rad,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& img_spatial,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& rad_spatial,
           const std::vector<double>& img_channel, const std::vector<double>& rad_channel) {
          FeatureMap a = feature_map_from_array(img);
          FeatureMap b = feature_map_from_array(rad);
          SwfbParams p = SwfbParams::identity(a.width(), a.height(), a.channels());
          if (img_spatial.size() > 0) {
            p.img_spatial.values.assign(img_spatial.data(), img_spatial.data() + img_spatial.size());
          }
          if (rad_spatial.size() > 0) {
            p.rad_spatial.values.assign(rad_spatial.data(), rad_spatial.data() + rad_spatial.size());
          }
          if (!img_channel.empty()) p.img_channel.values = img_channel;
          if (!rad_channel.empty()) p.rad_channel.values = rad_channel;
          return feature_map_to_array(swfb(a, b, p));
        },
        py::arg("f_img"), py::arg("f_rad"), py::arg("img_spatial") = py::array_t<double>(),
        py::arg("rad_spatial") = py::array_t<double>(),
        py::arg("img_channel") = std::vector<double>{},
        py::arg("rad_channel") = std::vector<double>{});

  m.def("safb",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& rad,
           int reduction, int kernel_size) {
          FeatureMap a = feature_map_from_array(img);
          FeatureMap b = feature_map_from_array(rad);
          FusionOutput out =
              safb(a, b, SafbParams::neutral(a.width(), a.height(), a.channels(), reduction, kernel_size));
          py::dict result;
          result["fused"] = feature_map_to_array(out.fused);
          result["w_c"] = out.diagnostics.w_channel.values;
          py::array_t<double> ws({out.diagnostics.w_spatial.height, out.diagnostics.w_spatial.width});
          std::copy(out.diagnostics.w_spatial.values.begin(), out.diagnostics.w_spatial.values.end(),
                    ws.mutable_data());
          result["w_s"] = ws;
          py::array_t<double> wsim({out.diagnostics.w_similarity.height, out.diagnostics.w_similarity.width});
          std::copy(out.diagnostics.w_similarity.values.begin(),
                    out.diagnostics.w_similarity.values.end(), wsim.mutable_data());
          result["w_sim"] = wsim;
          return result;
        },
        py::arg("f_img"), py::arg("f_rad"), py::arg("reduction") = 4, py::arg("kernel_size") = 7,
        "SAFB with neutral attention parameters; returns fused map and diagnostics");

  m.def("similarity_weight",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& img,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& rad) {
          SpatialMap sim = similarity_weight(feature_map_from_array(img), feature_map_from_array(rad));
          py::array_t<double> out({sim.height, sim.width});
          std::copy(sim.values.begin(), sim.values.end(), out.mutable_data());
          return out;
        },
        py::arg("f_img"), py::arg("f_rad"));

  m.def("focal_loss",
        [](double p, int y, double alpha, double gamma) { return focal_loss(p, y, alpha, gamma); },
        py::arg("p"), py::arg("y"), py::arg("alpha") = 0.25, py::arg("gamma") = 2.0);
  m.def("smooth_l1",
        [](const std::array<double, 4>& pred, const std::array<double, 4>& target, double beta) {
          return smooth_l1(pred, target, beta);
        },
        py::arg("pred"), py::arg("target"), py::arg("beta") = 1.0);
  m.def("make_seg_mask",
        [](const std::vector<Box2D>& boxes, int width, int height) {
          SegMask mask = make_seg_mask(boxes, width, height);
          py::array_t<std::uint8_t> out({2, height, width});
          auto* data = out.mutable_data();
          std::copy(mask.free_space.begin(), mask.free_space.end(), data);
          std::copy(mask.occupied.begin(), mask.occupied.end(),
                    data + static_cast<std::size_t>(width) * height);
          return out;
        },
        py::arg("boxes"), py::arg("width"), py::arg("height"),
        "Returns a (2, H, W) array: channel 0 free space, channel 1 occupied");
  m.def("bce",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pred,
           const std::vector<Box2D>& boxes) {
          FeatureMap p = feature_map_from_array(pred);
          return bce(p, make_seg_mask(boxes, p.width(), p.height()));
        },
        py::arg("pred"), py::arg("boxes"),
        "Mean BCE of an (H, W, 2) prediction against the mask built from boxes");

  m.def("write_feature_map",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& arr,
           const std::string& path) { write_feature_map(feature_map_from_array(arr), path); },
        py::arg("array"), py::arg("path"));
  m.def("read_feature_map",
        [](const std::string& path) { return feature_map_to_array(read_feature_map(path)); },
        py::arg("path"));

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
