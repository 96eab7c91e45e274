#include "rfk/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfk/base64.hpp"
#include "rfk/errors.hpp"
#include "rfk/fusion.hpp"
#include "rfk/hash.hpp"
#include "rfk/pipeline.hpp"
#include "rfk/raster_io.hpp"
#include "rfk/scene_io.hpp"
#include "rfk/synth.hpp"
#include "rfk/tensor_io.hpp"

namespace rfk::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;

// Shared preprocessing options. Precedence: explicit flag > config file >
// built-in default; RFK_THREADS slots between the flag and the config.
struct CommonOpts {
  std::string config_file;
  std::string height_mode = "ah";
  double fh_height = 3.0;
  double hmin = 1.0;
  double alpha = 6.0;
  double beta = 0.5;
  std::string az_mode = "none";
  int half_width = 3;
  double sigma_deg = 0.3;
  std::string resize;  // "WxH", empty = keep
  int threads = 1;
};

struct CommonOptionPtrs {
  CLI::Option* height_mode = nullptr;
  CLI::Option* fh_height = nullptr;
  CLI::Option* hmin = nullptr;
  CLI::Option* alpha = nullptr;
  CLI::Option* beta = nullptr;
  CLI::Option* az_mode = nullptr;
  CLI::Option* half_width = nullptr;
  CLI::Option* sigma_deg = nullptr;
  CLI::Option* resize = nullptr;
  CLI::Option* threads = nullptr;
};

CommonOptionPtrs add_common_options(CLI::App* cmd, CommonOpts& opts) {
  CommonOptionPtrs ptrs;
  cmd->add_option("--config", opts.config_file, "JSON config file (flags override it)");
  ptrs.height_mode =
      cmd->add_option("--height-mode", opts.height_mode, "Height strategy: fh or ah")
          ->check(CLI::IsMember({"fh", "ah"}));
  ptrs.fh_height = cmd->add_option("--fh-height", opts.fh_height, "Fixed extension height, meters");
  ptrs.hmin = cmd->add_option("--hmin", opts.hmin, "Adaptive height floor, meters");
  ptrs.alpha = cmd->add_option("--alpha", opts.alpha, "Adaptive height distance parameter");
  ptrs.beta = cmd->add_option("--beta", opts.beta, "Adaptive height rcs parameter");
  ptrs.az_mode = cmd->add_option("--az-mode", opts.az_mode, "Azimuth extension: none, ae or aue")
                     ->check(CLI::IsMember({"none", "ae", "aue"}));
  ptrs.half_width =
      cmd->add_option("--half-width", opts.half_width, "Azimuth extension half width, pixels");
  ptrs.sigma_deg =
      cmd->add_option("--sigma-deg", opts.sigma_deg, "Azimuth accuracy (sigma), degrees");
  ptrs.resize = cmd->add_option("--resize", opts.resize, "Resize frames to WxH before processing");
  ptrs.threads = cmd->add_option("--threads", opts.threads, "Worker count (RFK_THREADS overrides)");
  return ptrs;
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  try {
    json parsed = json::parse(in);
    if (!parsed.is_object()) throw ConfigError("config file: top level must be an object");
    return parsed;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file: " + std::string(e.what()));
  }
}

template <typename T>
void maybe_from_config(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
  if (opt && opt->count() > 0) return;  // flag wins
  auto it = cfg.find(key);
  if (it == cfg.end() || it->is_null()) return;
  try {
    value = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config file: bad value for '") + key + "'");
  }
}

void apply_config_file(const json& cfg, const CommonOptionPtrs& ptrs, CommonOpts& opts) {
  maybe_from_config(cfg, "height_mode", ptrs.height_mode, opts.height_mode);
  maybe_from_config(cfg, "fh_height", ptrs.fh_height, opts.fh_height);
  maybe_from_config(cfg, "hmin", ptrs.hmin, opts.hmin);
  maybe_from_config(cfg, "alpha", ptrs.alpha, opts.alpha);
  maybe_from_config(cfg, "beta", ptrs.beta, opts.beta);
  maybe_from_config(cfg, "az_mode", ptrs.az_mode, opts.az_mode);
  maybe_from_config(cfg, "half_width", ptrs.half_width, opts.half_width);
  maybe_from_config(cfg, "sigma_deg", ptrs.sigma_deg, opts.sigma_deg);
  maybe_from_config(cfg, "resize", ptrs.resize, opts.resize);
  maybe_from_config(cfg, "threads", ptrs.threads, opts.threads);
  if (opts.height_mode != "fh" && opts.height_mode != "ah") {
    throw ConfigError("config file: height_mode must be fh or ah");
  }
  if (opts.az_mode != "none" && opts.az_mode != "ae" && opts.az_mode != "aue") {
    throw ConfigError("config file: az_mode must be none, ae or aue");
  }
}

int resolve_threads(const CLI::Option* flag, int value) {
  if (flag && flag->count() > 0) return value;
  if (const char* env = std::getenv("RFK_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
    throw ConfigError("RFK_THREADS must be a positive integer");
  }
  return value;
}

PreprocessConfig build_preprocess(const CommonOpts& opts) {
  PreprocessConfig config;
  config.height.mode = opts.height_mode == "fh" ? HeightMode::fixed : HeightMode::adaptive;
  config.height.fixed_height = opts.fh_height;
  config.height.ah.h_min = opts.hmin;
  config.height.ah.alpha = opts.alpha;
  config.height.ah.beta = opts.beta;
  if (opts.az_mode == "none") config.azimuth.mode = AzimuthMode::none;
  if (opts.az_mode == "ae") config.azimuth.mode = AzimuthMode::ae;
  if (opts.az_mode == "aue") config.azimuth.mode = AzimuthMode::aue;
  config.azimuth.half_width = opts.half_width;
  config.azimuth.sigma = opts.sigma_deg * kPi / 180.0;
  try {
    validate(config.height);
    validate(config.azimuth);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return config;
}

std::optional<std::pair<int, int>> parse_resize(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto pos = text.find('x');
  if (pos == std::string::npos) throw ConfigError("--resize expects WxH, got '" + text + "'");
  try {
    int w = std::stoi(text.substr(0, pos));
    int h = std::stoi(text.substr(pos + 1));
    if (w <= 0 || h <= 0) throw ConfigError("--resize dimensions must be positive");
    return std::make_pair(w, h);
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("--resize expects WxH, got '" + text + "'");
  }
}

SceneSet load_input(const std::string& path, const std::string& resize) {
  SceneSet scenes = load_scene_set(path);
  if (auto target = parse_resize(resize)) {
    for (Frame& frame : scenes.frames) {
      frame = resize_frame(frame, target->first, target->second);
    }
  }
  return scenes;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create file: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

ojson preprocess_to_json(const PreprocessConfig& config) {
  ojson out;
  out["variant"] = variant_name(config);
  out["height_mode"] = config.height.mode == HeightMode::fixed ? "fh" : "ah";
  out["fh_height"] = config.height.fixed_height;
  out["hmin"] = config.height.ah.h_min;
  out["alpha"] = config.height.ah.alpha;
  out["beta"] = config.height.ah.beta;
  out["az_mode"] = config.azimuth.mode == AzimuthMode::none
                       ? "none"
                       : (config.azimuth.mode == AzimuthMode::ae ? "ae" : "aue");
  out["half_width"] = config.azimuth.half_width;
  out["sigma_rad"] = config.azimuth.sigma;
  return out;
}

// ---- synth ---------------------------------------------------------------

struct SynthOpts {
  std::string out_path;
  std::uint64_t seed = 42;
  SynthConfig config;
};

void cmd_synth(const SynthOpts& opts) {
  SceneSet scenes = generate_synthetic(opts.seed, opts.config);
  if (!opts.out_path.empty()) {
    if (auto dir = fs::path(opts.out_path).parent_path(); !dir.empty()) ensure_dir(dir.string());
  }
  write_scene_set(scenes, opts.out_path);
  std::size_t points = 0;
  for (const Frame& f : scenes.frames) points += f.radar_points.size();
  std::cout << "wrote " << scenes.frames.size() << " frames (" << points << " radar points) to "
            << opts.out_path << "\n";
}

// ---- rasterize -----------------------------------------------------------

void cmd_rasterize(const std::string& input, const std::string& out_dir,
                   const PreprocessConfig& base, const std::string& resize, int threads,
                   bool png_export) {
  SceneSet scenes = load_input(input, resize);
  PreprocessConfig config = base;
  if (config.height.mode == HeightMode::adaptive) {
    config = with_stats(config, compute_stats(scenes));
  }
  ensure_dir(out_dir);
  std::vector<FrameRasterResult> results =
      rasterize_scene_set(scenes, config, threads, out_dir, png_export);

  ojson manifest;
  manifest["input"] = input;
  manifest["config"] = preprocess_to_json(config);
  manifest["frames"] = ojson::array();
  for (const FrameRasterResult& r : results) {
    manifest["frames"].push_back(ojson{{"id", r.frame_id},
                                       {"file", r.frame_id + ".rras"},
                                       {"hash64", to_hex(r.content_hash)},
                                       {"occupied", r.occupied}});
  }
  std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
  write_text_file(manifest_path, manifest.dump(2) + "\n");
  std::cout << "rasterized " << results.size() << " frames into " << out_dir << "\n";
}

// ---- metrics -------------------------------------------------------------

ojson summary_to_json(const TagSummary& s) {
  ojson out;
  out["tag"] = s.tag;
  out["frames"] = s.frame_count;
  out["empty_frames"] = s.empty_frames;
  out["mse"] = ojson{{"mean", s.mse.mean},
                     {"q1", s.mse.q1},
                     {"median", s.mse.median},
                     {"q3", s.mse.q3},
                     {"count", s.mse.count}};
  out["delta_h"] = ojson{{"mean", s.height_error.mean},
                         {"q1", s.height_error.q1},
                         {"median", s.height_error.median},
                         {"q3", s.height_error.q3},
                         {"count", s.height_error.count}};
  return out;
}

void cmd_metrics(const std::string& input, const std::string& out_dir,
                 const std::vector<std::string>& variants, const PreprocessConfig& base,
                 const std::string& resize, int threads) {
  if (variants.empty()) throw ConfigError("metrics: no variants requested");
  SceneSet scenes = load_input(input, resize);

  bool any_adaptive = false;
  std::vector<PreprocessConfig> configs;
  configs.reserve(variants.size());
  for (const std::string& name : variants) {
    configs.push_back(parse_variant(name, base));
    any_adaptive |= configs.back().height.mode == HeightMode::adaptive;
  }
  if (any_adaptive) {
    DatasetStats stats = compute_stats(scenes);
    for (PreprocessConfig& c : configs) c = with_stats(c, stats);
  }

  ensure_dir(out_dir);
  ojson root;
  root["input"] = input;
  root["variants"] = ojson::array();
  std::ostringstream csv;
  csv << "variant,frame_id,tag,n_t,n_in,mse,delta_h,detections\n";

  for (const PreprocessConfig& config : configs) {
    VariantReport report = run_metrics_variant(scenes, config, threads);
    ojson v;
    v["name"] = report.variant;
    v["config"] = preprocess_to_json(config);
    v["frames"] = ojson::array();
    for (const FrameMetricsRow& row : report.rows) {
      v["frames"].push_back(ojson{{"id", row.frame_id},
                                  {"tag", to_string(row.tag)},
                                  {"n_t", row.n_total},
                                  {"n_in", row.n_inside},
                                  {"mse", row.mse},
                                  {"empty", row.empty},
                                  {"delta_h", row.mean_height_error},
                                  {"detections", row.detection_count}});
      csv << report.variant << ',' << row.frame_id << ',' << to_string(row.tag) << ','
          << row.n_total << ',' << row.n_inside << ',' << row.mse << ','
          << row.mean_height_error << ',' << row.detection_count << "\n";
    }
    v["summaries"] = ojson::array();
    for (const TagSummary& s : report.summaries) v["summaries"].push_back(summary_to_json(s));
    root["variants"].push_back(std::move(v));
  }

  write_text_file((fs::path(out_dir) / "metrics.json").string(), root.dump(2) + "\n");
  write_text_file((fs::path(out_dir) / "metrics.csv").string(), csv.str());
  std::cout << "metrics for " << variants.size() << " variant(s) written to " << out_dir << "\n";
}

// ---- report --------------------------------------------------------------

void cmd_report(const std::vector<std::string>& inputs, const std::string& out_path) {
  if (inputs.empty()) throw ConfigError("report: no metrics files given");
  std::ostringstream csv;
  csv << "variant,tag,metric,value\n";
  for (const std::string& path : inputs) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open metrics file: " + path);
    json root;
    try {
      root = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError("metrics file '" + path + "': " + e.what());
    }
    if (!root.contains("variants") || !root["variants"].is_array()) {
      throw ParseError("metrics file '" + path + "': missing variants");
    }
    for (const json& v : root["variants"]) {
      std::string variant = v.value("name", std::string("?"));
      for (const json& s : v.value("summaries", json::array())) {
        std::string tag = s.value("tag", std::string("?"));
        if (tag == "all") continue;  // plot-ready rows are per condition
        auto emit = [&](const std::string& metric, double value) {
          csv << variant << ',' << tag << ',' << metric << ',' << value << "\n";
        };
        if (s.contains("mse")) {
          emit("mse_mean", s["mse"].value("mean", 0.0));
          emit("mse_q1", s["mse"].value("q1", 0.0));
          emit("mse_median", s["mse"].value("median", 0.0));
          emit("mse_q3", s["mse"].value("q3", 0.0));
        }
        if (s.contains("delta_h")) {
          emit("delta_h_mean", s["delta_h"].value("mean", 0.0));
          emit("delta_h_q1", s["delta_h"].value("q1", 0.0));
          emit("delta_h_median", s["delta_h"].value("median", 0.0));
          emit("delta_h_q3", s["delta_h"].value("q3", 0.0));
        }
        emit("frames", static_cast<double>(s.value("frames", 0)));
        emit("empty_frames", static_cast<double>(s.value("empty_frames", 0)));
      }
    }
  }
  if (auto dir = fs::path(out_path).parent_path(); !dir.empty()) ensure_dir(dir.string());
  write_text_file(out_path, csv.str());
  std::cout << "report written to " << out_path << "\n";
}

// ---- fuse-check ----------------------------------------------------------

SpatialMap spatial_from_json(const json& value, int w, int h, const std::string& key) {
  if (value.is_number()) return SpatialMap(w, h, value.get<double>());
  if (value.is_array()) {
    if (value.size() != static_cast<std::size_t>(w) * h) {
      throw ConfigError("fuse params: '" + key + "' must have W*H entries");
    }
    SpatialMap out(w, h);
    for (std::size_t i = 0; i < value.size(); ++i) out.values[i] = value[i].get<double>();
    return out;
  }
  throw ConfigError("fuse params: '" + key + "' must be a number or array");
}

ChannelVector channel_from_json(const json& value, int c, const std::string& key) {
  if (value.is_number()) return ChannelVector(static_cast<std::size_t>(c), value.get<double>());
  if (value.is_array()) {
    if (value.size() != static_cast<std::size_t>(c)) {
      throw ConfigError("fuse params: '" + key + "' must have C entries");
    }
    ChannelVector out(static_cast<std::size_t>(c));
    for (std::size_t i = 0; i < value.size(); ++i) out.values[i] = value[i].get<double>();
    return out;
  }
  throw ConfigError("fuse params: '" + key + "' must be a number or array");
}

std::vector<double> weights_from_json(const json& value, std::size_t n, const std::string& key) {
  if (value.is_number()) return std::vector<double>(n, value.get<double>());
  if (value.is_array()) {
    if (value.size() != n) {
      throw ConfigError("fuse params: '" + key + "' must have " + std::to_string(n) + " entries");
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = value[i].get<double>();
    return out;
  }
  throw ConfigError("fuse params: '" + key + "' must be a number or array");
}

void cmd_fuse_check(const std::string& img_path, const std::string& rad_path,
                    const std::string& params_path, const std::string& out_path,
                    const std::string& diag_path) {
  FeatureMap f_img = read_feature_map(img_path);
  FeatureMap f_rad = read_feature_map(rad_path);

  std::ifstream in(params_path);
  if (!in) throw IoError("cannot open params file: " + params_path);
  json params;
  try {
    params = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("fuse params: " + std::string(e.what()));
  }
  std::string mode = params.value("mode", std::string("safb"));
  const int w = f_img.width(), h = f_img.height(), c = f_img.channels();

  ojson diagnostics;
  diagnostics["mode"] = mode;
  FeatureMap fused;

  if (mode == "swfb") {
    json p = params.value("swfb", json::object());
    SwfbParams sp = SwfbParams::identity(w, h, c);
    if (p.contains("img_spatial")) sp.img_spatial = spatial_from_json(p["img_spatial"], w, h, "img_spatial");
    if (p.contains("rad_spatial")) sp.rad_spatial = spatial_from_json(p["rad_spatial"], w, h, "rad_spatial");
    if (p.contains("img_channel")) sp.img_channel = channel_from_json(p["img_channel"], c, "img_channel");
    if (p.contains("rad_channel")) sp.rad_channel = channel_from_json(p["rad_channel"], c, "rad_channel");
    fused = swfb(f_img, f_rad, sp);
  } else if (mode == "safb") {
    json p = params.value("safb", json::object());
    int reduction = p.value("reduction", 4);
    int kernel_size = p.value("kernel_size", 7);
    SafbParams sp = SafbParams::neutral(w, h, c, reduction, kernel_size);
    if (p.contains("fc1_w")) sp.channel.fc1.w = weights_from_json(p["fc1_w"], sp.channel.fc1.w.size(), "fc1_w");
    if (p.contains("fc1_b")) sp.channel.fc1.b = weights_from_json(p["fc1_b"], sp.channel.fc1.b.size(), "fc1_b");
    if (p.contains("fc2_w")) sp.channel.fc2.w = weights_from_json(p["fc2_w"], sp.channel.fc2.w.size(), "fc2_w");
    if (p.contains("fc2_b")) sp.channel.fc2.b = weights_from_json(p["fc2_b"], sp.channel.fc2.b.size(), "fc2_b");
    if (p.contains("conv")) sp.spatial.kernel.w = weights_from_json(p["conv"], sp.spatial.kernel.w.size(), "conv");
    if (p.contains("extra_channel")) sp.channel.extra_weight = channel_from_json(p["extra_channel"], c, "extra_channel");
    if (p.contains("extra_spatial")) sp.spatial.extra_weight = spatial_from_json(p["extra_spatial"], w, h, "extra_spatial");
    FusionOutput out = safb(f_img, f_rad, sp);
    fused = std::move(out.fused);
    diagnostics["w_c"] = out.diagnostics.w_channel.values;
    diagnostics["w_s"] = ojson{{"width", w}, {"height", h}, {"values", out.diagnostics.w_spatial.values}};
    diagnostics["w_sim"] = ojson{{"width", w}, {"height", h}, {"values", out.diagnostics.w_similarity.values}};
  } else if (mode == "add" || mode == "mul" || mode == "concat") {
    BaselineFusion bf = mode == "add" ? BaselineFusion::add
                                      : (mode == "mul" ? BaselineFusion::mul : BaselineFusion::concat);
    fused = baseline_fuse(bf, f_img, f_rad);
  } else {
    throw ConfigError("fuse params: unknown mode '" + mode + "'");
  }

  write_feature_map(fused, out_path);
  diagnostics["fused"] = ojson{{"width", fused.width()}, {"height", fused.height()}, {"channels", fused.channels()}};
  if (!diag_path.empty()) write_text_file(diag_path, diagnostics.dump(2) + "\n");
  std::cout << "fused " << img_path << " + " << rad_path << " (" << mode << ") -> " << out_path
            << "\n";
}

// ---- convert -------------------------------------------------------------

void cmd_convert(const std::string& input, const std::string& out_path,
                 const std::string& image_root) {
  std::ifstream in(input);
  if (!in) throw IoError("cannot open export file: " + input);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("export file: " + std::string(e.what()));
  }
  const json& samples = root.is_array() ? root : root.value("samples", json::array());
  if (!samples.is_array() || samples.empty()) {
    throw ParseError("export file: expected a non-empty array of samples");
  }

  RadarDomains domains;
  SceneSet scenes;
  std::size_t dropped_points = 0;
  std::size_t index = 0;
  for (const json& s : samples) {
    Frame frame;
    frame.id = s.value("token", "sample_" + std::to_string(index));
    const json& intrinsic = s.at("cam_intrinsic");
    frame.calibration.fx = intrinsic.at(0).at(0).get<double>();
    frame.calibration.fy = intrinsic.at(1).at(1).get<double>();
    frame.calibration.cx = intrinsic.at(0).at(2).get<double>();
    frame.calibration.cy = intrinsic.at(1).at(2).get<double>();
    frame.calibration.image_width = s.at("width").get<int>();
    frame.calibration.image_height = s.at("height").get<int>();
    std::array<double, 16> ext{};
    const json& t = s.at("T_radar_to_cam");
    if (t.is_array() && t.size() == 16) {
      for (std::size_t i = 0; i < 16; ++i) ext[i] = t.at(i).get<double>();
    } else if (t.is_array() && t.size() == 4) {
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t col = 0; col < 4; ++col) ext[r * 4 + col] = t.at(r).at(col).get<double>();
    } else {
      throw ParseError("sample " + std::to_string(index) + ": bad T_radar_to_cam");
    }
    frame.calibration.extrinsic = Mat4::from_row_major(ext);

    std::string image_ref = s.at("image").get<std::string>();
    if (image_ref.rfind("data:image/png;base64,", 0) == 0) {
      frame.image_source = ImageSource::from_png_bytes(
          base64_decode(image_ref.substr(std::strlen("data:image/png;base64,"))));
    } else {
      frame.image_source = ImageSource::from_path(image_ref, image_root);
    }

    for (const json& p : s.value("radar", json::array())) {
      RadarPoint point;
      point.x = p.at(0).get<double>();
      point.y = p.at(1).get<double>();
      point.z = p.size() > 2 ? p.at(2).get<double>() : 0.0;
      point.vx = p.size() > 3 ? p.at(3).get<double>() : 0.0;
      point.vy = p.size() > 4 ? p.at(4).get<double>() : 0.0;
      point.rcs = p.size() > 5 ? p.at(5).get<double>() : 0.0;
      try {
        validate(point, domains);
        frame.radar_points.push_back(point);
      } catch (const ValidationError&) {
        ++dropped_points;  // out-of-domain detections are skipped
      }
    }
    for (const json& a : s.value("anns", json::array())) {
      Box2D box;
      const json& bbox = a.at("bbox");
      box.x1 = bbox.at(0).get<double>();
      box.y1 = bbox.at(1).get<double>();
      box.x2 = bbox.at(2).get<double>();
      box.y2 = bbox.at(3).get<double>();
      box.class_id = a.value("category_id", 0);
      if (a.contains("height")) box.box3d_height = a["height"].get<double>();
      try {
        validate_and_clip(box, frame.calibration.image_width, frame.calibration.image_height);
        frame.boxes.push_back(box);
      } catch (const ValidationError&) {
        // degenerate after clipping; skip
      }
    }
    if (auto tag = tag_from_string(s.value("scene_tag", "day"))) frame.tag = *tag;
    validate(frame, domains);
    scenes.frames.push_back(std::move(frame));
    ++index;
  }
  scenes.meta["generator"] = "rfk-convert";
  scenes.meta["source"] = input;
  write_scene_set(scenes, out_path);
  std::cout << "converted " << scenes.frames.size() << " frames (" << dropped_points
            << " out-of-domain points dropped) to " << out_path << "\n";
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"radar-camera alignment and fusion kernel toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene set");
  SynthOpts synth_opts;
  synth->add_option("--out", synth_opts.out_path, "Output scene-set JSON")->required();
  synth->add_option("--seed", synth_opts.seed, "RNG seed");
  synth->add_option("--frames", synth_opts.config.frame_count, "Frame count");
  synth->add_option("--objects-min", synth_opts.config.min_objects, "Min objects per frame");
  synth->add_option("--objects-max", synth_opts.config.max_objects, "Max objects per frame");
  synth->add_option("--points-min", synth_opts.config.min_points_per_object, "Min points per object");
  synth->add_option("--points-max", synth_opts.config.max_points_per_object, "Max points per object");
  synth->add_option("--clutter-rate", synth_opts.config.clutter_rate, "Expected clutter points per frame");
  synth->add_option("--height-min", synth_opts.config.height_min, "Min object height, meters");
  synth->add_option("--height-max", synth_opts.config.height_max, "Max object height, meters");
  synth->add_option("--correlation", synth_opts.config.rcs_height_correlation,
                    "RCS-height correlation in [0, 1]");
  synth->add_option("--image-width", synth_opts.config.image_width, "Image width, pixels");
  synth->add_option("--image-height", synth_opts.config.image_height, "Image height, pixels");
  synth->add_option("--focal", synth_opts.config.focal, "Focal length, pixels");
  synth->add_option("--camera-height", synth_opts.config.camera_height, "Camera height, meters");
  synth->callback([&] { cmd_synth(synth_opts); });

  // rasterize
  auto* rasterize = app.add_subcommand("rasterize", "Project, extend and rasterize a scene set");
  std::string ras_input, ras_out;
  bool ras_png = false;
  CommonOpts ras_opts;
  rasterize->add_option("--input", ras_input, "Scene-set JSON")->required();
  rasterize->add_option("--out", ras_out, "Output directory")->required();
  rasterize->add_flag("--png-export", ras_png, "Also write per-channel 16-bit PNGs");
  CommonOptionPtrs ras_ptrs = add_common_options(rasterize, ras_opts);
  rasterize->callback([&] {
    apply_config_file(load_config_file(ras_opts.config_file), ras_ptrs, ras_opts);
    int threads = resolve_threads(ras_ptrs.threads, ras_opts.threads);
    cmd_rasterize(ras_input, ras_out, build_preprocess(ras_opts), ras_opts.resize, threads,
                  ras_png);
  });

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Alignment metrics for preprocessing variants");
  std::string met_input, met_out, met_variants = "fh,ah,ah+ae,ah+aue";
  CommonOpts met_opts;
  metrics->add_option("--input", met_input, "Scene-set JSON")->required();
  metrics->add_option("--out", met_out, "Output directory")->required();
  metrics->add_option("--variants", met_variants, "Comma-separated variant list");
  CommonOptionPtrs met_ptrs = add_common_options(metrics, met_opts);
  metrics->callback([&] {
    apply_config_file(load_config_file(met_opts.config_file), met_ptrs, met_opts);
    int threads = resolve_threads(met_ptrs.threads, met_opts.threads);
    std::vector<std::string> variants;
    std::stringstream ss(met_variants);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) variants.push_back(item);
    }
    cmd_metrics(met_input, met_out, variants, build_preprocess(met_opts), met_opts.resize,
                threads);
  });

  // fuse-check
  auto* fuse = app.add_subcommand("fuse-check", "Run a fusion block on FMAP fixtures");
  std::string fuse_img, fuse_rad, fuse_params, fuse_out, fuse_diag;
  fuse->add_option("--img", fuse_img, "Image feature map (FMAP)")->required();
  fuse->add_option("--rad", fuse_rad, "Radar feature map (FMAP)")->required();
  fuse->add_option("--params", fuse_params, "Fusion parameter JSON")->required();
  fuse->add_option("--out", fuse_out, "Fused output (FMAP)")->required();
  fuse->add_option("--diagnostics", fuse_diag, "Diagnostics JSON (W_c, W_s, W_sim)");
  fuse->callback([&] { cmd_fuse_check(fuse_img, fuse_rad, fuse_params, fuse_out, fuse_diag); });

  // report
  auto* report = app.add_subcommand("report", "Merge metrics reports into a plot-ready CSV");
  std::vector<std::string> report_inputs;
  std::string report_out;
  report->add_option("inputs", report_inputs, "metrics.json files")->required();
  report->add_option("--out", report_out, "Output CSV")->required();
  report->callback([&] { cmd_report(report_inputs, report_out); });

  // convert
  auto* convert = app.add_subcommand("convert", "Convert an export JSON into the scene-set format");
  std::string conv_input, conv_out, conv_root;
  convert->add_option("--input", conv_input, "Export JSON")->required();
  convert->add_option("--out", conv_out, "Output scene-set JSON")->required();
  convert->add_option("--image-root", conv_root, "Directory image paths are relative to");
  convert->callback([&] { cmd_convert(conv_input, conv_out, conv_root); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("rfk");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace rfk::cli
