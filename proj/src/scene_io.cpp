#include "rfk/scene_io.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "rfk/base64.hpp"
#include "rfk/errors.hpp"

namespace rfk {

namespace {

using json = nlohmann::ordered_json;
using ojson = nlohmann::ordered_json;

constexpr const char* kDataUriPrefix = "data:image/png;base64,";

double get_number(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(ctx + ": missing field '" + key + "'");
  if (!it->is_number()) throw ParseError(ctx + ": field '" + key + "' is not a number");
  return it->get<double>();
}

double get_number_or(const json& obj, const char* key, double fallback, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw ParseError(ctx + ": field '" + key + "' is not a number");
  return it->get<double>();
}

int get_integer(const json& obj, const char* key, const std::string& ctx) {
  double v = get_number(obj, key, ctx);
  double rounded = std::nearbyint(v);
  if (!std::isfinite(v) || std::abs(v - rounded) > 1e-9) {
    throw ParseError(ctx + ": field '" + key + "' is not an integer");
  }
  return static_cast<int>(rounded);
}

CameraCalibration parse_calibration(const json& obj, const std::string& ctx) {
  if (!obj.is_object()) throw ParseError(ctx + ": calibration is not an object");
  CameraCalibration cal;
  cal.fx = get_number(obj, "fx", ctx);
  cal.fy = get_number(obj, "fy", ctx);
  cal.cx = get_number(obj, "cx", ctx);
  cal.cy = get_number(obj, "cy", ctx);
  cal.image_width = get_integer(obj, "width", ctx);
  cal.image_height = get_integer(obj, "height", ctx);
  auto it = obj.find("extrinsic");
  if (it == obj.end() || !it->is_array() || it->size() != 16) {
    throw ParseError(ctx + ": 'extrinsic' must be an array of 16 numbers");
  }
  std::array<double, 16> values{};
  for (std::size_t i = 0; i < 16; ++i) {
    if (!(*it)[i].is_number()) throw ParseError(ctx + ": extrinsic entry is not a number");
    values[i] = (*it)[i].get<double>();
  }
  cal.extrinsic = Mat4::from_row_major(values);
  return cal;
}

Frame parse_frame(const json& obj, const std::string& base_dir, const RadarDomains& domains,
                  std::size_t index) {
  std::string ctx = "frame " + std::to_string(index);
  if (!obj.is_object()) throw ParseError(ctx + ": not an object");
  Frame frame;
  if (auto it = obj.find("id"); it != obj.end() && it->is_string()) {
    frame.id = it->get<std::string>();
    ctx = "frame " + std::to_string(index) + " ('" + frame.id + "')";
  } else {
    throw ParseError(ctx + ": missing string field 'id'");
  }

  auto cal_it = obj.find("calibration");
  if (cal_it == obj.end()) throw ParseError(ctx + ": missing 'calibration'");
  frame.calibration = parse_calibration(*cal_it, ctx + ": calibration");

  auto img_it = obj.find("image");
  if (img_it == obj.end() || !img_it->is_string()) {
    throw ParseError(ctx + ": missing string field 'image'");
  }
  std::string image_ref = img_it->get<std::string>();
  try {
    if (image_ref.rfind(kDataUriPrefix, 0) == 0) {
      frame.image_source =
          ImageSource::from_png_bytes(base64_decode(image_ref.substr(std::strlen(kDataUriPrefix))));
    } else {
      frame.image_source = ImageSource::from_path(image_ref, base_dir);
    }
  } catch (const IoError& e) {
    throw IoError(ctx + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(ctx + ": image: " + e.what());
  }

  if (auto it = obj.find("radar"); it != obj.end()) {
    if (!it->is_array()) throw ParseError(ctx + ": 'radar' must be an array");
    frame.radar_points.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& p = (*it)[i];
      std::string pctx = ctx + " radar[" + std::to_string(i) + "]";
      if (!p.is_object()) throw ParseError(pctx + ": not an object");
      RadarPoint point;
      point.x = get_number(p, "x", pctx);
      point.y = get_number(p, "y", pctx);
      point.z = get_number_or(p, "z", 0.0, pctx);
      point.vx = get_number(p, "vx", pctx);
      point.vy = get_number(p, "vy", pctx);
      point.rcs = get_number(p, "rcs", pctx);
      frame.radar_points.push_back(point);
    }
  }

  if (auto it = obj.find("boxes"); it != obj.end()) {
    if (!it->is_array()) throw ParseError(ctx + ": 'boxes' must be an array");
    frame.boxes.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& b = (*it)[i];
      std::string bctx = ctx + " boxes[" + std::to_string(i) + "]";
      if (!b.is_object()) throw ParseError(bctx + ": not an object");
      Box2D box;
      box.x1 = get_number(b, "x1", bctx);
      box.y1 = get_number(b, "y1", bctx);
      box.x2 = get_number(b, "x2", bctx);
      box.y2 = get_number(b, "y2", bctx);
      if (b.contains("class") && !b["class"].is_null()) box.class_id = get_integer(b, "class", bctx);
      if (b.contains("h3d") && !b["h3d"].is_null()) box.box3d_height = get_number(b, "h3d", bctx);
      try {
        validate_and_clip(box, frame.calibration.image_width, frame.calibration.image_height);
      } catch (const ValidationError& e) {
        throw ValidationError(bctx + ": " + e.what());
      }
      frame.boxes.push_back(box);
    }
  }

  if (auto it = obj.find("tag"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError(ctx + ": 'tag' must be a string");
    auto tag = tag_from_string(it->get<std::string>());
    if (!tag) throw ValidationError(ctx + ": unknown tag '" + it->get<std::string>() + "'");
    frame.tag = *tag;
  }

  try {
    validate(frame, domains);
  } catch (const ValidationError& e) {
    throw ValidationError("frame " + std::to_string(index) + ": " + e.what());
  }
  return frame;
}

}  // namespace

SceneSet parse_scene_set(const std::string& text, const std::string& base_dir,
                         const RadarDomains& domains) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scene set: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("scene set: top level is not an object");
  SceneSet scenes;
  scenes.domains = domains;
  if (auto it = root.find("meta"); it != root.end() && it->is_object()) {
    scenes.meta = *it;
  }
  auto frames_it = root.find("frames");
  if (frames_it == root.end() || !frames_it->is_array()) {
    throw ParseError("scene set: missing 'frames' array");
  }
  scenes.frames.reserve(frames_it->size());
  for (std::size_t i = 0; i < frames_it->size(); ++i) {
    scenes.frames.push_back(parse_frame((*frames_it)[i], base_dir, domains, i));
  }
  return scenes;
}

SceneSet load_scene_set(const std::string& path, const RadarDomains& domains) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene set: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path);
  std::string base_dir = std::filesystem::path(path).parent_path().string();
  return parse_scene_set(text, base_dir, domains);
}

std::string write_scene_set_to_string(const SceneSet& scenes) {
  ojson root;
  root["frames"] = ojson::array();
  for (const Frame& frame : scenes.frames) {
    ojson f;
    f["id"] = frame.id;
    if (frame.image_source.is_path()) {
      f["image"] = frame.image_source.path();
    } else {
      f["image"] = std::string(kDataUriPrefix) + base64_encode(frame.image_source.encoded_png());
    }
    ojson cal;
    cal["fx"] = frame.calibration.fx;
    cal["fy"] = frame.calibration.fy;
    cal["cx"] = frame.calibration.cx;
    cal["cy"] = frame.calibration.cy;
    cal["extrinsic"] = frame.calibration.extrinsic.m;
    cal["width"] = static_cast<double>(frame.calibration.image_width);
    cal["height"] = static_cast<double>(frame.calibration.image_height);
    f["calibration"] = std::move(cal);
    ojson radar = ojson::array();
    for (const RadarPoint& p : frame.radar_points) {
      radar.push_back(
          ojson{{"x", p.x}, {"y", p.y}, {"z", p.z}, {"vx", p.vx}, {"vy", p.vy}, {"rcs", p.rcs}});
    }
    f["radar"] = std::move(radar);
    ojson boxes = ojson::array();
    for (const Box2D& b : frame.boxes) {
      ojson box{{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2},
                {"class", static_cast<double>(b.class_id)}};
      if (b.box3d_height) box["h3d"] = *b.box3d_height;
      boxes.push_back(std::move(box));
    }
    f["boxes"] = std::move(boxes);
    f["tag"] = to_string(frame.tag);
    root["frames"].push_back(std::move(f));
  }
  root["meta"] = scenes.meta;
  return root.dump(2) + "\n";
}

void write_scene_set(const SceneSet& scenes, const std::string& path) {
  std::string text = write_scene_set_to_string(scenes);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create scene set: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace rfk
