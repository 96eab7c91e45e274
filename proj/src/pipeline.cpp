#include "rfk/pipeline.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "rfk/errors.hpp"
#include "rfk/hash.hpp"
#include "rfk/png_io.hpp"
#include "rfk/raster_io.hpp"

namespace rfk {

std::string variant_name(const PreprocessConfig& config) {
  std::string name = config.height.mode == HeightMode::fixed ? "fh" : "ah";
  switch (config.azimuth.mode) {
    case AzimuthMode::none:
      break;
    case AzimuthMode::ae:
      name += "+ae";
      break;
    case AzimuthMode::aue:
      name += "+aue";
      break;
  }
  return name;
}

PreprocessConfig parse_variant(const std::string& name, const PreprocessConfig& base) {
  PreprocessConfig out = base;
  std::string height = name;
  std::string azimuth = "none";
  if (auto pos = name.find('+'); pos != std::string::npos) {
    height = name.substr(0, pos);
    azimuth = name.substr(pos + 1);
  }
  if (height == "fh") {
    out.height.mode = HeightMode::fixed;
  } else if (height == "ah") {
    out.height.mode = HeightMode::adaptive;
  } else {
    throw ConfigError("unknown height mode in variant '" + name + "'");
  }
  if (azimuth == "none") {
    out.azimuth.mode = AzimuthMode::none;
  } else if (azimuth == "ae") {
    out.azimuth.mode = AzimuthMode::ae;
  } else if (azimuth == "aue") {
    out.azimuth.mode = AzimuthMode::aue;
  } else {
    throw ConfigError("unknown azimuth mode in variant '" + name + "'");
  }
  return out;
}

PreprocessConfig with_stats(PreprocessConfig config, const DatasetStats& stats) {
  config.height.ah.stats = stats;
  return config;
}

std::vector<ExtendedDetection> extend_frame(const Frame& frame, const PreprocessConfig& config) {
  validate(config.height);
  validate(config.azimuth);
  std::vector<ExtendedDetection> detections;
  std::vector<ProjectedPoint> projected = project_frame(frame, config.projection_margin);
  detections.reserve(projected.size());
  for (const ProjectedPoint& p : projected) {
    const RadarPoint& raw = frame.radar_points[static_cast<std::size_t>(p.source_index)];
    detections.push_back(extend(p, config.height, config.azimuth, frame.calibration, raw));
  }
  return detections;
}

RadarRaster rasterize_frame(const Frame& frame, const PreprocessConfig& config) {
  return rasterize(frame, extend_frame(frame, config));
}

void parallel_for_index(std::size_t count, int workers,
                        const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw ConfigError("worker count must be >= 1");
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<FrameRasterResult> rasterize_scene_set(const SceneSet& scenes,
                                                   const PreprocessConfig& config, int workers,
                                                   const std::string& output_dir,
                                                   bool png_export) {
  std::vector<FrameRasterResult> results(scenes.frames.size());
  parallel_for_index(scenes.frames.size(), workers, [&](std::size_t i) {
    // One scratch and byte buffer per worker thread; frames reuse them.
    thread_local RasterScratch scratch;
    thread_local std::vector<std::uint8_t> bytes;
    const Frame& frame = scenes.frames[i];
    const RadarRaster& raster = scratch.rasterize(frame, extend_frame(frame, config));
    serialize_raster_into(raster, bytes);
    FrameRasterResult& r = results[i];
    r.frame_id = frame.id;
    r.content_hash = content_hash64(bytes.data(), bytes.size());
    r.occupied = raster.occupied_count();
    if (!output_dir.empty()) {
      std::filesystem::path base = std::filesystem::path(output_dir) / (frame.id + ".rras");
      write_binary_file(base.string(), bytes.data(), bytes.size());
      if (png_export) export_raster_pngs(raster, (std::filesystem::path(output_dir) / frame.id).string());
    }
  });
  return results;
}

namespace {

TagSummary summarize_rows(const std::string& tag, const std::vector<FrameMetricsRow>& rows) {
  TagSummary out;
  out.tag = tag;
  std::vector<double> mse_values;
  std::vector<double> dh_values;
  for (const FrameMetricsRow& row : rows) {
    if (tag != "all" && to_string(row.tag) != tag) continue;
    ++out.frame_count;
    if (row.empty) {
      ++out.empty_frames;
    } else {
      mse_values.push_back(row.mse);
    }
    if (row.detection_count > 0) dh_values.push_back(row.mean_height_error);
  }
  if (!mse_values.empty()) out.mse = summarize(std::move(mse_values));
  if (!dh_values.empty()) out.height_error = summarize(std::move(dh_values));
  return out;
}

}  // namespace

VariantReport run_metrics_variant(const SceneSet& scenes, const PreprocessConfig& config,
                                  int workers) {
  VariantReport report;
  report.variant = variant_name(config);
  report.rows.resize(scenes.frames.size());
  parallel_for_index(scenes.frames.size(), workers, [&](std::size_t i) {
    thread_local RasterScratch scratch;
    const Frame& frame = scenes.frames[i];
    std::vector<ExtendedDetection> detections = extend_frame(frame, config);
    const RadarRaster& raster = scratch.rasterize(frame, detections);
    FrameMse mse = projection_mse(raster, frame.boxes, frame.id);
    FrameHeightError dh = height_error(frame, detections);
    FrameMetricsRow& row = report.rows[i];
    row.frame_id = frame.id;
    row.tag = frame.tag;
    row.n_total = mse.n_total;
    row.n_inside = mse.n_inside;
    row.mse = mse.mse;
    row.empty = mse.empty;
    row.mean_height_error = dh.mean;
    row.detection_count = dh.per_point.size();
  });

  report.summaries.push_back(summarize_rows("all", report.rows));
  for (const char* tag : {"day", "night", "rain"}) {
    TagSummary s = summarize_rows(tag, report.rows);
    if (s.frame_count > 0) report.summaries.push_back(std::move(s));
  }
  return report;
}

}  // namespace rfk
