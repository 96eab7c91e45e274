#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rfk/extension.hpp"
#include "rfk/metrics.hpp"
#include "rfk/raster.hpp"
#include "rfk/scene.hpp"

namespace rfk {

// One preprocessing variant: a height strategy plus an azimuth strategy.
struct PreprocessConfig {
  HeightParams height;
  AzimuthParams azimuth;
  double projection_margin = 0.0;
};

// Variant names follow the ablation axis: "fh", "ah", "fh+ae", "ah+aue", ...
std::string variant_name(const PreprocessConfig& config);
PreprocessConfig parse_variant(const std::string& name, const PreprocessConfig& base);

// Copies dataset statistics into the adaptive-height parameters.
PreprocessConfig with_stats(PreprocessConfig config, const DatasetStats& stats);

std::vector<ExtendedDetection> extend_frame(const Frame& frame, const PreprocessConfig& config);

RadarRaster rasterize_frame(const Frame& frame, const PreprocessConfig& config);

// Runs fn over [0, count) on `workers` threads (1 = inline). Results are
// gathered by index, so the output does not depend on scheduling.
void parallel_for_index(std::size_t count, int workers,
                        const std::function<void(std::size_t)>& fn);

struct FrameRasterResult {
  std::string frame_id;
  std::uint64_t content_hash = 0;  // content_hash64 of the serialized raster
  std::size_t occupied = 0;
};

// Rasterizes every frame (optionally writing one RRAS file per frame into
// output_dir) and returns per-frame content hashes in frame order.
std::vector<FrameRasterResult> rasterize_scene_set(const SceneSet& scenes,
                                                   const PreprocessConfig& config, int workers,
                                                   const std::string& output_dir = {},
                                                   bool png_export = false);

struct FrameMetricsRow {
  std::string frame_id;
  ConditionTag tag = ConditionTag::day;
  std::size_t n_total = 0;
  std::size_t n_inside = 0;
  double mse = 0.0;
  bool empty = false;
  double mean_height_error = 0.0;
  std::size_t detection_count = 0;
};

struct TagSummary {
  std::string tag;  // "all", "day", "night", "rain"
  DistributionSummary mse;        // over frames with occupied pixels
  DistributionSummary height_error;  // over frames with detections
  std::size_t empty_frames = 0;
  std::size_t frame_count = 0;
};

struct VariantReport {
  std::string variant;
  std::vector<FrameMetricsRow> rows;
  std::vector<TagSummary> summaries;
};

VariantReport run_metrics_variant(const SceneSet& scenes, const PreprocessConfig& config,
                                  int workers);

}  // namespace rfk
