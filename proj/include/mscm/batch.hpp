#pragma once

#include "mscm/config.hpp"
#include "mscm/detector.hpp"
#include "mscm/eval.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mscm {

/// Per-frame outcome as written to the JSON-lines detection file.
struct FrameReport {
  std::string frame;  // input path as given
  std::string video_id;
  std::optional<int> frame_idx;
  FrameStatus status = FrameStatus::no_detection;
  std::optional<double> y;
  std::optional<double> alpha_deg;
  std::optional<double> affirm;
  int n_hough = 0;
  int n_iva = 0;
  std::string message;
};

struct BatchOptions {
  int jobs = 1;
  std::optional<std::filesystem::path> overlay_dir;
};

int default_jobs();

/// Directories expand to their *.pgm and *.png files in lexicographic order;
/// plain files are kept as given.
std::vector<std::filesystem::path> expand_inputs(std::span<const std::filesystem::path> inputs);

/// video_id is the name of the frame's directory; frame_idx is the file stem
/// when it is a non-negative integer.
FrameReport detect_file(const std::filesystem::path& path, const DetectorConfig& config,
                        const std::optional<std::filesystem::path>& overlay_dir = std::nullopt);

/// Runs detect_file over a worker pool. Results keep input order and do not
/// depend on the number of workers.
std::vector<FrameReport> detect_batch(std::span<const std::filesystem::path> frames, const DetectorConfig& config,
                                      const BatchOptions& options = {});

std::string to_json_line(const FrameReport& report);

/// Inverse of to_json_line; throws std::runtime_error on malformed input.
FrameReport parse_json_line(const std::string& line);
std::vector<FrameReport> load_detections(const std::filesystem::path& path);

/// Pairs detections with ground truth by (video_id, frame_idx). Frames with a
/// non-detecting status become failure records. Unmatched entries on either
/// side are excluded and described in `warnings`.
std::vector<EvalRecord> match_detections(std::span<const FrameReport> detections,
                                         std::span<const GroundTruthEntry> truth, std::vector<std::string>& warnings);

}  // namespace mscm
