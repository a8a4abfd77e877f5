#pragma once

#include "mscm/fusion.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mscm {

struct GroundTruthEntry {
  std::string video_id;
  int frame_idx = 0;
  double y = 0.0;          // pixels
  double alpha_deg = 0.0;  // degrees
};

class GroundTruthError : public std::runtime_error {
 public:
  GroundTruthError(const std::string& source, int line, const std::string& what);
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// CSV with header `video_id,frame_idx,Y_px,alpha_deg`. Rejects malformed
/// rows, Y < 0, |alpha| >= 90 and duplicate (video_id, frame_idx) keys.
std::vector<GroundTruthEntry> parse_ground_truth(std::istream& in, const std::string& source = "<gt>");
std::vector<GroundTruthEntry> load_ground_truth(const std::filesystem::path& path);
void write_ground_truth(std::span<const GroundTruthEntry> entries, const std::filesystem::path& path);

/// Distance between two line orientations in degrees, in [0, 90].
double line_angle_difference_deg(double a_deg, double b_deg);

struct FrameError {
  double y_px;
  double alpha_deg;
};

FrameError frame_error(double y, double alpha_deg, const GroundTruthEntry& truth);
FrameError frame_error(const Detection& detection, const GroundTruthEntry& truth);

struct EvalRecord {
  std::string video_id;
  int frame_idx = 0;
  std::optional<double> y;
  std::optional<double> alpha_deg;
  std::optional<FrameError> error;

  bool detected() const { return error.has_value(); }

  static EvalRecord detected_frame(const GroundTruthEntry& truth, double y, double alpha_deg);
  static EvalRecord missed_frame(const GroundTruthEntry& truth);
};

/// Mean of the middle pair for even counts.
std::optional<double> median(std::vector<double> values);

struct VideoSummary {
  std::string video_id;
  int frames = 0;
  int failures = 0;
  std::optional<double> median_err_y;
  std::optional<double> median_err_alpha;
};

/// Per-video rows sorted by video_id, plus a total over all frames. Failed
/// frames are counted and excluded from the medians; the total median is taken
/// over the pooled per-frame errors.
struct Summary {
  std::vector<VideoSummary> videos;
  VideoSummary total{"Total", 0, 0, std::nullopt, std::nullopt};
};

Summary summarize(std::span<const EvalRecord> records);

/// counts[k] holds errors in [k * bin_width, (k + 1) * bin_width).
struct Histogram {
  double bin_width = 1.0;
  std::vector<int> counts;

  int total() const;
};

Histogram histogram(std::span<const double> errors, double bin_width);

/// Fraction of values <= threshold; 0 for an empty set.
double fraction_within(std::span<const double> values, double threshold);

struct ErrorHistograms {
  Histogram y;
  Histogram alpha;
  Histogram y_zoom;
  Histogram alpha_zoom;
  double within_10px = 0.0;
  double within_1deg = 0.0;
  int detected = 0;
};

ErrorHistograms histograms(std::span<const EvalRecord> records, double bin_y = 40.0, double bin_alpha = 5.0,
                           double zoom_bin_y = 2.0, double zoom_bin_alpha = 0.2);

std::string report_json(const Summary& summary, const ErrorHistograms& hist, int warnings = 0);
std::string report_csv(const Summary& summary);

/// Writes `<stem>.json` and `<stem>.csv` next to each other.
void write_report(const Summary& summary, const ErrorHistograms& hist, const std::filesystem::path& stem,
                  int warnings = 0);

}  // namespace mscm
