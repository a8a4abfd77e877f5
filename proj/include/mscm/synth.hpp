#pragma once

#include "mscm/eval.hpp"
#include "mscm/image.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mscm {

/// Axis-aligned rectangle [x0, x1) x [y0, y1) painted at a flat intensity.
struct Occluder {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double intensity = 0.0;
};

/// Bright streak: pixels within width/2 of the segment, restricted to the sea.
struct Wake {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  double width = 1.0;
  double intensity = 255.0;
};

/// One synthetic maritime frame. The horizon passes through
/// (x = (W - 1) / 2, y = y_true) with slope tan(alpha_true); pixel (x, y) is sky
/// iff y is strictly above the line at column x.
struct SynthSpec {
  int width = 640;
  int height = 360;
  double y_true = 180.0;
  double alpha_true_deg = 0.0;
  double sky_top = 200.0;
  double sky_bottom = 170.0;
  double sea_mean = 80.0;
  double sea_texture_amp = 0.0;
  double noise_sigma = 0.0;
  std::vector<Occluder> occluders;
  std::optional<Wake> wake;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

struct RenderedFrame {
  GrayImage image;
  GroundTruthEntry truth;
};

/// Paints sky, sea (mean plus three fixed-frequency horizontal sinusoids with
/// seeded phases), occluders, wake, then additive Gaussian noise, in that order.
/// Fully determined by the spec including its seed.
RenderedFrame render_frame(const SynthSpec& spec);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sampling envelope for corpus generation.
struct SynthRanges {
  int width = 640;
  int height = 360;
  Range y_true{90.0, 270.0};
  Range alpha_deg{-10.0, 10.0};
  Range sky_top{170.0, 230.0};
  Range sky_bottom{140.0, 200.0};
  Range sea_mean{40.0, 100.0};
  Range texture_amp{0.0, 8.0};
  Range noise_sigma{0.0, 8.0};
  double occluder_probability = 0.0;
  int max_occluders = 3;
  double occluder_max_width_fraction = 0.3;
  Range occluder_intensity{10.0, 70.0};
  double wake_probability = 0.0;
  Range wake_length_fraction{0.2, 0.6};
  Range wake_width{3.0, 8.0};
  Range wake_intensity{220.0, 255.0};

  void validate() const;

  /// No occluders or wakes, noise up to 8.
  static SynthRanges clean();
  /// Occluders over up to 30% of the width, wakes in 10% of frames, noise up to 12.
  static SynthRanges robust();
};

/// Per-frame spec drawn from the ranges with a seed derived from (seed, index).
SynthSpec sample_spec(const SynthRanges& ranges, std::uint64_t seed, int index);

struct Corpus {
  std::vector<std::filesystem::path> frames;
  std::vector<GroundTruthEntry> truth;
  std::vector<SynthSpec> specs;
};

/// Writes <out_dir>/<index>.pgm (zero padded), ground_truth.csv and spec.json.
/// An empty video_id uses the directory name.
Corpus make_corpus(int n, const SynthRanges& ranges, std::uint64_t seed, const std::filesystem::path& out_dir,
                   std::string video_id = {});

/// Renders the same frames as make_corpus without touching the filesystem.
std::vector<RenderedFrame> render_corpus(int n, const SynthRanges& ranges, std::uint64_t seed,
                                         const std::string& video_id = "synth");

}  // namespace mscm
