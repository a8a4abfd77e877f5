// Batch front end: detect, eval, synth, bench.
//
// Exit codes: 0 success, 1 partial failure (some frames not detected, or eval
// warnings), 2 usage/config error, 3 I/O error.

#include "mscm/batch.hpp"
#include "mscm/config.hpp"
#include "mscm/detector.hpp"
#include "mscm/eval.hpp"
#include "mscm/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

mscm::DetectorConfig resolve_config(const std::string& path, bool fallback) {
  mscm::DetectorConfig config = path.empty() ? mscm::DetectorConfig{} : mscm::load_config(path);
  if (fallback) config.fallback = true;
  config.validate();
  return config;
}

int run_detect(const std::vector<std::string>& inputs, const std::string& config_path, const std::string& out,
               int jobs, const std::string& overlay, bool fallback) {
  const auto config = resolve_config(config_path, fallback);
  std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
  for (const auto& p : paths) {
    if (!std::filesystem::exists(p)) throw mscm::ConfigError("input does not exist: " + p.string());
  }
  const auto frames = mscm::expand_inputs(paths);
  if (frames.empty()) throw mscm::ConfigError("no input frames");

  mscm::BatchOptions options;
  options.jobs = jobs;
  if (!overlay.empty()) options.overlay_dir = overlay;
  const auto reports = mscm::detect_batch(frames, config, options);

  std::string text;
  for (const auto& r : reports) text += mscm::to_json_line(r) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw IoFailure("cannot write " + out);
  }
  const auto failed = std::count_if(reports.begin(), reports.end(),
                                    [](const mscm::FrameReport& r) { return r.status != mscm::FrameStatus::ok; });
  std::cerr << reports.size() - failed << "/" << reports.size() << " frames ok\n";
  return failed ? kExitPartial : kExitOk;
}

int run_eval(const std::string& detections_path, const std::string& gt_path, const std::string& out) {
  std::vector<mscm::FrameReport> detections;
  std::vector<mscm::GroundTruthEntry> truth;
  try {
    detections = mscm::load_detections(detections_path);
  } catch (const std::runtime_error& e) {
    throw IoFailure(e.what());
  }
  try {
    truth = mscm::load_ground_truth(gt_path);
  } catch (const mscm::GroundTruthError& e) {
    if (e.line() == 0) throw IoFailure(e.what());
    throw mscm::ConfigError(e.what());
  }
  std::vector<std::string> warnings;
  const auto records = mscm::match_detections(detections, truth, warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  const auto summary = mscm::summarize(records);
  const auto hist = mscm::histograms(records);
  try {
    mscm::write_report(summary, hist, out, static_cast<int>(warnings.size()));
  } catch (const std::runtime_error& e) {
    throw IoFailure(e.what());
  }
  std::cout << mscm::report_csv(summary);
  return warnings.empty() ? kExitOk : kExitPartial;
}

int run_synth(int n, std::uint64_t seed, const std::string& out, const mscm::SynthRanges& ranges,
              const std::string& video_id) {
  try {
    ranges.validate();
  } catch (const std::invalid_argument& e) {
    throw mscm::ConfigError(e.what());
  }
  if (n < 1) throw mscm::ConfigError("--n must be >= 1");
  try {
    const auto corpus = mscm::make_corpus(n, ranges, seed, out, video_id);
    std::cerr << "wrote " << corpus.frames.size() << " frames to " << out << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoFailure(e.what());
  } catch (const mscm::ImageIoError& e) {
    throw IoFailure(e.what());
  }
  return kExitOk;
}

int run_bench(const std::string& frame, int repetitions, const std::string& config_path) {
  if (repetitions < 1) throw mscm::ConfigError("--repetitions must be >= 1");
  const auto config = resolve_config(config_path, false);
  mscm::GrayImage image;
  try {
    image = mscm::load_gray(frame, config.gray);
  } catch (const mscm::ImageIoError& e) {
    throw IoFailure(e.what());
  }
  std::vector<double> multiscale, hough, iva, fusion, total;
  std::string status;
  for (int i = 0; i < repetitions; ++i) {
    mscm::StageTimings t;
    const auto result = mscm::detect_horizon(image, config, &t);
    status = mscm::to_string(result.status);
    multiscale.push_back(t.multiscale_ms);
    hough.push_back(t.hough_ms);
    iva.push_back(t.iva_ms);
    fusion.push_back(t.fusion_ms);
    total.push_back(t.total_ms());
  }
  nlohmann::ordered_json j;
  j["frame"] = frame;
  j["width"] = image.cols();
  j["height"] = image.rows();
  j["repetitions"] = repetitions;
  j["status"] = status;
  auto stage = [&](const char* name, const std::vector<double>& samples) {
    j["stages"][name] = {{"median_ms", *mscm::median(samples)}, {"samples_ms", samples}};
  };
  stage("multiscale", multiscale);
  stage("canny_hough", hough);
  stage("iva", iva);
  stage("fusion", fusion);
  stage("total", total);
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maritime horizon detection with multi-scale cross-modal line features"};
  app.require_subcommand(1);

  std::vector<std::string> inputs;
  std::string config_path, out, overlay;
  int jobs = mscm::default_jobs();
  bool fallback = false;
  auto* detect = app.add_subcommand("detect", "Detect the horizon in frames (files or directories)");
  detect->add_option("inputs", inputs, "Frames (PGM/PNG) or directories of frames")->required();
  detect->add_option("--config", config_path, "Detector config file (key = value)");
  detect->add_option("--out", out, "JSON-lines output path ('-' for stdout)")->default_val("-");
  detect->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  detect->add_option("--overlay", overlay, "Directory for overlay PGMs with the detected line");
  detect->add_flag("--fallback", fallback, "Report the best single-branch candidate when one branch is empty");

  std::string detections_path, gt_path, eval_out;
  auto* eval = app.add_subcommand("eval", "Score detections against ground truth");
  eval->add_option("detections", detections_path, "JSON-lines file written by detect")->required();
  eval->add_option("--gt", gt_path, "Ground-truth CSV (video_id,frame_idx,Y_px,alpha_deg)")->required();
  eval->add_option("--out", eval_out, "Report path stem; writes <stem>.json and <stem>.csv")->required();

  int n = 10;
  std::uint64_t seed = 1;
  std::string synth_out, preset = "clean", video_id;
  mscm::SynthRanges ranges;
  double y_min = -1, y_max = -1, alpha_min = 0, alpha_max = 0, noise_max = -1, occluder_prob = -1, wake_prob = -1;
  int synth_w = 0, synth_h = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth->add_option("--n", n, "Number of frames")->default_val(10);
  synth->add_option("--seed", seed, "Corpus seed")->default_val(1);
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--preset", preset, "Parameter envelope")->check(CLI::IsMember({"clean", "robust"}));
  synth->add_option("--video-id", video_id, "video_id written to the ground truth (default: directory name)");
  synth->add_option("--width", synth_w, "Frame width");
  synth->add_option("--height", synth_h, "Frame height");
  synth->add_option("--y-min", y_min, "Minimum horizon row");
  synth->add_option("--y-max", y_max, "Maximum horizon row");
  auto* a_lo = synth->add_option("--alpha-min", alpha_min, "Minimum horizon angle (degrees)");
  auto* a_hi = synth->add_option("--alpha-max", alpha_max, "Maximum horizon angle (degrees)");
  synth->add_option("--noise-max", noise_max, "Maximum noise sigma");
  synth->add_option("--occluder-prob", occluder_prob, "Probability of occluders per frame");
  synth->add_option("--wake-prob", wake_prob, "Probability of a wake per frame");

  std::string bench_frame, bench_config;
  int repetitions = 5;
  auto* bench = app.add_subcommand("bench", "Per-stage timing on one frame (single worker)");
  bench->add_option("frame", bench_frame, "Frame to time")->required();
  bench->add_option("--repetitions", repetitions, "Number of runs")->default_val(5);
  bench->add_option("--config", bench_config, "Detector config file");

  auto* config_cmd = app.add_subcommand("config", "Print the default detector config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*detect) return run_detect(inputs, config_path, out, jobs, overlay, fallback);
    if (*eval) return run_eval(detections_path, gt_path, eval_out);
    if (*synth) {
      ranges = preset == "robust" ? mscm::SynthRanges::robust() : mscm::SynthRanges::clean();
      if (synth_w > 0) ranges.width = synth_w;
      if (synth_h > 0) {
        const double scale = static_cast<double>(synth_h) / ranges.height;
        ranges.height = synth_h;
        ranges.y_true = {ranges.y_true.lo * scale, ranges.y_true.hi * scale};
      }
      if (y_min >= 0) ranges.y_true.lo = y_min;
      if (y_max >= 0) ranges.y_true.hi = y_max;
      if (a_lo->count()) ranges.alpha_deg.lo = alpha_min;
      if (a_hi->count()) ranges.alpha_deg.hi = alpha_max;
      if (noise_max >= 0) ranges.noise_sigma = {std::min(ranges.noise_sigma.lo, noise_max), noise_max};
      if (occluder_prob >= 0) ranges.occluder_probability = occluder_prob;
      if (wake_prob >= 0) ranges.wake_probability = wake_prob;
      return run_synth(n, seed, synth_out, ranges, video_id);
    }
    if (*bench) return run_bench(bench_frame, repetitions, bench_config);
    if (*config_cmd) {
      std::cout << mscm::to_config_text(mscm::DetectorConfig{});
      return kExitOk;
    }
  } catch (const mscm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
