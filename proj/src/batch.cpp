#include "mscm/batch.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <thread>

namespace mscm {

namespace {

std::optional<int> stem_index(const std::filesystem::path& path) {
  const std::string stem = path.stem().string();
  if (stem.empty() || stem.size() > 9 || !std::all_of(stem.begin(), stem.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return std::nullopt;
  return std::stoi(stem);
}

std::string directory_name(const std::filesystem::path& path) {
  return std::filesystem::absolute(path).lexically_normal().parent_path().filename().string();
}

FrameStatus parse_status(const std::string& s) {
  for (auto st : {FrameStatus::ok, FrameStatus::fallback, FrameStatus::no_detection, FrameStatus::decode_error,
                  FrameStatus::invalid_input}) {
    if (to_string(st) == s) return st;
  }
  throw std::runtime_error("unknown status '" + s + "'");
}

std::string frame_key(const std::string& video, int idx) { return video + "/" + std::to_string(idx); }

}  // namespace

int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::vector<std::filesystem::path> expand_inputs(std::span<const std::filesystem::path> inputs) {
  std::vector<std::filesystem::path> out;
  for (const auto& in : inputs) {
    if (std::filesystem::is_directory(in)) {
      std::vector<std::filesystem::path> files;
      for (const auto& entry : std::filesystem::directory_iterator(in)) {
        const auto ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".pgm" || ext == ".png")) files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

FrameReport detect_file(const std::filesystem::path& path, const DetectorConfig& config,
                        const std::optional<std::filesystem::path>& overlay_dir) {
  FrameReport report;
  report.frame = path.string();
  report.video_id = directory_name(path);
  report.frame_idx = stem_index(path);

  GrayImage image;
  try {
    image = load_gray(path, config.gray);
  } catch (const ImageIoError& e) {
    report.status = FrameStatus::decode_error;
    report.message = e.what();
    return report;
  }
  const FrameResult result = detect_horizon(image, config);
  report.status = result.status;
  report.n_hough = result.hough_count;
  report.n_iva = result.iva_count;
  report.message = result.message;
  if (result.detection) {
    report.y = result.detection->line.y();
    report.alpha_deg = result.detection->line.alpha_deg();
    report.affirm = result.detection->affirm();
    if (overlay_dir) {
      std::filesystem::create_directories(*overlay_dir);
      save_pgm(render_overlay(image, result.detection->line), *overlay_dir / (path.stem().string() + ".pgm"));
    }
  }
  return report;
}

std::vector<FrameReport> detect_batch(std::span<const std::filesystem::path> frames, const DetectorConfig& config,
                                      const BatchOptions& options) {
  config.validate();
  std::vector<FrameReport> reports(frames.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < frames.size(); i = next++) reports[i] = detect_file(frames[i], config, options.overlay_dir);
  };
  const int jobs = std::clamp<int>(options.jobs, 1, static_cast<int>(std::max<std::size_t>(frames.size(), 1)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return reports;
}

std::string to_json_line(const FrameReport& r) {
  nlohmann::ordered_json j;
  j["frame"] = r.frame;
  j["video_id"] = r.video_id;
  j["frame_idx"] = r.frame_idx ? nlohmann::ordered_json(*r.frame_idx) : nlohmann::ordered_json(nullptr);
  j["Y"] = r.y ? nlohmann::ordered_json(*r.y) : nlohmann::ordered_json(nullptr);
  j["alpha_deg"] = r.alpha_deg ? nlohmann::ordered_json(*r.alpha_deg) : nlohmann::ordered_json(nullptr);
  j["affirm"] = r.affirm ? nlohmann::ordered_json(*r.affirm) : nlohmann::ordered_json(nullptr);
  j["n_hough"] = r.n_hough;
  j["n_iva"] = r.n_iva;
  j["status"] = to_string(r.status);
  if (!r.message.empty()) j["message"] = r.message;
  return j.dump();
}

FrameReport parse_json_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  auto opt_double = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
  };
  FrameReport r;
  r.frame = j.at("frame").get<std::string>();
  r.video_id = j.value("video_id", std::string());
  if (j.contains("frame_idx") && !j["frame_idx"].is_null()) r.frame_idx = j["frame_idx"].get<int>();
  r.y = opt_double("Y");
  r.alpha_deg = opt_double("alpha_deg");
  r.affirm = opt_double("affirm");
  r.n_hough = j.value("n_hough", 0);
  r.n_iva = j.value("n_iva", 0);
  r.status = parse_status(j.at("status").get<std::string>());
  r.message = j.value("message", std::string());
  return r;
}

std::vector<FrameReport> load_detections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open detections file " + path.string());
  std::vector<FrameReport> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<EvalRecord> match_detections(std::span<const FrameReport> detections,
                                         std::span<const GroundTruthEntry> truth, std::vector<std::string>& warnings) {
  std::map<std::string, const GroundTruthEntry*> by_key;
  for (const auto& t : truth) by_key.emplace(frame_key(t.video_id, t.frame_idx), &t);

  std::map<std::string, bool> used;
  std::vector<EvalRecord> records;
  for (const auto& d : detections) {
    if (!d.frame_idx) {
      warnings.push_back("frame " + d.frame + ": no numeric frame index, excluded");
      continue;
    }
    const std::string key = frame_key(d.video_id, *d.frame_idx);
    const auto it = by_key.find(key);
    if (it == by_key.end()) {
      warnings.push_back("frame " + d.frame + " (" + key + "): no ground truth, excluded");
      continue;
    }
    if (used[key]) {
      warnings.push_back("frame " + d.frame + " (" + key + "): duplicate detection, excluded");
      continue;
    }
    used[key] = true;
    const bool detected = (d.status == FrameStatus::ok || d.status == FrameStatus::fallback) && d.y && d.alpha_deg;
    records.push_back(detected ? EvalRecord::detected_frame(*it->second, *d.y, *d.alpha_deg)
                               : EvalRecord::missed_frame(*it->second));
  }
  for (const auto& [key, entry] : by_key) {
    if (!used.count(key)) warnings.push_back("ground truth " + key + ": no detection record");
  }
  return records;
}

}  // namespace mscm
