#include "mscm/eval.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mscm {

GroundTruthError::GroundTruthError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_real(const std::string& s, const std::string& source, int line, const char* column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw GroundTruthError(source, line, std::string("bad ") + column + " value '" + s + "'");
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::vector<GroundTruthEntry> parse_ground_truth(std::istream& in, const std::string& source) {
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::vector<GroundTruthEntry> entries;
  std::map<std::pair<std::string, int>, int> first_seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_csv(line);
    if (!have_header) {
      if (fields != std::vector<std::string>{"video_id", "frame_idx", "Y_px", "alpha_deg"})
        throw GroundTruthError(source, line_no, "expected header 'video_id,frame_idx,Y_px,alpha_deg'");
      have_header = true;
      continue;
    }
    if (fields.size() != 4)
      throw GroundTruthError(source, line_no, "expected 4 fields, found " + std::to_string(fields.size()));
    GroundTruthEntry e;
    e.video_id = fields[0];
    if (e.video_id.empty()) throw GroundTruthError(source, line_no, "empty video_id");
    try {
      std::size_t used = 0;
      e.frame_idx = std::stoi(fields[1], &used);
      if (used != fields[1].size() || e.frame_idx < 0) throw std::invalid_argument(fields[1]);
    } catch (const std::exception&) {
      throw GroundTruthError(source, line_no, "bad frame_idx value '" + fields[1] + "'");
    }
    e.y = parse_real(fields[2], source, line_no, "Y_px");
    e.alpha_deg = parse_real(fields[3], source, line_no, "alpha_deg");
    if (e.y < 0.0) throw GroundTruthError(source, line_no, "Y_px out of range: " + fields[2]);
    if (!(std::abs(e.alpha_deg) < 90.0))
      throw GroundTruthError(source, line_no, "alpha_deg out of range (|alpha| < 90): " + fields[3]);
    const auto [it, inserted] = first_seen.emplace(std::make_pair(e.video_id, e.frame_idx), line_no);
    if (!inserted)
      throw GroundTruthError(source, line_no,
                             "duplicate frame " + e.video_id + "/" + std::to_string(e.frame_idx) + " (lines " +
                                 std::to_string(it->second) + " and " + std::to_string(line_no) + ")");
    entries.push_back(std::move(e));
  }
  if (!have_header) throw GroundTruthError(source, line_no, "missing header");
  return entries;
}

std::vector<GroundTruthEntry> load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GroundTruthError(path.string(), 0, "cannot open file");
  return parse_ground_truth(in, path.string());
}

void write_ground_truth(std::span<const GroundTruthEntry> entries, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "video_id,frame_idx,Y_px,alpha_deg\n";
  char buf[128];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, ",%d,%.6f,%.6f\n", e.frame_idx, e.y, e.alpha_deg);
    out << e.video_id << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

double line_angle_difference_deg(double a_deg, double b_deg) {
  double d = std::fmod(a_deg - b_deg, 180.0);
  if (d < 0.0) d += 180.0;
  return std::min(d, 180.0 - d);
}

FrameError frame_error(double y, double alpha_deg, const GroundTruthEntry& truth) {
  return {std::abs(y - truth.y), line_angle_difference_deg(alpha_deg, truth.alpha_deg)};
}

FrameError frame_error(const Detection& detection, const GroundTruthEntry& truth) {
  return frame_error(detection.line.y(), detection.line.alpha_deg(), truth);
}

EvalRecord EvalRecord::detected_frame(const GroundTruthEntry& truth, double y, double alpha_deg) {
  return {truth.video_id, truth.frame_idx, y, alpha_deg, frame_error(y, alpha_deg, truth)};
}

EvalRecord EvalRecord::missed_frame(const GroundTruthEntry& truth) {
  return {truth.video_id, truth.frame_idx, std::nullopt, std::nullopt, std::nullopt};
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

Summary summarize(std::span<const EvalRecord> records) {
  struct Pool {
    int frames = 0;
    int failures = 0;
    std::vector<double> err_y, err_alpha;
  };
  auto finish = [](const std::string& id, const Pool& p) {
    return VideoSummary{id, p.frames, p.failures, median(p.err_y), median(p.err_alpha)};
  };

  std::map<std::string, Pool> per_video;
  Pool all;
  for (const auto& r : records) {
    for (Pool* p : {&per_video[r.video_id], &all}) {
      ++p->frames;
      if (r.error) {
        p->err_y.push_back(r.error->y_px);
        p->err_alpha.push_back(r.error->alpha_deg);
      } else {
        ++p->failures;
      }
    }
  }
  Summary summary;
  for (const auto& [id, pool] : per_video) summary.videos.push_back(finish(id, pool));
  summary.total = finish("Total", all);
  return summary;
}

int Histogram::total() const {
  int n = 0;
  for (int c : counts) n += c;
  return n;
}

Histogram histogram(std::span<const double> errors, double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("histogram: bin width must be > 0");
  Histogram h{bin_width, {}};
  for (double e : errors) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw std::invalid_argument("histogram: errors must be finite and >= 0");
    auto k = static_cast<std::size_t>(std::floor(e / bin_width));
    // Correct floating-point division so that boundaries land in the upper bin.
    if (static_cast<double>(k + 1) * bin_width <= e) ++k;
    if (k > 0 && static_cast<double>(k) * bin_width > e) --k;
    if (h.counts.size() <= k) h.counts.resize(k + 1, 0);
    ++h.counts[k];
  }
  return h;
}

double fraction_within(std::span<const double> values, double threshold) {
  if (values.empty()) return 0.0;
  const auto n = std::count_if(values.begin(), values.end(), [&](double v) { return v <= threshold; });
  return static_cast<double>(n) / static_cast<double>(values.size());
}

ErrorHistograms histograms(std::span<const EvalRecord> records, double bin_y, double bin_alpha, double zoom_bin_y,
                           double zoom_bin_alpha) {
  std::vector<double> ey, ea;
  for (const auto& r : records) {
    if (!r.error) continue;
    ey.push_back(r.error->y_px);
    ea.push_back(r.error->alpha_deg);
  }
  ErrorHistograms out;
  out.y = histogram(ey, bin_y);
  out.alpha = histogram(ea, bin_alpha);
  out.y_zoom = histogram(ey, zoom_bin_y);
  out.alpha_zoom = histogram(ea, zoom_bin_alpha);
  out.within_10px = fraction_within(ey, 10.0);
  out.within_1deg = fraction_within(ea, 1.0);
  out.detected = static_cast<int>(ey.size());
  return out;
}

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json to_json(const VideoSummary& v) {
  nlohmann::ordered_json j;
  j["video_id"] = v.video_id;
  j["frames"] = v.frames;
  j["failures"] = v.failures;
  j["median_err_Y_px"] = optional_number(v.median_err_y);
  j["median_err_alpha_deg"] = optional_number(v.median_err_alpha);
  return j;
}

nlohmann::ordered_json to_json(const Histogram& h) {
  nlohmann::ordered_json j;
  j["bin_width"] = h.bin_width;
  j["counts"] = h.counts;
  return j;
}

}  // namespace

std::string report_json(const Summary& summary, const ErrorHistograms& hist, int warnings) {
  nlohmann::ordered_json j;
  j["videos"] = nlohmann::ordered_json::array();
  for (const auto& v : summary.videos) j["videos"].push_back(to_json(v));
  j["total"] = to_json(summary.total);
  nlohmann::ordered_json h;
  h["detected"] = hist.detected;
  h["err_Y_px"] = to_json(hist.y);
  h["err_alpha_deg"] = to_json(hist.alpha);
  h["err_Y_px_zoom"] = to_json(hist.y_zoom);
  h["err_alpha_deg_zoom"] = to_json(hist.alpha_zoom);
  h["fraction_within_10px"] = hist.within_10px;
  h["fraction_within_1deg"] = hist.within_1deg;
  j["histograms"] = h;
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

std::string report_csv(const Summary& summary) {
  std::string out = "video_id,frames,failures,median_err_Y_px,median_err_alpha_deg\n";
  auto row = [&](const VideoSummary& v) {
    out += v.video_id + "," + std::to_string(v.frames) + "," + std::to_string(v.failures) + "," +
           (v.median_err_y ? format_number(*v.median_err_y) : "") + "," +
           (v.median_err_alpha ? format_number(*v.median_err_alpha) : "") + "\n";
  };
  for (const auto& v : summary.videos) row(v);
  row(summary.total);
  return out;
}

void write_report(const Summary& summary, const ErrorHistograms& hist, const std::filesystem::path& stem,
                  int warnings) {
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
  };
  auto json_path = stem;
  json_path += ".json";
  auto csv_path = stem;
  csv_path += ".csv";
  write(json_path, report_json(summary, hist, warnings));
  write(csv_path, report_csv(summary));
}

}  // namespace mscm
