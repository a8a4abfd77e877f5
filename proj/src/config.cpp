#include "mscm/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace mscm {

std::vector<int> scale_range(int first, int last) {
  std::vector<int> out;
  for (int s = first; s <= last; ++s) out.push_back(s);
  return out;
}

void CannyConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("canny.sigma must be > 0");
  if (!(high_percentile > 0.0 && high_percentile <= 1.0)) throw ConfigError("canny.high_percentile must lie in (0, 1]");
  if (!(low_ratio > 0.0 && low_ratio <= 1.0)) throw ConfigError("canny.low_ratio must lie in (0, 1]");
}

namespace {

void validate_scales(const std::vector<int>& scales, int s_max, const char* key) {
  if (scales.empty()) throw ConfigError(std::string(key) + " must name at least one scale");
  std::set<int> seen;
  for (int s : scales) {
    if (s < 0 || s > s_max)
      throw ConfigError(std::string(key) + ": scale " + std::to_string(s) + " outside 0.." + std::to_string(s_max));
    if (!seen.insert(s).second) throw ConfigError(std::string(key) + ": duplicate scale " + std::to_string(s));
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

int parse_int(const std::string& value, const std::string& key) {
  int out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(out)) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::vector<int> parse_scales(const std::string& value, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(parse_int(item, key));
    } else {
      const int a = parse_int(trim(item.substr(0, dash)), key);
      const int b = parse_int(trim(item.substr(dash + 1)), key);
      if (b < a) throw ConfigError(key + ": descending range '" + item + "'");
      for (int s = a; s <= b; ++s) out.push_back(s);
    }
  }
  return out;
}

std::string format_scales(const std::vector<int>& scales) {
  std::string out;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(scales[i]);
  }
  return out;
}

std::string format_double(double v) {
  // Shortest text that parses back to the same double.
  char buf[64];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

using Setter = std::function<void(DetectorConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"multiscale.s_max", [](DetectorConfig& c, const std::string& k, const std::string& v) { c.s_max = parse_int(v, k); }},
      {"gray.conversion",
       [](DetectorConfig& c, const std::string& k, const std::string& v) {
         try {
           c.gray = parse_gray_conversion(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(k + ": " + e.what());
         }
       }},
      {"canny.sigma", [](DetectorConfig& c, const std::string& k, const std::string& v) { c.canny.sigma = parse_double(v, k); }},
      {"canny.high_percentile",
       [](DetectorConfig& c, const std::string& k, const std::string& v) { c.canny.high_percentile = parse_double(v, k); }},
      {"canny.low_ratio",
       [](DetectorConfig& c, const std::string& k, const std::string& v) { c.canny.low_ratio = parse_double(v, k); }},
      {"hough.theta_bins",
       [](DetectorConfig& c, const std::string& k, const std::string& v) { c.hough.theta_bins = parse_int(v, k); }},
      {"hough.rho_resolution",
       [](DetectorConfig& c, const std::string& k, const std::string& v) { c.hough.rho_resolution = parse_double(v, k); }},
      {"hough.top_k", [](DetectorConfig& c, const std::string& k, const std::string& v) { c.hough.top_k = parse_int(v, k); }},
      {"hough.nms_radius",
       [](DetectorConfig& c, const std::string& k, const std::string& v) { c.hough.nms_radius = parse_int(v, k); }},
      {"hough.scales",
       [](DetectorConfig& c, const std::string& k, const std::string& v) { c.hough.scales = parse_scales(v, k); }},
      {"iva.scales", [](DetectorConfig& c, const std::string& k, const std::string& v) { c.iva.scales = parse_scales(v, k); }},
      {"candidate.alpha_max_deg",
       [](DetectorConfig& c, const std::string& k, const std::string& v) { c.alpha_max_deg = parse_double(v, k); }},
      {"fusion.fallback", [](DetectorConfig& c, const std::string& k, const std::string& v) { c.fallback = parse_bool(v, k); }},
  };
  return table;
}

}  // namespace

void DetectorConfig::validate() const {
  if (s_max < 1 || s_max > 64) throw ConfigError("multiscale.s_max must lie in 1..64");
  canny.validate();
  if (hough.theta_bins < 2 || hough.theta_bins > 36000) throw ConfigError("hough.theta_bins must lie in 2..36000");
  if (!(hough.rho_resolution > 0.0)) throw ConfigError("hough.rho_resolution must be > 0");
  if (hough.top_k < 1) throw ConfigError("hough.top_k must be >= 1");
  if (hough.nms_radius < 0) throw ConfigError("hough.nms_radius must be >= 0");
  validate_scales(hough.scales, s_max, "hough.scales");
  validate_scales(iva.scales, s_max, "iva.scales");
  if (!(alpha_max_deg > 0.0 && alpha_max_deg < 90.0)) throw ConfigError("candidate.alpha_max_deg must lie in (0, 90)");
}

DetectorConfig parse_config(std::string_view text, const std::string& source) {
  DetectorConfig config;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      it->second(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return config;
}

DetectorConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string to_config_text(const DetectorConfig& c) {
  std::ostringstream out;
  out << "multiscale.s_max = " << c.s_max << '\n'
      << "gray.conversion = " << to_string(c.gray) << '\n'
      << "canny.sigma = " << format_double(c.canny.sigma) << '\n'
      << "canny.high_percentile = " << format_double(c.canny.high_percentile) << '\n'
      << "canny.low_ratio = " << format_double(c.canny.low_ratio) << '\n'
      << "hough.theta_bins = " << c.hough.theta_bins << '\n'
      << "hough.rho_resolution = " << format_double(c.hough.rho_resolution) << '\n'
      << "hough.top_k = " << c.hough.top_k << '\n'
      << "hough.nms_radius = " << c.hough.nms_radius << '\n'
      << "hough.scales = " << format_scales(c.hough.scales) << '\n'
      << "iva.scales = " << format_scales(c.iva.scales) << '\n'
      << "candidate.alpha_max_deg = " << format_double(c.alpha_max_deg) << '\n'
      << "fusion.fallback = " << (c.fallback ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace mscm
