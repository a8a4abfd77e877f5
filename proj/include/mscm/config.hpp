#pragma once

#include "mscm/geometry.hpp"
#include "mscm/image.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mscm {

std::vector<int> scale_range(int first, int last);

struct CannyConfig {
  double sigma = 1.4;
  // High threshold is this percentile of the nonzero gradient magnitudes.
  double high_percentile = 0.9;
  double low_ratio = 0.4;

  void validate() const;
};

struct HoughConfig {
  int theta_bins = 180;
  double rho_resolution = 1.0;
  int top_k = 10;
  int nms_radius = 2;
  std::vector<int> scales = scale_range(1, 10);
};

struct IvaConfig {
  std::vector<int> scales = scale_range(1, 10);
};

struct DetectorConfig {
  int s_max = 10;
  GrayConversion gray = GrayConversion::rec601;
  CannyConfig canny;
  HoughConfig hough;
  IvaConfig iva;
  double alpha_max_deg = 45.0;
  // Emit the best single-branch candidate when the other branch is empty.
  bool fallback = false;

  double alpha_max() const { return deg_to_rad(alpha_max_deg); }
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses flat `key = value` lines; '#' starts a comment. Unknown keys, bad
/// values and duplicate keys raise ConfigError. Scale lists accept comma
/// separated entries and inclusive ranges, e.g. "1-10" or "1,3,5-7".
DetectorConfig parse_config(std::string_view text, const std::string& source = "<config>");
DetectorConfig load_config(const std::filesystem::path& path);

/// Renders every key, so that parse_config(to_config_text(c)) == c.
std::string to_config_text(const DetectorConfig& config);

}  // namespace mscm
