#pragma once

#include "mscm/config.hpp"
#include "mscm/geometry.hpp"
#include "mscm/image.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace mscm {

/// Binary edge mask, 1 = edge pixel, same size as the source image.
struct EdgeMap {
  Raster<std::uint8_t> bits;

  int width() const { return static_cast<int>(bits.cols()); }
  int height() const { return static_cast<int>(bits.rows()); }
  std::int64_t count() const { return bits.cast<std::int64_t>().sum(); }
};

/// Gaussian smoothing, Sobel gradients, non-maximum suppression along the
/// quantised gradient direction and double-threshold hysteresis. The high
/// threshold is the configured percentile of the nonzero gradient magnitudes.
EdgeMap canny(const GrayImage& image, const CannyConfig& config = {});

/// (rho, theta) vote array. theta bin j is centred at j * pi / theta_bins,
/// covering [0, pi); rho bin i is centred at (i - offset) * rho_resolution with
/// offset = ceil(rho_max / rho_resolution) and rho_max = ceil(sqrt(W^2 + H^2)).
class HoughAccumulator {
 public:
  using Votes = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;  // rows = rho, cols = theta

  HoughAccumulator(int image_width, int image_height, int theta_bins = 180, double rho_resolution = 1.0);

  int image_width() const { return image_width_; }
  int image_height() const { return image_height_; }
  int theta_bins() const { return static_cast<int>(votes_.cols()); }
  int rho_bins() const { return static_cast<int>(votes_.rows()); }
  double rho_resolution() const { return rho_resolution_; }
  double theta_resolution() const { return kPi / theta_bins(); }
  double rho_max() const { return rho_max_; }

  double theta(int theta_bin) const { return theta_bin * theta_resolution(); }
  double rho(int rho_bin) const { return (rho_bin - rho_offset_) * rho_resolution_; }
  int rho_bin(double rho) const;

  const Votes& votes() const { return votes_; }
  Votes& votes() { return votes_; }
  std::int64_t total() const { return votes_.cast<std::int64_t>().sum(); }

 private:
  int image_width_;
  int image_height_;
  double rho_resolution_;
  double rho_max_;
  int rho_offset_;
  Votes votes_;
};

/// Every edge pixel votes once per theta bin, at the nearest rho bin.
HoughAccumulator hough_accumulate(const EdgeMap& edges, int theta_bins = 180, double rho_resolution = 1.0);

struct HoughPeak {
  int rho_bin;
  int theta_bin;
  double rho;
  double theta;
  std::int64_t votes;
};

/// Greedy peak extraction with square (Chebyshev) suppression in bin space.
/// Peaks come out in descending vote order; equal votes prefer the smaller rho
/// bin, then the smaller theta bin. Stops early once no positive bin remains.
std::vector<HoughPeak> top_candidates(const HoughAccumulator& accumulator, int k = 10, int nms_radius = 2);

/// canny -> hough_accumulate -> top_candidates -> rho_theta_to_candidate for
/// each configured scale. images[s] holds the multi-scale image I_s.
/// Candidate scores are raw accumulator votes.
std::vector<LineCandidate> hough_branch(std::span<const GrayImage> images, const DetectorConfig& config);

}  // namespace mscm
