#include "mscm/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace mscm {

std::string to_string(CandidateSource source) {
  return source == CandidateSource::hough ? "hough" : "iva";
}

LineCandidate::LineCandidate(double y, double alpha, double score, CandidateSource source, int scale)
    : y_(y), alpha_(alpha), score_(score), source_(source), scale_(scale) {
  if (!std::isfinite(y) || !std::isfinite(alpha) || !(std::abs(alpha) < kPi / 2))
    throw std::invalid_argument("LineCandidate: horizon angle must satisfy |alpha| < pi/2");
  if (!std::isfinite(score) || score < 0.0) throw std::invalid_argument("LineCandidate: score must be non-negative");
}

double LineCandidate::row_at(double x, int image_width) const {
  return y_ + std::tan(alpha_) * (x - (image_width - 1) / 2.0);
}

LineCandidate LineCandidate::with_score(double score) const {
  return LineCandidate(y_, alpha_, score, source_, scale_);
}

std::optional<LineCandidate> rho_theta_to_candidate(double rho, double theta, int image_width, int image_height,
                                                    double votes, double alpha_max, int scale) {
  const double alpha = theta - kPi / 2;
  const double sin_theta = std::sin(theta);
  if (!(std::abs(alpha) < alpha_max) || std::abs(sin_theta) < 1e-12) return std::nullopt;
  const double center_x = (image_width - 1) / 2.0;
  // cos(pi/2) is not exactly zero; absorb that noise at the top row.
  const double y = (rho - center_x * std::cos(theta)) / sin_theta;
  if (!(y > -1e-9 && y < image_height)) return std::nullopt;
  return LineCandidate(std::max(y, 0.0), alpha, votes, CandidateSource::hough, scale);
}

RhoTheta candidate_to_rho_theta(const LineCandidate& candidate, int image_width) {
  const double theta = candidate.alpha() + kPi / 2;
  const double center_x = (image_width - 1) / 2.0;
  return {center_x * std::cos(theta) + candidate.y() * std::sin(theta), theta};
}

}  // namespace mscm
