#pragma once

#include <numbers>
#include <optional>
#include <string>

namespace mscm {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

enum class CandidateSource { hough, iva };

std::string to_string(CandidateSource source);

/// Horizon hypothesis.
///
/// `y` is the row at which the line crosses the vertical centerline
/// x = (W - 1) / 2, measured downward from the top edge. `alpha` is the angle
/// between the line's normal pointing into the sea (downward) and the +y axis,
/// so that the line's slope dy/dx equals tan(alpha). A horizon is never
/// vertical: construction rejects |alpha| >= pi/2.
class LineCandidate {
 public:
  LineCandidate(double y, double alpha, double score, CandidateSource source, int scale);

  double y() const { return y_; }
  double alpha() const { return alpha_; }
  double alpha_deg() const { return rad_to_deg(alpha_); }
  double score() const { return score_; }
  CandidateSource source() const { return source_; }
  int scale() const { return scale_; }

  /// Row of the line at column x.
  double row_at(double x, int image_width) const;

  LineCandidate with_score(double score) const;

  friend bool operator==(const LineCandidate&, const LineCandidate&) = default;

 private:
  double y_;
  double alpha_;
  double score_;
  CandidateSource source_;
  int scale_;
};

struct RhoTheta {
  double rho;
  double theta;
};

/// Converts a Hough line rho = x cos(theta) + y sin(theta) into horizon
/// parameters. Returns nothing when the line cannot be a horizon: |alpha| at or
/// beyond alpha_max, or the centerline crossing outside [0, image_height).
std::optional<LineCandidate> rho_theta_to_candidate(double rho, double theta, int image_width, int image_height,
                                                    double votes, double alpha_max = deg_to_rad(45.0),
                                                    int scale = 0);

RhoTheta candidate_to_rho_theta(const LineCandidate& candidate, int image_width);

}  // namespace mscm
