#pragma once

#include "mscm/geometry.hpp"

#include <Eigen/Core>

#include <span>
#include <stdexcept>

namespace mscm {

/// G(n, s) = H_n * S_s.
inline double goodness(double hough_votes, double iva_score) { return hough_votes * iva_score; }

/// P = (1 - ((Y_n - Y_s) / H)^2) * cos^2(alpha_n - alpha_s), H the frame height.
double proximity(const LineCandidate& hough, const LineCandidate& iva, double image_height);

struct PairScore {
  int hough_index = -1;
  int iva_index = -1;
  double goodness = 0.0;
  double proximity = 0.0;
  double affirm = 0.0;
};

/// Winning cross-modal pair. The reported line is always the Hough member.
struct Detection {
  LineCandidate line;
  PairScore pair;
  int hough_count = 0;
  int iva_count = 0;

  double affirm() const { return pair.affirm; }
};

class NoCandidatesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Affirm scores A(n, s) = G(n, s) P(n, s) for every pair; rows are Hough candidates.
Eigen::MatrixXd affirm_matrix(std::span<const LineCandidate> hough, std::span<const LineCandidate> iva,
                              double image_height);

/// Exhaustive argmax of the affirm score. Equal scores prefer the larger Hough
/// score, then the larger IVA score, then the smaller Hough index, then the
/// smaller IVA index. Throws NoCandidatesError if either list is empty.
Detection select_horizon(std::span<const LineCandidate> hough, std::span<const LineCandidate> iva,
                         double image_height);

}  // namespace mscm
