#include "mscm/fusion.hpp"

#include <cmath>

namespace mscm {

double proximity(const LineCandidate& hough, const LineCandidate& iva, double image_height) {
  const double dy = (hough.y() - iva.y()) / image_height;
  const double c = std::cos(hough.alpha() - iva.alpha());
  return (1.0 - dy * dy) * (c * c);
}

Eigen::MatrixXd affirm_matrix(std::span<const LineCandidate> hough, std::span<const LineCandidate> iva,
                              double image_height) {
  const auto n = static_cast<Eigen::Index>(hough.size());
  const auto m = static_cast<Eigen::Index>(iva.size());
  Eigen::VectorXd h(n), s(m);
  for (Eigen::Index i = 0; i < n; ++i) h(i) = hough[i].score();
  for (Eigen::Index j = 0; j < m; ++j) s(j) = iva[j].score();
  const Eigen::MatrixXd g = h * s.transpose();
  const Eigen::MatrixXd p =
      Eigen::MatrixXd::NullaryExpr(n, m, [&](Eigen::Index i, Eigen::Index j) { return proximity(hough[i], iva[j], image_height); });
  return g.cwiseProduct(p);
}

Detection select_horizon(std::span<const LineCandidate> hough, std::span<const LineCandidate> iva,
                         double image_height) {
  if (hough.empty() || iva.empty())
    throw NoCandidatesError("select_horizon: " + std::to_string(hough.size()) + " Hough and " +
                            std::to_string(iva.size()) + " IVA candidates");
  const Eigen::MatrixXd affirm = affirm_matrix(hough, iva, image_height);

  auto better = [&](Eigen::Index i, Eigen::Index j, Eigen::Index bi, Eigen::Index bj) {
    if (affirm(i, j) != affirm(bi, bj)) return affirm(i, j) > affirm(bi, bj);
    if (hough[i].score() != hough[bi].score()) return hough[i].score() > hough[bi].score();
    if (iva[j].score() != iva[bj].score()) return iva[j].score() > iva[bj].score();
    if (i != bi) return i < bi;
    return j < bj;
  };

  Eigen::Index bi = 0, bj = 0;
  for (Eigen::Index i = 0; i < affirm.rows(); ++i) {
    for (Eigen::Index j = 0; j < affirm.cols(); ++j) {
      if (better(i, j, bi, bj)) {
        bi = i;
        bj = j;
      }
    }
  }

  PairScore pair;
  pair.hough_index = static_cast<int>(bi);
  pair.iva_index = static_cast<int>(bj);
  pair.goodness = goodness(hough[bi].score(), iva[bj].score());
  pair.proximity = proximity(hough[bi], iva[bj], image_height);
  pair.affirm = affirm(bi, bj);
  return Detection{hough[bi], pair, static_cast<int>(hough.size()), static_cast<int>(iva.size())};
}

}  // namespace mscm
