#pragma once

#include "mscm/config.hpp"
#include "mscm/geometry.hpp"
#include "mscm/image.hpp"
#include "mscm/multiscale.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mscm {

/// d/dy by central differences; one-sided differences on the first and last row.
template <typename Derived>
Raster<typename Derived::Scalar> vertical_gradient(const Eigen::MatrixBase<Derived>& field) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = field.rows();
  if (rows < 2) throw std::invalid_argument("vertical_gradient: need at least two rows");
  Raster<Scalar> g(rows, field.cols());
  g.row(0) = field.row(1) - field.row(0);
  g.row(rows - 1) = field.row(rows - 1) - field.row(rows - 2);
  if (rows > 2) g.middleRows(1, rows - 2) = (field.bottomRows(rows - 2) - field.topRows(rows - 2)) / Scalar(2);
  return g;
}

/// Per column x: the row of maximum |d field / dy| and that magnitude.
template <typename Scalar>
struct ColumnExtrema {
  Eigen::VectorXi rows;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> magnitudes;

  int size() const { return static_cast<int>(rows.size()); }
};

/// Ties resolve to the topmost row.
template <typename Derived>
ColumnExtrema<typename Derived::Scalar> extract_extrema(const Eigen::MatrixBase<Derived>& field) {
  using Scalar = typename Derived::Scalar;
  const Raster<Scalar> g = vertical_gradient(field).cwiseAbs();
  ColumnExtrema<Scalar> out;
  out.rows = Eigen::VectorXi::Zero(g.cols());
  out.magnitudes = g.row(0).transpose();
  // Row sweep keeps memory access contiguous; strict '>' keeps the first maximum.
  for (Eigen::Index y = 1; y < g.rows(); ++y) {
    for (Eigen::Index x = 0; x < g.cols(); ++x) {
      if (g(y, x) > out.magnitudes(x)) {
        out.magnitudes(x) = g(y, x);
        out.rows(x) = static_cast<int>(y);
      }
    }
  }
  return out;
}

struct LineFit {
  double slope;
  double intercept;
};

/// Ordinary least squares of y on x.
template <typename DerivedX, typename DerivedY>
LineFit fit_least_squares(const Eigen::MatrixBase<DerivedX>& xs, const Eigen::MatrixBase<DerivedY>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("fit_least_squares: need >= 2 points");
  const Eigen::VectorXd x = xs.template cast<double>();
  const Eigen::VectorXd y = ys.template cast<double>();
  const double x_mean = x.mean(), y_mean = y.mean();
  const Eigen::VectorXd dx = x.array() - x_mean;
  const double sxx = dx.squaredNorm();
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_least_squares: x values are all equal");
  const double slope = dx.dot(y) / sxx;
  return {slope, y_mean - slope * x_mean};
}

/// Fits y'(x) over all columns and converts the line to horizon parameters.
/// Empty when the fitted line is at least alpha_max away from level.
template <typename Scalar>
std::optional<LineCandidate> fit_line(const ColumnExtrema<Scalar>& extrema, int image_width,
                                      double alpha_max = deg_to_rad(45.0), double score = 0.0, int scale = 0) {
  if (image_width < 2 || extrema.size() != image_width)
    throw std::invalid_argument("fit_line: need one extremum per column and at least two columns");
  const Eigen::VectorXd xs = Eigen::VectorXd::LinSpaced(image_width, 0.0, image_width - 1.0);
  const LineFit fit = fit_least_squares(xs, extrema.rows);
  const double alpha = std::atan(fit.slope);
  if (!(std::abs(alpha) < alpha_max)) return std::nullopt;
  const double y = fit.slope * ((image_width - 1) / 2.0) + fit.intercept;
  return LineCandidate(y, alpha, score, CandidateSource::iva, scale);
}

/// Mean over columns of |d field / dy| evaluated at each column's extremum row.
template <typename Derived>
double iva_score(const Eigen::MatrixBase<Derived>& field, const ColumnExtrema<typename Derived::Scalar>& extrema) {
  const Eigen::Index rows = field.rows();
  if (extrema.size() != field.cols() || field.cols() == 0) throw std::invalid_argument("iva_score: size mismatch");
  double sum = 0.0;
  for (Eigen::Index x = 0; x < field.cols(); ++x) {
    const Eigen::Index y = extrema.rows(x);
    double d;
    if (y == 0)
      d = double(field(1, x)) - double(field(0, x));
    else if (y == rows - 1)
      d = double(field(rows - 1, x)) - double(field(rows - 2, x));
    else
      d = (double(field(y + 1, x)) - double(field(y - 1, x))) / 2.0;
    sum += std::abs(d);
  }
  return sum / static_cast<double>(field.cols());
}

/// One candidate per configured scale from the mean multi-scale images, scored
/// by the mean extremum gradient. Scales whose fit is too steep are dropped.
template <typename Scalar>
std::vector<LineCandidate> iva_branch(const BasicScaleStack<Scalar>& stack, const DetectorConfig& config) {
  std::vector<LineCandidate> candidates;
  for (int s : config.iva.scales) {
    const Raster<Scalar>& field = mean_multiscale(stack, s);
    const auto extrema = extract_extrema(field);
    const double score = extrema.magnitudes.template cast<double>().mean();
    if (auto c = fit_line(extrema, width(field), config.alpha_max(), score, s)) candidates.push_back(*c);
  }
  return candidates;
}

}  // namespace mscm
