#pragma once

#include "mscm/image.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace mscm {

/// Vertical median of scale s: output(x, y) is the median of column x over rows
/// [y - 2s, y + 2s], clipped at the image borders. Clipped windows of even
/// length take the lower of the two middle order statistics.
///
/// Runs a sliding 256-bin histogram per column with an incrementally tracked
/// median, so the cost per pixel does not grow with the window length.
GrayImage median_filter_vertical(const GrayImage& image, int scale);

/// Mean of I_1..I_s over the given per-scale images (images[k] holds I_k).
template <typename Scalar = double>
Raster<Scalar> mean_multiscale(std::span<const GrayImage> images, int scale) {
  if (scale < 1 || scale >= static_cast<int>(images.size()))
    throw std::out_of_range("mean_multiscale: scale out of range");
  Raster<Scalar> sum = images[1].template cast<Scalar>();
  for (int s = 2; s <= scale; ++s) sum += images[s].template cast<Scalar>();
  return sum / static_cast<Scalar>(scale);
}

/// Multi-scale images I_s and mean multi-scale images for s = 0..s_max.
/// means[0] is the input itself; means[s] for s >= 1 averages I_1..I_s.
template <typename Scalar = double>
struct BasicScaleStack {
  std::vector<int> scales;
  std::vector<GrayImage> images;
  std::vector<Raster<Scalar>> means;

  int s_max() const { return static_cast<int>(images.size()) - 1; }
  int width() const { return images.empty() ? 0 : static_cast<int>(images.front().cols()); }
  int height() const { return images.empty() ? 0 : static_cast<int>(images.front().rows()); }
};

using ScaleStack = BasicScaleStack<float>;

template <typename Scalar = double>
BasicScaleStack<Scalar> build_scale_stack(const GrayImage& image, int s_max = 10) {
  if (s_max < 1) throw std::invalid_argument("build_scale_stack: s_max must be >= 1");
  BasicScaleStack<Scalar> stack;
  stack.scales.reserve(s_max + 1);
  stack.images.reserve(s_max + 1);
  stack.means.reserve(s_max + 1);
  stack.scales.push_back(0);
  stack.images.push_back(image);
  stack.means.push_back(image.template cast<Scalar>());

  Raster<Scalar> running = Raster<Scalar>::Zero(image.rows(), image.cols());
  for (int s = 1; s <= s_max; ++s) {
    stack.scales.push_back(s);
    stack.images.push_back(median_filter_vertical(image, s));
    running += stack.images.back().template cast<Scalar>();
    stack.means.push_back(running / static_cast<Scalar>(s));
  }
  return stack;
}

template <typename Scalar>
const Raster<Scalar>& mean_multiscale(const BasicScaleStack<Scalar>& stack, int scale) {
  if (scale < 0 || scale > stack.s_max()) throw std::out_of_range("mean_multiscale: scale out of range");
  return stack.means[scale];
}

}  // namespace mscm
