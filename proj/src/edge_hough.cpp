#include "mscm/edge_hough.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace mscm {

namespace {

using FloatRaster = Raster<float>;

std::vector<float> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::lround(1.5 * sigma)));
  std::vector<float> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) sum += std::exp(-(i * i) / (2.0 * sigma * sigma));
  for (int i = -radius; i <= radius; ++i)
    k[i + radius] = static_cast<float>(std::exp(-(i * i) / (2.0 * sigma * sigma)) / sum);
  return k;
}

// Separable convolution with replicated borders.
FloatRaster gaussian_blur(const GrayImage& image, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int rows = height(image), cols = width(image);
  FloatRaster horizontal(rows, cols);
  std::vector<float> padded(cols + 2 * radius);
  for (int y = 0; y < rows; ++y) {
    const std::uint8_t* src = image.data() + static_cast<std::size_t>(y) * cols;
    for (int i = 0; i < cols + 2 * radius; ++i) padded[i] = src[std::clamp(i - radius, 0, cols - 1)];
    float* dst = horizontal.data() + static_cast<std::size_t>(y) * cols;
    std::fill(dst, dst + cols, 0.0f);
    for (int i = 0; i <= 2 * radius; ++i) {
      const float w = kernel[i];
      const float* p = padded.data() + i;
      for (int x = 0; x < cols; ++x) dst[x] += w * p[x];
    }
  }
  FloatRaster out(rows, cols);
  for (int y = 0; y < rows; ++y) {
    float* dst = out.data() + static_cast<std::size_t>(y) * cols;
    std::fill(dst, dst + cols, 0.0f);
    for (int i = -radius; i <= radius; ++i) {
      const float w = kernel[i + radius];
      const float* src = horizontal.data() + static_cast<std::size_t>(std::clamp(y + i, 0, rows - 1)) * cols;
      for (int x = 0; x < cols; ++x) dst[x] += w * src[x];
    }
  }
  return out;
}

// Exact order statistic of rank floor(p * (n - 1)) among the positive
// values. Positive floats order like their bit patterns, so a 16-bit radix
// pass narrows the search to one bucket before nth_element.
float percentile_of_positive(const FloatRaster& values, double p) {
  std::vector<std::uint32_t> counts(1 << 16, 0);
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const float v = values.data()[i];
    if (v > 0.0f) {
      ++counts[std::bit_cast<std::uint32_t>(v) >> 16];
      ++n;
    }
  }
  if (n == 0) return 0.0f;
  std::size_t rank = static_cast<std::size_t>(std::floor(p * static_cast<double>(n - 1)));
  std::uint32_t bucket = 0;
  while (rank >= counts[bucket]) rank -= counts[bucket++];
  std::vector<float> members;
  members.reserve(counts[bucket]);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const float v = values.data()[i];
    if (v > 0.0f && (std::bit_cast<std::uint32_t>(v) >> 16) == bucket) members.push_back(v);
  }
  std::nth_element(members.begin(), members.begin() + rank, members.end());
  return members[rank];
}

// Gradient direction quantised to the neighbour pair used by suppression.
enum Direction : std::uint8_t { kHorizontal, kVertical, kDiagonalMain, kDiagonalAnti };

}  // namespace

EdgeMap canny(const GrayImage& image, const CannyConfig& config) {
  config.validate();
  const int rows = height(image), cols = width(image);
  EdgeMap edges{Raster<std::uint8_t>::Zero(rows, cols)};
  if (rows < 3 || cols < 3) return edges;

  const FloatRaster smooth = gaussian_blur(image, config.sigma);
  FloatRaster magnitude(rows, cols);
  Raster<std::uint8_t> direction(rows, cols);
  constexpr float kTan22 = 0.41421356f;
  std::vector<float> padded_up(cols + 2), padded_mid(cols + 2), padded_down(cols + 2);
  auto pad = [&](std::vector<float>& dst, int y) {
    const float* src = smooth.data() + static_cast<std::size_t>(std::clamp(y, 0, rows - 1)) * cols;
    std::copy(src, src + cols, dst.begin() + 1);
    dst[0] = src[0];
    dst[cols + 1] = src[cols - 1];
  };
  for (int y = 0; y < rows; ++y) {
    pad(padded_up, y - 1);
    pad(padded_mid, y);
    pad(padded_down, y + 1);
    const float* up = padded_up.data() + 1;
    const float* mid = padded_mid.data() + 1;
    const float* down = padded_down.data() + 1;
    float* mag = magnitude.data() + static_cast<std::size_t>(y) * cols;
    std::uint8_t* dir = direction.data() + static_cast<std::size_t>(y) * cols;
    for (int x = 0; x < cols; ++x) {
      const float dx = (up[x + 1] + 2.0f * mid[x + 1] + down[x + 1]) - (up[x - 1] + 2.0f * mid[x - 1] + down[x - 1]);
      const float dy = (down[x - 1] + 2.0f * down[x] + down[x + 1]) - (up[x - 1] + 2.0f * up[x] + up[x + 1]);
      mag[x] = std::sqrt(dx * dx + dy * dy);
      const float ax = std::abs(dx), ay = std::abs(dy);
      const int diagonal = ((dx > 0.0f) != (dy > 0.0f)) + kDiagonalMain;
      const int steep = ax <= ay * kTan22 ? kVertical : diagonal;
      dir[x] = static_cast<std::uint8_t>(ay <= ax * kTan22 ? kHorizontal : steep);
    }
  }

  const float high = percentile_of_positive(magnitude, config.high_percentile);
  if (!(high > 0.0f)) return edges;
  const float low = static_cast<float>(config.low_ratio) * high;

  // Non-maximum suppression; the one-pixel frame is never an edge. A pixel
  // survives if it is >= its neighbour on the negative side of the gradient and
  // strictly > the one on the positive side, which thins plateaus to one pixel.
  // 2 = strong candidate, 1 = weak candidate.
  Raster<std::uint8_t> level = Raster<std::uint8_t>::Zero(rows, cols);
  const std::ptrdiff_t step[4] = {1, cols, cols + 1, cols - 1};
  for (int y = 1; y < rows - 1; ++y) {
    const float* m = magnitude.data() + static_cast<std::size_t>(y) * cols;
    const std::uint8_t* dir = direction.data() + static_cast<std::size_t>(y) * cols;
    std::uint8_t* lv = level.data() + static_cast<std::size_t>(y) * cols;
    for (int x = 1; x < cols - 1; ++x) {
      const float v = m[x];
      const std::ptrdiff_t d = step[dir[x]];
      const bool keep = (v >= low) & (v >= m[x - d]) & (v > m[x + d]);
      lv[x] = static_cast<std::uint8_t>(keep * (1 + (v >= high)));
    }
  }

  // Hysteresis over 8-neighbours; accepted pixels are marked 3 in place. The
  // frame stays 0, so neighbours of interior pixels never leave the raster.
  std::uint8_t* lv = level.data();
  const std::ptrdiff_t neighbours[8] = {-cols - 1, -cols, -cols + 1, -1, 1, cols - 1, cols, cols + 1};
  std::vector<std::ptrdiff_t> stack;
  for (std::ptrdiff_t i = 0; i < level.size(); ++i) {
    if (lv[i] != 2) continue;
    lv[i] = 3;
    stack.push_back(i);
    while (!stack.empty()) {
      const std::ptrdiff_t c = stack.back();
      stack.pop_back();
      for (std::ptrdiff_t n : neighbours) {
        if (lv[c + n] == 1 || lv[c + n] == 2) {
          lv[c + n] = 3;
          stack.push_back(c + n);
        }
      }
    }
  }
  edges.bits = (level.array() == 3).cast<std::uint8_t>();
  return edges;
}

HoughAccumulator::HoughAccumulator(int image_width, int image_height, int theta_bins, double rho_resolution)
    : image_width_(image_width), image_height_(image_height), rho_resolution_(rho_resolution) {
  if (image_width < 1 || image_height < 1) throw std::invalid_argument("HoughAccumulator: empty image");
  if (theta_bins < 1) throw std::invalid_argument("HoughAccumulator: theta_bins must be >= 1");
  if (!(rho_resolution > 0.0)) throw std::invalid_argument("HoughAccumulator: rho_resolution must be > 0");
  rho_max_ = std::ceil(std::sqrt(double(image_width) * image_width + double(image_height) * image_height));
  rho_offset_ = static_cast<int>(std::ceil(rho_max_ / rho_resolution));
  votes_ = Votes::Zero(2 * rho_offset_ + 1, theta_bins);
}

int HoughAccumulator::rho_bin(double rho) const {
  return static_cast<int>(std::floor(rho / rho_resolution_ + 0.5)) + rho_offset_;
}

HoughAccumulator hough_accumulate(const EdgeMap& edges, int theta_bins, double rho_resolution) {
  HoughAccumulator acc(edges.width(), edges.height(), theta_bins, rho_resolution);
  // Edge pixels grouped by row, x ascending within a row.
  std::vector<double> xs;
  std::vector<int> row_start(edges.height() + 1, 0);
  for (int y = 0; y < edges.height(); ++y) {
    row_start[y] = static_cast<int>(xs.size());
    const std::uint8_t* bits = edges.bits.data() + static_cast<std::size_t>(y) * edges.width();
    for (int x = 0; x < edges.width(); ++x) {
      if (bits[x]) xs.push_back(x);
    }
  }
  row_start[edges.height()] = static_cast<int>(xs.size());
  if (xs.empty()) return acc;

  // Nearest bin is floor(rho / res + 0.5) + offset. Adding offset + 0.5 before
  // truncating keeps the argument positive, so truncation equals floor; exact
  // half-bin ties may land on either side by one rounding step.
  const double inv_res = 1.0 / rho_resolution;
  const double shift = acc.rho_bin(0.0) + 0.5;
  // Several theta bins share one pass over the points; the independent
  // columns hide the latency of repeated increments to one bin.
  constexpr int kLanes = 6;
  for (int j0 = 0; j0 < acc.theta_bins(); j0 += kLanes) {
    const int lanes = std::min(kLanes, acc.theta_bins() - j0);
    double c[kLanes], s[kLanes], base[kLanes];
    std::int32_t* column[kLanes];
    for (int q = 0; q < kLanes; ++q) {
      const int j = j0 + std::min(q, lanes - 1);
      c[q] = std::cos(acc.theta(j)) * inv_res;
      s[q] = std::sin(acc.theta(j)) * inv_res;
      column[q] = acc.votes().col(j).data();
    }
    for (int y = 0; y < edges.height(); ++y) {
      for (int q = 0; q < kLanes; ++q) base[q] = y * s[q] + shift;
      const int begin = row_start[y], end = row_start[y + 1];
      if (lanes == kLanes) {
        for (int k = begin; k < end; ++k) {
          const double x = xs[k];
          for (int q = 0; q < kLanes; ++q) ++column[q][static_cast<int>(x * c[q] + base[q])];
        }
      } else {
        for (int k = begin; k < end; ++k) {
          for (int q = 0; q < lanes; ++q) ++column[q][static_cast<int>(xs[k] * c[q] + base[q])];
        }
      }
    }
  }
  return acc;
}

std::vector<HoughPeak> top_candidates(const HoughAccumulator& accumulator, int k, int nms_radius) {
  if (k < 1) throw std::invalid_argument("top_candidates: k must be >= 1");
  if (nms_radius < 0) throw std::invalid_argument("top_candidates: nms_radius must be >= 0");
  // The m-th greedy peak is preceded by at most (m - 1) * (2r + 1)^2
  // suppressed bins, so the greedy pass only needs that many leading bins of
  // the (votes desc, rho asc, theta asc) order.
  const std::size_t window = static_cast<std::size_t>(2 * nms_radius + 1) * (2 * nms_radius + 1);
  const std::size_t limit = (static_cast<std::size_t>(k) - 1) * window + 1;
  struct Bin {
    std::int32_t votes;
    int i, j;
  };
  auto before = [](const Bin& a, const Bin& b) {
    if (a.votes != b.votes) return a.votes > b.votes;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  };
  std::vector<Bin> heap;  // worst leading bin at the front
  heap.reserve(limit + 1);
  const auto& votes = accumulator.votes();
  for (int j = 0; j < accumulator.theta_bins(); ++j) {
    const std::int32_t* column = votes.col(j).data();
    for (int i = 0; i < accumulator.rho_bins(); ++i) {
      if (column[i] <= 0) continue;
      const Bin bin{column[i], i, j};
      if (heap.size() == limit) {
        if (!before(bin, heap.front())) continue;
        std::pop_heap(heap.begin(), heap.end(), before);
        heap.back() = bin;
      } else {
        heap.push_back(bin);
      }
      std::push_heap(heap.begin(), heap.end(), before);
    }
  }
  std::sort_heap(heap.begin(), heap.end(), before);

  std::vector<HoughPeak> peaks;
  for (const Bin& bin : heap) {
    if (static_cast<int>(peaks.size()) == k) break;
    const bool suppressed = std::any_of(peaks.begin(), peaks.end(), [&](const HoughPeak& p) {
      return std::abs(p.rho_bin - bin.i) <= nms_radius && std::abs(p.theta_bin - bin.j) <= nms_radius;
    });
    if (!suppressed) peaks.push_back({bin.i, bin.j, accumulator.rho(bin.i), accumulator.theta(bin.j), bin.votes});
  }
  return peaks;
}

std::vector<LineCandidate> hough_branch(std::span<const GrayImage> images, const DetectorConfig& config) {
  std::vector<LineCandidate> candidates;
  for (int s : config.hough.scales) {
    if (s < 0 || s >= static_cast<int>(images.size()))
      throw std::out_of_range("hough_branch: scale " + std::to_string(s) + " not in stack");
    const GrayImage& image = images[s];
    const EdgeMap edges = canny(image, config.canny);
    const HoughAccumulator acc = hough_accumulate(edges, config.hough.theta_bins, config.hough.rho_resolution);
    for (const HoughPeak& peak : top_candidates(acc, config.hough.top_k, config.hough.nms_radius)) {
      if (auto c = rho_theta_to_candidate(peak.rho, peak.theta, width(image), height(image),
                                          static_cast<double>(peak.votes), config.alpha_max(), s)) {
        candidates.push_back(*c);
      }
    }
  }
  return candidates;
}

}  // namespace mscm
