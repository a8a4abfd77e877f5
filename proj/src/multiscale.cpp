#include "mscm/multiscale.hpp"

#include <algorithm>
#include <cstdint>

namespace mscm {

namespace {

// Sliding 256-bin histogram over one column. The tracked median m satisfies
// below = #{v < m}; each step moves it to the order statistic of rank k.
void filter_column(const std::uint8_t* in, std::uint8_t* out, int rows, int reach) {
  std::uint16_t hist[256] = {};
  int m = 0, below = 0;
  const int first_hi = std::min(rows - 1, reach);
  for (int y = 0; y <= first_hi; ++y) ++hist[in[y]];
  for (int y = 0; y < rows; ++y) {
    if (y > 0) {
      const int incoming = y + reach;
      const int outgoing = y - reach - 1;
      if (incoming < rows) {
        ++hist[in[incoming]];
        below += in[incoming] < m;
      }
      if (outgoing >= 0) {
        --hist[in[outgoing]];
        below -= in[outgoing] < m;
      }
    }
    const int k = (std::min(rows - 1, y + reach) - std::max(0, y - reach)) / 2;
    while (below > k) below -= hist[--m];
    while (below + hist[m] <= k) below += hist[m++];
    out[y] = static_cast<std::uint8_t>(m);
  }
}

}  // namespace

GrayImage median_filter_vertical(const GrayImage& image, int scale) {
  if (scale < 0) throw std::invalid_argument("median_filter_vertical: scale must be >= 0");
  if (scale == 0 || image.size() == 0) return image;
  if (scale > 8000) throw std::invalid_argument("median_filter_vertical: scale too large");

  // Columns are filtered in a transposed copy so each one is contiguous.
  const int rows = static_cast<int>(image.rows());
  const int cols = static_cast<int>(image.cols());
  const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> columns = image.transpose();
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> filtered(cols, rows);
  for (int x = 0; x < cols; ++x) {
    filter_column(columns.data() + static_cast<std::size_t>(x) * rows,
                  filtered.data() + static_cast<std::size_t>(x) * rows, rows, 2 * scale);
  }
  return filtered.transpose();
}

}  // namespace mscm
