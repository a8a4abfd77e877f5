#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mscm {

// Dense row-major raster; rows are image rows (y, downward), columns are x.
template <typename Scalar>
using Raster = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using GrayImage = Raster<std::uint8_t>;
using RealRaster = Raster<double>;

template <typename Derived>
inline int width(const Eigen::DenseBase<Derived>& raster) { return static_cast<int>(raster.cols()); }

template <typename Derived>
inline int height(const Eigen::DenseBase<Derived>& raster) { return static_cast<int>(raster.rows()); }

/// Interleaved 8-bit RGB raster, row-major (R, G, B) triples.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

  const std::uint8_t* pixel(int x, int y) const { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  std::uint8_t* pixel(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
};

enum class GrayConversion {
  rec601,  // round(0.299 R + 0.587 G + 0.114 B)
  rec709,  // round(0.2126 R + 0.7152 G + 0.0722 B)
  channel_mean,
};

class ImageIoError : public std::runtime_error {
 public:
  enum class Kind { unreadable, unsupported, truncated, write_failed };

  ImageIoError(Kind kind, const std::filesystem::path& path, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  Kind kind_;
  std::filesystem::path path_;
};

using AnyImage = std::variant<GrayImage, RgbImage>;

/// Decodes binary PGM (P5, maxval 255) or 8-bit gray/RGB PNG.
AnyImage load_image(const std::filesystem::path& path);

/// load_image followed by to_gray when the file holds color.
GrayImage load_gray(const std::filesystem::path& path, GrayConversion conversion = GrayConversion::rec601);

/// Per-pixel luma with round-half-up, clamped to [0, 255].
GrayImage to_gray(const RgbImage& image, GrayConversion conversion = GrayConversion::rec601);

void save_pgm(const GrayImage& image, const std::filesystem::path& path);

std::string to_string(GrayConversion conversion);
GrayConversion parse_gray_conversion(const std::string& name);

}  // namespace mscm
