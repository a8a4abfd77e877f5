#pragma once

#include "mscm/image.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace mscm::testing {

inline GrayImage random_image(int rows, int cols, std::mt19937_64& rng, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> value(lo, hi);
  GrayImage image(rows, cols);
  for (Eigen::Index i = 0; i < image.size(); ++i) image.data()[i] = static_cast<std::uint8_t>(value(rng));
  return image;
}

/// Rows [0, k) at `top`, rows [k, H) at `bottom`.
inline GrayImage two_band(int rows, int cols, int k, std::uint8_t top = 200, std::uint8_t bottom = 50) {
  GrayImage image(rows, cols);
  image.topRows(k).setConstant(top);
  image.bottomRows(rows - k).setConstant(bottom);
  return image;
}

/// Fresh per-test scratch directory under the system temp path.
class ScratchDir {
 public:
  ScratchDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = "mscm_";
    if (info) name += std::string(info->test_suite_name()) + "_" + info->name();
    for (char& c : name)
      if (c == '/') c = '_';
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace mscm::testing
