// Detector config parsing and rendering.

#include "mscm/config.hpp"
#include "test_support.hpp"

#include <fstream>

namespace mscm {
namespace {

TEST(Config, Defaults) {
  const DetectorConfig c;
  EXPECT_EQ(c.s_max, 10);
  EXPECT_EQ(c.gray, GrayConversion::rec601);
  EXPECT_EQ(c.canny.sigma, 1.4);
  EXPECT_EQ(c.canny.high_percentile, 0.9);
  EXPECT_EQ(c.canny.low_ratio, 0.4);
  EXPECT_EQ(c.hough.theta_bins, 180);
  EXPECT_EQ(c.hough.rho_resolution, 1.0);
  EXPECT_EQ(c.hough.top_k, 10);
  EXPECT_EQ(c.hough.nms_radius, 2);
  EXPECT_EQ(c.hough.scales, scale_range(1, 10));
  EXPECT_EQ(c.iva.scales, scale_range(1, 10));
  EXPECT_EQ(c.alpha_max_deg, 45.0);
  EXPECT_FALSE(c.fallback);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesKeysCommentsAndRanges) {
  const DetectorConfig c = parse_config(
      "# tuned\n"
      "hough.theta_bins = 360   # finer angles\n"
      "  canny.sigma=2\n"
      "\n"
      "hough.scales = 1,3,5-7\n"
      "iva.scales = 2-4\n"
      "gray.conversion = rec709\n"
      "fusion.fallback = yes\n"
      "candidate.alpha_max_deg = 30\n");
  EXPECT_EQ(c.hough.theta_bins, 360);
  EXPECT_EQ(c.canny.sigma, 2.0);
  EXPECT_EQ(c.hough.scales, (std::vector<int>{1, 3, 5, 6, 7}));
  EXPECT_EQ(c.iva.scales, (std::vector<int>{2, 3, 4}));
  EXPECT_EQ(c.gray, GrayConversion::rec709);
  EXPECT_TRUE(c.fallback);
  EXPECT_EQ(c.alpha_max_deg, 30.0);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("hough.bins = 3\n"), ConfigError);
  EXPECT_THROW(parse_config("hough.top_k = 3\nhough.top_k = 4\n"), ConfigError);
  EXPECT_THROW(parse_config("hough.top_k\n"), ConfigError);
  EXPECT_THROW(parse_config("hough.top_k = ten\n"), ConfigError);
  EXPECT_THROW(parse_config("hough.top_k = 0\n"), ConfigError);
  EXPECT_THROW(parse_config("canny.sigma = -1\n"), ConfigError);
  EXPECT_THROW(parse_config("canny.high_percentile = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_config("hough.scales = 4-2\n"), ConfigError);
  EXPECT_THROW(parse_config("hough.scales = 1,1\n"), ConfigError);
  EXPECT_THROW(parse_config("iva.scales = 11\n"), ConfigError);
  EXPECT_THROW(parse_config("candidate.alpha_max_deg = 90\n"), ConfigError);
  EXPECT_THROW(parse_config("gray.conversion = hsv\n"), ConfigError);
  EXPECT_THROW(parse_config("fusion.fallback = maybe\n"), ConfigError);
  try {
    parse_config("\n\nbogus = 1\n", "my.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("my.cfg:3"), std::string::npos) << e.what();
  }
}

TEST(Config, ScaleSetFollowsSMax) {
  EXPECT_NO_THROW(parse_config("multiscale.s_max = 4\nhough.scales = 1-4\niva.scales = 0-4\n"));
  EXPECT_THROW(parse_config("multiscale.s_max = 4\n"), ConfigError);
}

TEST(Config, TextRoundTrip) {
  DetectorConfig c;
  c.s_max = 12;
  c.gray = GrayConversion::channel_mean;
  c.canny.sigma = 0.1 + 0.2;
  c.canny.high_percentile = 0.85;
  c.hough.theta_bins = 720;
  c.hough.rho_resolution = 0.5;
  c.hough.top_k = 7;
  c.hough.nms_radius = 0;
  c.hough.scales = {2, 4, 12};
  c.iva.scales = {0, 1};
  c.alpha_max_deg = 33.3;
  c.fallback = true;
  const std::string text = to_config_text(c);
  const DetectorConfig back = parse_config(text);
  EXPECT_EQ(to_config_text(back), text);
  EXPECT_EQ(back.canny.sigma, c.canny.sigma);
  EXPECT_EQ(back.alpha_max_deg, c.alpha_max_deg);
  EXPECT_EQ(to_config_text(parse_config(to_config_text(DetectorConfig{}))), to_config_text(DetectorConfig{}));
}

TEST(Config, LoadFromFile) {
  testing::ScratchDir dir;
  {
    std::ofstream out(dir / "a.cfg");
    out << "hough.top_k = 5\n";
  }
  EXPECT_EQ(load_config(dir / "a.cfg").hough.top_k, 5);
  EXPECT_THROW(load_config(dir / "missing.cfg"), ConfigError);
}

}  // namespace
}  // namespace mscm
