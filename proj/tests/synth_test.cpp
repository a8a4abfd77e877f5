// Synthetic frame renderer and corpus generation.

#include "mscm/iva.hpp"
#include "mscm/synth.hpp"
#include "test_support.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

namespace mscm {
namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SynthSpec flat_spec(int w, int h, double y, double alpha_deg) {
  SynthSpec s;
  s.width = w;
  s.height = h;
  s.y_true = y;
  s.alpha_true_deg = alpha_deg;
  s.sky_top = 200.0;
  s.sky_bottom = 200.0;
  s.sea_mean = 50.0;
  return s;
}

TEST(RenderFrame, DegenerateTwoBand) {
  const int k = 77;
  const RenderedFrame f = render_frame(flat_spec(64, 160, k, 0.0));
  EXPECT_EQ(f.image, testing::two_band(160, 64, k));
  EXPECT_EQ(f.truth.y, k);
  EXPECT_EQ(f.truth.alpha_deg, 0.0);
}

TEST(RenderFrame, Deterministic) {
  SynthSpec s = flat_spec(120, 90, 40.0, 7.0);
  s.sea_texture_amp = 6.0;
  s.noise_sigma = 5.0;
  s.seed = 1234;
  s.wake = Wake{10, 60, 100, 70, 4.0, 240.0};
  EXPECT_EQ(render_frame(s).image, render_frame(s).image);
  SynthSpec t = s;
  t.seed = 1235;
  EXPECT_NE(render_frame(s).image, render_frame(t).image);
}

TEST(RenderFrame, SkyAboveLineSeaBelow) {
  const SynthSpec s = flat_spec(101, 100, 50.3, 12.0);
  const RenderedFrame f = render_frame(s);
  const double slope = std::tan(deg_to_rad(12.0));
  for (int x = 0; x < 101; ++x) {
    const double row = 50.3 + slope * (x - 50.0);
    for (int y = 0; y < 100; ++y) ASSERT_EQ(f.image(y, x), y < row ? 200 : 50) << x << "," << y;
  }
}

TEST(RenderFrame, SkyGradientRunsTopToBoundary) {
  SynthSpec s = flat_spec(20, 100, 50.0, 0.0);
  s.sky_top = 220.0;
  s.sky_bottom = 120.0;
  const RenderedFrame f = render_frame(s);
  EXPECT_EQ(f.image(0, 5), 220);
  EXPECT_EQ(f.image(25, 5), 170);
  EXPECT_EQ(f.image(49, 5), 122);
}

TEST(RenderFrame, OccludersPaintOverBoundary) {
  SynthSpec s = flat_spec(64, 64, 32.0, 0.0);
  s.occluders.push_back({10, 20, 30, 45, 111.0});
  s.wake = Wake{0, 40, 63, 40, 3.0, 250.0};
  const RenderedFrame f = render_frame(s);
  for (int y = 20; y < 45; ++y)
    for (int x = 10; x < 30; ++x) {
      // The wake is painted after the occluder.
      if (std::abs(y - 40) <= 1) continue;
      ASSERT_EQ(f.image(y, x), 111) << x << "," << y;
    }
  EXPECT_EQ(f.image(40, 5), 250);
  EXPECT_EQ(f.image(40, 15), 250);
  EXPECT_EQ(f.image(19, 15), 200);
  EXPECT_EQ(f.image(45, 15), 50);
}

TEST(RenderFrame, WakeStaysBelowHorizon) {
  SynthSpec s = flat_spec(64, 64, 32.0, 0.0);
  s.wake = Wake{0, 33, 63, 33, 8.0, 250.0};
  const RenderedFrame f = render_frame(s);
  EXPECT_TRUE((f.image.topRows(32).array() == 200).all());
  EXPECT_EQ(f.image(33, 10), 250);
}

TEST(RenderFrame, ValidatesSpec) {
  EXPECT_THROW(render_frame(flat_spec(64, 100, 5.0, 0.0)), std::invalid_argument);
  EXPECT_THROW(render_frame(flat_spec(64, 100, 50.0, 31.0)), std::invalid_argument);
  SynthSpec s = flat_spec(64, 100, 50.0, 0.0);
  s.sea_mean = 300.0;
  EXPECT_THROW(render_frame(s), std::invalid_argument);
  s = flat_spec(64, 100, 50.0, 0.0);
  s.occluders.push_back({10, 10, 70, 20, 0.0});
  EXPECT_THROW(render_frame(s), std::invalid_argument);
}

// Per column, the boundary sits between the rows of largest forward difference.
TEST(RenderFrame, OracleExactnessThroughLineFit) {
  std::mt19937_64 rng(83);
  const SynthRanges ranges = SynthRanges::clean();
  for (int i = 0; i < 40; ++i) {
    SynthSpec s = sample_spec(ranges, 5, i);
    s.noise_sigma = 0.0;
    s.sea_texture_amp = 0.0;
    s.alpha_true_deg = std::uniform_real_distribution<double>(-30.0, 30.0)(rng);
    s.height = 720;
    s.y_true = std::uniform_real_distribution<double>(300.0, 420.0)(rng);
    const RenderedFrame f = render_frame(s);
    const RealRaster img = f.image.cast<double>();
    const RealRaster diff = (img.bottomRows(719) - img.topRows(719)).cwiseAbs();
    Eigen::VectorXd xs(s.width), ys(s.width);
    for (int x = 0; x < s.width; ++x) {
      Eigen::Index row;
      diff.col(x).maxCoeff(&row);
      xs(x) = x;
      ys(x) = row + 0.5;
    }
    const LineFit fit = fit_least_squares(xs, ys);
    const double y_fit = fit.slope * (s.width - 1) / 2.0 + fit.intercept;
    EXPECT_LE(std::abs(y_fit - s.y_true), 0.5 + 1e-9) << i;
    EXPECT_LE(std::abs(rad_to_deg(std::atan(fit.slope)) - s.alpha_true_deg), 0.05) << i;
  }
}

TEST(SampleSpec, DistinctSeedsAndWithinRanges) {
  const SynthRanges r = SynthRanges::robust();
  std::set<std::uint64_t> seeds;
  for (int i = 0; i < 200; ++i) {
    const SynthSpec s = sample_spec(r, 9, i);
    EXPECT_NO_THROW(s.validate());
    seeds.insert(s.seed);
    EXPECT_GE(s.y_true, r.y_true.lo);
    EXPECT_LE(s.y_true, r.y_true.hi);
    EXPECT_LE(std::abs(s.alpha_true_deg), 10.0);
    EXPECT_LE(s.noise_sigma, 12.0);
    int occluded = 0;
    for (const auto& o : s.occluders) occluded += o.x1 - o.x0;
    EXPECT_LE(occluded, 0.3 * s.width + 1e-9);
    EXPECT_LE(s.occluders.size(), 3u);
  }
  EXPECT_EQ(seeds.size(), 200u);
  EXPECT_EQ(sample_spec(r, 9, 17).seed, sample_spec(r, 9, 17).seed);
}

TEST(SampleSpec, RobustPresetProportions) {
  const SynthRanges r = SynthRanges::robust();
  int wakes = 0, occluded = 0;
  for (int i = 0; i < 300; ++i) {
    const SynthSpec s = sample_spec(r, 11, i);
    wakes += s.wake.has_value();
    occluded += !s.occluders.empty();
  }
  EXPECT_LE(wakes, 45);
  EXPECT_GT(occluded, 100);
}

TEST(SampleSpec, RangeValidation) {
  SynthRanges r;
  r.y_true = {10.0, 400.0};
  EXPECT_THROW(r.validate(), std::invalid_argument);
  r = SynthRanges{};
  r.alpha_deg = {5.0, -5.0};
  EXPECT_THROW(r.validate(), std::invalid_argument);
  r = SynthRanges{};
  r.occluder_probability = 1.5;
  EXPECT_THROW(sample_spec(r, 1, 0), std::invalid_argument);
}

TEST(MakeCorpus, RerunIsByteIdentical) {
  testing::ScratchDir a, b;
  const SynthRanges r = SynthRanges::robust();
  const Corpus ca = make_corpus(6, r, 42, a / "vid");
  const Corpus cb = make_corpus(6, r, 42, b / "vid");
  ASSERT_EQ(ca.frames.size(), 6u);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(ca.frames[i].filename(), cb.frames[i].filename());
    EXPECT_EQ(slurp(ca.frames[i]), slurp(cb.frames[i]));
  }
  EXPECT_EQ(ca.frames[3].filename(), "00003.pgm");
  EXPECT_EQ(slurp(a / "vid" / "ground_truth.csv"), slurp(b / "vid" / "ground_truth.csv"));
  EXPECT_EQ(slurp(a / "vid" / "spec.json"), slurp(b / "vid" / "spec.json"));
  const auto gt = load_ground_truth(a / "vid" / "ground_truth.csv");
  ASSERT_EQ(gt.size(), 6u);
  EXPECT_EQ(gt[2].video_id, "vid");
  EXPECT_EQ(gt[2].frame_idx, 2);
  EXPECT_NEAR(gt[2].y, ca.specs[2].y_true, 1e-6);
}

TEST(MakeCorpus, MatchesInMemoryRender) {
  testing::ScratchDir dir;
  const Corpus c = make_corpus(3, SynthRanges::clean(), 8, dir / "x");
  const auto frames = render_corpus(3, SynthRanges::clean(), 8, "x");
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(load_gray(c.frames[i]), frames[i].image);
    EXPECT_EQ(frames[i].truth.frame_idx, i);
    EXPECT_EQ(frames[i].truth.video_id, "x");
  }
}

TEST(MakeCorpus, CollapsedRangesGiveIdenticalTruth) {
  SynthRanges r;
  r.y_true = {150.0, 150.0};
  r.alpha_deg = {2.5, 2.5};
  const auto frames = render_corpus(5, r, 3);
  for (const auto& f : frames) {
    EXPECT_EQ(f.truth.y, 150.0);
    EXPECT_EQ(f.truth.alpha_deg, 2.5);
  }
}

TEST(MakeCorpus, OccluderProbabilityOne) {
  SynthRanges r;
  r.occluder_probability = 1.0;
  r.noise_sigma = {0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    const SynthSpec s = sample_spec(r, 21, i);
    ASSERT_FALSE(s.occluders.empty());
    const RenderedFrame f = render_frame(s);
    const Occluder& o = s.occluders.back();
    const auto v = static_cast<int>(std::floor(o.intensity + 0.5));
    EXPECT_EQ(f.image((o.y0 + o.y1 - 1) / 2, (o.x0 + o.x1 - 1) / 2), v);
  }
}

TEST(MakeCorpus, RejectsBadArguments) {
  testing::ScratchDir dir;
  EXPECT_THROW(make_corpus(0, SynthRanges{}, 1, dir / "z"), std::invalid_argument);
  SynthRanges r;
  r.y_true = {0.0, 360.0};
  EXPECT_THROW(make_corpus(2, r, 1, dir / "z"), std::invalid_argument);
  EXPECT_FALSE(std::filesystem::exists(dir / "z"));
}

}  // namespace
}  // namespace mscm
