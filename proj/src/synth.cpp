#include "mscm/synth.hpp"

#include "mscm/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

namespace mscm {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("synth: " + what);
}

bool is_intensity(double v) { return v >= 0.0 && v <= 255.0; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Wave striation spectrum: cycles per pixel along y and x.
constexpr double kTextureFy[3] = {1.0 / 5.3, 1.0 / 11.7, 1.0 / 23.1};
constexpr double kTextureFx[3] = {1.0 / 97.0, -1.0 / 151.0, 1.0 / 263.0};

double segment_distance(double px, double py, const Wake& w) {
  const double vx = w.x1 - w.x0, vy = w.y1 - w.y0;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - w.x0) * vx + (py - w.y0) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (w.x0 + t * vx), dy = py - (w.y0 + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

double uniform(std::mt19937_64& rng, const Range& r) {
  if (r.hi <= r.lo) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

void check_range(const Range& r, double lo, double hi, const std::string& name) {
  require(r.lo <= r.hi, name + " range is inverted");
  require(r.lo >= lo && r.hi <= hi,
          name + " range [" + std::to_string(r.lo) + ", " + std::to_string(r.hi) + "] outside [" + std::to_string(lo) +
              ", " + std::to_string(hi) + "]");
}

nlohmann::ordered_json to_json(const Range& r) { return nlohmann::ordered_json::array({r.lo, r.hi}); }

nlohmann::ordered_json to_json(const SynthSpec& s) {
  nlohmann::ordered_json j;
  j["width"] = s.width;
  j["height"] = s.height;
  j["y_true"] = s.y_true;
  j["alpha_true_deg"] = s.alpha_true_deg;
  j["sky_top"] = s.sky_top;
  j["sky_bottom"] = s.sky_bottom;
  j["sea_mean"] = s.sea_mean;
  j["sea_texture_amp"] = s.sea_texture_amp;
  j["noise_sigma"] = s.noise_sigma;
  j["occluders"] = nlohmann::ordered_json::array();
  for (const auto& o : s.occluders)
    j["occluders"].push_back({{"x0", o.x0}, {"y0", o.y0}, {"x1", o.x1}, {"y1", o.y1}, {"intensity", o.intensity}});
  if (s.wake) {
    const Wake& w = *s.wake;
    j["wake"] = {{"x0", w.x0}, {"y0", w.y0}, {"x1", w.x1}, {"y1", w.y1}, {"width", w.width}, {"intensity", w.intensity}};
  } else {
    j["wake"] = nullptr;
  }
  j["seed"] = s.seed;
  return j;
}

nlohmann::ordered_json to_json(const SynthRanges& r) {
  nlohmann::ordered_json j;
  j["width"] = r.width;
  j["height"] = r.height;
  j["y_true"] = to_json(r.y_true);
  j["alpha_deg"] = to_json(r.alpha_deg);
  j["sky_top"] = to_json(r.sky_top);
  j["sky_bottom"] = to_json(r.sky_bottom);
  j["sea_mean"] = to_json(r.sea_mean);
  j["texture_amp"] = to_json(r.texture_amp);
  j["noise_sigma"] = to_json(r.noise_sigma);
  j["occluder_probability"] = r.occluder_probability;
  j["max_occluders"] = r.max_occluders;
  j["occluder_max_width_fraction"] = r.occluder_max_width_fraction;
  j["occluder_intensity"] = to_json(r.occluder_intensity);
  j["wake_probability"] = r.wake_probability;
  j["wake_length_fraction"] = to_json(r.wake_length_fraction);
  j["wake_width"] = to_json(r.wake_width);
  j["wake_intensity"] = to_json(r.wake_intensity);
  return j;
}

}  // namespace

void SynthSpec::validate() const {
  require(width >= 16 && height >= 16, "frame must be at least 16x16");
  require(y_true >= 0.1 * height && y_true <= 0.9 * height, "y_true must lie in [0.1 H, 0.9 H]");
  require(std::abs(alpha_true_deg) <= 30.0, "|alpha_true| must be <= 30 degrees");
  require(is_intensity(sky_top) && is_intensity(sky_bottom) && is_intensity(sea_mean), "intensities must lie in [0, 255]");
  require(sea_texture_amp >= 0.0 && sea_texture_amp <= 255.0, "sea_texture_amp must lie in [0, 255]");
  require(noise_sigma >= 0.0 && noise_sigma <= 255.0, "noise_sigma must lie in [0, 255]");
  for (const auto& o : occluders) {
    require(o.x0 >= 0 && o.y0 >= 0 && o.x1 <= width && o.y1 <= height && o.x0 < o.x1 && o.y0 < o.y1,
            "occluder rectangle must be non-empty and inside the frame");
    require(is_intensity(o.intensity), "occluder intensity must lie in [0, 255]");
  }
  if (wake) {
    require(wake->width > 0.0, "wake width must be > 0");
    require(is_intensity(wake->intensity), "wake intensity must lie in [0, 255]");
  }
}

RenderedFrame render_frame(const SynthSpec& spec) {
  spec.validate();
  const int w = spec.width, h = spec.height;
  const double slope = std::tan(deg_to_rad(spec.alpha_true_deg));
  const double center_x = (w - 1) / 2.0;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * kPi);
  double phase[3];
  for (double& p : phase) p = phase_dist(rng);

  RealRaster canvas(h, w);
  for (int x = 0; x < w; ++x) {
    const double boundary = spec.y_true + slope * (x - center_x);
    for (int y = 0; y < h; ++y) {
      if (y < boundary) {
        const double t = std::clamp(y / std::max(boundary, 1.0), 0.0, 1.0);
        canvas(y, x) = spec.sky_top + (spec.sky_bottom - spec.sky_top) * t;
      } else {
        double texture = 0.0;
        for (int i = 0; i < 3; ++i)
          texture += std::sin(2.0 * kPi * (kTextureFy[i] * y + kTextureFx[i] * x) + phase[i]);
        canvas(y, x) = spec.sea_mean + spec.sea_texture_amp * texture / 3.0;
      }
    }
  }
  for (const auto& o : spec.occluders) canvas.block(o.y0, o.x0, o.y1 - o.y0, o.x1 - o.x0).setConstant(o.intensity);
  if (spec.wake) {
    const Wake& wk = *spec.wake;
    const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(wk.y0, wk.y1) - wk.width)));
    const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(std::max(wk.y0, wk.y1) + wk.width)));
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = 0; x < w; ++x) {
        if (y < spec.y_true + slope * (x - center_x)) continue;
        if (segment_distance(x, y, wk) <= wk.width / 2.0) canvas(y, x) = wk.intensity;
      }
    }
  }
  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (Eigen::Index i = 0; i < canvas.size(); ++i) canvas.data()[i] += noise(rng);
  }

  RenderedFrame frame;
  frame.image = canvas.unaryExpr([](double v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0)); });
  frame.truth = GroundTruthEntry{"", 0, spec.y_true, spec.alpha_true_deg};
  return frame;
}

void SynthRanges::validate() const {
  require(width >= 16 && height >= 16, "frame must be at least 16x16");
  check_range(y_true, 0.1 * height, 0.9 * height, "y_true");
  check_range(alpha_deg, -30.0, 30.0, "alpha_deg");
  check_range(sky_top, 0.0, 255.0, "sky_top");
  check_range(sky_bottom, 0.0, 255.0, "sky_bottom");
  check_range(sea_mean, 0.0, 255.0, "sea_mean");
  check_range(texture_amp, 0.0, 255.0, "texture_amp");
  check_range(noise_sigma, 0.0, 255.0, "noise_sigma");
  require(occluder_probability >= 0.0 && occluder_probability <= 1.0, "occluder_probability must lie in [0, 1]");
  require(max_occluders >= 1, "max_occluders must be >= 1");
  require(occluder_max_width_fraction > 0.0 && occluder_max_width_fraction <= 1.0,
          "occluder_max_width_fraction must lie in (0, 1]");
  check_range(occluder_intensity, 0.0, 255.0, "occluder_intensity");
  require(wake_probability >= 0.0 && wake_probability <= 1.0, "wake_probability must lie in [0, 1]");
  check_range(wake_length_fraction, 0.0, 1.0, "wake_length_fraction");
  check_range(wake_width, 0.5, 1000.0, "wake_width");
  check_range(wake_intensity, 0.0, 255.0, "wake_intensity");
}

SynthRanges SynthRanges::clean() { return SynthRanges{}; }

SynthRanges SynthRanges::robust() {
  SynthRanges r;
  r.noise_sigma = {0.0, 12.0};
  r.occluder_probability = 0.6;
  r.wake_probability = 0.1;
  return r;
}

SynthSpec sample_spec(const SynthRanges& ranges, std::uint64_t seed, int index) {
  ranges.validate();
  const std::uint64_t frame_seed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
  std::mt19937_64 rng(frame_seed);

  SynthSpec s;
  s.width = ranges.width;
  s.height = ranges.height;
  s.y_true = uniform(rng, ranges.y_true);
  s.alpha_true_deg = uniform(rng, ranges.alpha_deg);
  s.sky_top = uniform(rng, ranges.sky_top);
  s.sky_bottom = uniform(rng, ranges.sky_bottom);
  s.sea_mean = uniform(rng, ranges.sea_mean);
  s.sea_texture_amp = uniform(rng, ranges.texture_amp);
  s.noise_sigma = uniform(rng, ranges.noise_sigma);
  s.seed = splitmix64(frame_seed);

  const double slope = std::tan(deg_to_rad(s.alpha_true_deg));
  const double center_x = (s.width - 1) / 2.0;
  const double unit = s.height / 360.0;
  auto boundary = [&](double x) { return s.y_true + slope * (x - center_x); };

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < ranges.occluder_probability) {
    const int count = std::uniform_int_distribution<int>(1, ranges.max_occluders)(rng);
    const double budget = ranges.occluder_max_width_fraction * s.width;
    for (int i = 0; i < count; ++i) {
      const double max_w = budget / count;
      const int ow = std::max(2, static_cast<int>(uniform(rng, {0.3 * max_w, max_w})));
      const int x0 = std::uniform_int_distribution<int>(0, s.width - ow)(rng);
      const double top = boundary(x0 + ow / 2.0) - uniform(rng, {6.0 * unit, 30.0 * unit});
      const double bottom = boundary(x0 + ow / 2.0) + uniform(rng, {3.0 * unit, 15.0 * unit});
      Occluder o;
      o.x0 = x0;
      o.x1 = x0 + ow;
      o.y0 = std::clamp(static_cast<int>(std::lround(top)), 0, s.height - 1);
      o.y1 = std::clamp(static_cast<int>(std::lround(bottom)), o.y0 + 1, s.height);
      o.intensity = uniform(rng, ranges.occluder_intensity);
      s.occluders.push_back(o);
    }
  }
  if (coin(rng) < ranges.wake_probability) {
    const double length = uniform(rng, ranges.wake_length_fraction) * s.width;
    const double cx = uniform(rng, {0.0, static_cast<double>(s.width - 1)});
    const double depth = uniform(rng, {0.1, 0.5}) * (s.height - s.y_true);
    const double angle = deg_to_rad(s.alpha_true_deg + uniform(rng, {-4.0, 4.0}));
    const double cy = boundary(cx) + depth;
    Wake wk;
    wk.x0 = cx - 0.5 * length * std::cos(angle);
    wk.x1 = cx + 0.5 * length * std::cos(angle);
    wk.y0 = cy - 0.5 * length * std::sin(angle);
    wk.y1 = cy + 0.5 * length * std::sin(angle);
    wk.width = uniform(rng, ranges.wake_width) * unit;
    wk.intensity = uniform(rng, ranges.wake_intensity);
    s.wake = wk;
  }
  return s;
}

std::vector<RenderedFrame> render_corpus(int n, const SynthRanges& ranges, std::uint64_t seed,
                                         const std::string& video_id) {
  require(n >= 1, "corpus size must be >= 1");
  ranges.validate();
  std::vector<RenderedFrame> frames;
  frames.reserve(n);
  for (int i = 0; i < n; ++i) {
    frames.push_back(render_frame(sample_spec(ranges, seed, i)));
    frames.back().truth.video_id = video_id;
    frames.back().truth.frame_idx = i;
  }
  return frames;
}

Corpus make_corpus(int n, const SynthRanges& ranges, std::uint64_t seed, const std::filesystem::path& out_dir,
                   std::string video_id) {
  require(n >= 1, "corpus size must be >= 1");
  ranges.validate();
  if (video_id.empty()) {
    video_id = std::filesystem::absolute(out_dir).lexically_normal().filename().string();
    if (video_id.empty()) video_id = std::filesystem::absolute(out_dir).lexically_normal().parent_path().filename().string();
    if (video_id.empty()) video_id = "synth";
  }
  std::filesystem::create_directories(out_dir);

  Corpus corpus;
  nlohmann::ordered_json manifest;
  manifest["seed"] = seed;
  manifest["n"] = n;
  manifest["video_id"] = video_id;
  manifest["ranges"] = to_json(ranges);
  manifest["frames"] = nlohmann::ordered_json::array();
  for (int i = 0; i < n; ++i) {
    SynthSpec spec = sample_spec(ranges, seed, i);
    RenderedFrame frame = render_frame(spec);
    frame.truth.video_id = video_id;
    frame.truth.frame_idx = i;
    char name[32];
    std::snprintf(name, sizeof name, "%05d.pgm", i);
    const auto path = out_dir / name;
    save_pgm(frame.image, path);
    auto entry = to_json(spec);
    entry["file"] = name;
    manifest["frames"].push_back(entry);
    corpus.frames.push_back(path);
    corpus.truth.push_back(frame.truth);
    corpus.specs.push_back(std::move(spec));
  }
  write_ground_truth(corpus.truth, out_dir / "ground_truth.csv");
  std::ofstream out(out_dir / "spec.json", std::ios::trunc);
  out << manifest.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write " + (out_dir / "spec.json").string());
  return corpus;
}

}  // namespace mscm
