#include "mscm/detector.hpp"

#include "mscm/edge_hough.hpp"
#include "mscm/iva.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace mscm {

std::string to_string(FrameStatus status) {
  switch (status) {
    case FrameStatus::ok: return "ok";
    case FrameStatus::fallback: return "fallback";
    case FrameStatus::no_detection: return "no_detection";
    case FrameStatus::decode_error: return "decode_error";
    case FrameStatus::invalid_input: return "invalid_input";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

const LineCandidate& strongest(const std::vector<LineCandidate>& candidates) {
  return *std::max_element(candidates.begin(), candidates.end(),
                           [](const LineCandidate& a, const LineCandidate& b) { return a.score() < b.score(); });
}

}  // namespace

FrameCandidates collect_candidates(const GrayImage& image, const DetectorConfig& config, StageTimings* timings) {
  config.validate();
  StageTimings local;
  auto t0 = Clock::now();
  const ScaleStack stack = build_scale_stack<float>(image, config.s_max);
  local.multiscale_ms = elapsed_ms(t0);

  FrameCandidates out;
  out.width = width(image);
  out.height = height(image);
  t0 = Clock::now();
  out.hough = hough_branch(stack.images, config);
  local.hough_ms = elapsed_ms(t0);
  t0 = Clock::now();
  out.iva = iva_branch(stack, config);
  local.iva_ms = elapsed_ms(t0);
  if (timings) *timings = local;
  return out;
}

FrameResult fuse_candidates(const FrameCandidates& candidates, const DetectorConfig& config) {
  FrameResult result;
  result.hough_count = static_cast<int>(candidates.hough.size());
  result.iva_count = static_cast<int>(candidates.iva.size());
  if (!candidates.hough.empty() && !candidates.iva.empty()) {
    result.detection = select_horizon(candidates.hough, candidates.iva, candidates.height);
    result.status = FrameStatus::ok;
    return result;
  }
  result.message = "empty candidate branch (hough=" + std::to_string(result.hough_count) +
                   ", iva=" + std::to_string(result.iva_count) + ")";
  if (config.fallback && (!candidates.hough.empty() || !candidates.iva.empty())) {
    const auto& pool = candidates.hough.empty() ? candidates.iva : candidates.hough;
    const auto& best = strongest(pool);
    const int index = static_cast<int>(&best - pool.data());
    PairScore pair;
    if (candidates.hough.empty())
      pair.iva_index = index;
    else
      pair.hough_index = index;
    result.detection = Detection{best, pair, result.hough_count, result.iva_count};
    result.status = FrameStatus::fallback;
    return result;
  }
  result.status = FrameStatus::no_detection;
  return result;
}

FrameResult detect_horizon(const GrayImage& image, const DetectorConfig& config, StageTimings* timings) {
  if (image.rows() < 16 || image.cols() < 16) {
    FrameResult r;
    r.status = FrameStatus::invalid_input;
    r.message = "frame must be at least 16x16";
    return r;
  }
  StageTimings local;
  const FrameCandidates candidates = collect_candidates(image, config, &local);
  const auto t0 = Clock::now();
  FrameResult result = fuse_candidates(candidates, config);
  local.fusion_ms = elapsed_ms(t0);
  if (timings) *timings = local;
  return result;
}

GrayImage render_overlay(const GrayImage& image, const LineCandidate& line) {
  GrayImage out = (image.cast<int>() / 2).cast<std::uint8_t>();
  const int w = width(image), h = height(image);
  for (int x = 0; x < w; ++x) {
    const double row = line.row_at(x, w);
    const int y = static_cast<int>(std::floor(row + 0.5));
    for (int dy = -1; dy <= 1; ++dy) {
      if (y + dy >= 0 && y + dy < h) out(y + dy, x) = 255;
    }
  }
  return out;
}

}  // namespace mscm
