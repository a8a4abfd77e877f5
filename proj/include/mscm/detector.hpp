#pragma once

#include "mscm/config.hpp"
#include "mscm/fusion.hpp"
#include "mscm/image.hpp"
#include "mscm/multiscale.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mscm {

enum class FrameStatus {
  ok,
  fallback,       // one branch was empty; best single-branch candidate reported
  no_detection,   // a branch produced no candidates
  decode_error,
  invalid_input,  // frame smaller than 16x16
};

std::string to_string(FrameStatus status);

struct StageTimings {
  double multiscale_ms = 0.0;
  double hough_ms = 0.0;
  double iva_ms = 0.0;
  double fusion_ms = 0.0;

  double total_ms() const { return multiscale_ms + hough_ms + iva_ms + fusion_ms; }
};

struct FrameCandidates {
  int width = 0;
  int height = 0;
  std::vector<LineCandidate> hough;
  std::vector<LineCandidate> iva;
};

struct FrameResult {
  FrameStatus status = FrameStatus::no_detection;
  std::optional<Detection> detection;
  int hough_count = 0;
  int iva_count = 0;
  std::string message;
};

/// Multi-scale stack plus both candidate branches.
FrameCandidates collect_candidates(const GrayImage& image, const DetectorConfig& config,
                                   StageTimings* timings = nullptr);

/// Affirm-score selection over the candidates, honouring config.fallback.
FrameResult fuse_candidates(const FrameCandidates& candidates, const DetectorConfig& config);

/// Full pipeline for one intensity frame.
FrameResult detect_horizon(const GrayImage& image, const DetectorConfig& config, StageTimings* timings = nullptr);

/// Frame dimmed to half intensity with the line drawn at 255.
GrayImage render_overlay(const GrayImage& image, const LineCandidate& line);

}  // namespace mscm
