#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "sdd/detector.hpp"

namespace sdd {

struct MgofConfig {
  double significance = 0.05;
  std::uint64_t c_th = 3;
  int window_bins = kDefaultBinsPerDay;  // first-level bins per window
  // Additive smoothing of hypotheses before the KL, so that a bin the
  // hypothesis never saw costs a finite amount.
  double smoothing = kDefaultKlSmoothing;
};

struct HypothesisEntry {
  Distribution distribution;
  std::uint64_t support_count = 0;
};

enum class MgofVerdict { kAnomaly, kNormal, kUndecided };

std::string_view to_string(MgofVerdict v) noexcept;

struct MgofStepResult {
  MgofVerdict verdict = MgofVerdict::kAnomaly;
  // Smallest KL (bits) from the target to any hypothesis; 0 when none exist.
  double divergence = 0.0;
  std::vector<HypothesisEntry> hypotheses;
};

/// Likelihood-ratio statistic G = 2 N KL_nats(empirical || hypothesis), with
/// the hypothesis smoothed first. Infinite when the (smoothed) hypothesis
/// lacks mass the target has.
double g_statistic(const Histogram& target, const Distribution& hypothesis, double smoothing = 0.0);

/// One windowed goodness-of-fit step. A hypothesis is rejected when G exceeds
/// the chi-square quantile at 1 - significance with bins - 1 degrees of
/// freedom. Rejecting all (or having none) yields kAnomaly and stores the
/// target as a new hypothesis; otherwise the closest surviving hypothesis
/// gains one support and the window is kNormal once that support exceeds c_th.
MgofStepResult mgof_step(std::vector<HypothesisEntry> hypotheses, const Histogram& target, const MgofConfig& cfg);

/// Sequential fold of mgof_step over the collections in input order.
/// Undecided windows are reported as flagged.
std::vector<Verdict> mgof_run(const std::vector<DataCollection>& collections, const MgofConfig& cfg,
                              const FeatureConfig& features);

}  // namespace sdd
