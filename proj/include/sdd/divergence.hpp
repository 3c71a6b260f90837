#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdd/histogram.hpp"

namespace sdd {

// All divergences are in bits. 0 * log 0 is taken as 0.

/// Kullback-Leibler divergence. Throws when p[k] > 0 and q[k] == 0.
double kl(std::span<const double> p, std::span<const double> q);

/// Jensen-Shannon divergence of two distributions, in [0, 1].
double jsd_pair(std::span<const double> p, std::span<const double> q);

/// Generalized JSD: H(sum w_i P_i) - sum w_i H(P_i), in [0, log2 n].
/// Weights default to uniform and must sum to 1.
double jsd_multi(const std::vector<std::vector<double>>& ps,
                 std::optional<std::vector<double>> weights = std::nullopt);

/// Shannon entropy in bits.
double entropy(std::span<const double> p);

enum class MetricKind { kJsd, kKl };

std::string_view to_string(MetricKind kind) noexcept;
MetricKind parse_metric(std::string_view name);

inline constexpr double kDefaultKlSmoothing = 1e-6;

/// The pluggable `div(P || Q)` of the detectors.
///
/// Distributions on different supports are aligned (zero-padded) before
/// evaluation. For KL both sides are smoothed by `smoothing()` first.
///
/// Every evaluation increments a counter that is shared between copies, so a
/// caller can audit how many divergences a detector computed.
class DivergenceMetric {
 public:
  explicit DivergenceMetric(MetricKind kind = MetricKind::kJsd, std::optional<double> smoothing = std::nullopt);

  MetricKind kind() const noexcept { return kind_; }
  double smoothing() const noexcept { return smoothing_; }

  double operator()(const Distribution& p, const Distribution& q) const;

  std::uint64_t evaluations() const noexcept { return evaluations_->load(std::memory_order_relaxed); }
  void reset_evaluations() const noexcept { evaluations_->store(0, std::memory_order_relaxed); }

 private:
  double evaluate_aligned(const Distribution& p, const Distribution& q) const;

  MetricKind kind_;
  double smoothing_;
  std::shared_ptr<std::atomic<std::uint64_t>> evaluations_;
};

}  // namespace sdd
