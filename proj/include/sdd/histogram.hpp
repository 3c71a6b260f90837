#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sdd/ingest.hpp"

namespace sdd {

/// Left-closed, right-open bins; `counts.size() == edges.size() - 1`.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;

  std::size_t bins() const noexcept { return counts.size(); }
  std::uint64_t total() const noexcept;
};

/// Normalized histogram. Mass sums to 1 within 1e-9.
struct Distribution {
  std::vector<double> mass;
  std::vector<double> edges;

  std::size_t bins() const noexcept { return mass.size(); }
  std::span<const double> view() const noexcept { return mass; }
};

inline constexpr int kDefaultBinsPerDay = 24;
inline constexpr std::uint64_t kDefaultValueBinWidth = 1;

/// Events per time-of-day span. `bins_per_day` must divide 86400.
Histogram build_first_level(const DataCollection& collection, int bins_per_day = kDefaultBinsPerDay);

/// Frequency-of-frequencies: bin j counts the first-level bins whose raw
/// count lies in [j*w, (j+1)*w). Edges span [0, max_count + w).
Histogram build_second_level(const Histogram& first, std::uint64_t value_bin_width = kDefaultValueBinWidth);

/// mass[k] = (counts[k] + eps) / (total + bins * eps). Throws on an all-zero
/// histogram with eps == 0.
Distribution normalize(const Histogram& h, double epsilon = 0.0);

/// Additive smoothing applied after normalization; keeps the edges.
Distribution smooth(const Distribution& d, double epsilon);

/// Re-expresses both distributions over the union of their ranges, padding
/// absent bins with zero mass. Both must share one uniform bin width on a
/// common grid; identical edge sets are returned unchanged.
std::pair<Distribution, Distribution> align(const Distribution& a, const Distribution& b);

/// `align` generalized to many distributions.
std::vector<Distribution> align_all(const std::vector<Distribution>& ds);

bool same_support(const Distribution& a, const Distribution& b) noexcept;

}  // namespace sdd
