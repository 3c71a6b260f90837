#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sdd/divergence.hpp"
#include "sdd/histogram.hpp"
#include "sdd/ingest.hpp"

namespace sdd {

enum class Level { kFirst = 1, kSecond = 2 };

Level parse_level(int level);

/// How a DataCollection becomes a Distribution.
struct FeatureConfig {
  Level level = Level::kFirst;
  int bins_per_day = kDefaultBinsPerDay;
  std::uint64_t value_bin_width = kDefaultValueBinWidth;
};

struct DetectorConfig {
  FeatureConfig features;
  DivergenceMetric metric = DivergenceMetric();
};

/// Normalized first- or second-level histogram of one collection.
Distribution distribution_of(const DataCollection& collection, const FeatureConfig& features);

/// distribution_of for a batch, aligned onto one common support.
std::vector<Distribution> distributions_of(const std::vector<DataCollection>& collections,
                                           const FeatureConfig& features);

enum class Rule {
  kZ3,        // (d - mu) / sigma > 3
  kRankAlpha, // among the ceil(n * alpha) largest divergences
  kThreshold, // d > T from evidence
  kMgofAnomaly,
  kMgofUndecided,
  kMgofNormal,
};

std::string_view to_string(Rule rule) noexcept;

struct Verdict {
  std::string id;
  double divergence = 0.0;  // bits
  bool flagged = false;
  Rule rule = Rule::kZ3;
};

}  // namespace sdd
