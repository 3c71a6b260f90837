#include "sdd/detector.hpp"

#include <string>

#include "sdd/error.hpp"

namespace sdd {

Level parse_level(int level) {
  if (level == 1) return Level::kFirst;
  if (level == 2) return Level::kSecond;
  throw ConfigError("level must be 1 or 2, got " + std::to_string(level));
}

Distribution distribution_of(const DataCollection& collection, const FeatureConfig& features) {
  const auto first = build_first_level(collection, features.bins_per_day);
  if (features.level == Level::kFirst) return normalize(first);
  return normalize(build_second_level(first, features.value_bin_width));
}

std::vector<Distribution> distributions_of(const std::vector<DataCollection>& collections,
                                           const FeatureConfig& features) {
  std::vector<Distribution> ds;
  ds.reserve(collections.size());
  for (const auto& c : collections) ds.push_back(distribution_of(c, features));
  return align_all(ds);
}

std::string_view to_string(Rule rule) noexcept {
  switch (rule) {
    case Rule::kZ3:
      return "z3";
    case Rule::kRankAlpha:
      return "rank_alpha";
    case Rule::kThreshold:
      return "threshold";
    case Rule::kMgofAnomaly:
      return "mgof_anomaly";
    case Rule::kMgofUndecided:
      return "mgof_undecided";
    case Rule::kMgofNormal:
      return "mgof_normal";
  }
  return "unknown";
}

}  // namespace sdd
