#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "sdd/ingest.hpp"

namespace sdd {

/// Hour-of-day shape and daily volume of a synthetic seller.
struct DayProfile {
  std::array<double, 24> hourly_weights{};
  std::int64_t base_volume = 1;

  /// Bimodal lunch/dinner shape, 120 events per day.
  static DayProfile default_profile();
  static DayProfile uniform(std::int64_t base_volume);

  /// {"hourly_weights": [24 numbers], "base_volume": int}. Weights are
  /// renormalized if they do not already sum to 1.
  static DayProfile from_json(std::string_view text);
  std::string to_json() const;

  void validate() const;
};

enum class FarmKind { kCentralized, kEqualized };

std::string_view to_string(FarmKind kind) noexcept;
FarmKind parse_farm(std::string_view name);

struct FarmSpec {
  FarmKind kind = FarmKind::kCentralized;
  double nu = 1.0;  // fake volume as a fraction of true volume
  std::uint64_t seed = 0;
};

/// Number of fake events added to a day of `size` events: round-half-up of
/// nu * size.
std::int64_t fake_event_count(std::size_t size, double nu);

/// Draws base_volume events; hours follow the profile, minute and second
/// are uniform. Deterministic per seed.
DataCollection generate_normal_day(const DayProfile& profile, std::uint64_t seed, std::string entity_id = "S0001",
                                   std::int64_t day = 0);

/// Adds fakes concentrated in a random contiguous window of 1 to 3 hours.
DataCollection farm_centralized(const DataCollection& day, const FarmSpec& spec);

/// Adds fakes apportioned to hours in proportion to the day's own hourly
/// counts (largest remainder), keeping the hourly shape and scaling volume.
DataCollection farm_equalized(const DataCollection& day, const FarmSpec& spec);

/// Dispatches on spec.kind.
DataCollection farm(const DataCollection& day, const FarmSpec& spec);

}  // namespace sdd
