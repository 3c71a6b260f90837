#include "sdd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <json.hpp>

#include "sdd/error.hpp"

namespace sdd {

namespace {

constexpr int kHours = 24;
constexpr std::int32_t kSecondsPerHour = 3600;

std::int32_t random_offset_in_hour(int hour, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int32_t> within(0, kSecondsPerHour - 1);
  return hour * kSecondsPerHour + within(rng);
}

void check_farm_input(const DataCollection& day, const FarmSpec& spec, FarmKind expected) {
  if (spec.kind != expected) throw ConfigError("farm spec kind does not match the requested transform");
  if (!(spec.nu > 0.0)) throw ConfigError("farming magnitude nu must be positive");
  if (day.events.empty()) throw Error("cannot farm an empty day");
}

DataCollection with_fakes(const DataCollection& day, std::vector<std::int32_t> fakes) {
  DataCollection out = day;
  out.events.insert(out.events.end(), fakes.begin(), fakes.end());
  std::sort(out.events.begin(), out.events.end());
  return out;
}

}  // namespace

DayProfile DayProfile::default_profile() {
  DayProfile p;
  p.hourly_weights = {0.3, 0.2, 0.1, 0.1, 0.1, 0.2, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0,
                      6.0, 4.0, 2.5, 2.0, 2.5, 4.0, 5.5, 5.0, 3.5, 2.0, 1.2, 0.6};
  const double total = std::accumulate(p.hourly_weights.begin(), p.hourly_weights.end(), 0.0);
  for (auto& w : p.hourly_weights) w /= total;
  p.base_volume = 120;
  return p;
}

DayProfile DayProfile::uniform(std::int64_t base_volume) {
  DayProfile p;
  p.hourly_weights.fill(1.0 / kHours);
  p.base_volume = base_volume;
  return p;
}

void DayProfile::validate() const {
  if (base_volume < 1) throw ConfigError("base_volume must be at least 1");
  double total = 0.0;
  for (const double w : hourly_weights) {
    if (!(w >= 0.0)) throw ConfigError("hourly weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("hourly weights must sum to 1");
}

DayProfile DayProfile::from_json(std::string_view text) {
  DayProfile p;
  try {
    const auto j = nlohmann::json::parse(text);
    const auto w = j.at("hourly_weights").get<std::vector<double>>();
    if (w.size() != kHours) throw ConfigError("hourly_weights must have 24 entries");
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) throw ConfigError("hourly weights must have positive sum");
    for (int h = 0; h < kHours; ++h) p.hourly_weights[h] = w[h] / total;
    p.base_volume = j.at("base_volume").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad profile JSON: ") + e.what());
  }
  p.validate();
  return p;
}

std::string DayProfile::to_json() const {
  return nlohmann::json{{"hourly_weights", hourly_weights}, {"base_volume", base_volume}}.dump();
}

std::string_view to_string(FarmKind kind) noexcept {
  return kind == FarmKind::kCentralized ? "centralized" : "equalized";
}

FarmKind parse_farm(std::string_view name) {
  if (name == "centralized") return FarmKind::kCentralized;
  if (name == "equalized") return FarmKind::kEqualized;
  throw ConfigError("unknown farm kind '" + std::string(name) + "'");
}

std::int64_t fake_event_count(std::size_t size, double nu) {
  return static_cast<std::int64_t>(std::floor(nu * static_cast<double>(size) + 0.5));
}

DataCollection generate_normal_day(const DayProfile& profile, std::uint64_t seed, std::string entity_id,
                                   std::int64_t day) {
  profile.validate();
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> hour(profile.hourly_weights.begin(), profile.hourly_weights.end());
  DataCollection out{std::move(entity_id), day, {}};
  out.events.reserve(static_cast<std::size_t>(profile.base_volume));
  for (std::int64_t i = 0; i < profile.base_volume; ++i) out.events.push_back(random_offset_in_hour(hour(rng), rng));
  std::sort(out.events.begin(), out.events.end());
  return out;
}

DataCollection farm_centralized(const DataCollection& day, const FarmSpec& spec) {
  check_farm_input(day, spec, FarmKind::kCentralized);
  std::mt19937_64 rng(spec.seed);
  const int width = std::uniform_int_distribution<int>(1, 3)(rng);
  const int start = std::uniform_int_distribution<int>(0, kHours - width)(rng);
  std::uniform_int_distribution<int> hour(start, start + width - 1);

  const auto n_fake = fake_event_count(day.events.size(), spec.nu);
  std::vector<std::int32_t> fakes;
  fakes.reserve(static_cast<std::size_t>(n_fake));
  for (std::int64_t i = 0; i < n_fake; ++i) fakes.push_back(random_offset_in_hour(hour(rng), rng));
  return with_fakes(day, std::move(fakes));
}

DataCollection farm_equalized(const DataCollection& day, const FarmSpec& spec) {
  check_farm_input(day, spec, FarmKind::kEqualized);
  std::mt19937_64 rng(spec.seed);

  std::array<std::int64_t, kHours> counts{};
  for (const auto e : day.events) ++counts[static_cast<std::size_t>(e / kSecondsPerHour)];
  const auto n = static_cast<std::int64_t>(day.events.size());
  const auto n_fake = fake_event_count(day.events.size(), spec.nu);

  // Largest-remainder apportionment of n_fake over the hourly counts.
  std::array<std::int64_t, kHours> alloc{};
  std::array<std::int64_t, kHours> remainder{};
  std::int64_t assigned = 0;
  for (int h = 0; h < kHours; ++h) {
    const auto scaled = n_fake * counts[h];
    alloc[h] = scaled / n;
    remainder[h] = scaled % n;
    assigned += alloc[h];
  }
  std::array<int, kHours> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (std::int64_t i = 0; assigned < n_fake; ++i, ++assigned) ++alloc[order[static_cast<std::size_t>(i)]];

  std::vector<std::int32_t> fakes;
  fakes.reserve(static_cast<std::size_t>(n_fake));
  for (int h = 0; h < kHours; ++h) {
    for (std::int64_t i = 0; i < alloc[h]; ++i) fakes.push_back(random_offset_in_hour(h, rng));
  }
  return with_fakes(day, std::move(fakes));
}

DataCollection farm(const DataCollection& day, const FarmSpec& spec) {
  return spec.kind == FarmKind::kCentralized ? farm_centralized(day, spec) : farm_equalized(day, spec);
}

}  // namespace sdd
