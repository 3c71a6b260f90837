#include "sdd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <ostream>
#include <random>

#include <json.hpp>

#include "sdd/error.hpp"
#include "sdd/sdde.hpp"
#include "sdd/sddr.hpp"

namespace sdd {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

bool is_sdde(Algo a) {
  return a == Algo::kSdde || a == Algo::kSddePlus || a == Algo::kSddeDyn || a == Algo::kSddeDynPlus;
}

bool is_dynamic(Algo a) { return a == Algo::kSddeDyn || a == Algo::kSddeDynPlus; }

bool uses_alpha(Algo a) { return a == Algo::kSddrPlus || a == Algo::kSddePlus || a == Algo::kSddeDynPlus; }

std::int64_t day_volume(const ExperimentConfig& cfg, std::size_t day_index, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(1.0 - cfg.volume_jitter, 1.0 + cfg.volume_jitter);
  const double base = static_cast<double>(cfg.profile.base_volume) *
                      std::pow(1.0 + cfg.volume_growth, static_cast<double>(day_index));
  return std::max<std::int64_t>(1, std::llround(base * jitter(rng)));
}

SeedReport run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  SeedReport r;
  r.seed = seed;
  const auto data = make_dataset(cfg, seed);
  const auto start = Clock::now();
  try {
    const auto out =
        run_detector(cfg, data.collections, data.evidence_normal, data.evidence_anomalous, data.farmed);
    r.time_ms = elapsed_ms(start);
    std::vector<bool> flags;
    flags.reserve(out.verdicts.size());
    for (const auto& v : out.verdicts) flags.push_back(v.flagged);
    r.flagged = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
    r.scores = metrics(flags, data.farmed);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.time_ms = elapsed_ms(start);
    r.error = e.what();
  }
  return r;
}

nlohmann::json config_json(const ExperimentConfig& c) {
  return {
      {"algo", to_string(c.algo)},
      {"level", static_cast<int>(c.level)},
      {"metric", to_string(c.metric)},
      {"smoothing", DivergenceMetric(c.metric, c.smoothing).smoothing()},
      {"alpha", c.alpha},
      {"nu", c.nu},
      {"fraction_anomalous", c.fraction_anomalous},
      {"farm", to_string(c.farm)},
      {"seeds", c.seeds},
      {"days", c.days},
      {"evidence_normal", c.evidence_normal},
      {"evidence_anomalous", c.evidence_anomalous},
      {"volume_jitter", c.volume_jitter},
      {"volume_growth", c.volume_growth},
      {"bins_per_day", c.bins_per_day},
      {"value_bin_width", c.value_bin_width},
      {"mgof", {{"significance", c.mgof.significance}, {"c_th", c.mgof.c_th}, {"window_bins", c.mgof.window_bins}}},
      {"dynamic_ground_truth", c.dynamic_ground_truth},
  };
}

nlohmann::json report_to_json(const ExperimentReport& r) {
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& s : r.per_seed) {
    nlohmann::json j = {{"seed", s.seed},
                        {"precision", s.scores.precision},
                        {"recall", s.scores.recall},
                        {"f1", s.scores.f1},
                        {"time_ms", s.time_ms},
                        {"flagged", s.flagged}};
    if (!s.error.empty()) j["error"] = s.error;
    seeds.push_back(std::move(j));
  }
  return {{"config", config_json(r.config)},
          {"precision", r.scores.precision},
          {"recall", r.scores.recall},
          {"f1", r.scores.f1},
          {"wall_time_ms", r.wall_time_ms},
          {"per_seed", seeds}};
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::string_view to_string(Algo algo) noexcept {
  switch (algo) {
    case Algo::kSddr:
      return "sddr";
    case Algo::kSddrPlus:
      return "sddr+";
    case Algo::kSdde:
      return "sdde";
    case Algo::kSddePlus:
      return "sdde+";
    case Algo::kSddeDyn:
      return "sdde-dyn";
    case Algo::kSddeDynPlus:
      return "sdde-dyn+";
    case Algo::kMgof:
      return "mgof";
  }
  return "unknown";
}

Algo parse_algo(std::string_view name) {
  for (const auto a : all_algos()) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::vector<Algo> all_algos() {
  return {Algo::kSddr, Algo::kSddrPlus, Algo::kSdde, Algo::kSddePlus, Algo::kSddeDyn, Algo::kSddeDynPlus, Algo::kMgof};
}

void ExperimentConfig::validate() const {
  if (!(fraction_anomalous > 0.0 && fraction_anomalous < 1.0)) throw ConfigError("fraction_anomalous must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(nu > 0.0)) throw ConfigError("nu must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (days < 2) throw ConfigError("at least two days are required");
  if (is_sdde(algo) && (evidence_normal < 2 || evidence_anomalous < 2)) {
    throw ConfigError("SDD-E needs at least two normal and two anomalous evidence days");
  }
  if (!(volume_jitter >= 0.0 && volume_jitter < 1.0)) throw ConfigError("volume_jitter must lie in [0, 1)");
  if (!(volume_growth > -1.0)) throw ConfigError("volume_growth must exceed -1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (bins_per_day <= 0 || kSecondsPerDay % bins_per_day != 0) throw ConfigError("bins_per_day must divide 86400");
  if (value_bin_width == 0) throw ConfigError("value_bin_width must be positive");
  if (mgof.window_bins <= 0 || kSecondsPerDay % mgof.window_bins != 0) {
    throw ConfigError("MGoF window_bins must divide 86400");
  }
  if (!(mgof.significance > 0.0 && mgof.significance < 1.0)) throw ConfigError("significance must lie in (0, 1)");
  if (mgof.c_th == 0) throw ConfigError("c_th must be positive");
  profile.validate();
  parse_day(start_date);
  DivergenceMetric(metric, smoothing);
}

DetectorConfig ExperimentConfig::detector_config() const {
  return {FeatureConfig{level, bins_per_day, value_bin_width}, DivergenceMetric(metric, smoothing)};
}

Scores metrics(const std::map<std::string, bool>& predicted, const std::map<std::string, bool>& actual) {
  if (predicted.size() != actual.size()) throw Error("predicted and actual cover different ids");
  std::vector<bool> p, a;
  for (const auto& [id, flag] : predicted) {
    const auto it = actual.find(id);
    if (it == actual.end()) throw Error("id '" + id + "' has no label");
    p.push_back(flag);
    a.push_back(it->second);
  }
  return metrics(p, a);
}

Scores metrics(const std::vector<bool>& predicted, const std::vector<bool>& actual) {
  if (predicted.size() != actual.size()) throw Error("predicted and actual differ in length");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && actual[i]) ++tp;
    if (predicted[i] && !actual[i]) ++fp;
    if (!predicted[i] && actual[i]) ++fn;
  }
  Scores s;
  s.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

LabeledDataset make_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto first_day = parse_day(cfg.start_date);
  const std::string entity = "S0001";
  std::size_t day_index = 0;

  const auto next_normal = [&] {
    auto profile = cfg.profile;
    profile.base_volume = day_volume(cfg, day_index, rng);
    const auto day_seed = rng();
    return generate_normal_day(profile, day_seed, entity, first_day + static_cast<std::int64_t>(day_index++));
  };
  const auto farmed = [&](const DataCollection& d) { return farm(d, FarmSpec{cfg.farm, cfg.nu, rng()}); };

  LabeledDataset ds;
  for (std::size_t i = 0; i < cfg.evidence_normal; ++i) ds.evidence_normal.push_back(next_normal());
  for (std::size_t i = 0; i < cfg.evidence_anomalous; ++i) ds.evidence_anomalous.push_back(farmed(next_normal()));

  for (std::size_t i = 0; i < cfg.days; ++i) ds.collections.push_back(next_normal());
  const auto n_farmed =
      static_cast<std::size_t>(std::floor(cfg.fraction_anomalous * static_cast<double>(cfg.days) + 0.5));
  std::vector<std::size_t> idx(cfg.days);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  ds.farmed.assign(cfg.days, false);
  std::vector<std::size_t> chosen(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(std::min(n_farmed, cfg.days)));
  std::sort(chosen.begin(), chosen.end());
  for (const auto i : chosen) {
    ds.collections[i] = farmed(ds.collections[i]);
    ds.farmed[i] = true;
  }
  return ds;
}

DetectionOutput run_detector(const ExperimentConfig& cfg, const std::vector<DataCollection>& collections,
                             const std::vector<DataCollection>& evidence_normal,
                             const std::vector<DataCollection>& evidence_anomalous,
                             const std::vector<bool>& feedback_labels) {
  const auto det = cfg.detector_config();
  DetectionOutput out;
  switch (cfg.algo) {
    case Algo::kSddr:
      out.verdicts = detect_sddr(collections, det);
      break;
    case Algo::kSddrPlus:
      out.verdicts = detect_sddr_plus(collections, det, cfg.alpha);
      break;
    case Algo::kMgof:
      out.verdicts = mgof_run(collections, cfg.mgof, det.features);
      break;
    default: {
      const double alpha = uses_alpha(cfg.algo) ? cfg.alpha : 0.5;
      if (!is_dynamic(cfg.algo)) {
        auto state =
            SddeState::from_collections(evidence_normal, evidence_anomalous, alpha, det, EvidencePolicy::kStatic);
        out.verdicts = state.classify_batch(collections);
        break;
      }
      if (cfg.dynamic_ground_truth && feedback_labels.size() != collections.size()) {
        throw ConfigError("ground-truth feedback needs one label per collection");
      }
      auto state = SddeState::from_collections(evidence_normal, evidence_anomalous, alpha, det,
                                               EvidencePolicy::kFifoWindow, cfg.evidence_normal,
                                               cfg.evidence_anomalous);
      out.verdicts.reserve(collections.size());
      for (std::size_t i = 0; i < collections.size(); ++i) {
        out.verdicts.push_back(state.classify_and_update(
            collections[i], cfg.dynamic_ground_truth ? std::optional<bool>(feedback_labels[i]) : std::nullopt));
      }
    }
  }
  out.divergence_evaluations = det.metric.evaluations();
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;
  report.per_seed.resize(cfg.seeds.size());

  const auto jobs = static_cast<std::size_t>(cfg.jobs);
  for (std::size_t begin = 0; begin < cfg.seeds.size(); begin += jobs) {
    const auto end = std::min(begin + jobs, cfg.seeds.size());
    std::vector<std::future<SeedReport>> pending;
    for (std::size_t i = begin; i < end; ++i) {
      pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_seed, std::cref(cfg),
                                   cfg.seeds[i]));
    }
    for (std::size_t i = begin; i < end; ++i) report.per_seed[i] = pending[i - begin].get();
  }

  const auto n = static_cast<double>(report.per_seed.size());
  for (const auto& s : report.per_seed) {
    report.scores.precision += s.scores.precision / n;
    report.scores.recall += s.scores.recall / n;
    report.scores.f1 += s.scores.f1 / n;
    report.wall_time_ms += s.time_ms / n;
  }
  return report;
}

SweepParam parse_sweep_param(std::string_view name) {
  if (name == "alpha") return SweepParam::kAlpha;
  if (name == "nu") return SweepParam::kNu;
  throw ConfigError("sweep parameter must be alpha or nu");
}

std::vector<ExperimentReport> sweep(const ExperimentConfig& cfg, SweepParam vary, const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<ExperimentConfig> cells;
  for (const double v : values) {
    auto c = cfg;
    if (vary == SweepParam::kAlpha) {
      c.alpha = v;
      c.fraction_anomalous = v;
    } else {
      c.nu = v;
    }
    c.validate();
    cells.push_back(std::move(c));
  }
  std::vector<ExperimentReport> reports;
  reports.reserve(cells.size());
  for (const auto& c : cells) reports.push_back(run_experiment(c));
  return reports;
}

void write_long_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
  out << "algo,level,farm,alpha,nu,seed,precision,recall,f1,time_ms\n";
  for (const auto& r : reports) {
    const auto& c = r.config;
    for (const auto& s : r.per_seed) {
      out << to_string(c.algo) << ',' << static_cast<int>(c.level) << ',' << to_string(c.farm) << ',' << c.alpha
          << ',' << c.nu << ',' << s.seed << ',' << s.scores.precision << ',' << s.scores.recall << ','
          << s.scores.f1 << ',' << s.time_ms << '\n';
    }
  }
}

std::string report_json(const ExperimentReport& report) { return report_to_json(report).dump(2); }

std::string reports_json(const std::vector<ExperimentReport>& reports) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports) j.push_back(report_to_json(r));
  return j.dump(2);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("spearman needs two equal-length series of length >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double time_sddr_ms(std::size_t n, const ExperimentConfig& cfg, std::uint64_t seed, int repeats) {
  auto c = cfg;
  c.algo = Algo::kSddr;
  c.days = n;
  c.evidence_normal = 0;
  c.evidence_anomalous = 0;
  const auto data = make_dataset(c, seed);
  const auto det = c.detector_config();
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(repeats, 1); ++r) {
    const auto start = Clock::now();
    const auto verdicts = detect_sddr(data.collections, det);
    best = std::min(best, elapsed_ms(start));
    if (verdicts.size() != n) throw Error("internal: verdict count mismatch");
  }
  return best;
}

std::string verdict_json(const Verdict& v) {
  return nlohmann::json{{"id", v.id}, {"divergence", v.divergence}, {"flagged", v.flagged}, {"rule", to_string(v.rule)}}
      .dump();
}

}  // namespace sdd
