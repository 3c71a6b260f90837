#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdd/detector.hpp"
#include "sdd/mgof.hpp"
#include "sdd/synth.hpp"

namespace sdd {

enum class Algo { kSddr, kSddrPlus, kSdde, kSddePlus, kSddeDyn, kSddeDynPlus, kMgof };

std::string_view to_string(Algo algo) noexcept;
Algo parse_algo(std::string_view name);
std::vector<Algo> all_algos();

struct ExperimentConfig {
  Algo algo = Algo::kSddrPlus;
  Level level = Level::kFirst;
  MetricKind metric = MetricKind::kJsd;
  std::optional<double> smoothing;  // KL only; defaults per metric
  double alpha = 0.2;
  double nu = 1.0;
  double fraction_anomalous = 0.2;
  FarmKind farm = FarmKind::kCentralized;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};

  std::size_t days = 200;
  std::size_t evidence_normal = 30;
  std::size_t evidence_anomalous = 10;
  DayProfile profile = DayProfile::default_profile();
  double volume_jitter = 0.1;  // per-day volume drawn from base * U(1 - j, 1 + j)
  double volume_growth = 0.0;  // multiplicative drift of the base volume per day
  std::string start_date = "2015-07-01";

  int bins_per_day = kDefaultBinsPerDay;
  std::uint64_t value_bin_width = kDefaultValueBinWidth;
  MgofConfig mgof;
  // Dynamic SDD-E learns from true labels instead of its own verdicts.
  bool dynamic_ground_truth = false;
  int jobs = 1;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  DetectorConfig detector_config() const;
};

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision, recall and F1 over one universe of ids. Zero denominators give 0.
Scores metrics(const std::map<std::string, bool>& predicted, const std::map<std::string, bool>& actual);
Scores metrics(const std::vector<bool>& predicted, const std::vector<bool>& actual);

/// Synthetic seller history: evidence days first, then the evaluated days
/// with a fraction replaced by their farmed version.
struct LabeledDataset {
  std::vector<DataCollection> collections;
  std::vector<bool> farmed;
  std::vector<DataCollection> evidence_normal;
  std::vector<DataCollection> evidence_anomalous;
};

LabeledDataset make_dataset(const ExperimentConfig& cfg, std::uint64_t seed);

struct DetectionOutput {
  std::vector<Verdict> verdicts;
  std::uint64_t divergence_evaluations = 0;
};

/// Runs cfg.algo. Only the collections and evidence reach the detector;
/// `feedback_labels` is consulted solely by dynamic SDD-E when
/// cfg.dynamic_ground_truth is set.
DetectionOutput run_detector(const ExperimentConfig& cfg, const std::vector<DataCollection>& collections,
                             const std::vector<DataCollection>& evidence_normal,
                             const std::vector<DataCollection>& evidence_anomalous,
                             const std::vector<bool>& feedback_labels = {});

struct SeedReport {
  std::uint64_t seed = 0;
  Scores scores;
  double time_ms = 0.0;
  std::size_t flagged = 0;
  std::string error;  // detector failure; scores are then zero
};

struct ExperimentReport {
  ExperimentConfig config;
  Scores scores;  // mean over seeds
  double wall_time_ms = 0.0;
  std::vector<SeedReport> per_seed;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

enum class SweepParam { kAlpha, kNu };

SweepParam parse_sweep_param(std::string_view name);

/// One report per value. Sweeping alpha also sets the planted fraction.
std::vector<ExperimentReport> sweep(const ExperimentConfig& cfg, SweepParam vary, const std::vector<double>& values);

/// Long format: algo,level,farm,alpha,nu,seed,precision,recall,f1,time_ms
void write_long_csv(std::ostream& out, const std::vector<ExperimentReport>& reports);
std::string report_json(const ExperimentReport& report);
std::string reports_json(const std::vector<ExperimentReport>& reports);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Best-of-`repeats` wall time of SDD-R over n synthetic collections.
double time_sddr_ms(std::size_t n, const ExperimentConfig& cfg, std::uint64_t seed, int repeats = 5);

std::string verdict_json(const Verdict& v);

}  // namespace sdd
