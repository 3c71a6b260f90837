// sdd: synthetic data, detection runs, sweeps and benchmarks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdd/error.hpp"
#include "sdd/harness.hpp"
#include "sdd/ingest.hpp"
#include "sdd/mgof.hpp"
#include "sdd/sdde.hpp"
#include "sdd/sddr.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

// Raw flag values; converted into library types after parsing so that bad
// names surface as ConfigError.
struct ExperimentFlags {
  std::string algo = "sddr+";
  int level = 1;
  std::string metric = "jsd";
  std::optional<double> smoothing;
  double alpha = 0.2;
  double nu = 1.0;
  double fraction = 0.2;
  std::string farm = "centralized";
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t days = 200;
  std::size_t evidence_normal = 30;
  std::size_t evidence_anomalous = 10;
  std::string profile;
  double jitter = 0.1;
  double growth = 0.0;
  double significance = 0.05;
  std::uint64_t cth = 3;
  bool ground_truth = false;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f, bool with_algo) {
  if (with_algo) cmd->add_option("--algo", f.algo, "sddr, sddr+, sdde, sdde+, sdde-dyn, sdde-dyn+ or mgof");
  cmd->add_option("--level", f.level, "histogram level (1 or 2)");
  cmd->add_option("--metric", f.metric, "jsd or kl");
  cmd->add_option("--smoothing", f.smoothing, "additive smoothing for KL");
  cmd->add_option("--alpha", f.alpha, "anomaly prior / ranking fraction");
  cmd->add_option("--nu", f.nu, "fake volume relative to true volume");
  cmd->add_option("--fraction", f.fraction, "share of evaluated days that are farmed");
  cmd->add_option("--farm", f.farm, "centralized or equalized");
  cmd->add_option("--seeds", f.seeds, "seed list")->delimiter(',');
  cmd->add_option("--days", f.days, "evaluated days per seed");
  cmd->add_option("--evidence-normal", f.evidence_normal, "normal evidence days");
  cmd->add_option("--evidence-anomalous", f.evidence_anomalous, "farmed evidence days");
  cmd->add_option("--profile", f.profile, "day profile JSON file");
  cmd->add_option("--jitter", f.jitter, "relative daily volume jitter");
  cmd->add_option("--growth", f.growth, "daily volume growth rate");
  cmd->add_option("--significance", f.significance, "MGoF test level");
  cmd->add_option("--cth", f.cth, "MGoF support needed to call a window normal");
  cmd->add_flag("--ground-truth-feedback", f.ground_truth, "dynamic SDD-E learns from true labels");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sdd::ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sdd::DayProfile load_profile(const std::string& path) {
  if (path.empty()) return sdd::DayProfile::default_profile();
  return sdd::DayProfile::from_json(read_file(path));
}

sdd::ExperimentConfig to_config(const ExperimentFlags& f, int jobs) {
  sdd::ExperimentConfig c;
  c.algo = sdd::parse_algo(f.algo);
  c.level = sdd::parse_level(f.level);
  c.metric = sdd::parse_metric(f.metric);
  c.smoothing = f.smoothing;
  c.alpha = f.alpha;
  c.nu = f.nu;
  c.fraction_anomalous = f.fraction;
  c.farm = sdd::parse_farm(f.farm);
  c.seeds = f.seeds;
  c.days = f.days;
  c.evidence_normal = f.evidence_normal;
  c.evidence_anomalous = f.evidence_anomalous;
  c.profile = load_profile(f.profile);
  c.volume_jitter = f.jitter;
  c.volume_growth = f.growth;
  c.mgof.significance = f.significance;
  c.mgof.c_th = f.cth;
  c.dynamic_ground_truth = f.ground_truth;
  c.jobs = jobs;
  c.validate();
  return c;
}

// Opens `path` for writing, or returns stdout's stream for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    file_.open(path, std::ios::binary);
    if (!file_) throw sdd::Error("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string sibling(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::vector<sdd::DataCollection> load_collections(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sdd::ConfigError("cannot open '" + path + "'");
  return sdd::group_by_entity_day(sdd::parse_records(in));
}

std::map<std::string, bool> load_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sdd::ConfigError("cannot open '" + path + "'");
  std::map<std::string, bool> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (n == 1 || line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw sdd::ParseError(n, "expected id,is_farmed");
    const auto flag = line.substr(comma + 1);
    if (flag != "0" && flag != "1") throw sdd::ParseError(n, "is_farmed must be 0 or 1");
    out[line.substr(0, comma)] = flag == "1";
  }
  return out;
}

void write_collections(const std::string& path, const std::vector<sdd::DataCollection>& cs) {
  Output out(path);
  sdd::write_records(out.stream(), sdd::to_records(cs));
}

// --- synth -------------------------------------------------------------

struct SynthFlags {
  ExperimentFlags exp;
  std::uint64_t seed = 1;
  std::string start_date = "2015-07-01";
};

int cmd_synth(const SynthFlags& f, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") throw sdd::ConfigError("synth needs --out <csv>");
  auto cfg = to_config(f.exp, 1);
  cfg.start_date = f.start_date;
  cfg.validate();
  const auto data = sdd::make_dataset(cfg, f.seed);

  write_collections(out_path, data.collections);
  write_collections(sibling(out_path, ".evidence_normal.csv"), data.evidence_normal);
  write_collections(sibling(out_path, ".evidence_anomalous.csv"), data.evidence_anomalous);
  Output labels(sibling(out_path, ".labels.csv"));
  labels.stream() << "id,is_farmed\n";
  for (std::size_t i = 0; i < data.collections.size(); ++i) {
    labels.stream() << data.collections[i].id() << ',' << (data.farmed[i] ? 1 : 0) << '\n';
  }
  return 0;
}

// --- run ---------------------------------------------------------------

struct RunFlags {
  std::string input;
  std::string algo = "sddr+";
  int level = 1;
  std::string metric = "jsd";
  std::optional<double> smoothing;
  double alpha = 0.2;
  std::string evidence_normal;
  std::string evidence_anomalous;
  std::optional<std::size_t> window_n;
  std::optional<std::size_t> window_a;
  double significance = 0.05;
  std::uint64_t cth = 3;
  std::string labels;
  bool ground_truth = false;
  std::string state_in;
  std::string state_out;
};

bool is_sdde(sdd::Algo a) {
  return a == sdd::Algo::kSdde || a == sdd::Algo::kSddePlus || a == sdd::Algo::kSddeDyn ||
         a == sdd::Algo::kSddeDynPlus;
}
bool is_dynamic(sdd::Algo a) { return a == sdd::Algo::kSddeDyn || a == sdd::Algo::kSddeDynPlus; }
bool uses_alpha(sdd::Algo a) {
  return a == sdd::Algo::kSddrPlus || a == sdd::Algo::kSddePlus || a == sdd::Algo::kSddeDynPlus;
}

int cmd_run(const RunFlags& f, const std::string& out_path) {
  const auto algo = sdd::parse_algo(f.algo);
  const sdd::DetectorConfig det{{sdd::parse_level(f.level)}, sdd::DivergenceMetric(sdd::parse_metric(f.metric), f.smoothing)};
  if (!(f.alpha > 0.0 && f.alpha < 1.0)) throw sdd::ConfigError("alpha must lie strictly inside (0, 1)");
  if (f.input.empty()) throw sdd::ConfigError("run needs --input <csv>");
  if (!is_sdde(algo) && (!f.state_in.empty() || !f.state_out.empty())) {
    throw sdd::ConfigError("state snapshots apply to SDD-E only");
  }
  if (f.ground_truth && (!is_dynamic(algo) || f.labels.empty())) {
    throw sdd::ConfigError("--ground-truth-feedback needs a dynamic algo and --labels");
  }

  std::optional<sdd::SddeState> state;
  if (is_sdde(algo)) {
    if (!f.state_in.empty()) {
      state = sdd::SddeState::from_json(read_file(f.state_in));
    } else {
      if (f.evidence_normal.empty() || f.evidence_anomalous.empty()) {
        throw sdd::ConfigError("SDD-E needs --evidence-normal and --evidence-anomalous (or --state-in)");
      }
      const auto policy = is_dynamic(algo) ? sdd::EvidencePolicy::kFifoWindow : sdd::EvidencePolicy::kStatic;
      state = sdd::SddeState::from_collections(load_collections(f.evidence_normal),
                                               load_collections(f.evidence_anomalous),
                                               uses_alpha(algo) ? f.alpha : 0.5, det, policy, f.window_n, f.window_a);
    }
  }

  std::map<std::string, bool> labels;
  if (!f.labels.empty()) labels = load_labels(f.labels);
  const auto collections = load_collections(f.input);

  std::vector<sdd::Verdict> verdicts;
  switch (algo) {
    case sdd::Algo::kSddr:
      verdicts = sdd::detect_sddr(collections, det);
      break;
    case sdd::Algo::kSddrPlus:
      verdicts = sdd::detect_sddr_plus(collections, det, f.alpha);
      break;
    case sdd::Algo::kMgof: {
      sdd::MgofConfig mc;
      mc.significance = f.significance;
      mc.c_th = f.cth;
      verdicts = sdd::mgof_run(collections, mc, det.features);
      break;
    }
    default:
      if (!is_dynamic(algo)) {
        verdicts = state->classify_batch(collections);
        break;
      }
      for (const auto& c : collections) {
        std::optional<bool> label;
        if (f.ground_truth) {
          const auto it = labels.find(c.id());
          if (it == labels.end()) throw sdd::Error("no label for " + c.id());
          label = it->second;
        }
        verdicts.push_back(state->classify_and_update(c, label));
      }
  }

  Output out(out_path);
  for (const auto& v : verdicts) out.stream() << sdd::verdict_json(v) << '\n';

  if (!f.state_out.empty()) {
    Output s(f.state_out);
    s.stream() << state->to_json() << '\n';
  }
  if (!labels.empty()) {
    std::map<std::string, bool> predicted;
    for (const auto& v : verdicts) predicted[v.id] = v.flagged;
    const auto s = sdd::metrics(predicted, labels);
    std::cerr << nlohmann::json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}}.dump() << '\n';
  }
  return 0;
}

// --- sweep -------------------------------------------------------------

struct SweepFlags {
  ExperimentFlags exp;
  std::vector<std::string> algos;
  std::string vary = "alpha";
  std::vector<double> values;
  std::string summary;
};

void emit(const std::vector<sdd::ExperimentReport>& reports, const std::string& out_path, std::string summary) {
  Output csv(out_path);
  sdd::write_long_csv(csv.stream(), reports);
  if (summary.empty() && !out_path.empty() && out_path != "-") summary = sibling(out_path, ".json");
  if (!summary.empty()) {
    Output js(summary);
    js.stream() << sdd::reports_json(reports) << '\n';
  }
}

int cmd_sweep(const SweepFlags& f, const std::string& out_path, int jobs) {
  const auto vary = sdd::parse_sweep_param(f.vary);
  if (f.values.empty()) throw sdd::ConfigError("sweep needs --values");
  auto algos = f.algos;
  if (algos.empty()) algos.push_back(f.exp.algo);
  std::vector<sdd::ExperimentReport> all;
  for (const auto& name : algos) {
    auto flags = f.exp;
    flags.algo = name;
    for (auto& r : sdd::sweep(to_config(flags, jobs), vary, f.values)) all.push_back(std::move(r));
  }
  emit(all, out_path, f.summary);
  return 0;
}

// --- bench -------------------------------------------------------------

struct BenchFlags {
  ExperimentFlags exp;
  std::vector<std::string> algos;
  std::vector<std::size_t> scaling;
  std::string summary;
};

int cmd_bench(const BenchFlags& f, const std::string& out_path, int jobs) {
  std::vector<std::string> algos = f.algos;
  if (algos.empty()) {
    for (auto a : sdd::all_algos()) algos.emplace_back(sdd::to_string(a));
  }
  std::vector<sdd::ExperimentReport> all;
  for (const char* farm : {"centralized", "equalized"}) {
    for (int level : {1, 2}) {
      for (const auto& name : algos) {
        auto flags = f.exp;
        flags.algo = name;
        flags.farm = farm;
        flags.level = level;
        all.push_back(sdd::run_experiment(to_config(flags, jobs)));
        const auto& r = all.back();
        std::fprintf(stderr, "%-10s %-11s L%d  P=%.3f R=%.3f F1=%.3f  %.2f ms\n", name.c_str(), farm, level,
                     r.scores.precision, r.scores.recall, r.scores.f1, r.wall_time_ms);
      }
    }
  }
  emit(all, out_path, f.summary);

  if (!f.scaling.empty()) {
    auto cfg = to_config(f.exp, 1);
    for (auto n : f.scaling) {
      std::fprintf(stderr, "sddr n=%zu  %.3f ms\n", n, sdd::time_sddr_ms(n, cfg, cfg.seeds.front()));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical-divergence detection of collective anomalies"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file with default flag values");

  std::string out_path;
  int jobs = 1;
  app.add_option("--out", out_path, "output file")->expected(1);
  app.add_option("--jobs", jobs, "parallel seeds")->check(CLI::PositiveNumber);

  SynthFlags synth;
  auto* c_synth = app.add_subcommand("synth", "generate a labeled synthetic seller history");
  add_experiment_flags(c_synth, synth.exp, false);
  c_synth->add_option("--seed", synth.seed, "random seed");
  c_synth->add_option("--start-date", synth.start_date, "first evidence day, YYYY-MM-DD");
  c_synth->add_option("--out", out_path, "output CSV");

  RunFlags run;
  auto* c_run = app.add_subcommand("run", "detect anomalous collections in a CSV");
  c_run->add_option("--input", run.input, "transaction CSV");
  c_run->add_option("--algo", run.algo, "sddr, sddr+, sdde, sdde+, sdde-dyn, sdde-dyn+ or mgof");
  c_run->add_option("--level", run.level, "histogram level (1 or 2)");
  c_run->add_option("--metric", run.metric, "jsd or kl");
  c_run->add_option("--smoothing", run.smoothing, "additive smoothing for KL");
  c_run->add_option("--alpha", run.alpha, "anomaly prior / ranking fraction");
  c_run->add_option("--evidence-normal", run.evidence_normal, "CSV of normal evidence days");
  c_run->add_option("--evidence-anomalous", run.evidence_anomalous, "CSV of anomalous evidence days");
  c_run->add_option("--window-n", run.window_n, "normal evidence capacity");
  c_run->add_option("--window-a", run.window_a, "anomalous evidence capacity");
  c_run->add_option("--significance", run.significance, "MGoF test level");
  c_run->add_option("--cth", run.cth, "MGoF support needed to call a window normal");
  c_run->add_option("--labels", run.labels, "id,is_farmed CSV; prints scores to stderr");
  c_run->add_flag("--ground-truth-feedback", run.ground_truth, "dynamic SDD-E learns from --labels");
  c_run->add_option("--state-in", run.state_in, "SDD-E state snapshot to resume from");
  c_run->add_option("--state-out", run.state_out, "write the SDD-E state after the run");
  c_run->add_option("--out", out_path, "verdicts as JSON lines");

  SweepFlags sw;
  auto* c_sweep = app.add_subcommand("sweep", "vary alpha or nu and report mean scores");
  add_experiment_flags(c_sweep, sw.exp, true);
  c_sweep->add_option("--algos", sw.algos, "algorithms to sweep (default: --algo)")->delimiter(',');
  c_sweep->add_option("--vary", sw.vary, "alpha or nu");
  c_sweep->add_option("--values", sw.values, "parameter values")->delimiter(',');
  c_sweep->add_option("--summary", sw.summary, "JSON summary path");
  c_sweep->add_option("--out", out_path, "long-format CSV");
  c_sweep->add_option("--jobs", jobs, "parallel seeds")->check(CLI::PositiveNumber);

  BenchFlags bench;
  auto* c_bench = app.add_subcommand("bench", "every algorithm on both farm kinds and levels");
  add_experiment_flags(c_bench, bench.exp, false);
  c_bench->add_option("--algos", bench.algos, "algorithms (default: all)")->delimiter(',');
  c_bench->add_option("--scaling", bench.scaling, "collection counts to time SDD-R on")->delimiter(',');
  c_bench->add_option("--summary", bench.summary, "JSON summary path");
  c_bench->add_option("--out", out_path, "long-format CSV");
  c_bench->add_option("--jobs", jobs, "parallel seeds")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*c_synth) return cmd_synth(synth, out_path);
    if (*c_run) return cmd_run(run, out_path);
    if (*c_sweep) return cmd_sweep(sw, out_path, jobs);
    if (*c_bench) return cmd_bench(bench, out_path, jobs);
  } catch (const sdd::ConfigError& e) {
    std::cerr << "sdd: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "sdd: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
