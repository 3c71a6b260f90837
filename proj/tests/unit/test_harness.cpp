#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>

#include "oracles.hpp"
#include "sdd/error.hpp"
#include "sdd/harness.hpp"

using namespace sdd;

TEST_CASE("metrics") {
  std::map<std::string, bool> truth{{"a", true}, {"b", false}, {"c", true}};
  auto s = metrics(truth, truth);
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == 1.0);

  s = metrics(std::map<std::string, bool>{{"a", false}, {"b", true}, {"c", false}}, truth);
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
  CHECK(s.f1 == 0.0);

  // TP = 2, FP = 1, FN = 2
  const std::vector<bool> pred{true, true, true, false, false, false};
  const std::vector<bool> act{true, true, false, true, true, false};
  s = metrics(pred, act);
  CHECK(s.precision == doctest::Approx(2.0 / 3.0));
  CHECK(s.recall == doctest::Approx(0.5));
  CHECK(s.f1 == doctest::Approx(4.0 / 7.0));

  CHECK(metrics(std::vector<bool>{false, false}, std::vector<bool>{false, false}).f1 == 0.0);
  CHECK_THROWS_AS(metrics(std::map<std::string, bool>{{"a", true}}, truth), Error);
  CHECK_THROWS_AS(metrics(std::map<std::string, bool>{{"x", true}, {"b", false}, {"c", true}}, truth), Error);
  CHECK_THROWS_AS(metrics(std::vector<bool>{true}, act), Error);
}

TEST_CASE("config validation happens before any work") {
  ExperimentConfig c;
  c.fraction_anomalous = 0;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c = {};
  c.fraction_anomalous = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.seeds.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.algo = Algo::kSdde;
  c.evidence_anomalous = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.alpha = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.nu = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.jobs = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(parse_algo("sdd"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_param("beta"), ConfigError);
  for (auto a : all_algos()) CHECK(parse_algo(to_string(a)) == a);
}

TEST_CASE("synthetic dataset layout") {
  ExperimentConfig c;
  const auto d = make_dataset(c, 1);
  CHECK(d.collections.size() == 200);
  CHECK(d.evidence_normal.size() == 30);
  CHECK(d.evidence_anomalous.size() == 10);
  CHECK(std::count(d.farmed.begin(), d.farmed.end(), true) == 40);
  CHECK(d.evidence_normal.front().day == parse_day("2015-07-01"));
  CHECK(d.evidence_anomalous.back().day < d.collections.front().day);
  for (std::size_t i = 1; i < d.collections.size(); ++i) CHECK(d.collections[i].day == d.collections[i - 1].day + 1);

  // Farmed days are bigger than their untouched volume would be.
  std::size_t farmed_total = 0, normal_total = 0;
  for (std::size_t i = 0; i < d.collections.size(); ++i)
    (d.farmed[i] ? farmed_total : normal_total) += d.collections[i].events.size();
  CHECK(farmed_total / 40.0 > 1.5 * normal_total / 160.0);

  // Evaluated days do not depend on the algorithm.
  auto c2 = c;
  c2.algo = Algo::kMgof;
  CHECK(make_dataset(c2, 1).collections == d.collections);
  CHECK(make_dataset(c, 2).collections != d.collections);
}

TEST_CASE("reports are deterministic and self-consistent") {
  ExperimentConfig c;
  c.seeds = {1, 2};
  c.days = 80;
  for (auto algo : all_algos()) {
    c.algo = algo;
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    CHECK(a.scores.f1 == b.scores.f1);
    REQUIRE(a.per_seed.size() == 2);
    double mean = 0;
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& s = a.per_seed[i].scores;
      CHECK(s.precision == b.per_seed[i].scores.precision);
      CHECK(s.recall == b.per_seed[i].scores.recall);
      const double f = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
      CHECK(std::fabs(f - s.f1) <= 1e-9);
      for (double x : {s.precision, s.recall, s.f1}) CHECK((x >= 0 && x <= 1));
      mean += s.f1 / 2;
    }
    CHECK(a.scores.f1 == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("parallel seeds give the same report") {
  ExperimentConfig c;
  c.days = 60;
  c.algo = Algo::kSddePlus;
  const auto serial = run_experiment(c);
  c.jobs = 4;
  const auto parallel = run_experiment(c);
  for (std::size_t i = 0; i < c.seeds.size(); ++i) CHECK(serial.per_seed[i].scores.f1 == parallel.per_seed[i].scores.f1);
}

TEST_CASE("scores match an independent recount") {
  ExperimentConfig c;
  c.algo = Algo::kSddePlus;
  const auto d = make_dataset(c, 3);
  const auto out = run_detector(c, d.collections, d.evidence_normal, d.evidence_anomalous);
  std::vector<bool> flags;
  for (const auto& v : out.verdicts) flags.push_back(v.flagged);
  const auto s = metrics(flags, d.farmed);
  const auto o = oracle::prf(flags, d.farmed);
  CHECK(s.precision == doctest::Approx(o.p));
  CHECK(s.recall == doctest::Approx(o.r));
  CHECK(s.f1 == doctest::Approx(o.f));
}

TEST_CASE("sweep") {
  ExperimentConfig c;
  c.days = 60;
  c.seeds = {1};
  CHECK(sweep(c, SweepParam::kNu, {0.5}).size() == 1);
  const auto r = sweep(c, SweepParam::kAlpha, {0.1, 0.3});
  REQUIRE(r.size() == 2);
  CHECK(r[1].config.alpha == 0.3);
  CHECK(r[1].config.fraction_anomalous == 0.3);
  CHECK_THROWS_AS(sweep(c, SweepParam::kAlpha, {}), ConfigError);

  std::ostringstream csv;
  write_long_csv(csv, r);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "algo,level,farm,alpha,nu,seed,precision,recall,f1,time_ms");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);

  const auto js = nlohmann::json::parse(reports_json(r));
  CHECK(js.size() == 2);
  CHECK(js[0]["config"]["algo"] == "sddr+");
  CHECK(js[0]["per_seed"].size() == 1);
}

TEST_CASE("mgof suffers when anomalies are common") {
  // Frequent farmed days of one kind pile up support and start passing as
  // normal: recall falls, and F1 drops below that of flagging every day.
  ExperimentConfig c;
  c.algo = Algo::kMgof;
  c.level = Level::kSecond;
  c.seeds = {1, 2, 3};
  const auto r = sweep(c, SweepParam::kAlpha, {0.1, 0.9});
  CHECK(r[1].scores.recall < r[0].scores.recall);
  const auto flag_all_f1 = [](double a) { return 2 * a / (1 + a); };
  CHECK(r[0].scores.f1 > flag_all_f1(0.1));
  CHECK(r[1].scores.f1 < flag_all_f1(0.9));
}

TEST_CASE("spearman") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK(spearman(x, std::vector<double>{2, 4, 6, 8, 10}) == doctest::Approx(1.0));
  CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman(x, std::vector<double>{1, 1, 2, 2, 3}) == doctest::Approx(0.9486832981));
  CHECK_THROWS_AS(spearman(x, std::vector<double>{1, 2}), Error);
}

TEST_CASE("verdict json") {
  const auto j = nlohmann::json::parse(verdict_json({"S@2015-07-01", 0.25, true, Rule::kThreshold}));
  CHECK(j["id"] == "S@2015-07-01");
  CHECK(j["divergence"] == 0.25);
  CHECK(j["flagged"] == true);
  CHECK(j["rule"] == "threshold");
}

TEST_CASE("sddr timing is measurable") {
  ExperimentConfig c;
  CHECK(time_sddr_ms(200, c, 1, 1) > 0.0);
}
