#include <doctest.h>

#include <cmath>
#include <random>

#include "sdd/error.hpp"
#include "sdd/harness.hpp"
#include "sdd/sdde.hpp"

using namespace sdd;

namespace {

Distribution dist(std::vector<double> m) {
  std::vector<double> edges;
  for (std::size_t i = 0; i <= m.size(); ++i) edges.push_back(static_cast<double>(i));
  return {std::move(m), std::move(edges)};
}

// Default synthetic protocol: 30 normal and 10 farmed evidence days.
SddeState protocol_state(std::uint64_t seed, EvidencePolicy policy, Level level = Level::kFirst,
                         FarmKind farm = FarmKind::kCentralized) {
  ExperimentConfig e;
  e.farm = farm;
  e.level = level;
  const auto data = make_dataset(e, seed);
  return SddeState::from_collections(data.evidence_normal, data.evidence_anomalous, 0.2, e.detector_config(), policy);
}

}  // namespace

TEST_CASE("evidence set policies") {
  EvidenceSet w(3, EvidencePolicy::kFifoWindow);
  const auto a = dist({1, 0}), b = dist({0, 1}), c = dist({0.5, 0.5}), x = dist({0.2, 0.8});
  for (const auto& d : {a, b, c, x}) w.add(d);
  REQUIRE(w.size() == 3);
  CHECK(w.members()[0].mass == b.mass);
  CHECK(w.members()[1].mass == c.mass);
  CHECK(w.members()[2].mass == x.mass);

  auto s = EvidenceSet::of({a, b, c}, EvidencePolicy::kStatic);
  CHECK_THROWS_AS(s.add(x), Error);
  CHECK(s.size() == 3);
  CHECK_THROWS_AS(EvidenceSet(0, EvidencePolicy::kStatic), ConfigError);
  CHECK_THROWS_AS(EvidenceSet::of({a, b, c}, EvidencePolicy::kFifoWindow, 2), ConfigError);
}

TEST_CASE("evidence never exceeds capacity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  EvidenceSet w(5, EvidencePolicy::kFifoWindow);
  for (int i = 0; i < 100; ++i) {
    const double p = u(rng);
    w.add(dist({p, 1 - p}));
    CHECK(w.size() <= w.capacity());
  }
}

TEST_CASE("update_dynamic needs sliding-window evidence") {
  SddeState s(EvidenceSet::of({dist({0.5, 0.5}), dist({0.6, 0.4})}, EvidencePolicy::kStatic),
              EvidenceSet::of({dist({1, 0}), dist({0.95, 0.05})}, EvidencePolicy::kStatic), 0.2, DetectorConfig{});
  const auto before = s.to_json();
  CHECK_THROWS_AS(s.update_dynamic(dist({0.5, 0.5}), false), Error);
  CHECK(s.to_json() == before);
}

TEST_CASE("prepare rejects unseparated evidence") {
  const std::vector<Distribution> same{dist({0.5, 0.5}), dist({0.6, 0.4}), dist({0.4, 0.6})};
  SddeState s(EvidenceSet::of(same, EvidencePolicy::kStatic), EvidenceSet::of(same, EvidencePolicy::kStatic), 0.2, DetectorConfig{});
  CHECK_THROWS_WITH_AS(s.prepare(), doctest::Contains("not separated"), SeparationError);

  SddeState tiny(EvidenceSet::of({dist({0.5, 0.5})}, EvidencePolicy::kStatic),
                 EvidenceSet::of({dist({1, 0}), dist({0.9, 0.1})}, EvidencePolicy::kStatic), 0.2, DetectorConfig{});
  CHECK_THROWS_AS(tiny.prepare(), Error);
  CHECK_THROWS_AS(SddeState(EvidenceSet::of(same, EvidencePolicy::kStatic),
                            EvidenceSet::of(same, EvidencePolicy::kStatic), 1.0, DetectorConfig{}),
                  ConfigError);
}

TEST_CASE("constant evidence engages the sigma floor") {
  const auto p = dist({0.5, 0.5}), q = dist({0.9, 0.1});
  const DivergenceMetric metric;
  SddeState s(EvidenceSet::of({p, p, p}, EvidencePolicy::kStatic), EvidenceSet::of({q, q}, EvidencePolicy::kStatic),
              0.2, {{}, metric});
  const auto& m = s.prepare();
  CHECK(m.normal.sigma == 1e-12);
  CHECK(m.anomalous.sigma == 1e-12);
  CHECK(m.threshold.t > 0.0);
  CHECK(m.threshold.t < metric(q, p));
}

TEST_CASE("protocol evidence gives a finite positive threshold") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto s = protocol_state(seed, EvidencePolicy::kStatic);
    const auto& m = s.prepare();
    CHECK(std::isfinite(m.threshold.t));
    CHECK(m.threshold.t > 0.0);
    CHECK(m.normal.mu > 0.0);
    CHECK(m.anomalous.mu > m.normal.mu);
  }
}

TEST_CASE("prepare is deterministic and the reference is the normal mean") {
  auto s1 = protocol_state(4, EvidencePolicy::kStatic);
  auto s2 = protocol_state(4, EvidencePolicy::kStatic);
  const auto& a = s1.prepare();
  const auto& b = s2.prepare();
  CHECK(a.reference.mass == b.reference.mass);
  CHECK(a.threshold.t == b.threshold.t);

  std::vector<double> mean(a.reference.bins(), 0.0);
  for (const auto& d : s1.normal_evidence().members())
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += d.mass[k] / s1.normal_evidence().size();
  for (std::size_t k = 0; k < mean.size(); ++k) CHECK(a.reference.mass[k] == doctest::Approx(mean[k]).epsilon(1e-12));
}

TEST_CASE("classification") {
  auto s = protocol_state(5, EvidencePolicy::kStatic);
  const auto& m = s.prepare();
  const DivergenceMetric metric;
  CHECK_FALSE(m.classify("ref", m.reference, metric).flagged);
  CHECK(m.classify("ref", m.reference, metric).divergence == 0.0);

  // A far anomalous evidence member lands above the threshold.
  double far = 0;
  Distribution worst;
  for (const auto& d : s.anomalous_evidence().members()) {
    const double v = metric(d, m.reference);
    if (v > far) {
      far = v;
      worst = d;
    }
  }
  REQUIRE(far > m.threshold.t);
  const auto v = m.classify("far", worst, metric);
  CHECK(v.flagged);
  CHECK(v.rule == Rule::kThreshold);

  ExperimentConfig e;
  const auto data = make_dataset(e, 5);
  const auto batch = s.classify_batch(data.collections);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto single = s.classify(data.collections[i]);
    CHECK(batch[i].flagged == single.flagged);
    CHECK(batch[i].divergence == single.divergence);
  }

  // Monotone in divergence.
  for (const auto& x : batch)
    for (const auto& y : batch)
      if (x.flagged && x.divergence <= y.divergence) CHECK(y.flagged);
}

TEST_CASE("dynamic updates move the window and refresh the model") {
  auto s = protocol_state(6, EvidencePolicy::kFifoWindow);
  const auto t0 = s.prepare().threshold.t;
  const auto first_normal = s.normal_evidence().members().front().mass;
  ExperimentConfig e;
  const auto data = make_dataset(e, 60);
  for (int i = 0; i < 5; ++i) {
    const auto v = s.classify(data.collections[i]);
    s.update_dynamic(data.collections[i], v);
  }
  CHECK(s.normal_evidence().size() == 30);
  CHECK(s.anomalous_evidence().size() == 10);
  CHECK(s.normal_evidence().members().front().mass != first_normal);
  CHECK(s.prepare().threshold.t != t0);
}

TEST_CASE("one prepare and n classifications cost n + |E_N| + |E_A| divergences") {
  auto s = protocol_state(7, EvidencePolicy::kStatic);
  ExperimentConfig e;
  const auto data = make_dataset(e, 70);
  const auto& metric = s.config().metric;
  metric.reset_evaluations();
  s.classify_batch(data.collections);
  const auto n = data.collections.size();
  const auto evidence = s.normal_evidence().size() + s.anomalous_evidence().size();
  CHECK(metric.evaluations() == n + evidence);
  CHECK(metric.evaluations() <= n * evidence + evidence);
}

TEST_CASE("state snapshot round-trips") {
  auto s = protocol_state(8, EvidencePolicy::kFifoWindow, Level::kSecond, FarmKind::kEqualized);
  auto r = SddeState::from_json(s.to_json());
  CHECK(r.to_json() == s.to_json());
  CHECK(r.prepare().threshold.t == s.prepare().threshold.t);
  CHECK(r.config().features.level == Level::kSecond);
  CHECK(r.normal_evidence().policy() == EvidencePolicy::kFifoWindow);
  CHECK_THROWS_AS(SddeState::from_json("{\"alpha\": 0.2}"), Error);
  CHECK_THROWS_AS(SddeState::from_json("not json"), Error);
}

TEST_CASE("dynamic evidence tracks a drifting volume") {
  // Volume grows 1% per day. Static evidence describes the first weeks only,
  // so late normal days drift away from it at level 2; the sliding windows
  // follow the drift when fed true labels.
  ExperimentConfig e;
  e.level = Level::kSecond;
  e.volume_growth = 0.01;
  e.days = 150;
  e.dynamic_ground_truth = true;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto data = make_dataset(e, seed);
    const auto false_positives = [&](Algo algo) {
      auto c = e;
      c.algo = algo;
      const auto out = run_detector(c, data.collections, data.evidence_normal, data.evidence_anomalous, data.farmed);
      int fp = 0;
      for (std::size_t i = data.collections.size() - 50; i < data.collections.size(); ++i)
        fp += out.verdicts[i].flagged && !data.farmed[i];
      return fp;
    };
    const int fixed = false_positives(Algo::kSddePlus);
    const int sliding = false_positives(Algo::kSddeDynPlus);
    INFO("seed " << seed << " static " << fixed << " dynamic " << sliding);
    CHECK(sliding < fixed);
  }
}

TEST_CASE("classify_and_update keeps the last separable model") {
  const auto day = [](std::int64_t n, int c0, int c1, int hot) {
    DataCollection d{"S", n, {}};
    for (int h = 0; h < 24; ++h) {
      const int count = h == 0 ? c0 : h == 1 ? c1 : h == hot ? 200 : 10;
      for (int k = 0; k < count; ++k) d.events.push_back(h * 3600 + k);
    }
    return d;
  };
  const auto p = day(0, 11, 9, -1), p2 = day(1, 9, 11, -1);
  const auto q = day(2, 10, 10, 5), q2 = day(3, 10, 10, 6);
  const DetectorConfig cfg;
  const auto make = [&](std::vector<DataCollection> anomalous) {
    return SddeState::from_collections({p, p2}, anomalous, 0.2, cfg, EvidencePolicy::kFifoWindow);
  };

  auto same = make({p, p2});
  CHECK_THROWS_AS(same.classify_and_update(q), SeparationError);

  auto live = make({q, q2});
  live.classify_and_update(p, true);  // anomalous window [q2, p]
  const auto t1 = live.prepare().threshold.t;
  live.classify_and_update(p2, true);  // anomalous window [p, p2], same as normal
  CHECK_THROWS_AS(live.prepare(), SeparationError);
  const auto v = live.classify_and_update(day(4, 10, 10, 7), false);
  CHECK(v.flagged);
  CHECK(v.divergence > t1);
  CHECK(live.normal_evidence().size() == 2);
}
