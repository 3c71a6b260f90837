#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "sdd/error.hpp"
#include "sdd/threshold.hpp"

using namespace sdd;

namespace {

double oracle_argmin(const ThresholdInputs& in) {
  const auto f = [&](double t) {
    return oracle::expected_error(t, in.normal.mu, in.normal.sigma, in.anomalous.mu, in.anomalous.sigma, in.alpha);
  };
  return oracle::argmin_grid_golden(f, in.normal.mu - 6 * in.normal.sigma, in.anomalous.mu + 6 * in.anomalous.sigma);
}

// Classes at least 1.5 of the wider sigma apart.
ThresholdInputs random_inputs(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mu(0.0, 1.0), sep(1.5, 6.0), sd(0.02, 0.5), a(0.05, 0.95);
  ThresholdInputs in;
  in.normal = {mu(rng), sd(rng)};
  const double s_a = sd(rng);
  in.anomalous = {in.normal.mu + sep(rng) * std::max(in.normal.sigma, s_a), s_a};
  in.alpha = a(rng);
  return in;
}

}  // namespace

TEST_CASE("fit_gaussian uses the population deviation") {
  const std::vector<double> v{1, 2, 3};
  const auto g = fit_gaussian(v);
  CHECK(g.mu == doctest::Approx(2.0));
  CHECK(g.sigma == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  const std::vector<double> flat{0.7, 0.7, 0.7};
  CHECK(fit_gaussian(flat).mu == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(fit_gaussian(flat).sigma < 1e-15);
  CHECK_THROWS_AS(fit_gaussian(std::vector<double>{}), Error);
  CHECK_THROWS_AS(fit_gaussian(std::vector<double>{1.0}), Error);
}

TEST_CASE("expected_error limits and a tabulated value") {
  const ThresholdInputs in{{0, 1}, {2, 1}, 0.5};
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(expected_error(-inf, in) == doctest::Approx(0.5));
  CHECK(expected_error(inf, ThresholdInputs{{0, 1}, {2, 1}, 0.3}) == doctest::Approx(0.3));
  CHECK(expected_error(1.0, in) == doctest::Approx(0.158655).epsilon(1e-5));
  CHECK_THROWS_AS(expected_error(0.0, ThresholdInputs{{0, 0}, {2, 1}, 0.5}), Error);
  CHECK_THROWS_AS(expected_error(0.0, ThresholdInputs{{0, 1}, {2, 1}, 1.0}), Error);
}

TEST_CASE("equal sigma branch") {
  const auto mid = solve_threshold({{0, 1}, {2, 1}, 0.5});
  CHECK(mid.method == ThresholdMethod::kEqualSigma);
  CHECK(mid.t == 1.0);
  CHECK(optimal_threshold({{0.25, 0.1}, {0.75, 0.1}, 0.5}) == 0.5);
  CHECK(optimal_threshold({{0, 1}, {2, 1}, 0.2}) == doctest::Approx(1.0 + std::log(4.0) / 2.0).epsilon(1e-12));
  CHECK(optimal_threshold({{0, 1}, {2, 1}, 0.2}) ==
        doctest::Approx(oracle_argmin({{0, 1}, {2, 1}, 0.2})).epsilon(1e-7));
}

TEST_CASE("unequal sigma matches the numeric minimum") {
  const ThresholdInputs in{{0.1, 0.02}, {0.5, 0.1}, 0.2};
  const auto s = solve_threshold(in);
  CHECK(s.method == ThresholdMethod::kQuadraticRoot);
  CHECK(std::fabs(s.t - oracle_argmin(in)) <= 1e-6);
  CHECK(s.t > in.normal.mu);
  CHECK(s.t < in.anomalous.mu);
}

TEST_CASE("errors") {
  CHECK_THROWS_WITH_AS(solve_threshold({{1, 1}, {1, 1}, 0.5}), doctest::Contains("class order"), Error);
  CHECK_THROWS_AS(solve_threshold({{2, 1}, {1, 1}, 0.5}), Error);
  CHECK_THROWS_AS(solve_threshold({{0, 0}, {1, 1}, 0.5}), Error);
  CHECK_THROWS_AS(solve_threshold({{0, 1}, {1, 1}, 0.0}), Error);
}

TEST_CASE("oracle equivalence over random inputs") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 300; ++i) {
    const auto in = random_inputs(rng);
    const auto s = solve_threshold(in);
    INFO("case " << i << " mu_n=" << in.normal.mu << " s_n=" << in.normal.sigma << " mu_a=" << in.anomalous.mu
                 << " s_a=" << in.anomalous.sigma << " alpha=" << in.alpha);
    CHECK(std::fabs(s.t - oracle_argmin(in)) <= 1e-4);

    const double delta = 1e-3 * (in.anomalous.mu - in.normal.mu);
    CHECK(expected_error(s.t, in) <= expected_error(s.t + delta, in));
    CHECK(expected_error(s.t, in) <= expected_error(s.t - delta, in));
  }
}

TEST_CASE("threshold falls as alpha grows") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    auto in = random_inputs(rng);
    if (i % 2 == 0) in.anomalous.sigma = in.normal.sigma;
    double prev = std::numeric_limits<double>::infinity();
    for (double a = 0.05; a < 0.96; a += 0.05) {
      in.alpha = a;
      const double t = optimal_threshold(in);
      CHECK(t <= prev + 1e-9);
      prev = t;
    }
  }
}

TEST_CASE("dominated regime falls back to a bounded numeric search") {
  // The weighted anomalous density exceeds the normal one everywhere, so the
  // stationarity equation has no real root and flagging everything is best.
  const ThresholdInputs in{{0.0, 0.5}, {0.1, 1.0}, 0.99};
  const auto s = solve_threshold(in);
  CHECK(s.method == ThresholdMethod::kGoldenSection);
  CHECK(s.t >= in.normal.mu - 6 * in.normal.sigma);
  CHECK(s.t <= in.anomalous.mu + 6 * in.anomalous.sigma);
  CHECK(std::fabs(s.t - oracle_argmin(in)) <= 1e-4);
}

TEST_CASE("golden_section_minimize") {
  const double x = golden_section_minimize([](double t) { return (t - 0.3) * (t - 0.3); }, -2, 5);
  CHECK(x == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(golden_section_minimize([](double t) { return t; }, 1, 2) == doctest::Approx(1.0).epsilon(1e-8));
}
