#include "sdd/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sdd/error.hpp"

namespace sdd {

namespace {

void validate(const ThresholdInputs& in) {
  if (!(in.alpha > 0.0 && in.alpha < 1.0)) throw ConfigError("alpha must lie strictly inside (0, 1)");
  for (const auto* g : {&in.normal, &in.anomalous}) {
    if (!std::isfinite(g->mu) || !std::isfinite(g->sigma)) throw Error("non-finite Gaussian parameters");
    if (!(g->sigma > 0.0)) throw Error("sigma must be positive");
  }
}

// Second-derivative sign of expected_error at t, written as in the
// root-selection rule: lhs < rhs means t is a local minimum.
bool curvature_positive(double t, const ThresholdInputs& in) {
  const auto& [mn, sn] = in.normal;
  const auto& [ma, sa] = in.anomalous;
  const double lhs = in.alpha * (t - ma) / (sa * sa * sa) * std::exp(-(t - ma) * (t - ma) / (2 * sa * sa));
  const double rhs = (1 - in.alpha) * (t - mn) / (sn * sn * sn) * std::exp(-(t - mn) * (t - mn) / (2 * sn * sn));
  return lhs < rhs;
}

}  // namespace

GaussianParams fit_gaussian(std::span<const double> values) {
  if (values.size() < 2) throw Error("fit_gaussian needs at least two values");
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / n;
  // Corrected two-pass variance.
  double sq = 0.0, comp = 0.0;
  for (const double v : values) {
    const double d = v - mean;
    sq += d * d;
    comp += d;
  }
  const double var = std::max((sq - comp * comp / n) / n, 0.0);
  return {mean, std::sqrt(var)};
}

double normal_cdf(double x, const GaussianParams& g) {
  return 0.5 * std::erfc(-(x - g.mu) / (g.sigma * std::numbers::sqrt2));
}

double expected_error(double t, const ThresholdInputs& in) {
  validate(in);
  return in.alpha * normal_cdf(t, in.anomalous) + (1.0 - in.alpha) * (1.0 - normal_cdf(t, in.normal));
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tolerance,
                               int max_iterations) {
  if (hi < lo) std::swap(lo, hi);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iterations && (hi - lo) > tolerance * std::max(1.0, std::abs(lo) + std::abs(hi)); ++i) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

ThresholdSolution solve_threshold(const ThresholdInputs& in) {
  validate(in);
  const auto& [mn, sn] = in.normal;
  const auto& [ma, sa] = in.anomalous;
  if (!(ma > mn)) throw Error("class order violated: anomalous mean must exceed normal mean");
  const double alpha = in.alpha;

  if (sa == sn) {
    const double k = sa;
    return {(mn + ma) / 2 + k * k * std::log((1 - alpha) / alpha) / (ma - mn), ThresholdMethod::kEqualSigma, false};
  }

  const auto golden = [&] {
    const auto err = [&](double t) { return expected_error(t, in); };
    return ThresholdSolution{golden_section_minimize(err, mn - 6 * sn, ma + 6 * sa), ThresholdMethod::kGoldenSection,
                             false};
  };

  // alpha * pdf_a(T) = (1 - alpha) * pdf_n(T) rearranges to
  // a T^2 - 2 b T + c = 0 with the coefficients below.
  const double sa2 = sa * sa, sn2 = sn * sn;
  const double a = sa2 - sn2;
  const double b = sa2 * mn - sn2 * ma;
  const double log_term = std::log((1 - alpha) * sa / (alpha * sn));
  const double c = sa2 * mn * mn - sn2 * ma * ma - 2 * sa2 * sn2 * log_term;
  const double inner = (ma - mn) * (ma - mn) + 2 * a * log_term;
  if (!(inner >= 0.0)) return golden();

  const double disc = sa * sn * std::sqrt(inner);
  // Cancellation-free pair of roots: q/a and c/q.
  const double q = b + std::copysign(disc, b == 0.0 ? 1.0 : b);
  std::vector<double> roots;
  for (const double r : {q / a, q != 0.0 ? c / q : std::numeric_limits<double>::quiet_NaN()}) {
    if (std::isfinite(r)) roots.push_back(r);
  }
  if (roots.empty()) return golden();
  if (roots.size() == 1) {
    if (curvature_positive(roots[0], in)) return {roots[0], ThresholdMethod::kQuadraticRoot, false};
    return golden();
  }

  const bool first_ok = curvature_positive(roots[0], in);
  const bool second_ok = curvature_positive(roots[1], in);
  const double e0 = expected_error(roots[0], in);
  const double e1 = expected_error(roots[1], in);
  const std::size_t by_error = e0 <= e1 ? 0 : 1;

  if (first_ok == second_ok) return {roots[by_error], ThresholdMethod::kQuadraticRoot, true};

  const std::size_t by_curvature = first_ok ? 0 : 1;
  const double slack = 1e-12;
  if (by_curvature != by_error && std::abs(e0 - e1) > slack) {
    throw Error("internal: curvature rule and expected-error comparison disagree on the threshold root");
  }
  return {roots[by_curvature], ThresholdMethod::kQuadraticRoot, false};
}

}  // namespace sdd
