#pragma once

#include <functional>
#include <span>

namespace sdd {

struct GaussianParams {
  double mu = 0.0;
  double sigma = 0.0;

  bool operator==(const GaussianParams&) const = default;
};

/// Divergence populations of the two classes and the prior probability that
/// a collection is anomalous.
struct ThresholdInputs {
  GaussianParams normal;
  GaussianParams anomalous;
  double alpha = 0.5;
};

/// Sample mean and population (divide-by-n) standard deviation.
/// Needs at least two values.
GaussianParams fit_gaussian(std::span<const double> values);

double normal_cdf(double x, const GaussianParams& g);

/// alpha * CDF_anomalous(t) + (1 - alpha) * (1 - CDF_normal(t)): the
/// probability of misclassifying a random collection when flagging every
/// divergence above t. Accepts t = +-infinity.
double expected_error(double t, const ThresholdInputs& in);

enum class ThresholdMethod {
  kEqualSigma,     // closed form, sigma_a == sigma_n
  kQuadraticRoot,  // closed form, the root that is a local minimum
  kGoldenSection,  // no admissible real root
};

struct ThresholdSolution {
  double t = 0.0;
  ThresholdMethod method = ThresholdMethod::kEqualSigma;
  // The curvature condition was not strictly satisfied by exactly one root;
  // the pick was settled by comparing expected_error at both roots.
  bool curvature_tie = false;
};

/// Threshold minimizing expected_error. Requires both sigmas > 0, alpha in
/// (0, 1) and normal.mu < anomalous.mu.
ThresholdSolution solve_threshold(const ThresholdInputs& in);

inline double optimal_threshold(const ThresholdInputs& in) { return solve_threshold(in).t; }

/// Golden-section minimization of a unimodal f on [lo, hi].
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tolerance = 1e-12, int max_iterations = 500);

}  // namespace sdd
