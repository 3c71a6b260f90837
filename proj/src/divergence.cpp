#include "sdd/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sdd/error.hpp"

namespace sdd {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw Error("distribution length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (const double x : p) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

double kl(std::span<const double> p, std::span<const double> q) {
  require_same_length(p.size(), q.size());
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (q[k] <= 0.0) throw Error("absolute continuity violated at bin " + std::to_string(k));
    d += p[k] * std::log2(p[k] / q[k]);
  }
  // Rounding can leave a tiny negative residue when p == q.
  return std::max(d, 0.0);
}

double jsd_pair(std::span<const double> p, std::span<const double> q) {
  require_same_length(p.size(), q.size());
  // Sum of the two half-KLs against the midpoint, which is exactly zero
  // when p == q and avoids cancellation between entropies.
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double m = 0.5 * (p[k] + q[k]);
    const double a = p[k] > 0.0 ? p[k] * std::log2(p[k] / m) : 0.0;
    const double b = q[k] > 0.0 ? q[k] * std::log2(q[k] / m) : 0.0;
    d += 0.5 * (a + b);
  }
  return std::clamp(d, 0.0, 1.0);
}

double jsd_multi(const std::vector<std::vector<double>>& ps, std::optional<std::vector<double>> weights) {
  if (ps.size() < 2) throw Error("jsd_multi needs at least two distributions");
  const auto n = ps.size();
  const auto bins = ps.front().size();
  for (const auto& p : ps) require_same_length(p.size(), bins);

  std::vector<double> w = weights ? *weights : std::vector<double>(n, 1.0 / static_cast<double>(n));
  if (w.size() != n) throw Error("weight count does not match distribution count");
  for (const double x : w) {
    if (!(x >= 0.0)) throw Error("weights must be non-negative");
  }
  if (std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) > 1e-9) throw Error("weights must sum to 1");

  std::vector<double> mix(bins, 0.0);
  double mean_entropy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < bins; ++k) mix[k] += w[i] * ps[i][k];
    mean_entropy += w[i] * entropy(ps[i]);
  }
  return std::max(entropy(mix) - mean_entropy, 0.0);
}

std::string_view to_string(MetricKind kind) noexcept { return kind == MetricKind::kJsd ? "jsd" : "kl"; }

MetricKind parse_metric(std::string_view name) {
  if (name == "jsd") return MetricKind::kJsd;
  if (name == "kl") return MetricKind::kKl;
  throw ConfigError("unknown metric '" + std::string(name) + "', expected jsd or kl");
}

DivergenceMetric::DivergenceMetric(MetricKind kind, std::optional<double> smoothing)
    : kind_(kind),
      smoothing_(smoothing.value_or(kind == MetricKind::kKl ? kDefaultKlSmoothing : 0.0)),
      evaluations_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (smoothing_ < 0.0) throw ConfigError("smoothing must be non-negative");
}

double DivergenceMetric::operator()(const Distribution& p, const Distribution& q) const {
  evaluations_->fetch_add(1, std::memory_order_relaxed);
  if (!same_support(p, q)) {
    const auto [pa, qa] = align(p, q);
    return evaluate_aligned(pa, qa);
  }
  return evaluate_aligned(p, q);
}

double DivergenceMetric::evaluate_aligned(const Distribution& p, const Distribution& q) const {
  if (kind_ == MetricKind::kJsd) return jsd_pair(p.mass, q.mass);
  if (smoothing_ > 0.0) return kl(smooth(p, smoothing_).mass, smooth(q, smoothing_).mass);
  return kl(p.mass, q.mass);
}

}  // namespace sdd
