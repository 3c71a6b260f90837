#include "sdd/sddr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdd/error.hpp"
#include "sdd/threshold.hpp"

namespace sdd {

namespace {

constexpr double kSigmaFloor = 1e-12;

std::vector<Verdict> make_verdicts(const std::vector<DataCollection>& collections, std::span<const double> divergences,
                                   const std::vector<bool>& flags, Rule rule) {
  std::vector<Verdict> out;
  out.reserve(collections.size());
  for (std::size_t i = 0; i < collections.size(); ++i) {
    out.push_back({collections[i].id(), divergences[i], flags[i], rule});
  }
  return out;
}

}  // namespace

Distribution reference_distribution(const std::vector<Distribution>& ps) {
  if (ps.empty()) throw Error("reference of an empty set");
  Distribution ref;
  ref.edges = ps.front().edges;
  ref.mass.assign(ps.front().bins(), 0.0);
  for (const auto& p : ps) {
    if (p.bins() != ref.bins()) throw Error("reference inputs differ in length; align them first");
    for (std::size_t k = 0; k < p.bins(); ++k) ref.mass[k] += p.mass[k];
  }
  const auto n = static_cast<double>(ps.size());
  for (auto& m : ref.mass) m /= n;
  return ref;
}

std::vector<double> reference_divergences(const std::vector<Distribution>& ps, const DivergenceMetric& metric) {
  const auto ref = reference_distribution(ps);
  std::vector<double> d(ps.size());
  std::transform(ps.begin(), ps.end(), d.begin(), [&](const Distribution& p) { return metric(p, ref); });
  return d;
}

std::vector<bool> flag_three_sigma(std::span<const double> divergences) {
  std::vector<bool> flags(divergences.size(), false);
  if (divergences.size() < 2) return flags;
  const auto g = fit_gaussian(divergences);
  if (g.sigma < kSigmaFloor) return flags;
  for (std::size_t i = 0; i < divergences.size(); ++i) flags[i] = (divergences[i] - g.mu) / g.sigma > 3.0;
  return flags;
}

std::size_t rank_alpha_count(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie strictly inside (0, 1)");
  if (n == 0) return 0;
  const double x = static_cast<double>(n) * alpha;
  // Absorb representation error so that e.g. 10 * 0.7 selects 7, not 8.
  const auto k = static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
  return std::clamp<std::size_t>(k, 1, n);
}

std::vector<bool> flag_top_alpha(std::span<const double> divergences, double alpha) {
  const auto k = rank_alpha_count(divergences.size(), alpha);
  std::vector<std::size_t> order(divergences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return divergences[a] > divergences[b]; });
  std::vector<bool> flags(divergences.size(), false);
  for (std::size_t i = 0; i < k; ++i) flags[order[i]] = true;
  return flags;
}

std::vector<Verdict> detect_sddr(const std::vector<DataCollection>& collections, const DetectorConfig& cfg) {
  if (collections.size() < 2) throw Error("SDD-R needs at least two collections");
  const auto d = reference_divergences(distributions_of(collections, cfg.features), cfg.metric);
  return make_verdicts(collections, d, flag_three_sigma(d), Rule::kZ3);
}

std::vector<Verdict> detect_sddr_plus(const std::vector<DataCollection>& collections, const DetectorConfig& cfg,
                                      double alpha) {
  if (collections.empty()) throw Error("SDD-R+ needs at least one collection");
  rank_alpha_count(collections.size(), alpha);
  const auto d = reference_divergences(distributions_of(collections, cfg.features), cfg.metric);
  return make_verdicts(collections, d, flag_top_alpha(d, alpha), Rule::kRankAlpha);
}

}  // namespace sdd
