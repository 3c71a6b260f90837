#include "sdd/mgof.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include <boost/math/distributions/chi_squared.hpp>

#include "sdd/error.hpp"

namespace sdd {

namespace {

struct Fit {
  double g;
  std::size_t bins;
  double kl_bits;
};

Fit fit_against(const Distribution& empirical, double n, const Distribution& hypothesis, double smoothing) {
  auto [p, q] = align(empirical, hypothesis);
  q = smooth(q, smoothing);
  double kl_nats = 0.0;
  for (std::size_t k = 0; k < p.bins(); ++k) {
    if (p.mass[k] <= 0.0) continue;
    if (q.mass[k] <= 0.0) {
      kl_nats = std::numeric_limits<double>::infinity();
      break;
    }
    kl_nats += p.mass[k] * std::log(p.mass[k] / q.mass[k]);
  }
  kl_nats = std::max(kl_nats, 0.0);
  return {2.0 * n * kl_nats, p.bins(), kl_nats / std::log(2.0)};
}

bool rejects(const Fit& f, double significance) {
  if (f.bins < 2) return f.g > 0.0;
  const boost::math::chi_squared chi2(static_cast<double>(f.bins - 1));
  return f.g > boost::math::quantile(chi2, 1.0 - significance);
}

void validate(const MgofConfig& cfg) {
  if (!(cfg.significance > 0.0 && cfg.significance < 1.0)) throw ConfigError("significance must lie in (0, 1)");
  if (cfg.c_th == 0) throw ConfigError("c_th must be positive");
  if (cfg.window_bins <= 0) throw ConfigError("window_bins must be positive");
  if (!(cfg.smoothing >= 0.0)) throw ConfigError("MGoF smoothing must be non-negative");
}

}  // namespace

std::string_view to_string(MgofVerdict v) noexcept {
  switch (v) {
    case MgofVerdict::kAnomaly:
      return "anomaly";
    case MgofVerdict::kNormal:
      return "normal";
    case MgofVerdict::kUndecided:
      return "undecided";
  }
  return "unknown";
}

double g_statistic(const Histogram& target, const Distribution& hypothesis, double smoothing) {
  return fit_against(normalize(target), static_cast<double>(target.total()), hypothesis, smoothing).g;
}

MgofStepResult mgof_step(std::vector<HypothesisEntry> hypotheses, const Histogram& target, const MgofConfig& cfg) {
  validate(cfg);
  if (target.total() == 0) throw Error("MGoF target window is empty");
  const auto empirical = normalize(target);
  const auto n = static_cast<double>(target.total());

  std::optional<std::size_t> best;
  double best_kl = std::numeric_limits<double>::infinity();
  double closest_kl = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto f = fit_against(empirical, n, hypotheses[i].distribution, cfg.smoothing);
    closest_kl = std::min(closest_kl, f.kl_bits);
    if (!rejects(f, cfg.significance) && f.kl_bits < best_kl) {
      best = i;
      best_kl = f.kl_bits;
    }
  }

  MgofStepResult out;
  out.divergence = std::isfinite(closest_kl) ? closest_kl : 0.0;
  if (!best) {
    out.verdict = MgofVerdict::kAnomaly;
    hypotheses.push_back({empirical, 0});
  } else {
    auto& h = hypotheses[*best];
    ++h.support_count;
    out.verdict = h.support_count > cfg.c_th ? MgofVerdict::kNormal : MgofVerdict::kUndecided;
  }
  out.hypotheses = std::move(hypotheses);
  return out;
}

std::vector<Verdict> mgof_run(const std::vector<DataCollection>& collections, const MgofConfig& cfg,
                              const FeatureConfig& features) {
  validate(cfg);
  std::vector<HypothesisEntry> hypotheses;
  std::vector<Verdict> out;
  out.reserve(collections.size());
  for (const auto& c : collections) {
    auto h = build_first_level(c, cfg.window_bins);
    if (features.level == Level::kSecond) h = build_second_level(h, features.value_bin_width);
    auto step = mgof_step(std::move(hypotheses), h, cfg);
    hypotheses = std::move(step.hypotheses);
    Rule rule = Rule::kMgofNormal;
    if (step.verdict == MgofVerdict::kAnomaly) rule = Rule::kMgofAnomaly;
    if (step.verdict == MgofVerdict::kUndecided) rule = Rule::kMgofUndecided;
    out.push_back({c.id(), step.divergence, step.verdict != MgofVerdict::kNormal, rule});
  }
  return out;
}

}  // namespace sdd
