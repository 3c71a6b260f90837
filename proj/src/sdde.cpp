#include "sdd/sdde.hpp"

#include <algorithm>
#include <utility>

#include <json.hpp>

#include "sdd/error.hpp"
#include "sdd/sddr.hpp"

namespace sdd {

namespace {

constexpr double kSigmaFloor = 1e-12;

GaussianParams fit_floored(const std::vector<double>& d) {
  auto g = fit_gaussian(d);
  g.sigma = std::max(g.sigma, kSigmaFloor);
  return g;
}

std::string_view policy_name(EvidencePolicy p) { return p == EvidencePolicy::kStatic ? "static" : "fifo_window"; }

EvidencePolicy parse_policy(std::string_view s) {
  if (s == "static") return EvidencePolicy::kStatic;
  if (s == "fifo_window") return EvidencePolicy::kFifoWindow;
  throw Error("unknown evidence policy '" + std::string(s) + "'");
}

nlohmann::json evidence_json(const EvidenceSet& e) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& d : e.members()) members.push_back({{"mass", d.mass}, {"edges", d.edges}});
  return {{"capacity", e.capacity()}, {"policy", policy_name(e.policy())}, {"members", members}};
}

EvidenceSet evidence_from_json(const nlohmann::json& j) {
  EvidenceSet e(j.at("capacity").get<std::size_t>(), parse_policy(j.at("policy").get<std::string>()));
  for (const auto& m : j.at("members")) {
    e.add(Distribution{m.at("mass").get<std::vector<double>>(), m.at("edges").get<std::vector<double>>()});
  }
  return e;
}

}  // namespace

EvidenceSet::EvidenceSet(std::size_t capacity, EvidencePolicy policy) : capacity_(capacity), policy_(policy) {
  if (capacity == 0) throw ConfigError("evidence capacity must be positive");
}

EvidenceSet EvidenceSet::of(std::vector<Distribution> members, EvidencePolicy policy,
                            std::optional<std::size_t> capacity) {
  EvidenceSet e(capacity.value_or(std::max<std::size_t>(members.size(), 1)), policy);
  if (members.size() > e.capacity()) {
    throw ConfigError("evidence holds " + std::to_string(members.size()) + " members but capacity is " +
                      std::to_string(e.capacity()));
  }
  for (auto& m : members) e.add(std::move(m));
  return e;
}

void EvidenceSet::add(Distribution d) {
  if (members_.size() == capacity_) {
    if (policy_ == EvidencePolicy::kStatic) throw Error("static evidence set is full");
    members_.pop_front();
  }
  members_.push_back(std::move(d));
}

Verdict PreparedModel::classify(const std::string& id, const Distribution& p, const DivergenceMetric& metric) const {
  const double d = metric(p, reference);
  return {id, d, d > threshold.t, Rule::kThreshold};
}

SddeState::SddeState(EvidenceSet normal, EvidenceSet anomalous, double alpha, DetectorConfig cfg)
    : normal_(std::move(normal)), anomalous_(std::move(anomalous)), alpha_(alpha), cfg_(std::move(cfg)) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie strictly inside (0, 1)");
}

SddeState SddeState::from_collections(const std::vector<DataCollection>& normal,
                                      const std::vector<DataCollection>& anomalous, double alpha, DetectorConfig cfg,
                                      EvidencePolicy policy, std::optional<std::size_t> normal_capacity,
                                      std::optional<std::size_t> anomalous_capacity) {
  std::vector<Distribution> pn, pa;
  for (const auto& c : normal) pn.push_back(distribution_of(c, cfg.features));
  for (const auto& c : anomalous) pa.push_back(distribution_of(c, cfg.features));
  return SddeState(EvidenceSet::of(std::move(pn), policy, normal_capacity),
                   EvidenceSet::of(std::move(pa), policy, anomalous_capacity), alpha, std::move(cfg));
}

const PreparedModel& SddeState::prepare() {
  if (prepared_) return *prepared_;
  if (normal_.size() < 2 || anomalous_.size() < 2) {
    throw Error("each evidence set needs at least two members before classification");
  }
  const std::vector<Distribution> normals(normal_.members().begin(), normal_.members().end());
  PreparedModel m;
  m.reference = reference_distribution(align_all(normals));

  std::vector<double> dn, da;
  dn.reserve(normal_.size());
  da.reserve(anomalous_.size());
  for (const auto& p : normal_.members()) dn.push_back(cfg_.metric(p, m.reference));
  for (const auto& p : anomalous_.members()) da.push_back(cfg_.metric(p, m.reference));
  m.normal = fit_floored(dn);
  m.anomalous = fit_floored(da);
  if (!(m.anomalous.mu > m.normal.mu)) throw SeparationError("evidence classes not separated");
  m.threshold = solve_threshold({m.normal, m.anomalous, alpha_});
  prepared_ = std::move(m);
  return *prepared_;
}

Verdict SddeState::classify(const DataCollection& d) {
  return prepare().classify(d.id(), distribution_of(d, cfg_.features), cfg_.metric);
}

std::vector<Verdict> SddeState::classify_batch(const std::vector<DataCollection>& ds) {
  const auto& model = prepare();
  std::vector<Verdict> out;
  out.reserve(ds.size());
  for (const auto& d : ds) out.push_back(model.classify(d.id(), distribution_of(d, cfg_.features), cfg_.metric));
  return out;
}

void SddeState::update_dynamic(const DataCollection& d, const Verdict& verdict) {
  update_dynamic(distribution_of(d, cfg_.features), verdict.flagged);
}

void SddeState::update_dynamic(const Distribution& p, bool anomalous) {
  auto& target = anomalous ? anomalous_ : normal_;
  if (target.policy() != EvidencePolicy::kFifoWindow) throw Error("update_dynamic requires sliding-window evidence");
  target.add(p);
  prepared_.reset();
}

Verdict SddeState::classify_and_update(const DataCollection& d, std::optional<bool> label) {
  const auto p = distribution_of(d, cfg_.features);
  try {
    last_separable_ = prepare();
  } catch (const SeparationError&) {
    if (!last_separable_) throw;
  }
  auto v = last_separable_->classify(d.id(), p, cfg_.metric);
  update_dynamic(p, label.value_or(v.flagged));
  return v;
}

std::string SddeState::to_json() const {
  const auto& f = cfg_.features;
  nlohmann::json j = {
      {"alpha", alpha_},
      {"metric", to_string(cfg_.metric.kind())},
      {"smoothing", cfg_.metric.smoothing()},
      {"level", static_cast<int>(f.level)},
      {"bins_per_day", f.bins_per_day},
      {"value_bin_width", f.value_bin_width},
      {"normal_evidence", evidence_json(normal_)},
      {"anomalous_evidence", evidence_json(anomalous_)},
  };
  return j.dump();
}

SddeState SddeState::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    DetectorConfig cfg{
        FeatureConfig{parse_level(j.at("level").get<int>()), j.at("bins_per_day").get<int>(),
                      j.at("value_bin_width").get<std::uint64_t>()},
        DivergenceMetric(parse_metric(j.at("metric").get<std::string>()), j.at("smoothing").get<double>())};
    return SddeState(evidence_from_json(j.at("normal_evidence")), evidence_from_json(j.at("anomalous_evidence")),
                     j.at("alpha").get<double>(), std::move(cfg));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad SDD-E state snapshot: ") + e.what());
  }
}

}  // namespace sdd
