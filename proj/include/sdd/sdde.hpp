#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdd/detector.hpp"
#include "sdd/threshold.hpp"

namespace sdd {

enum class EvidencePolicy {
  kStatic,      // never evicts; adding past capacity is an error
  kFifoWindow,  // evicts the oldest member once full
};

/// Bounded, insertion-ordered set of evidence distributions.
class EvidenceSet {
 public:
  EvidenceSet(std::size_t capacity, EvidencePolicy policy);

  /// Set holding `members`; capacity defaults to their count.
  static EvidenceSet of(std::vector<Distribution> members, EvidencePolicy policy,
                        std::optional<std::size_t> capacity = std::nullopt);

  void add(Distribution d);

  const std::deque<Distribution>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  EvidencePolicy policy() const noexcept { return policy_; }

 private:
  std::size_t capacity_;
  EvidencePolicy policy_;
  std::deque<Distribution> members_;
};

/// Output of SddeState::prepare. Immutable and safe to share between
/// threads; classification against it is read-only.
struct PreparedModel {
  Distribution reference;  // mean of the normal evidence
  GaussianParams normal;
  GaussianParams anomalous;
  ThresholdSolution threshold;

  Verdict classify(const std::string& id, const Distribution& p, const DivergenceMetric& metric) const;
};

/// Evidence-based detector state.
///
/// prepare() is recomputed only when the evidence changed since the last
/// call. update_dynamic() needs exclusive access; callers serialize it with
/// classification.
class SddeState {
 public:
  SddeState(EvidenceSet normal, EvidenceSet anomalous, double alpha, DetectorConfig cfg);

  /// Builds both evidence sets from raw collections.
  static SddeState from_collections(const std::vector<DataCollection>& normal,
                                    const std::vector<DataCollection>& anomalous, double alpha, DetectorConfig cfg,
                                    EvidencePolicy policy, std::optional<std::size_t> normal_capacity = std::nullopt,
                                    std::optional<std::size_t> anomalous_capacity = std::nullopt);

  const PreparedModel& prepare();

  Verdict classify(const DataCollection& d);
  std::vector<Verdict> classify_batch(const std::vector<DataCollection>& ds);

  /// Appends the collection to the evidence set its verdict names, evicting
  /// the oldest member when full. Rejected for static evidence.
  void update_dynamic(const DataCollection& d, const Verdict& verdict);
  void update_dynamic(const Distribution& p, bool anomalous);

  /// One dynamic step: classify, then add the collection to the evidence of
  /// `label` when given, else of its own verdict. If an update leaves the
  /// classes unseparated, the last separable model keeps classifying.
  Verdict classify_and_update(const DataCollection& d, std::optional<bool> label = std::nullopt);

  const EvidenceSet& normal_evidence() const noexcept { return normal_; }
  const EvidenceSet& anomalous_evidence() const noexcept { return anomalous_; }
  double alpha() const noexcept { return alpha_; }
  const DetectorConfig& config() const noexcept { return cfg_; }

  std::string to_json() const;
  static SddeState from_json(std::string_view text);

 private:
  EvidenceSet normal_;
  EvidenceSet anomalous_;
  double alpha_;
  DetectorConfig cfg_;
  std::optional<PreparedModel> prepared_;
  std::optional<PreparedModel> last_separable_;
};

}  // namespace sdd
