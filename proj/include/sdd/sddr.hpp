#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sdd/detector.hpp"

namespace sdd {

/// Pointwise mean of equally supported distributions.
Distribution reference_distribution(const std::vector<Distribution>& ps);

/// div(P_i || P_R) for every P_i, with P_R their mean.
std::vector<double> reference_divergences(const std::vector<Distribution>& ps, const DivergenceMetric& metric);

/// Indices whose population z-score strictly exceeds 3. Empty when the
/// divergences have (near) zero spread.
std::vector<bool> flag_three_sigma(std::span<const double> divergences);

/// Number of collections the ranking rule selects: ceil(n * alpha), at least
/// one for any alpha > 0 and never more than n.
std::size_t rank_alpha_count(std::size_t n, double alpha);

/// The rank_alpha_count(n, alpha) largest divergences; ties go to the
/// earlier index.
std::vector<bool> flag_top_alpha(std::span<const double> divergences, double alpha);

/// Reference-based detection with the three-sigma rule. Verdicts follow input
/// order. Needs at least two collections.
std::vector<Verdict> detect_sddr(const std::vector<DataCollection>& collections, const DetectorConfig& cfg);

/// Reference-based detection flagging the ceil(n * alpha) most divergent
/// collections.
std::vector<Verdict> detect_sddr_plus(const std::vector<DataCollection>& collections, const DetectorConfig& cfg,
                                      double alpha);

}  // namespace sdd
