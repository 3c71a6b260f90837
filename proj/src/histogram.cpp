#include "sdd/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sdd/error.hpp"

namespace sdd {

namespace {

double uniform_width(const std::vector<double>& edges) {
  if (edges.size() < 2) throw Error("distribution has no bins");
  const double w = edges[1] - edges[0];
  for (std::size_t i = 2; i < edges.size(); ++i) {
    if (std::abs((edges[i] - edges[i - 1]) - w) > 1e-9 * std::max(1.0, std::abs(w))) {
      throw Error("bin edges are not uniformly spaced");
    }
  }
  return w;
}

Distribution pad_to(const Distribution& d, double start, std::size_t bins, double width) {
  const auto offset = static_cast<std::size_t>(std::llround((d.edges.front() - start) / width));
  Distribution out;
  out.mass.assign(bins, 0.0);
  std::copy(d.mass.begin(), d.mass.end(), out.mass.begin() + static_cast<std::ptrdiff_t>(offset));
  out.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) out.edges[i] = start + static_cast<double>(i) * width;
  return out;
}

}  // namespace

std::uint64_t Histogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Histogram build_first_level(const DataCollection& collection, int bins_per_day) {
  if (bins_per_day <= 0 || kSecondsPerDay % bins_per_day != 0) {
    throw ConfigError("bins_per_day must be a positive divisor of 86400, got " + std::to_string(bins_per_day));
  }
  const auto width = kSecondsPerDay / bins_per_day;
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(bins_per_day), 0);
  h.edges.resize(h.counts.size() + 1);
  for (std::size_t i = 0; i < h.edges.size(); ++i) h.edges[i] = static_cast<double>(i * width);
  for (const auto e : collection.events) {
    if (e < 0 || e >= kSecondsPerDay) throw Error("event offset " + std::to_string(e) + " outside [0, 86400)");
    ++h.counts[static_cast<std::size_t>(e / width)];
  }
  return h;
}

Histogram build_second_level(const Histogram& first, std::uint64_t value_bin_width) {
  if (first.bins() == 0) throw Error("first-level histogram has no bins");
  if (value_bin_width == 0) throw ConfigError("value_bin_width must be positive");
  const auto max_count = *std::max_element(first.counts.begin(), first.counts.end());
  const auto bins = static_cast<std::size_t>(max_count / value_bin_width) + 1;
  Histogram h;
  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  for (std::size_t j = 0; j <= bins; ++j) h.edges[j] = static_cast<double>(j * value_bin_width);
  for (const auto c : first.counts) ++h.counts[static_cast<std::size_t>(c / value_bin_width)];
  return h;
}

Distribution normalize(const Histogram& h, double epsilon) {
  if (epsilon < 0.0) throw ConfigError("smoothing epsilon must be non-negative");
  const auto total = static_cast<double>(h.total());
  const double denom = total + static_cast<double>(h.bins()) * epsilon;
  if (denom <= 0.0) throw Error("degenerate histogram");
  Distribution d;
  d.edges = h.edges;
  d.mass.resize(h.bins());
  for (std::size_t k = 0; k < h.bins(); ++k) d.mass[k] = (static_cast<double>(h.counts[k]) + epsilon) / denom;
  return d;
}

Distribution smooth(const Distribution& d, double epsilon) {
  if (epsilon < 0.0) throw ConfigError("smoothing epsilon must be non-negative");
  if (epsilon == 0.0) return d;
  Distribution out = d;
  const double denom = 1.0 + static_cast<double>(d.bins()) * epsilon;
  for (auto& m : out.mass) m = (m + epsilon) / denom;
  return out;
}

bool same_support(const Distribution& a, const Distribution& b) noexcept { return a.edges == b.edges; }

std::pair<Distribution, Distribution> align(const Distribution& a, const Distribution& b) {
  if (same_support(a, b)) return {a, b};
  auto both = align_all({a, b});
  return {std::move(both[0]), std::move(both[1])};
}

std::vector<Distribution> align_all(const std::vector<Distribution>& ds) {
  if (ds.empty()) return {};
  const bool identical = std::all_of(ds.begin(), ds.end(), [&](const auto& d) { return same_support(d, ds.front()); });
  if (identical) return ds;

  const double width = uniform_width(ds.front().edges);
  double start = ds.front().edges.front();
  double end = ds.front().edges.back();
  for (const auto& d : ds) {
    const double w = uniform_width(d.edges);
    if (std::abs(w - width) > 1e-9 * std::max(1.0, std::abs(width))) {
      throw Error("incompatible bin widths " + std::to_string(width) + " and " + std::to_string(w));
    }
    const double shift = (d.edges.front() - ds.front().edges.front()) / width;
    if (std::abs(shift - std::round(shift)) > 1e-9) throw Error("bin grids are not aligned");
    start = std::min(start, d.edges.front());
    end = std::max(end, d.edges.back());
  }
  const auto bins = static_cast<std::size_t>(std::llround((end - start) / width));
  std::vector<Distribution> out;
  out.reserve(ds.size());
  for (const auto& d : ds) out.push_back(pad_to(d, start, bins, width));
  return out;
}

}  // namespace sdd
