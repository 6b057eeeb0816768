#include "echonet/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace echonet {

namespace {

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;  // central moments, 1/n normalization
  double m3 = 0.0;
  double m4 = 0.0;
};

Moments central_moments(std::span<const double> sample) {
  Moments mo;
  mo.n = sample.size();
  if (mo.n == 0) return mo;
  double sum = 0.0;
  for (double v : sample) sum += v;
  mo.mean = sum / static_cast<double>(mo.n);
  for (double v : sample) {
    const double d = v - mo.mean;
    const double d2 = d * d;
    mo.m2 += d2;
    mo.m3 += d2 * d;
    mo.m4 += d2 * d2;
  }
  const auto n = static_cast<double>(mo.n);
  mo.m2 /= n;
  mo.m3 /= n;
  mo.m4 /= n;
  return mo;
}

}  // namespace

double sample_skewness(std::span<const double> sample) {
  const Moments mo = central_moments(sample);
  if (mo.n < 3 || mo.m2 <= 0.0) {
    throw std::invalid_argument("skewness needs n >= 3 and nonzero variance");
  }
  const auto n = static_cast<double>(mo.n);
  const double g1 = mo.m3 / std::pow(mo.m2, 1.5);
  return std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
}

double sample_excess_kurtosis(std::span<const double> sample) {
  const Moments mo = central_moments(sample);
  if (mo.n < 4 || mo.m2 <= 0.0) {
    throw std::invalid_argument("kurtosis needs n >= 4 and nonzero variance");
  }
  const auto n = static_cast<double>(mo.n);
  const double g2 = mo.m4 / (mo.m2 * mo.m2) - 3.0;
  return (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * g2 + 6.0);
}

BcResult bimodality_coefficient(std::span<const double> sample) {
  const Moments mo = central_moments(sample);
  if (mo.n < 4 || mo.m2 <= 0.0) {
    return {.value = std::numeric_limits<double>::quiet_NaN(),
            .degenerate = true};
  }
  const auto n = static_cast<double>(mo.n);
  const double g1 = mo.m3 / std::pow(mo.m2, 1.5);
  const double g = std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
  const double g2 = mo.m4 / (mo.m2 * mo.m2) - 3.0;
  const double k = (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * g2 + 6.0);
  const double small_sample_term =
      3.0 * (n - 1.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
  return {.value = (g * g + 1.0) / (k + small_sample_term),
          .degenerate = false};
}

std::vector<std::optional<double>> neighbor_mean(
    const AdaptiveDigraph& graph, std::span<const double> opinions) {
  if (opinions.size() != graph.node_count()) {
    throw std::invalid_argument("neighbor_mean: opinion/node count mismatch");
  }
  std::vector<std::optional<double>> result(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    const auto outs = graph.followees(v);
    if (outs.empty()) continue;
    double sum = 0.0;
    for (NodeId w : outs) sum += opinions[w];
    result[v] = sum / static_cast<double>(outs.size());
  }
  return result;
}

std::vector<double> diagonal_projection(std::span<const double> b,
                                        std::span<const double> b_nn) {
  if (b.size() != b_nn.size()) {
    throw std::invalid_argument("diagonal_projection: length mismatch");
  }
  constexpr double kInvSqrt2 = 0.7071067811865475244;
  std::vector<double> proj(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    proj[i] = (b[i] + b_nn[i]) * kInvSqrt2;
  }
  return proj;
}

BcResult bc_hom(std::span<const double> b, std::span<const double> b_nn) {
  const std::vector<double> proj = diagonal_projection(b, b_nn);
  return bimodality_coefficient(proj);
}

PairedSample paired_opinion_sample(const AdaptiveDigraph& graph,
                                   std::span<const double> opinions,
                                   std::span<const std::uint8_t> include) {
  if (!include.empty() && include.size() != graph.node_count()) {
    throw std::invalid_argument("paired_opinion_sample: mask size mismatch");
  }
  const auto means = neighbor_mean(graph, opinions);
  PairedSample out;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (!include.empty() && !include[v]) continue;
    if (!means[v].has_value()) continue;
    out.b.push_back(opinions[v]);
    out.b_nn.push_back(*means[v]);
  }
  return out;
}

std::uint64_t DensityMap::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double DensityMap::bin_center(std::uint32_t index) const {
  const double width = 2.0 / bins;
  return -1.0 + (index + 0.5) * width;
}

DensityMap density_map(std::span<const double> b, std::span<const double> b_nn,
                       std::uint32_t bins) {
  if (bins < 2) throw std::invalid_argument("density_map: bins must be >= 2");
  if (b.size() != b_nn.size()) {
    throw std::invalid_argument("density_map: length mismatch");
  }
  DensityMap map;
  map.bins = bins;
  map.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
  const auto to_bin = [bins](double v) {
    const auto raw = static_cast<std::int64_t>((v + 1.0) * 0.5 * bins);
    return static_cast<std::uint32_t>(
        std::clamp<std::int64_t>(raw, 0, bins - 1));
  };
  for (std::size_t i = 0; i < b.size(); ++i) {
    ++map.at(to_bin(b[i]), to_bin(b_nn[i]));
  }
  return map;
}

EdgeFractions stubborn_edge_fraction(
    const AdaptiveDigraph& graph, std::span<const std::uint8_t> is_stubborn) {
  if (is_stubborn.size() != graph.node_count()) {
    throw std::invalid_argument("stubborn_edge_fraction: mask size mismatch");
  }
  if (graph.edge_count() == 0) {
    throw std::invalid_argument("stubborn_edge_fraction: empty graph");
  }
  std::uint64_t touching = 0;
  for (NodeId src = 0; src < graph.node_count(); ++src) {
    for (NodeId dst : graph.followees(src)) {
      if (is_stubborn[src] || is_stubborn[dst]) ++touching;
    }
  }
  const auto total = static_cast<double>(graph.edge_count());
  const double stubborn = static_cast<double>(touching) / total;
  return {.stubborn = stubborn, .periphery = 1.0 - stubborn};
}

double quantile(std::vector<double> sample, double q) {
  if (sample.empty()) {
    throw std::invalid_argument("quantile: empty sample");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("quantile: q must be in [0, 1]");
  }
  std::sort(sample.begin(), sample.end());
  const double h = (static_cast<double>(sample.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sample.size()) return sample.back();
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[lo + 1] - sample[lo]);
}

}  // namespace echonet
