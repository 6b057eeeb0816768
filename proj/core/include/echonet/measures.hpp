#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "echonet/graph.hpp"

namespace echonet {

// Coefficient outcome; degenerate when the sample is too small (n < 4) or
// has zero variance.
struct BcResult {
  double value = 0.0;
  bool degenerate = false;
};

// Bias-corrected sample skewness (G1) and excess kurtosis (G2).
double sample_skewness(std::span<const double> sample);
double sample_excess_kurtosis(std::span<const double> sample);

// Bimodality coefficient (g^2 + 1) / (k + 3(n-1)^2 / ((n-2)(n-3))).
// Values above 5/9 indicate a bimodal distribution.
BcResult bimodality_coefficient(std::span<const double> sample);

inline constexpr double kBimodalThreshold = 5.0 / 9.0;

// Mean opinion over each node's followees (all of them, regardless of
// kind). Nodes with out-degree zero get nullopt and are excluded from
// b_NN-based measures downstream.
std::vector<std::optional<double>> neighbor_mean(
    const AdaptiveDigraph& graph, std::span<const double> opinions);

// Projection of each (b, b_NN) pair onto the main diagonal,
// (b + b_NN) / sqrt(2): the first coordinate of the 45-degree rotation.
// Aligned clusters stay bimodal; anti-aligned clouds collapse toward 0.
std::vector<double> diagonal_projection(std::span<const double> b,
                                        std::span<const double> b_nn);

// Homophilic bimodality coefficient: BC of the diagonal projection.
// Inputs must be pairwise aligned with zero-out-degree nodes removed.
BcResult bc_hom(std::span<const double> b, std::span<const double> b_nn);

// Opinion pairs (b_i, b_NN_i) for nodes selected by `include` (empty mask
// means all nodes) that have at least one followee. The neighbor average
// always runs over all followees.
struct PairedSample {
  std::vector<double> b;
  std::vector<double> b_nn;
};
PairedSample paired_opinion_sample(const AdaptiveDigraph& graph,
                                   std::span<const double> opinions,
                                   std::span<const std::uint8_t> include = {});

// 2-D histogram over [-1, 1]^2, x = b, y = b_NN. Values exactly at +1 fall
// in the last bin.
struct DensityMap {
  std::uint32_t bins = 0;
  std::vector<std::uint64_t> counts;  // row-major, index y * bins + x

  std::uint64_t& at(std::uint32_t x, std::uint32_t y) {
    return counts[static_cast<std::size_t>(y) * bins + x];
  }
  std::uint64_t at(std::uint32_t x, std::uint32_t y) const {
    return counts[static_cast<std::size_t>(y) * bins + x];
  }
  std::uint64_t total() const;
  double bin_center(std::uint32_t index) const;
};

DensityMap density_map(std::span<const double> b, std::span<const double> b_nn,
                       std::uint32_t bins);

// Fraction of edges with at least one stubborn endpoint, and the
// complementary fraction between two non-stubborn users (the periphery).
struct EdgeFractions {
  double stubborn = 0.0;
  double periphery = 0.0;
};
EdgeFractions stubborn_edge_fraction(const AdaptiveDigraph& graph,
                                     std::span<const std::uint8_t> is_stubborn);

// Type-7 (linear interpolation) quantile of an unsorted sample.
double quantile(std::vector<double> sample, double q);

}  // namespace echonet
