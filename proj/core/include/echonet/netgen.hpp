#pragma once

#include <cstdint>
#include <vector>

#include "echonet/graph.hpp"
#include "echonet/rng.hpp"

namespace echonet {

// Target in/out degrees for the configuration model. Valid once
// sum(in) == sum(out).
struct DegreeSequence {
  std::vector<std::uint32_t> in;
  std::vector<std::uint32_t> out;
};

// Undirected G(n, p), each edge then oriented uniformly at random.
// No self-loops. Throws for n < 2 or p outside [0, 1].
AdaptiveDigraph generate_er_directed(std::uint32_t n, double p, Rng& rng);

// In- and out-degree sequences drawn independently from the discrete power
// law P(k) ~ k^-lambda, k in [kmin, n-1], sums reconciled, then stub
// matching with collision repair by re-shuffling the offending stubs.
// Throws if collisions cannot be cleared within the retry budget.
AdaptiveDigraph generate_sf_directed(std::uint32_t n, double lambda,
                                     std::uint32_t kmin, Rng& rng);

// Exposed for tests: power-law sampling and sum reconciliation.
std::vector<std::uint32_t> sample_power_law_degrees(std::uint32_t n,
                                                    double lambda,
                                                    std::uint32_t kmin,
                                                    std::uint32_t kmax,
                                                    Rng& rng);
void reconcile_degree_sums(DegreeSequence& seq, double lambda,
                           std::uint32_t kmin, std::uint32_t kmax, Rng& rng);

// Stub-matching over an explicit degree sequence.
AdaptiveDigraph configuration_model(const DegreeSequence& seq, Rng& rng);

}  // namespace echonet
