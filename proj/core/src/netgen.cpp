#include "echonet/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace echonet {

namespace {

std::uint64_t edge_key(NodeId src, NodeId dst) {
  return (static_cast<std::uint64_t>(src) << 32) | dst;
}

// Discrete inverse-CDF sampler for P(k) ~ k^-lambda on [kmin, kmax].
class PowerLawSampler {
 public:
  PowerLawSampler(double lambda, std::uint32_t kmin, std::uint32_t kmax)
      : kmin_(kmin) {
    if (!(lambda > 2.0)) {
      throw std::invalid_argument("netgen: lambda must be > 2");
    }
    if (kmin < 1 || kmin > kmax) {
      throw std::invalid_argument("netgen: invalid degree bounds");
    }
    cdf_.reserve(kmax - kmin + 1);
    double total = 0.0;
    for (std::uint32_t k = kmin; k <= kmax; ++k) {
      total += std::pow(static_cast<double>(k), -lambda);
      cdf_.push_back(total);
    }
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
  }

  std::uint32_t operator()(Rng& rng) const {
    const double u = uniform_unit(rng);
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return kmin_ + static_cast<std::uint32_t>(it - cdf_.begin());
  }

 private:
  std::uint32_t kmin_;
  std::vector<double> cdf_;
};

}  // namespace

AdaptiveDigraph generate_er_directed(std::uint32_t n, double p, Rng& rng) {
  if (n < 2) throw std::invalid_argument("netgen: n must be >= 2");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("netgen: p must be in [0, 1]");
  }

  AdaptiveDigraph g(n);
  if (p == 0.0) return g;

  // Sample the undirected pair set row by row with geometric gap skipping,
  // then orient each edge uniformly.
  const bool all = (p == 1.0);
  const double log1mp = all ? 0.0 : std::log1p(-p);
  for (NodeId i = 0; i + 1 < n; ++i) {
    const std::uint64_t row_len = n - 1 - i;  // candidates j in (i, n)
    std::uint64_t pos = 0;
    while (pos < row_len) {
      if (!all) {
        const double u = 1.0 - uniform_unit(rng);  // (0, 1]
        const double skip = std::floor(std::log(u) / log1mp);
        if (skip >= static_cast<double>(row_len - pos)) break;
        pos += static_cast<std::uint64_t>(skip);
      }
      const NodeId j = i + 1 + static_cast<NodeId>(pos);
      if (bernoulli(rng, 0.5)) {
        g.add_edge(i, j);
      } else {
        g.add_edge(j, i);
      }
      ++pos;
    }
  }
  return g;
}

std::vector<std::uint32_t> sample_power_law_degrees(std::uint32_t n,
                                                    double lambda,
                                                    std::uint32_t kmin,
                                                    std::uint32_t kmax,
                                                    Rng& rng) {
  const PowerLawSampler sample(lambda, kmin, kmax);
  std::vector<std::uint32_t> degrees(n);
  for (auto& d : degrees) d = sample(rng);
  return degrees;
}

void reconcile_degree_sums(DegreeSequence& seq, double lambda,
                           std::uint32_t kmin, std::uint32_t kmax, Rng& rng) {
  const PowerLawSampler sample(lambda, kmin, kmax);
  auto sum = [](const std::vector<std::uint32_t>& v) {
    return std::accumulate(v.begin(), v.end(), std::uint64_t{0});
  };

  // Resample single entries of the larger-sum sequence; this preserves the
  // target distribution shape.
  constexpr int kMaxResamples = 10'000;
  for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
    const std::uint64_t in_sum = sum(seq.in);
    const std::uint64_t out_sum = sum(seq.out);
    if (in_sum == out_sum) return;
    auto& larger = in_sum > out_sum ? seq.in : seq.out;
    larger[uniform_index(rng, static_cast<std::uint32_t>(larger.size()))] =
        sample(rng);
  }
  // Fallback: trim the largest entries of the larger sequence.
  for (;;) {
    const std::uint64_t in_sum = sum(seq.in);
    const std::uint64_t out_sum = sum(seq.out);
    if (in_sum == out_sum) return;
    auto& larger = in_sum > out_sum ? seq.in : seq.out;
    auto it = std::max_element(larger.begin(), larger.end());
    const std::uint64_t excess =
        in_sum > out_sum ? in_sum - out_sum : out_sum - in_sum;
    const std::uint32_t reducible = *it > kmin ? *it - kmin : 0;
    *it -= static_cast<std::uint32_t>(
        std::min<std::uint64_t>(excess, std::max(reducible, 1u)));
  }
}

AdaptiveDigraph configuration_model(const DegreeSequence& seq, Rng& rng) {
  if (seq.in.size() != seq.out.size() || seq.in.empty()) {
    throw std::invalid_argument("netgen: malformed degree sequence");
  }
  const auto n = static_cast<std::uint32_t>(seq.in.size());
  const std::uint64_t in_sum =
      std::accumulate(seq.in.begin(), seq.in.end(), std::uint64_t{0});
  const std::uint64_t out_sum =
      std::accumulate(seq.out.begin(), seq.out.end(), std::uint64_t{0});
  if (in_sum != out_sum) {
    throw std::invalid_argument("netgen: degree sums differ");
  }

  std::vector<NodeId> out_stubs;
  std::vector<NodeId> in_stubs;
  out_stubs.reserve(out_sum);
  in_stubs.reserve(in_sum);
  for (NodeId v = 0; v < n; ++v) {
    out_stubs.insert(out_stubs.end(), seq.out[v], v);
    in_stubs.insert(in_stubs.end(), seq.in[v], v);
  }

  const auto m = static_cast<std::size_t>(out_sum);
  // Fisher-Yates over the in-stubs; pairing slot t gives edge
  // out_stubs[t] -> in_stubs[t].
  for (std::size_t t = 0; t + 1 < m; ++t) {
    const auto r =
        t + uniform_index(rng, static_cast<std::uint32_t>(m - t));
    std::swap(in_stubs[t], in_stubs[r]);
  }

  // Repair self-loops and duplicates by re-shuffling the offending in-stubs
  // against random partners. Degrees are preserved exactly.
  constexpr int kMaxPasses = 200;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(m * 2);
    std::vector<std::size_t> bad;
    for (std::size_t t = 0; t < m; ++t) {
      if (out_stubs[t] == in_stubs[t] ||
          !seen.insert(edge_key(out_stubs[t], in_stubs[t])).second) {
        bad.push_back(t);
      }
    }
    if (bad.empty()) {
      std::vector<std::pair<NodeId, NodeId>> edges(m);
      for (std::size_t t = 0; t < m; ++t) {
        edges[t] = {out_stubs[t], in_stubs[t]};
      }
      return AdaptiveDigraph::from_edges(n, edges);
    }
    for (std::size_t t : bad) {
      const auto r = uniform_index(rng, static_cast<std::uint32_t>(m));
      std::swap(in_stubs[t], in_stubs[r]);
    }
  }
  throw std::runtime_error(
      "netgen: degree sequence not realizable as a simple digraph "
      "(collision repair exhausted)");
}

AdaptiveDigraph generate_sf_directed(std::uint32_t n, double lambda,
                                     std::uint32_t kmin, Rng& rng) {
  if (n < 2) throw std::invalid_argument("netgen: n must be >= 2");
  const std::uint32_t kmax = n - 1;
  DegreeSequence seq;
  seq.in = sample_power_law_degrees(n, lambda, kmin, kmax, rng);
  seq.out = sample_power_law_degrees(n, lambda, kmin, kmax, rng);
  reconcile_degree_sums(seq, lambda, kmin, kmax, rng);
  return configuration_model(seq, rng);
}

}  // namespace echonet
