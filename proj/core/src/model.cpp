#include "echonet/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace echonet {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_opinion_range(double v, const char* what) {
  if (!(v >= -1.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " out of [-1, 1]");
  }
}

double cos_sq(double x) {
  const double c = std::cos(x);
  return c * c;
}

}  // namespace

void ModelParams::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("delta must be positive");
  }
  if (!(phi >= 0.0 && phi <= std::numbers::pi)) {
    throw std::invalid_argument("phi must be in [0, pi]");
  }
}

void PopulationSpec::validate() const {
  for (double f : {priority_fraction, stubborn_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw std::invalid_argument("user fractions must be in [0, 1]");
    }
  }
  if (stubborn_are_priority && stubborn_fraction > priority_fraction) {
    throw std::invalid_argument(
        "ideologue mode requires stubborn_fraction <= priority_fraction");
  }
  if (!stubborn_are_priority &&
      priority_fraction + stubborn_fraction > 1.0 + 1e-12) {
    throw std::invalid_argument(
        "priority_fraction + stubborn_fraction exceeds 1");
  }
}

double posting_prob_controversial(double theta, double b_i) {
  check_opinion_range(theta, "theta");
  check_opinion_range(b_i, "opinion");
  return cos_sq(kHalfPi * std::abs(theta - b_i));
}

double posting_prob_aligned(double theta, double b_i) {
  check_opinion_range(theta, "theta");
  check_opinion_range(b_i, "opinion");
  const double dist = std::abs(theta - b_i);
  if (dist > 1.0) return 0.0;
  return cos_sq(kHalfPi * dist);
}

double posting_prob(PostingRule rule, double theta, double b_i) {
  return rule == PostingRule::aligned ? posting_prob_aligned(theta, b_i)
                                      : posting_prob_controversial(theta, b_i);
}

double receive_prob(double b_i, double b_j, double phi,
                    bool sender_is_priority) {
  check_opinion_range(b_i, "sender opinion");
  check_opinion_range(b_j, "receiver opinion");
  if (!(phi >= 0.0 && phi <= std::numbers::pi)) {
    throw std::invalid_argument("phi must be in [0, pi]");
  }
  if (sender_is_priority) return 1.0;
  return cos_sq(kHalfPi * std::abs(b_i - b_j) + phi);
}

double realign(double b_j, double theta, double delta, Rng& rng) {
  const double dist = std::abs(theta - b_j);
  if (bernoulli(rng, dist * 0.5)) {
    // repulsed: dist > 0 here, so the direction away from theta is defined
    const double away = (b_j > theta) ? delta : -delta;
    return std::clamp(b_j + away, -1.0, 1.0);
  }
  if (dist <= delta) return theta;  // snap
  return b_j + ((theta > b_j) ? delta : -delta);
}

double rewire_prob(double b_i, double b_j) {
  check_opinion_range(b_i, "sender opinion");
  check_opinion_range(b_j, "follower opinion");
  return std::max(0.0, std::abs(b_i - b_j) - 1.0);
}

OpinionState init_opinion_state(std::uint32_t n, const PopulationSpec& spec,
                                Rng& rng) {
  spec.validate();
  OpinionState st(n);

  const auto k_priority =
      static_cast<std::uint32_t>(std::llround(spec.priority_fraction * n));
  const auto k_stubborn =
      static_cast<std::uint32_t>(std::llround(spec.stubborn_fraction * n));

  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0u);

  // Partial Fisher-Yates: ids[0..k_priority) become the priority users.
  for (std::uint32_t t = 0; t < k_priority; ++t) {
    std::swap(ids[t], ids[t + uniform_index(rng, n - t)]);
  }
  // Stubborn users are drawn among the priority prefix in ideologue mode,
  // among the non-priority suffix otherwise.
  const std::uint32_t pool_begin = spec.stubborn_are_priority ? 0 : k_priority;
  const std::uint32_t pool_size =
      spec.stubborn_are_priority ? k_priority : n - k_priority;
  assert(k_stubborn <= pool_size);
  for (std::uint32_t t = 0; t < k_stubborn; ++t) {
    std::swap(ids[pool_begin + t],
              ids[pool_begin + t + uniform_index(rng, pool_size - t)]);
  }

  for (std::uint32_t t = 0; t < k_priority; ++t) {
    st.set_kind(ids[t], true, false);
  }
  for (std::uint32_t t = 0; t < k_stubborn; ++t) {
    const std::uint32_t id = ids[pool_begin + t];
    st.set_kind(id, spec.stubborn_are_priority, true);
    // Extremists split half at +1, half at -1, over a randomly ordered
    // selection; centrists sit at 0.
    st.opinions[id] = spec.stubborn_profile == StubbornProfile::extremist
                          ? (t % 2 == 0 ? 1.0 : -1.0)
                          : 0.0;
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    if (st.is_stubborn(i)) {
      st.set_rule(i, spec.stubborn_posting);
    } else if (st.is_priority(i)) {
      st.set_rule(i, spec.priority_posting);
    } else {
      st.set_rule(i, PostingRule::controversial);
    }
  }
  // Opinion draws in node order keep the stream layout independent of the
  // selection shuffles above.
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!st.is_stubborn(i)) st.opinions[i] = uniform_pm1(rng);
  }
  return st;
}

EventOutcome step(OpinionState& state, AdaptiveDigraph& graph,
                  const ModelParams& params, Rng& rng) {
  EventOutcome out;
  const std::uint32_t n = state.size();

  const NodeId i = uniform_index(rng, n);
  out.active = i;

  const double theta = uniform_pm1(rng);
  const double b_i = state.opinions[i];
  if (!bernoulli(rng, posting_prob(state.rule(i), theta, b_i))) {
    return out;  // failed post still consumes the iteration
  }
  out.posted = true;

  const bool sender_priority = state.is_priority(i);
  const double delta = params.delta;
  const double phi = params.phi;

  // Walk i's in-list by index. A rewire swap-removes the current slot and
  // moves an unprocessed tail follower into it, so the index is only
  // advanced when no rewire happened. The list never grows mid-event (the
  // new target of a rewire is never i).
  for (std::size_t k = 0; k < graph.in_degree(i);) {
    const NodeId j = graph.followers(i)[k];
    const double b_j = state.opinions[j];

    if (!sender_priority &&
        !bernoulli(rng, cos_sq(kHalfPi * std::abs(b_i - b_j) + phi))) {
      ++k;
      continue;
    }
    ++out.receivers;

    if (!state.is_stubborn(j)) {
      state.opinions[j] = realign(b_j, theta, delta, rng);
      ++out.realigns;
    }

    // Stubborn receivers skip realigning but are still checked for rewiring.
    const double p_rw = std::abs(b_i - state.opinions[j]) - 1.0;
    if (p_rw > 0.0 && bernoulli(rng, p_rw) && graph.out_degree(j) < n - 1) {
      std::size_t out_pos_of_i = 0;
      NodeId new_target;
      for (;;) {
        new_target = uniform_index(rng, n);
        if (new_target == j) continue;
        bool duplicate = false;
        const auto outs = graph.followees(j);
        for (std::size_t t = 0; t < outs.size(); ++t) {
          if (outs[t] == new_target) {
            duplicate = true;
            break;
          }
          if (outs[t] == i) out_pos_of_i = t;
        }
        if (!duplicate) break;  // re-draw on collision
      }
      graph.retarget_slots(i, k, out_pos_of_i, new_target);
      ++out.rewires;
      continue;  // slot k now holds an unprocessed follower
    }
    ++k;
  }
  return out;
}

RunStats run(OpinionState& state, AdaptiveDigraph& graph,
             const ModelParams& params, Rng& rng, const RunHooks* hooks) {
  params.validate();
  if (state.size() == 0 || state.size() != graph.node_count()) {
    throw std::invalid_argument("state/graph node counts inconsistent");
  }
  const std::uint64_t sample_period =
      (hooks && hooks->on_sample) ? hooks->sample_period : 0;

  RunStats stats;
  stats.iterations = params.iterations;
  for (std::uint64_t it = 1; it <= params.iterations; ++it) {
    const EventOutcome ev = step(state, graph, params, rng);
    stats.posts += ev.posted ? 1 : 0;
    stats.receives += ev.receivers;
    stats.rewires += ev.rewires;

#ifndef NDEBUG
    if (it % 1'000'000 == 0) {
      for (double b : state.opinions) assert(b >= -1.0 && b <= 1.0);
    }
#endif
    if (sample_period != 0 && it % sample_period == 0) {
      hooks->on_sample(it, state, graph);
    }
  }
  return stats;
}

}  // namespace echonet
