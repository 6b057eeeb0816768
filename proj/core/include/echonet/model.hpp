#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "echonet/graph.hpp"
#include "echonet/rng.hpp"

namespace echonet {

enum class PostingRule : std::uint8_t { controversial = 0, aligned = 1 };

// Where stubborn users sit on the opinion axis at initialization.
enum class StubbornProfile : std::uint8_t { extremist = 0, centrist = 1 };

struct UserKind {
  bool priority = false;
  bool stubborn = false;
  bool ideologue() const { return priority && stubborn; }
  bool normal() const { return !priority && !stubborn; }
};

// Per-node opinions in [-1, 1] plus user-kind flags and posting-rule
// assignment. Stubborn opinions stay bit-identical to their initial values
// for the whole run.
struct OpinionState {
  std::vector<double> opinions;
  std::vector<std::uint8_t> flags;  // bit0 priority, bit1 stubborn, bit2 aligned rule

  static constexpr std::uint8_t kPriorityBit = 1u << 0;
  static constexpr std::uint8_t kStubbornBit = 1u << 1;
  static constexpr std::uint8_t kAlignedBit = 1u << 2;

  explicit OpinionState(std::uint32_t n = 0) : opinions(n, 0.0), flags(n, 0) {}

  std::uint32_t size() const {
    return static_cast<std::uint32_t>(opinions.size());
  }
  bool is_priority(std::uint32_t i) const { return flags[i] & kPriorityBit; }
  bool is_stubborn(std::uint32_t i) const { return flags[i] & kStubbornBit; }
  bool is_normal(std::uint32_t i) const {
    return (flags[i] & (kPriorityBit | kStubbornBit)) == 0;
  }
  PostingRule rule(std::uint32_t i) const {
    return (flags[i] & kAlignedBit) ? PostingRule::aligned
                                    : PostingRule::controversial;
  }
  UserKind kind(std::uint32_t i) const {
    return {is_priority(i), is_stubborn(i)};
  }
  void set_kind(std::uint32_t i, bool priority, bool stubborn) {
    flags[i] = static_cast<std::uint8_t>(
        (flags[i] & kAlignedBit) | (priority ? kPriorityBit : 0) |
        (stubborn ? kStubbornBit : 0));
  }
  void set_rule(std::uint32_t i, PostingRule r) {
    if (r == PostingRule::aligned) {
      flags[i] |= kAlignedBit;
    } else {
      flags[i] &= static_cast<std::uint8_t>(~kAlignedBit);
    }
  }
};

struct ModelParams {
  double delta = 0.1;          // opinion step per realign
  double phi = 0.785;          // receive-rule offset, in [0, pi]
  std::uint64_t iterations = 100'000'000;

  void validate() const;  // throws std::invalid_argument
};

// How the special-user population is drawn at initialization. Normal users
// always post controversially; the stubborn/priority rules are configurable.
struct PopulationSpec {
  double priority_fraction = 0.0;
  double stubborn_fraction = 0.0;
  StubbornProfile stubborn_profile = StubbornProfile::extremist;
  bool stubborn_are_priority = false;  // ideologue mode
  PostingRule stubborn_posting = PostingRule::aligned;
  PostingRule priority_posting = PostingRule::controversial;

  void validate() const;
};

// Draws kinds and initial opinions: non-stubborn users uniform in [-1, 1];
// extremist stubborn half at +1 / half at -1; centrist stubborn at 0.
// In ideologue mode stubborn users are drawn among the priority users,
// otherwise among the non-priority ones.
OpinionState init_opinion_state(std::uint32_t n, const PopulationSpec& spec,
                                Rng& rng);

// --- probability rules -----------------------------------------------------

// cos^2((pi/2)|theta - b|): posting may be aligned or fully opposed.
double posting_prob_controversial(double theta, double b_i);

// Same curve gated to |theta - b| <= 1; zero beyond.
double posting_prob_aligned(double theta, double b_i);

double posting_prob(PostingRule rule, double theta, double b_i);

// cos^2((pi/2)|b_i - b_j| + phi) for regular senders; priority senders
// bypass the filter and always reach their followers.
double receive_prob(double b_i, double b_j, double phi,
                    bool sender_is_priority);

// One realign move: repulsed away from theta by delta with probability
// |theta - b_j|/2, otherwise attracted toward theta by min(delta, distance)
// (snaps onto theta when closer than delta). Result clamped to [-1, 1].
double realign(double b_j, double theta, double delta, Rng& rng);

// Stochastic bounded-confidence rewiring: zero within opinion distance 1,
// then a linear ramp up to 1 at distance 2.
double rewire_prob(double b_i, double b_j);

// --- event loop --------------------------------------------------------

struct EventOutcome {
  NodeId active = 0;
  bool posted = false;
  std::uint32_t receivers = 0;
  std::uint32_t realigns = 0;
  std::uint32_t rewires = 0;
};

struct RunStats {
  std::uint64_t iterations = 0;
  std::uint64_t posts = 0;
  std::uint64_t receives = 0;
  std::uint64_t rewires = 0;
};

// One full event: activate, post, receive, realign, rewire. A failed
// posting draw still consumes the iteration.
EventOutcome step(OpinionState& state, AdaptiveDigraph& graph,
                  const ModelParams& params, Rng& rng);

// Periodic read-only snapshot hook, e.g. for convergence monitoring.
struct RunHooks {
  std::function<void(std::uint64_t iterations_done, const OpinionState&,
                     const AdaptiveDigraph&)>
      on_sample;
  std::uint64_t sample_period = 1'000'000;
};

// Executes params.iterations events. Deterministic given the rng seed.
RunStats run(OpinionState& state, AdaptiveDigraph& graph,
             const ModelParams& params, Rng& rng,
             const RunHooks* hooks = nullptr);

}  // namespace echonet
