// Copyright 2026 The Karma Games Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Mechanics of a single karma interaction: two agents bid karma, the lower
// effective bid is delayed, and the winner pays the delayed agent.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace karma {

/// Static description of a karma game: karma bound, urgency process and
/// discount factor. Karma values and messages both range over 0..k_max.
struct GameSpec {
  int k_max = 12;
  std::vector<double> urgency_levels{0.0, 3.0};
  std::vector<double> urgency_probs{0.5, 0.5};
  double alpha = 0.0;

  [[nodiscard]] int num_karma() const { return k_max + 1; }
  [[nodiscard]] int num_urgency() const {
    return static_cast<int>(urgency_levels.size());
  }
  [[nodiscard]] double max_urgency() const {
    return urgency_levels.empty() ? 0.0 : urgency_levels.back();
  }

  /// Index of `u` in urgency_levels; throws if `u` is not a level.
  [[nodiscard]] int urgency_index(double u) const {
    for (int i = 0; i < num_urgency(); ++i) {
      if (urgency_levels[i] == u) return i;
    }
    throw std::invalid_argument("unknown urgency level " + std::to_string(u));
  }

  /// Checks the structural invariants. `allow_unit_alpha` admits alpha == 1,
  /// which only the simulator may use.
  void validate(bool allow_unit_alpha = false) const {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    if (urgency_levels.empty()) {
      throw std::invalid_argument("at least one urgency level is required");
    }
    if (urgency_levels.size() != urgency_probs.size()) {
      throw std::invalid_argument(
          "urgency_levels and urgency_probs differ in length");
    }
    if (!(urgency_levels.front() >= 0.0)) {
      throw std::invalid_argument("urgency levels must be non-negative");
    }
    for (std::size_t i = 1; i < urgency_levels.size(); ++i) {
      if (!(urgency_levels[i] > urgency_levels[i - 1])) {
        throw std::invalid_argument("urgency levels must be strictly increasing");
      }
    }
    double total = 0.0;
    for (double p : urgency_probs) {
      if (!(p >= 0.0)) {
        throw std::invalid_argument("urgency probabilities must be >= 0");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw std::invalid_argument("urgency probabilities must sum to 1");
    }
    const bool alpha_ok =
        alpha >= 0.0 && (alpha < 1.0 || (allow_unit_alpha && alpha == 1.0));
    if (!alpha_ok) {
      throw std::invalid_argument(
          "alpha must lie in [0, 1); equilibria are not well defined when "
          "alpha = 1");
    }
  }

  friend bool operator==(const GameSpec&, const GameSpec&) = default;
};

/// Identifies one of the two agents of an interaction.
enum class Agent { kFirst, kSecond };

[[nodiscard]] constexpr Agent other(Agent a) {
  return a == Agent::kFirst ? Agent::kSecond : Agent::kFirst;
}

/// Result of an interaction: exactly one agent is delayed.
struct Outcome {
  Agent delayed;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Law of the outcome; probability that the second agent is delayed is the
/// complement.
struct OutcomeDistribution {
  double first_delayed = 0.5;

  [[nodiscard]] double second_delayed() const { return 1.0 - first_delayed; }
  [[nodiscard]] double prob(Agent delayed) const {
    return delayed == Agent::kFirst ? first_delayed : second_delayed();
  }
};

struct KarmaPair {
  int first = 0;
  int second = 0;

  [[nodiscard]] int of(Agent a) const {
    return a == Agent::kFirst ? first : second;
  }
  friend bool operator==(const KarmaPair&, const KarmaPair&) = default;
};

/// Bid actually placed: a message can never commit more karma than is held.
[[nodiscard]] inline int effective_message(int message, int karma) {
  if (message < 0 || karma < 0) {
    throw std::invalid_argument("messages and karma must be non-negative");
  }
  return std::min(message, karma);
}

/// The higher effective bid passes; ties are settled by a fair coin.
[[nodiscard]] inline OutcomeDistribution outcome_distribution(int karma_first,
                                                              int message_first,
                                                              int karma_second,
                                                              int message_second) {
  const int bid_first = effective_message(message_first, karma_first);
  const int bid_second = effective_message(message_second, karma_second);
  if (bid_first > bid_second) return {0.0};
  if (bid_first < bid_second) return {1.0};
  return {0.5};
}

/// Karma that flows from the passing agent to the delayed one. Capped so the
/// receiver never exceeds k_max.
[[nodiscard]] inline int karma_transfer(int k_max, int delayed_karma,
                                        int winner_bid) {
  return std::min(winner_bid, k_max - delayed_karma);
}

/// Settles an interaction. Bids must already be effective (clamped) values.
/// The sum of the two karma values is preserved exactly.
[[nodiscard]] inline KarmaPair karma_transition(int k_max, KarmaPair karma,
                                                int bid_first, int bid_second,
                                                Outcome outcome) {
  if (outcome.delayed == Agent::kFirst) {
    const int t = karma_transfer(k_max, karma.first, bid_second);
    return {karma.first + t, karma.second - t};
  }
  const int t = karma_transfer(k_max, karma.second, bid_first);
  return {karma.first - t, karma.second + t};
}

/// Instantaneous cost: the delayed agent pays its urgency, the other nothing.
[[nodiscard]] inline double interaction_cost(const GameSpec& spec,
                                             Outcome outcome, double urgency,
                                             Agent viewpoint) {
  (void)spec.urgency_index(urgency);
  return outcome.delayed == viewpoint ? urgency : 0.0;
}

}  // namespace karma
