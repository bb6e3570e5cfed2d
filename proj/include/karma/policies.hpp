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

// Reference decision rules: the centralized optima, which see both agents'
// private state and pick the delayed agent directly, and the karma-based
// rules, which only see their own (urgency, karma) and produce a bid.

#include <array>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "karma/game.hpp"
#include "karma/tensors.hpp"

namespace karma {

enum class PolicyKind {
  kBaselineRandom,
  kBid1Always,
  kBid1IfUrgent,
  kCentralizedUrgency,
  kCentralizedCost,
  kCentralizedUrgencyThenCost,
  kKarmaEquilibrium,
};

inline constexpr std::array<PolicyKind, 6> kBuiltinPolicies = {
    PolicyKind::kBaselineRandom,      PolicyKind::kBid1Always,
    PolicyKind::kBid1IfUrgent,        PolicyKind::kCentralizedCost,
    PolicyKind::kCentralizedUrgency,  PolicyKind::kCentralizedUrgencyThenCost,
};

[[nodiscard]] inline std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kBaselineRandom: return "baseline-random";
    case PolicyKind::kBid1Always: return "bid1-always";
    case PolicyKind::kBid1IfUrgent: return "bid1-if-urgent";
    case PolicyKind::kCentralizedUrgency: return "centralized-urgency";
    case PolicyKind::kCentralizedCost: return "centralized-cost";
    case PolicyKind::kCentralizedUrgencyThenCost:
      return "centralized-urgency-then-cost";
    case PolicyKind::kKarmaEquilibrium: return "karma-equilibrium";
  }
  return "unknown";
}

/// Parses one of the builtin names; throws std::invalid_argument otherwise.
[[nodiscard]] inline PolicyKind parse_policy_kind(std::string_view name) {
  for (PolicyKind k : kBuiltinPolicies) {
    if (policy_name(k) == name) return k;
  }
  if (name == policy_name(PolicyKind::kKarmaEquilibrium)) {
    return PolicyKind::kKarmaEquilibrium;
  }
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

[[nodiscard]] constexpr bool is_centralized(PolicyKind kind) {
  return kind == PolicyKind::kBaselineRandom ||
         kind == PolicyKind::kCentralizedUrgency ||
         kind == PolicyKind::kCentralizedCost ||
         kind == PolicyKind::kCentralizedUrgencyThenCost;
}

/// A decision rule as run by the simulator. Equilibrium rules carry their
/// policy table.
struct PolicySpec {
  PolicyKind kind = PolicyKind::kBaselineRandom;
  std::shared_ptr<const Policy> table;
  /// Display label; defaults to the kind's name.
  std::string label;

  static PolicySpec builtin(PolicyKind kind) {
    if (kind == PolicyKind::kKarmaEquilibrium) {
      throw std::invalid_argument("karma-equilibrium requires a policy table");
    }
    return {kind, nullptr, std::string(policy_name(kind))};
  }
  static PolicySpec equilibrium(Policy p, std::string label = "karma-equilibrium") {
    return {PolicyKind::kKarmaEquilibrium,
            std::make_shared<const Policy>(std::move(p)), std::move(label)};
  }
};

// Outcome laws of the centralized rules. The delayed agent is the argmin of
// the criterion; ties go to a fair coin.

namespace detail {
inline OutcomeDistribution argmin_delay(double first, double second) {
  if (first < second) return {1.0};
  if (first > second) return {0.0};
  return {0.5};
}
}  // namespace detail

[[nodiscard]] inline OutcomeDistribution centralized_urgency_law(double u_first,
                                                                 double u_second) {
  return detail::argmin_delay(u_first, u_second);
}

[[nodiscard]] inline OutcomeDistribution centralized_cost_law(double a_first,
                                                              double a_second,
                                                              double u_first,
                                                              double u_second) {
  if (a_first < 0.0 || a_second < 0.0) {
    throw std::invalid_argument("accumulated costs must be non-negative");
  }
  return detail::argmin_delay(a_first + u_first, a_second + u_second);
}

[[nodiscard]] inline OutcomeDistribution centralized_urgency_then_cost_law(
    double u_first, double u_second, double a_first, double a_second) {
  if (u_first != u_second) return centralized_urgency_law(u_first, u_second);
  return centralized_cost_law(a_first, a_second, u_first, u_second);
}

/// Samples an outcome from its law. A fair coin is drawn only when the law
/// is not degenerate.
template <class Rng>
[[nodiscard]] Outcome sample_outcome(OutcomeDistribution law, Rng& rng) {
  if (law.first_delayed == 1.0) return {Agent::kFirst};
  if (law.first_delayed == 0.0) return {Agent::kSecond};
  std::bernoulli_distribution coin(law.first_delayed);
  return {coin(rng) ? Agent::kFirst : Agent::kSecond};
}

template <class Rng>
[[nodiscard]] Outcome centralized_urgency(double u_first, double u_second, Rng& coin) {
  return sample_outcome(centralized_urgency_law(u_first, u_second), coin);
}

template <class Rng>
[[nodiscard]] Outcome centralized_cost(double a_first, double a_second,
                                       double u_first, double u_second, Rng& coin) {
  return sample_outcome(centralized_cost_law(a_first, a_second, u_first, u_second),
                        coin);
}

template <class Rng>
[[nodiscard]] Outcome centralized_urgency_then_cost(double u_first, double u_second,
                                                    double a_first, double a_second,
                                                    Rng& coin) {
  return sample_outcome(
      centralized_urgency_then_cost_law(u_first, u_second, a_first, a_second), coin);
}

/// Bid of the bid-one heuristics, clamped to the karma held.
[[nodiscard]] inline int heuristic_message(PolicyKind kind, double urgency, int karma) {
  if (karma < 0) throw std::invalid_argument("karma must be non-negative");
  switch (kind) {
    case PolicyKind::kBid1Always: return std::min(1, karma);
    case PolicyKind::kBid1IfUrgent: return urgency > 0.0 ? std::min(1, karma) : 0;
    default:
      throw std::invalid_argument("not a heuristic bidding policy: " +
                                  std::string(policy_name(kind)));
  }
}

/// Draws a message from the policy row of type (urgency index, karma) by
/// inverse transform of one uniform variate.
template <class Rng>
[[nodiscard]] int sample_equilibrium_message(const Policy& policy, int urgency_index,
                                             int karma, Rng& rng) {
  if (urgency_index < 0 || urgency_index >= policy.num_urgency() || karma < 0 ||
      karma >= policy.num_karma()) {
    throw std::out_of_range("agent type outside the policy domain");
  }
  const auto row = policy.row(urgency_index, karma);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double x = uniform(rng);
  double cum = 0.0;
  int last = 0;
  for (int m = 0; m <= karma; ++m) {
    if (row[m] <= 0.0) continue;
    last = m;
    cum += row[m];
    if (x < cum) return m;
  }
  return last;
}

}  // namespace karma
