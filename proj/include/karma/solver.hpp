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

// Nash equilibria of the karma game by damped fixed-point iteration with
// simulated annealing on a softmax (logit) policy, followed by a greedy
// polishing phase at zero temperature.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "karma/game.hpp"
#include "karma/markov.hpp"
#include "karma/tensors.hpp"

namespace karma {

namespace detail {

inline void require_shapes(const GameSpec& spec, const Policy& policy,
                           const KarmaDistribution& dist) {
  if (!policy.matches(spec)) {
    throw std::invalid_argument("policy shape does not match the game");
  }
  if (dist.size() != spec.num_karma()) {
    throw std::invalid_argument("karma distribution size does not match k_max");
  }
}

// Joint law of (opponent karma, opponent message) when the opponent's karma
// is drawn from `dist`, its urgency from p and its message from `policy`.
inline std::vector<double> opponent_field(const GameSpec& spec,
                                          const Policy& policy,
                                          const KarmaDistribution& dist) {
  const int n = spec.num_karma();
  std::vector<double> field(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < n; ++k) {
    if (dist[k] == 0.0) continue;
    for (int u = 0; u < spec.num_urgency(); ++u) {
      const double w = dist[k] * spec.urgency_probs[u];
      if (w == 0.0) continue;
      for (int m = 0; m < n; ++m) field[k * n + m] += w * policy(u, k, m);
    }
  }
  return field;
}

// For an agent holding `karma` and sending `message` against the opponent
// field: probability of being delayed, and the law of the next karma level.
struct InteractionLaw {
  double delay_prob = 0.0;
  std::vector<double> next_karma;
};

inline InteractionLaw interaction_law(int k_max, const std::vector<double>& field,
                                      int karma, int message) {
  const int n = k_max + 1;
  InteractionLaw law{0.0, std::vector<double>(n, 0.0)};
  const int bid = effective_message(message, karma);
  for (int kj = 0; kj < n; ++kj) {
    for (int mj = 0; mj < n; ++mj) {
      const double w = field[kj * n + mj];
      if (w == 0.0) continue;
      const double lose = outcome_distribution(karma, message, kj, mj).first_delayed;
      const int bid_j = effective_message(mj, kj);
      if (lose > 0.0) {
        const KarmaPair next = karma_transition(
            k_max, {karma, kj}, bid, bid_j, Outcome{Agent::kFirst});
        law.next_karma[next.first] += w * lose;
        law.delay_prob += w * lose;
      }
      if (lose < 1.0) {
        const KarmaPair next = karma_transition(
            k_max, {karma, kj}, bid, bid_j, Outcome{Agent::kSecond});
        law.next_karma[next.first] += w * (1.0 - lose);
      }
    }
  }
  return law;
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

}  // namespace detail

/// rho(u, k, m): expected cost of sending m with urgency u and karma k, now
/// plus alpha times the value of the karma held afterwards. Defined for all
/// m in 0..k_max; bids above k are clamped.
[[nodiscard]] inline ExpectedUtility expected_utility(const GameSpec& spec,
                                                      const Policy& policy,
                                                      const KarmaDistribution& dist,
                                                      const ValueFunction& theta) {
  detail::require_shapes(spec, policy, dist);
  if (theta.size() != spec.num_karma()) {
    throw std::invalid_argument("value function size does not match k_max");
  }
  const auto field = detail::opponent_field(spec, policy, dist);
  ExpectedUtility rho(spec.num_urgency(), spec.k_max);
  for (int k = 0; k <= spec.k_max; ++k) {
    for (int m = 0; m <= spec.k_max; ++m) {
      const auto law = detail::interaction_law(spec.k_max, field, k, m);
      double future = 0.0;
      if (spec.alpha != 0.0) {
        for (int next = 0; next <= spec.k_max; ++next) {
          future += law.next_karma[next] * theta[next];
        }
      }
      for (int u = 0; u < spec.num_urgency(); ++u) {
        rho(u, k, m) = spec.urgency_levels[u] * law.delay_prob + spec.alpha * future;
      }
    }
  }
  return rho;
}

/// Expected cost of one interaction for each karma level: rho with alpha = 0,
/// averaged over urgency and the agent's own policy.
[[nodiscard]] inline StageCost expected_stage_cost(const GameSpec& spec,
                                                   const Policy& policy,
                                                   const KarmaDistribution& dist) {
  detail::require_shapes(spec, policy, dist);
  const auto field = detail::opponent_field(spec, policy, dist);
  StageCost cbar(spec.k_max);
  for (int k = 0; k <= spec.k_max; ++k) {
    for (int m = 0; m <= k; ++m) {
      double weight = 0.0;
      double urgency = 0.0;
      for (int u = 0; u < spec.num_urgency(); ++u) {
        const double w = spec.urgency_probs[u] * policy(u, k, m);
        weight += w;
        urgency += w * spec.urgency_levels[u];
      }
      if (weight == 0.0) continue;
      cbar[k] += urgency * detail::interaction_law(spec.k_max, field, k, m).delay_prob;
    }
  }
  return cbar;
}

/// Law of an agent's karma after one interaction, per current karma level.
[[nodiscard]] inline TransitionMatrix karma_transition_matrix(
    const GameSpec& spec, const Policy& policy, const KarmaDistribution& dist) {
  detail::require_shapes(spec, policy, dist);
  const auto field = detail::opponent_field(spec, policy, dist);
  TransitionMatrix t(spec.k_max);
  for (int k = 0; k <= spec.k_max; ++k) {
    for (int m = 0; m <= k; ++m) {
      double weight = 0.0;
      for (int u = 0; u < spec.num_urgency(); ++u) {
        weight += spec.urgency_probs[u] * policy(u, k, m);
      }
      if (weight == 0.0) continue;
      const auto law = detail::interaction_law(spec.k_max, field, k, m);
      for (int next = 0; next <= spec.k_max; ++next) {
        t(k, next) += weight * law.next_karma[next];
      }
    }
  }
  return t;
}

/// Logit response: pi(m | u, k) proportional to exp(-rho / temperature) over
/// the legal messages m <= k.
[[nodiscard]] inline Policy softmax_policy(const ExpectedUtility& rho,
                                           double temperature) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("temperature must be positive");
  }
  Policy p(rho.num_urgency(), rho.k_max());
  for (int u = 0; u < rho.num_urgency(); ++u) {
    for (int k = 0; k < rho.num_karma(); ++k) {
      const auto r = rho.row(u, k).first(k + 1);
      const double lo = *std::min_element(r.begin(), r.end());
      double total = 0.0;
      for (int m = 0; m <= k; ++m) {
        const double w = std::exp(-(r[m] - lo) / temperature);
        p(u, k, m) = w;
        total += w;
      }
      for (int m = 0; m <= k; ++m) p(u, k, m) /= total;
    }
  }
  return p;
}

/// Lowest legal message whose utility is within `tie_tol` of the row minimum.
[[nodiscard]] inline int greedy_message(std::span<const double> rho_row, int karma,
                                        double tie_tol = 1e-9) {
  const auto r = rho_row.first(karma + 1);
  const double lo = *std::min_element(r.begin(), r.end());
  const double cut = lo + tie_tol * std::max(1.0, std::abs(lo));
  for (int m = 0; m <= karma; ++m) {
    if (r[m] <= cut) return m;
  }
  return karma;
}

/// Zero-temperature limit of softmax_policy, breaking ties toward the lowest
/// message.
[[nodiscard]] inline Policy greedy_policy(const ExpectedUtility& rho,
                                          double tie_tol = 1e-9) {
  Policy p(rho.num_urgency(), rho.k_max());
  for (int u = 0; u < rho.num_urgency(); ++u) {
    for (int k = 0; k < rho.num_karma(); ++k) {
      p(u, k, greedy_message(rho.row(u, k), k, tie_tol)) = 1.0;
    }
  }
  return p;
}

/// Momentum step: tau * next + (1 - tau) * prev.
[[nodiscard]] inline Policy blend(const Policy& prev, const Policy& next, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("momentum must lie in (0, 1]");
  }
  if (!prev.same_shape(next)) {
    throw std::invalid_argument("cannot blend policies of different shapes");
  }
  Policy out = prev;
  auto& o = out.data();
  const auto& n = next.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = tau * n[i] + (1.0 - tau) * o[i];
  return out;
}

/// Annealing and iteration parameters. Temperatures are in cost units.
struct SolverSchedule {
  int iterations = 3000;
  double momentum = 0.1;
  double temp_init = 10.0;
  double temp_decay = 0.95;
  double temp_floor = 1e-3;
  int era_length = 10;
  /// Policy change (sup norm) at the temperature floor that ends annealing.
  double change_tolerance = 1e-8;
  /// Mean-preserving population steps applied to the karma distribution
  /// per iteration.
  int population_steps = 20;
  /// Maximum zero-temperature best-response rounds after annealing.
  int polish_rounds = 20;
  /// Start from a random policy drawn with `seed` instead of the uniform one.
  bool random_init = false;
  std::uint64_t seed = 1;

  void validate() const {
    if (iterations < 1 || era_length < 1 || polish_rounds < 0 ||
        population_steps < 1) {
      throw std::invalid_argument("iteration counts must be positive");
    }
    if (!(momentum > 0.0 && momentum <= 1.0)) {
      throw std::invalid_argument("momentum must lie in (0, 1]");
    }
    if (!(temp_init > 0.0 && temp_floor > 0.0 && temp_decay > 0.0 &&
          temp_decay < 1.0)) {
      throw std::invalid_argument("invalid temperature schedule");
    }
  }
};

struct EquilibriumTolerance {
  double stationarity = 1e-6;
  double bellman = 1e-6;
  /// Best-response gap in cost units.
  double best_response_gap = 3e-3;

  /// Defaults with the gap scaled to 1e-3 of the largest urgency.
  static EquilibriumTolerance for_game(const GameSpec& spec) {
    EquilibriumTolerance t;
    t.best_response_gap = 1e-3 * std::max(spec.max_urgency(), 1.0);
    return t;
  }
};

struct EquilibriumResiduals {
  double stationarity = 0.0;
  double bellman = 0.0;
  double best_response_gap = 0.0;
  bool stationarity_ok = false;
  bool bellman_ok = false;
  bool rationality_ok = false;

  [[nodiscard]] bool ok() const {
    return stationarity_ok && bellman_ok && rationality_ok;
  }
};

struct EquilibriumSolution {
  GameSpec spec;
  Policy policy;
  KarmaDistribution distribution;
  TransitionMatrix transitions;
  ValueFunction theta;
  StageCost cbar;
  ExpectedUtility rho;
  EquilibriumResiduals residuals;
  SolverSchedule schedule;

  int iterations = 0;
  double final_temperature = 0.0;
  /// All equilibrium residuals are within tolerance.
  bool converged = false;
  /// The final policy is the deterministic greedy best response.
  bool polished = false;
  /// False for alpha >= 0.9, where the fixed point oscillates and is not
  /// trusted to be an equilibrium.
  bool verified = false;
};

/// Largest expected excess cost of the policy over the best message, across
/// all types: max_{u,k} sum_m pi(m) rho(m) - min_{m<=k} rho(m).
[[nodiscard]] inline double best_response_gap(const Policy& policy,
                                              const ExpectedUtility& rho) {
  double gap = 0.0;
  for (int u = 0; u < policy.num_urgency(); ++u) {
    for (int k = 0; k < policy.num_karma(); ++k) {
      const auto r = rho.row(u, k).first(k + 1);
      const double lo = *std::min_element(r.begin(), r.end());
      double mean = 0.0;
      for (int m = 0; m <= k; ++m) mean += policy(u, k, m) * r[m];
      gap = std::max(gap, mean - lo);
    }
  }
  return gap;
}

/// Residuals of the three equilibrium conditions on the stored quantities:
/// stationarity of D under T (L1), the Bellman equation (sup norm) and the
/// best-response gap of the policy against rho.
[[nodiscard]] inline EquilibriumResiduals verify_equilibrium(
    const EquilibriumSolution& sol, const EquilibriumTolerance& tol) {
  EquilibriumResiduals r;
  r.stationarity = stationarity_residual(sol.distribution, sol.transitions);
  r.bellman = bellman_residual(sol.theta, sol.cbar, sol.transitions, sol.spec.alpha);
  r.best_response_gap = best_response_gap(sol.policy, sol.rho);
  r.stationarity_ok = r.stationarity <= tol.stationarity;
  r.bellman_ok = r.bellman <= tol.bellman;
  r.rationality_ok = r.best_response_gap <= tol.best_response_gap;
  return r;
}

/// Recomputes T, cbar and rho from a policy, distribution and value function
/// so that stored equilibria can be re-verified.
[[nodiscard]] inline EquilibriumSolution assemble_solution(const GameSpec& spec,
                                                           Policy policy,
                                                           KarmaDistribution dist,
                                                           ValueFunction theta) {
  EquilibriumSolution sol;
  sol.spec = spec;
  sol.transitions = karma_transition_matrix(spec, policy, dist);
  sol.cbar = expected_stage_cost(spec, policy, dist);
  sol.rho = expected_utility(spec, policy, dist, theta);
  sol.policy = std::move(policy);
  sol.distribution = std::move(dist);
  sol.theta = std::move(theta);
  sol.verified = spec.alpha < 0.9;
  return sol;
}

/// One step of the population's karma dynamics, made lazy for aperiodicity:
/// D <- (D + D * T(policy, D)) / 2. Each interaction conserves karma, so the
/// mean karma of D is preserved exactly (up to rounding).
[[nodiscard]] inline KarmaDistribution population_step(const GameSpec& spec,
                                                       const Policy& policy,
                                                       const KarmaDistribution& dist) {
  const auto next = left_multiply(dist.values, karma_transition_matrix(spec, policy, dist));
  KarmaDistribution out(spec.k_max);
  double total = 0.0;
  for (int k = 0; k <= spec.k_max; ++k) total += out[k] = 0.5 * (dist[k] + next[k]);
  // T(policy, D) scales with the mass of D, so drift in the total would grow
  // quadratically without renormalization.
  for (double& x : out.values) x /= total;
  return out;
}

/// Distribution with D = D * T(policy, D) to `tolerance` in L1 and the same
/// mean karma as `init`.
///
/// T(policy, D) is linear in D, T(D) = sum_j D_j T_j with T_j the transitions
/// against an opponent holding karma j, so the map D -> D * T(D) is
/// quadratic with an exact Jacobian. Newton steps, constrained to keep the
/// total mass and the mean karma and projected onto D >= 0, are taken while
/// they halve the residual; otherwise one population_step is taken instead.
[[nodiscard]] inline KarmaDistribution consistent_distribution(
    const GameSpec& spec, const Policy& policy, KarmaDistribution init,
    double tolerance = 1e-12, int max_steps = 200000) {
  const int n = spec.num_karma();
  std::vector<Eigen::MatrixXd> basis;
  for (int j = 0; j < n; ++j) {
    const auto t = karma_transition_matrix(spec, policy, point_mass(spec.k_max, j));
    Eigen::MatrixXd m(n, n);
    for (int a = 0; a < n; ++a) {
      for (int c = 0; c < n; ++c) m(a, c) = t(a, c);
    }
    basis.push_back(std::move(m));
  }
  auto mixed = [&](const Eigen::VectorXd& d) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) t += d(j) * basis[j];
    return t;
  };
  auto residual = [&](const Eigen::VectorXd& d) -> Eigen::VectorXd {
    return (d.transpose() * mixed(d)).transpose() - d;
  };

  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(init.values.data(), n);
  for (int step = 0; step < max_steps; ++step) {
    const Eigen::MatrixXd t = mixed(d);
    const Eigen::VectorXd r = (d.transpose() * t).transpose() - d;
    const double norm = r.lpNorm<1>();
    if (norm <= tolerance) break;

    // Rows 0..n-1: dF/dD; the last two rows fix mass and mean.
    Eigen::MatrixXd jac(n + 2, n);
    for (int b = 0; b < n; ++b) {
      jac.block(0, b, n, 1) =
          t.row(b).transpose() + (d.transpose() * basis[b]).transpose();
      jac(b, b) -= 1.0;
      jac(n, b) = 1.0;
      jac(n + 1, b) = b;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 2);
    rhs.head(n) = -r;
    Eigen::VectorXd cand =
        (d + jac.completeOrthogonalDecomposition().solve(rhs)).cwiseMax(0.0);
    cand /= cand.sum();
    if (residual(cand).lpNorm<1>() <= 0.5 * norm) {
      d = cand;
      continue;
    }
    const Eigen::VectorXd next = (d.transpose() * t).transpose();
    d = 0.5 * (d + next);
    d /= d.sum();
  }
  KarmaDistribution out(spec.k_max);
  for (int k = 0; k < n; ++k) out[k] = d(k);
  return out;
}

/// State handed to an iteration observer after every solver iteration.
struct IterationState {
  int iteration = 0;
  double temperature = 0.0;
  double policy_change = 0.0;
  const Policy& policy;
  const KarmaDistribution& distribution;
  const ValueFunction& theta;
};

using IterationObserver = std::function<void(const IterationState&)>;

namespace detail {

inline Policy random_policy(const GameSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  Policy p(spec.num_urgency(), spec.k_max);
  for (int u = 0; u < spec.num_urgency(); ++u) {
    for (int k = 0; k <= spec.k_max; ++k) {
      double total = 0.0;
      for (int m = 0; m <= k; ++m) total += (p(u, k, m) = expo(rng));
      for (int m = 0; m <= k; ++m) p(u, k, m) /= total;
    }
  }
  return p;
}

// Zeroes probabilities below `cutoff` times the row maximum and renormalizes.
inline Policy drop_negligible(Policy p, double cutoff = 1e-12) {
  for (int u = 0; u < p.num_urgency(); ++u) {
    for (int k = 0; k < p.num_karma(); ++k) {
      auto row = p.row(u, k);
      const double hi = *std::max_element(row.begin(), row.end());
      double total = 0.0;
      for (double& x : row) {
        if (x < cutoff * hi) x = 0.0;
        total += x;
      }
      for (double& x : row) x /= total;
    }
  }
  return p;
}

// Puts all mass of zero-urgency rows on m = 0. Without a cost at stake,
// losing is never worse and any positive bid only risks karma.
inline Policy pin_zero_urgency(const GameSpec& spec, Policy p) {
  for (int u = 0; u < p.num_urgency(); ++u) {
    if (spec.urgency_levels[u] != 0.0) continue;
    for (int k = 0; k < p.num_karma(); ++k) {
      auto row = p.row(u, k);
      std::fill(row.begin(), row.end(), 0.0);
      row[0] = 1.0;
    }
  }
  return p;
}

struct PolishResult {
  Policy policy;
  KarmaDistribution distribution;
  bool found = false;
};

// Iterates the greedy response, each time moving the population to the
// stationary distribution of the candidate, until the response maps to
// itself.
inline PolishResult polish_greedy(const GameSpec& spec, Policy candidate,
                                  KarmaDistribution dist, int rounds) {
  std::vector<Policy> seen;
  for (int round = 0; round < rounds; ++round) {
    dist = consistent_distribution(spec, candidate, dist);
    const auto t = karma_transition_matrix(spec, candidate, dist);
    const auto theta =
        value_function(expected_stage_cost(spec, candidate, dist), t, spec.alpha);
    Policy response = greedy_policy(expected_utility(spec, candidate, dist, theta));
    if (response == candidate) return {std::move(candidate), std::move(dist), true};
    // A revisited candidate means the greedy responses cycle.
    if (std::find(seen.begin(), seen.end(), response) != seen.end()) break;
    seen.push_back(std::move(candidate));
    candidate = std::move(response);
  }
  return {std::move(candidate), std::move(dist), false};
}

}  // namespace detail

/// Computes a Nash equilibrium of the karma game.
///
/// Each iteration (1) replaces the policy by a momentum blend with the softmax
/// response to rho, (2) rebuilds the karma transition matrix, (3) moves the
/// karma distribution toward stationarity with `population_steps` steps of
/// the mean-preserving population dynamics and (4) recomputes the stage cost
/// and value function. The temperature decays geometrically every era down
/// to the floor. The loop ends when the policy change at the floor drops
/// below the tolerance or iterations run out.
///
/// At low temperature the damped iteration can cycle instead of settling,
/// so the iterate with the smallest best-response gap is kept. From it the
/// greedy response is iterated; if that reaches a fixed point the resulting
/// deterministic policy is returned, otherwise the best annealed policy is.
/// Non-convergence is reported through `converged` and the residuals rather
/// than by throwing.
[[nodiscard]] inline EquilibriumSolution solve_equilibrium(
    const GameSpec& spec, const SolverSchedule& schedule = {},
    const IterationObserver& observer = {}) {
  spec.validate();
  schedule.validate();

  Policy policy = schedule.random_init ? detail::random_policy(spec, schedule.seed)
                                       : uniform_policy(spec);
  KarmaDistribution dist = uniform_distribution(spec.k_max);
  ValueFunction theta(spec.k_max, 0.0);

  Policy best_policy = policy;
  KarmaDistribution best_dist = dist;
  ValueFunction best_theta = theta;
  double best_gap = std::numeric_limits<double>::infinity();

  double temperature = schedule.temp_init;
  int it = 0;
  for (; it < schedule.iterations; ++it) {
    const auto rho = expected_utility(spec, policy, dist, theta);
    if (const double gap = best_response_gap(policy, rho); gap < best_gap) {
      best_gap = gap;
      best_policy = policy;
      best_dist = dist;
      best_theta = theta;
    }
    Policy next = blend(policy, softmax_policy(rho, temperature), schedule.momentum);
    const double change = detail::sup_diff(next.data(), policy.data());
    policy = std::move(next);

    for (int s = 0; s < schedule.population_steps; ++s) {
      dist = population_step(spec, policy, dist);
    }
    const auto trans = karma_transition_matrix(spec, policy, dist);
    theta = value_function(expected_stage_cost(spec, policy, dist), trans, spec.alpha);

    if (observer) observer({it, temperature, change, policy, dist, theta});

    if (temperature <= schedule.temp_floor && change < schedule.change_tolerance) {
      ++it;
      break;
    }
    if ((it + 1) % schedule.era_length == 0) {
      temperature = std::max(schedule.temp_floor, temperature * schedule.temp_decay);
    }
  }
  {
    const auto rho = expected_utility(spec, policy, dist, theta);
    if (best_response_gap(policy, rho) <= best_gap) {
      best_policy = policy;
      best_dist = dist;
      best_theta = theta;
    }
  }

  auto polish = detail::polish_greedy(
      spec, greedy_policy(expected_utility(spec, best_policy, best_dist, best_theta)),
      best_dist, schedule.polish_rounds);
  if (polish.found) {
    policy = std::move(polish.policy);
    dist = std::move(polish.distribution);
  } else {
    policy = detail::pin_zero_urgency(spec, detail::drop_negligible(std::move(best_policy)));
    dist = consistent_distribution(spec, policy, std::move(best_dist));
  }

  dist = consistent_distribution(spec, policy, std::move(dist));
  theta = value_function(expected_stage_cost(spec, policy, dist),
                         karma_transition_matrix(spec, policy, dist), spec.alpha);
  EquilibriumSolution sol =
      assemble_solution(spec, std::move(policy), std::move(dist), std::move(theta));
  sol.schedule = schedule;
  sol.iterations = it;
  sol.final_temperature = temperature;
  sol.polished = polish.found;
  sol.residuals = verify_equilibrium(sol, EquilibriumTolerance::for_game(spec));
  sol.converged = sol.residuals.ok();
  return sol;
}

}  // namespace karma
