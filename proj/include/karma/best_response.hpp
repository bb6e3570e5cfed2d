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

// Single-agent best response against a frozen population. The agent's
// decision problem is an MDP over (urgency, karma) with actions m <= k; it is
// solved here by value iteration directly from the interaction rules, without
// going through the solver's utility tables, so it can serve as a check on
// them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "karma/game.hpp"
#include "karma/tensors.hpp"

namespace karma {

struct BestResponse {
  Policy policy;
  /// W(k): optimal expected discounted cost before the urgency is drawn.
  ValueFunction value;
  int iterations = 0;
};

/// Greedy deterministic best response to opponents drawn from `dist` who play
/// `opponent_policy`. Ties go to the lowest message within `tie_tol`
/// (relative to the row minimum when that exceeds one).
[[nodiscard]] inline BestResponse best_response_mdp(const GameSpec& spec,
                                                    const Policy& opponent_policy,
                                                    const KarmaDistribution& dist,
                                                    double tolerance = 1e-10,
                                                    double tie_tol = 1e-9) {
  spec.validate();
  if (!opponent_policy.matches(spec) || dist.size() != spec.num_karma()) {
    throw std::invalid_argument("opponent field does not match the game");
  }
  const int n = spec.num_karma();
  const int nu = spec.num_urgency();

  // For each own (k, m): probability of delay and law of the next karma.
  std::vector<double> delay(n * n, 0.0);
  std::vector<double> next(n * n * n, 0.0);
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m <= k; ++m) {
      for (int kj = 0; kj < n; ++kj) {
        for (int uj = 0; uj < nu; ++uj) {
          for (int mj = 0; mj <= kj; ++mj) {
            const double w =
                dist[kj] * spec.urgency_probs[uj] * opponent_policy(uj, kj, mj);
            if (w == 0.0) continue;
            const auto law = outcome_distribution(k, m, kj, mj);
            for (Agent delayed : {Agent::kFirst, Agent::kSecond}) {
              const double p = w * law.prob(delayed);
              if (p == 0.0) continue;
              const KarmaPair after =
                  karma_transition(spec.k_max, {k, kj}, effective_message(m, k),
                                   effective_message(mj, kj), Outcome{delayed});
              next[(k * n + m) * n + after.first] += p;
              if (delayed == Agent::kFirst) delay[k * n + m] += p;
            }
          }
        }
      }
    }
  }

  auto q_value = [&](const std::vector<double>& w, int u, int k, int m) {
    // interaction_cost(..., kFirst) is u when delayed and 0 otherwise.
    const double cost = delay[k * n + m] *
                        interaction_cost(spec, Outcome{Agent::kFirst},
                                         spec.urgency_levels[u], Agent::kFirst);
    double future = 0.0;
    for (int to = 0; to < n; ++to) future += next[(k * n + m) * n + to] * w[to];
    return cost + spec.alpha * future;
  };

  BestResponse out;
  std::vector<double> w(n, 0.0);
  for (int it = 1;; ++it) {
    std::vector<double> updated(n, 0.0);
    for (int k = 0; k < n; ++k) {
      for (int u = 0; u < nu; ++u) {
        double best = std::numeric_limits<double>::infinity();
        for (int m = 0; m <= k; ++m) best = std::min(best, q_value(w, u, k, m));
        updated[k] += spec.urgency_probs[u] * best;
      }
    }
    double diff = 0.0;
    for (int k = 0; k < n; ++k) diff = std::max(diff, std::abs(updated[k] - w[k]));
    w = std::move(updated);
    out.iterations = it;
    // The Bellman operator contracts at rate alpha, so this bounds the error.
    if (spec.alpha == 0.0 || diff * spec.alpha / (1.0 - spec.alpha) <= tolerance) break;
  }

  out.policy = Policy(nu, spec.k_max);
  for (int u = 0; u < nu; ++u) {
    for (int k = 0; k < n; ++k) {
      std::vector<double> q(k + 1);
      for (int m = 0; m <= k; ++m) q[m] = q_value(w, u, k, m);
      const double lo = *std::min_element(q.begin(), q.end());
      const double cut = lo + tie_tol * std::max(1.0, std::abs(lo));
      int m = 0;
      while (q[m] > cut) ++m;
      out.policy(u, k, m) = 1.0;
    }
  }
  out.value = ValueFunction(std::move(w));
  return out;
}

}  // namespace karma
