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

#include "karma/best_response.hpp"

#include <gtest/gtest.h>

#include "karma/solver.hpp"

namespace karma {
namespace {

TEST(BestResponse, AgainstSilentOpponentsBidOne) {
  const GameSpec spec;
  const auto silent = deterministic_policy(spec, [](int, int) { return 0; });
  const auto br = best_response_mdp(spec, silent, uniform_distribution(12));
  for (int k = 0; k <= 12; ++k) {
    EXPECT_EQ(br.policy(0, k, 0), 1.0);
    EXPECT_EQ(br.policy(1, k, std::min(k, 1)), 1.0) << "k=" << k;
  }
  // Only the urgent agent with no karma pays: half the time, half of 3.
  EXPECT_DOUBLE_EQ(br.value[0], 0.75);
  for (int k = 1; k <= 12; ++k) EXPECT_EQ(br.value[k], 0.0);
}

TEST(BestResponse, ZeroCostGame) {
  GameSpec spec;
  spec.urgency_levels = {0.0};
  spec.urgency_probs = {1.0};
  spec.alpha = 0.7;
  const auto br = best_response_mdp(spec, uniform_policy(spec), uniform_distribution(12));
  for (double w : br.value.values) EXPECT_EQ(w, 0.0);
  for (int k = 0; k <= 12; ++k) EXPECT_EQ(br.policy(0, k, 0), 1.0);
}

TEST(BestResponse, ValueSatisfiesOptimality) {
  // W(k) = sum_u p_u min_m rho(u, k, m) with rho built by the solver.
  GameSpec spec;
  spec.k_max = 5;
  spec.alpha = 0.6;
  const auto policy = uniform_policy(spec);
  const auto dist = uniform_distribution(5);
  const auto br = best_response_mdp(spec, policy, dist);
  const auto rho = expected_utility(spec, policy, dist, br.value);
  for (int k = 0; k <= 5; ++k) {
    double w = 0.0;
    for (int u = 0; u < 2; ++u) {
      const auto r = rho.row(u, k).first(k + 1);
      w += spec.urgency_probs[u] * *std::min_element(r.begin(), r.end());
    }
    EXPECT_NEAR(br.value[k], w, 1e-9);
  }
  EXPECT_EQ(br.policy, greedy_policy(rho));
}

TEST(BestResponse, ReproducesSmallEquilibria) {
  for (int k_max : {1, 2, 3}) {
    for (double alpha : {0.0, 0.3, 0.6, 0.85}) {
      GameSpec spec;
      spec.k_max = k_max;
      spec.alpha = alpha;
      const auto sol = solve_equilibrium(spec);
      ASSERT_TRUE(sol.converged) << k_max << " " << alpha;
      const auto br = best_response_mdp(spec, sol.policy, sol.distribution);
      EXPECT_EQ(br.policy, greedy_policy(sol.rho)) << k_max << " " << alpha;
      for (int k = 0; k <= k_max; ++k) {
        EXPECT_NEAR(br.value[k], sol.theta[k], 3e-3) << k_max << " " << alpha;
      }
    }
  }
}

TEST(BestResponse, RejectsMismatchedField) {
  const GameSpec spec;
  EXPECT_THROW((void)best_response_mdp(spec, uniform_policy(spec), uniform_distribution(4)),
               std::invalid_argument);
}

}  // namespace
}  // namespace karma
