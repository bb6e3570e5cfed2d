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

#include "karma/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

namespace karma {
namespace {

Policy bid_zero(const GameSpec& spec) {
  return deterministic_policy(spec, [](int, int) { return 0; });
}

// Bids one when urgent (urgency index 1) and holding karma.
Policy bid_one_if_urgent(const GameSpec& spec) {
  return deterministic_policy(spec, [](int u, int k) { return u == 1 ? std::min(k, 1) : 0; });
}

TEST(ExpectedUtility, OpponentsWithoutKarma) {
  const GameSpec spec;
  const auto rho = expected_utility(spec, uniform_policy(spec), point_mass(12, 0),
                                    ValueFunction(12, 0.0));
  for (int k = 1; k <= 12; ++k) {
    EXPECT_EQ(rho(1, k, 1), 0.0);
    EXPECT_DOUBLE_EQ(rho(1, k, 0), 1.5);
  }
  EXPECT_DOUBLE_EQ(rho(1, 0, 5), 1.5);  // clamped to a zero bid
  for (int k = 0; k <= 12; ++k) {
    for (int m = 0; m <= 12; ++m) EXPECT_EQ(rho(0, k, m), 0.0);
  }
}

TEST(ExpectedUtility, FutureTermUsesNextKarma) {
  // Everyone bids 0, so karma never moves and rho = u/2 + alpha * theta(k).
  GameSpec spec;
  spec.k_max = 3;
  spec.alpha = 0.5;
  const ValueFunction theta({1.0, 2.0, 4.0, 8.0});
  const auto rho = expected_utility(spec, bid_zero(spec), uniform_distribution(3), theta);
  for (int k = 0; k <= 3; ++k) {
    EXPECT_DOUBLE_EQ(rho(0, k, 0), 0.5 * theta[k]);
    EXPECT_DOUBLE_EQ(rho(1, k, 0), 1.5 + 0.5 * theta[k]);
  }
}

TEST(ExpectedUtility, ShapeMismatchThrows) {
  const GameSpec spec;
  EXPECT_THROW((void)expected_utility(spec, uniform_policy(spec), uniform_distribution(5),
                                      ValueFunction(12)),
               std::invalid_argument);
}

TEST(ExpectedStageCost, AllTies) {
  const GameSpec spec;
  const auto cbar = expected_stage_cost(spec, bid_zero(spec), uniform_distribution(12));
  for (double c : cbar.values) EXPECT_DOUBLE_EQ(c, 0.75);
}

TEST(ExpectedStageCost, UrgentAgentsAlwaysWin) {
  const GameSpec spec;
  const auto cbar = expected_stage_cost(spec, bid_one_if_urgent(spec), point_mass(12, 0));
  for (int k = 1; k <= 12; ++k) EXPECT_EQ(cbar[k], 0.0);
  EXPECT_DOUBLE_EQ(cbar[0], 0.75);
}

TEST(ExpectedStageCost, ZeroUrgencyGame) {
  GameSpec spec;
  spec.urgency_levels = {0.0};
  spec.urgency_probs = {1.0};
  const auto cbar = expected_stage_cost(spec, uniform_policy(spec), uniform_distribution(12));
  for (double c : cbar.values) EXPECT_EQ(c, 0.0);
}

TEST(KarmaTransitionMatrix, NoBidsIsIdentity) {
  const GameSpec spec;
  const auto t = karma_transition_matrix(spec, bid_zero(spec), uniform_distribution(12));
  for (int i = 0; i <= 12; ++i) {
    for (int j = 0; j <= 12; ++j) EXPECT_NEAR(t(i, j), i == j ? 1.0 : 0.0, 1e-15);
  }
}

TEST(KarmaTransitionMatrix, RichOpponentsPushKarmaUp) {
  const GameSpec spec;
  // Bid 1 only at k_max; the opponents all sit there.
  const auto policy = deterministic_policy(spec, [](int, int k) { return k == 12 ? 1 : 0; });
  const auto t = karma_transition_matrix(spec, policy, point_mass(12, 12));
  for (int k = 0; k < 12; ++k) EXPECT_DOUBLE_EQ(t(k, k + 1), 1.0);
}

TEST(KarmaTransitionMatrix, RowsAreStochastic) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const GameSpec spec;
  for (int trial = 0; trial < 20; ++trial) {
    Policy p(2, 12);
    for (int u = 0; u < 2; ++u) {
      for (int k = 0; k <= 12; ++k) {
        double total = 0.0;
        for (int m = 0; m <= k; ++m) total += p(u, k, m) = unit(rng);
        for (int m = 0; m <= k; ++m) p(u, k, m) /= total;
      }
    }
    KarmaDistribution d(12);
    double total = 0.0;
    for (double& x : d.values) total += x = unit(rng);
    for (double& x : d.values) x /= total;
    EXPECT_NO_THROW(check_transition(karma_transition_matrix(spec, p, d), 1e-12));
  }
}

TEST(SoftmaxPolicy, HandEvaluatedRow) {
  ExpectedUtility rho(1, 2);
  rho(0, 2, 0) = 1.0;
  rho(0, 2, 1) = 2.0;
  rho(0, 2, 2) = 3.0;
  const auto p = softmax_policy(rho, 1.0);
  // e^-1, e^-2, e^-3 normalized.
  const double z = std::exp(-1.0) + std::exp(-2.0) + std::exp(-3.0);
  EXPECT_NEAR(p(0, 2, 0), std::exp(-1.0) / z, 1e-15);
  EXPECT_NEAR(p(0, 2, 0), 0.66524, 1e-4);
  EXPECT_NEAR(p(0, 2, 1), 0.24473, 1e-4);
  EXPECT_NEAR(p(0, 2, 2), 0.09003, 1e-4);
}

TEST(SoftmaxPolicy, LimitsAndSupport) {
  ExpectedUtility rho(1, 4);
  for (int k = 0; k <= 4; ++k) {
    for (int m = 0; m <= 4; ++m) rho(0, k, m) = (m - 2) * (m - 2) + 0.1 * k;
  }
  const auto hot = softmax_policy(rho, 1e9);
  for (int m = 0; m <= 2; ++m) EXPECT_NEAR(hot(0, 2, m), 1.0 / 3.0, 1e-8);
  const auto cold = softmax_policy(rho, 1e-6);
  EXPECT_EQ(cold(0, 4, 2), 1.0);
  EXPECT_EQ(cold(0, 1, 1), 1.0);
  for (int k = 0; k <= 4; ++k) {
    for (int m = k + 1; m <= 4; ++m) EXPECT_EQ(hot(0, k, m), 0.0);
  }
  EXPECT_THROW((void)softmax_policy(rho, 0.0), std::invalid_argument);
}

TEST(GreedyPolicy, LowestMessageOnTies) {
  ExpectedUtility rho(1, 3);
  for (int m = 0; m <= 3; ++m) rho(0, 3, m) = m == 0 ? 1.0 : 0.5;
  EXPECT_EQ(greedy_message(rho.row(0, 3), 3), 1);
  EXPECT_EQ(greedy_policy(rho)(0, 3, 1), 1.0);
  // Messages above the karma held are never chosen.
  rho(0, 1, 0) = 1.0;
  rho(0, 1, 1) = 2.0;
  rho(0, 1, 2) = 0.0;
  EXPECT_EQ(greedy_message(rho.row(0, 1), 1), 0);
}

TEST(Blend, Examples) {
  const GameSpec spec;
  const auto a = uniform_policy(spec);
  const auto b = bid_zero(spec);
  EXPECT_EQ(blend(a, b, 1.0), b);
  const auto same = blend(a, a, 0.3);
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    EXPECT_NEAR(same.data()[i], a.data()[i], 1e-15);
  }
  const auto mid = blend(a, b, 0.5);
  EXPECT_DOUBLE_EQ(mid(1, 3, 0), 0.5 * 0.25 + 0.5);
  EXPECT_DOUBLE_EQ(mid(1, 3, 2), 0.125);
  EXPECT_THROW((void)blend(a, b, 0.0), std::invalid_argument);
  EXPECT_THROW((void)blend(a, Policy(2, 3), 0.5), std::invalid_argument);
}

TEST(VerifyEquilibrium, ExactStationaryPair) {
  const GameSpec spec;
  // No bids: every distribution is stationary and theta = cbar.
  const auto policy = bid_zero(spec);
  const auto d = uniform_distribution(12);
  const auto cbar = expected_stage_cost(spec, policy, d);
  const auto sol = assemble_solution(spec, policy, d, ValueFunction(cbar.values));
  const auto r = verify_equilibrium(sol, EquilibriumTolerance::for_game(spec));
  EXPECT_LE(r.stationarity, 1e-15);
  EXPECT_LE(r.bellman, 1e-15);
}

class SolvedGame : public ::testing::Test {
 protected:
  static const EquilibriumSolution& at(double alpha) {
    static std::map<double, EquilibriumSolution> cache;
    auto it = cache.find(alpha);
    if (it == cache.end()) {
      GameSpec spec;
      spec.alpha = alpha;
      it = cache.emplace(alpha, solve_equilibrium(spec)).first;
    }
    return it->second;
  }
};

TEST_F(SolvedGame, MyopicAgentsBidEverythingWhenUrgent) {
  const auto& sol = at(0.0);
  ASSERT_TRUE(sol.converged);
  for (int k = 0; k <= 12; ++k) {
    EXPECT_EQ(sol.policy(1, k, k), 1.0) << "k=" << k;
    EXPECT_EQ(sol.policy(0, k, 0), 1.0) << "k=" << k;
  }
}

TEST_F(SolvedGame, ResidualsWithinTolerance) {
  const auto& sol = at(0.5);
  EXPECT_TRUE(sol.converged);
  EXPECT_TRUE(sol.verified);
  EXPECT_LE(sol.residuals.stationarity, 1e-6);
  EXPECT_LE(sol.residuals.bellman, 1e-6);
  EXPECT_LE(sol.residuals.best_response_gap, 3e-3);
  // Stored residuals are reproducible from the stored quantities.
  const auto again = verify_equilibrium(sol, EquilibriumTolerance::for_game(sol.spec));
  EXPECT_EQ(again.stationarity, sol.residuals.stationarity);
  EXPECT_EQ(again.best_response_gap, sol.residuals.best_response_gap);
  EXPECT_NO_THROW(check_policy(sol.policy));
  EXPECT_NO_THROW(check_distribution(sol.distribution));
}

TEST_F(SolvedGame, ZeroUrgencyNeverBids) {
  for (double alpha : {0.0, 0.5, 0.8}) {
    const auto& sol = at(alpha);
    const auto greedy = greedy_policy(sol.rho);
    for (int k = 0; k <= 12; ++k) {
      EXPECT_EQ(greedy(0, k, 0), 1.0) << alpha << " k=" << k;
      EXPECT_EQ(sol.policy(0, k, 0), 1.0) << alpha << " k=" << k;
    }
  }
}

TEST_F(SolvedGame, FarsightedAgentsBidLess) {
  const auto myopic = expected_bid(at(0.0).policy, 1);
  const auto patient = expected_bid(at(0.8).policy, 1);
  // With one unit of karma there is nothing to hold back.
  for (int k = 2; k <= 12; ++k) EXPECT_LT(patient[k], myopic[k]) << "k=" << k;
}

TEST_F(SolvedGame, PerturbedPolicyHasPositiveGap) {
  const auto& sol = at(0.5);
  Policy p = sol.policy;
  // Move 10% of the k = 6 urgent mass to the costliest message.
  const auto row = sol.rho.row(1, 6).first(7);
  const int worst = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  for (int m = 0; m <= 6; ++m) p(1, 6, m) *= 0.9;
  p(1, 6, worst) += 0.1;
  EXPECT_GT(best_response_gap(p, sol.rho), 0.0);
}

TEST(SolverSchedule, Validation) {
  SolverSchedule s;
  EXPECT_NO_THROW(s.validate());
  s.momentum = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.temp_decay = 1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  GameSpec spec;
  spec.alpha = 1.0;
  EXPECT_THROW((void)solve_equilibrium(spec), std::invalid_argument);
}

TEST(ConsistentDistribution, PreservesMeanKarma) {
  GameSpec spec;
  spec.k_max = 6;
  const auto policy = bid_one_if_urgent(spec);
  const KarmaDistribution init({0.0, 0.1, 0.2, 0.3, 0.2, 0.2, 0.0});
  const auto d = consistent_distribution(spec, policy, init);
  double m0 = 0.0, m1 = 0.0;
  for (int k = 0; k <= 6; ++k) {
    m0 += k * init[k];
    m1 += k * d[k];
  }
  EXPECT_NEAR(m0, m1, 1e-9);
  EXPECT_LE(stationarity_residual(d, karma_transition_matrix(spec, policy, d)), 1e-10);
}

}  // namespace
}  // namespace karma
