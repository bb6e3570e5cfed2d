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

// Population experiment: every epoch each agent draws an urgency, a fixed
// number of disjoint random pairs meet, and each pair is settled by the
// configured decision rule.
//
// Random draws come from one std::mt19937_64 per run, in this order within an
// epoch: all urgencies (agent index order), the pairing, then for each pair
// the messages of the first and second agent and finally a tie coin if one
// is needed.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "karma/game.hpp"
#include "karma/policies.hpp"
#include "karma/tensors.hpp"

namespace karma {

struct SimConfig {
  int n_agents = 200;
  int epochs = 1000;
  /// Expected interactions per agent per epoch.
  double encounter_rate = 0.1;
  std::uint64_t seed = 1;
  /// Initial karma is uniform on karma_lo..karma_hi.
  int karma_lo = 0;
  int karma_hi = 12;
  GameSpec spec;
  PolicySpec policy;
  /// Keep one record per interaction in the trace.
  bool record_interactions = true;

  /// floor(n * rate / 2) disjoint pairs meet every epoch.
  [[nodiscard]] int pairs_per_epoch() const {
    return static_cast<int>(std::floor(n_agents * encounter_rate / 2.0 + 1e-9));
  }

  void validate() const {
    spec.validate(/*allow_unit_alpha=*/true);
    if (n_agents < 2) throw std::invalid_argument("need at least two agents");
    if (epochs < 1) throw std::invalid_argument("need at least one epoch");
    if (!(encounter_rate > 0.0) || pairs_per_epoch() < 1) {
      throw std::invalid_argument("encounter rate yields no pairs per epoch");
    }
    if (2 * pairs_per_epoch() > n_agents) {
      throw std::invalid_argument("encounter rate exceeds one interaction per agent");
    }
    if (karma_lo < 0 || karma_hi > spec.k_max || karma_lo > karma_hi) {
      throw std::invalid_argument("initial karma range outside 0..k_max");
    }
    if (policy.kind == PolicyKind::kKarmaEquilibrium) {
      if (!policy.table) throw std::invalid_argument("missing equilibrium policy table");
      if (!policy.table->matches(spec)) {
        throw std::invalid_argument("equilibrium policy does not match the game");
      }
    }
  }
};

struct AgentState {
  int karma = 0;
  double accumulated_cost = 0.0;
  int interactions = 0;
};

/// One settled interaction. Messages are -1 for rules that do not bid.
struct InteractionRecord {
  int epoch = 0;
  int agent_i = 0;
  int agent_j = 0;
  double u_i = 0.0;
  double u_j = 0.0;
  int m_i = -1;
  int m_j = -1;
  Agent delayed = Agent::kFirst;
  int transfer = 0;
  double cost_i = 0.0;
  double cost_j = 0.0;
  int k_i_after = 0;
  int k_j_after = 0;
};

struct SimTrace {
  std::vector<InteractionRecord> interactions;
  std::vector<AgentState> final_states;
  /// Population variance of accumulated cost after each epoch; entry 0 is
  /// the initial state.
  std::vector<double> cost_variance;
  /// Total karma after each epoch; entry 0 is the initial total.
  std::vector<long long> total_karma;
  /// Interactions settled in each epoch.
  std::vector<int> epoch_interactions;
  double total_cost = 0.0;
  long long num_interactions = 0;
};

struct MetricsReport {
  std::string policy;
  std::uint64_t seed = 0;
  double inefficiency = 0.0;
  double unfairness = 0.0;
  double w2_estimate = 0.0;
  long long interactions = 0;
};

struct SimResult {
  SimTrace trace;
  MetricsReport metrics;
};

/// (1/N) sum (a - mean)^2.
[[nodiscard]] inline double population_variance(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / values.size();
}

/// Uniformly random disjoint pairs: a partial Fisher-Yates shuffle of the
/// agent indices, read off two at a time.
template <class Rng>
[[nodiscard]] std::vector<std::pair<int, int>> schedule_pairs(int n_agents, int pairs,
                                                              Rng& rng) {
  if (pairs < 0 || 2 * pairs > n_agents) {
    throw std::invalid_argument("cannot form " + std::to_string(pairs) +
                                " disjoint pairs from " + std::to_string(n_agents) +
                                " agents");
  }
  std::vector<int> idx(n_agents);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < 2 * pairs; ++i) {
    std::uniform_int_distribution<int> pick(i, n_agents - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<std::pair<int, int>> out;
  out.reserve(pairs);
  for (int p = 0; p < pairs; ++p) out.emplace_back(idx[2 * p], idx[2 * p + 1]);
  return out;
}

/// Total incurred cost divided by the number of interactions.
[[nodiscard]] inline double inefficiency(const SimTrace& trace) {
  if (trace.num_interactions == 0) {
    throw std::invalid_argument("trace contains no interactions");
  }
  return trace.total_cost / static_cast<double>(trace.num_interactions);
}

/// Population standard deviation of the final accumulated costs.
[[nodiscard]] inline double unfairness(const std::vector<AgentState>& states) {
  if (states.size() < 2) throw std::invalid_argument("need at least two agents");
  std::vector<double> costs;
  costs.reserve(states.size());
  for (const auto& s : states) costs.push_back(s.accumulated_cost);
  return std::sqrt(population_variance(costs));
}

/// Mean per-epoch growth of the cost variance over the trailing `window`
/// epochs.
[[nodiscard]] inline double w2_estimate(const SimTrace& trace, int window) {
  const int last = static_cast<int>(trace.cost_variance.size()) - 1;
  if (window < 2 || window > last) {
    throw std::invalid_argument("not enough epochs of history for the window");
  }
  return (trace.cost_variance[last] - trace.cost_variance[last - window]) / window;
}

[[nodiscard]] inline SimResult run_simulation(const SimConfig& config) {
  config.validate();
  const GameSpec& spec = config.spec;
  const PolicyKind kind = config.policy.kind;
  const int n = config.n_agents;
  const int pairs = config.pairs_per_epoch();

  std::mt19937_64 rng(config.seed);
  std::vector<AgentState> agents(n);
  {
    std::uniform_int_distribution<int> init(config.karma_lo, config.karma_hi);
    for (auto& a : agents) a.karma = init(rng);
  }

  std::vector<double> urgency_cdf(spec.num_urgency());
  std::partial_sum(spec.urgency_probs.begin(), spec.urgency_probs.end(),
                   urgency_cdf.begin());
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<int> urgency(n, 0);

  SimTrace trace;
  if (config.record_interactions) {
    trace.interactions.reserve(static_cast<std::size_t>(pairs) * config.epochs);
  }
  std::vector<double> costs(n, 0.0);
  auto record_epoch = [&] {
    long long karma_total = 0;
    for (int i = 0; i < n; ++i) {
      costs[i] = agents[i].accumulated_cost;
      karma_total += agents[i].karma;
    }
    trace.cost_variance.push_back(population_variance(costs));
    trace.total_karma.push_back(karma_total);
  };
  record_epoch();

  auto bid = [&](int agent) {
    const int k = agents[agent].karma;
    const double u = spec.urgency_levels[urgency[agent]];
    if (kind == PolicyKind::kKarmaEquilibrium) {
      return sample_equilibrium_message(*config.policy.table, urgency[agent], k, rng);
    }
    return heuristic_message(kind, u, k);
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (int i = 0; i < n; ++i) {
      const double x = uniform(rng);
      int u = 0;
      while (u + 1 < spec.num_urgency() && x >= urgency_cdf[u]) ++u;
      urgency[i] = u;
    }
    const auto matches = schedule_pairs(n, pairs, rng);
    for (const auto& [i, j] : matches) {
      AgentState& a = agents[i];
      AgentState& b = agents[j];
      InteractionRecord rec;
      rec.epoch = epoch;
      rec.agent_i = i;
      rec.agent_j = j;
      rec.u_i = spec.urgency_levels[urgency[i]];
      rec.u_j = spec.urgency_levels[urgency[j]];

      Outcome outcome{Agent::kFirst};
      if (is_centralized(kind)) {
        switch (kind) {
          case PolicyKind::kCentralizedUrgency:
            outcome = centralized_urgency(rec.u_i, rec.u_j, rng);
            break;
          case PolicyKind::kCentralizedCost:
            outcome = centralized_cost(a.accumulated_cost, b.accumulated_cost,
                                       rec.u_i, rec.u_j, rng);
            break;
          case PolicyKind::kCentralizedUrgencyThenCost:
            outcome = centralized_urgency_then_cost(rec.u_i, rec.u_j,
                                                    a.accumulated_cost,
                                                    b.accumulated_cost, rng);
            break;
          default:
            outcome = sample_outcome(OutcomeDistribution{0.5}, rng);
            break;
        }
        rec.k_i_after = a.karma;
        rec.k_j_after = b.karma;
      } else {
        rec.m_i = bid(i);
        rec.m_j = bid(j);
        const int bid_i = effective_message(rec.m_i, a.karma);
        const int bid_j = effective_message(rec.m_j, b.karma);
        outcome = sample_outcome(outcome_distribution(a.karma, rec.m_i, b.karma, rec.m_j),
                                 rng);
        const KarmaPair next =
            karma_transition(spec.k_max, {a.karma, b.karma}, bid_i, bid_j, outcome);
        rec.transfer = std::abs(next.first - a.karma);
        a.karma = next.first;
        b.karma = next.second;
        rec.k_i_after = a.karma;
        rec.k_j_after = b.karma;
      }

      rec.delayed = outcome.delayed;
      rec.cost_i = interaction_cost(spec, outcome, rec.u_i, Agent::kFirst);
      rec.cost_j = interaction_cost(spec, outcome, rec.u_j, Agent::kSecond);
      a.accumulated_cost += rec.cost_i;
      b.accumulated_cost += rec.cost_j;
      ++a.interactions;
      ++b.interactions;
      trace.total_cost += rec.cost_i + rec.cost_j;
      ++trace.num_interactions;
      if (config.record_interactions) trace.interactions.push_back(rec);
    }
    trace.epoch_interactions.push_back(static_cast<int>(matches.size()));
    record_epoch();
  }
  trace.final_states = std::move(agents);

  SimResult result;
  result.metrics.policy = config.policy.label.empty()
                              ? std::string(policy_name(kind))
                              : config.policy.label;
  result.metrics.seed = config.seed;
  result.metrics.inefficiency = inefficiency(trace);
  result.metrics.unfairness = unfairness(trace.final_states);
  result.metrics.w2_estimate =
      config.epochs >= 4 ? w2_estimate(trace, config.epochs / 2) : 0.0;
  result.metrics.interactions = trace.num_interactions;
  result.trace = std::move(trace);
  return result;
}

}  // namespace karma
