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

// Policy documents (JSON) and CSV output.
//
// A policy document holds a game, a policy tensor policy[u][k][m] and, for
// solved equilibria, the distribution, value function, stage cost, residuals
// and schedule. Doubles are written in shortest round-trip form, so
// decode(encode(doc)) == doc.

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "karma/game.hpp"
#include "karma/simulator.hpp"
#include "karma/solver.hpp"
#include "karma/tensors.hpp"

namespace karma {

inline constexpr int kSchemaVersion = 1;

struct EquilibriumExtras {
  KarmaDistribution distribution;
  ValueFunction theta;
  StageCost cbar;
  EquilibriumResiduals residuals;
  SolverSchedule schedule;
  int iterations = 0;
  bool converged = false;
  bool polished = false;
  bool verified = false;

  friend bool operator==(const EquilibriumExtras& a, const EquilibriumExtras& b) {
    auto r = [](const EquilibriumResiduals& x) {
      return std::tuple(x.stationarity, x.bellman, x.best_response_gap,
                        x.stationarity_ok, x.bellman_ok, x.rationality_ok);
    };
    auto s = [](const SolverSchedule& x) {
      return std::tuple(x.iterations, x.momentum, x.temp_init, x.temp_decay,
                        x.temp_floor, x.era_length, x.change_tolerance,
                        x.population_steps, x.polish_rounds, x.random_init, x.seed);
    };
    return a.distribution == b.distribution && a.theta == b.theta &&
           a.cbar == b.cbar && r(a.residuals) == r(b.residuals) &&
           s(a.schedule) == s(b.schedule) && a.iterations == b.iterations &&
           a.converged == b.converged && a.polished == b.polished &&
           a.verified == b.verified;
  }
};

struct PolicyDocument {
  int schema_version = kSchemaVersion;
  GameSpec spec;
  Policy policy;
  std::optional<EquilibriumExtras> equilibrium;

  friend bool operator==(const PolicyDocument&, const PolicyDocument&) = default;
};

[[nodiscard]] inline PolicyDocument make_document(const EquilibriumSolution& sol) {
  PolicyDocument doc;
  doc.spec = sol.spec;
  doc.policy = sol.policy;
  doc.equilibrium = EquilibriumExtras{sol.distribution, sol.theta,      sol.cbar,
                                      sol.residuals,    sol.schedule,   sol.iterations,
                                      sol.converged,    sol.polished,   sol.verified};
  return doc;
}

namespace detail {

template <class T>
T get_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw std::invalid_argument(std::string("policy document lacks '") + key + "'");
  }
  return j.at(key).get<T>();
}

}  // namespace detail

[[nodiscard]] inline nlohmann::json encode(const PolicyDocument& doc) {
  using nlohmann::json;
  const GameSpec& g = doc.spec;
  json out;
  out["schema_version"] = doc.schema_version;
  out["game"] = {{"k_max", g.k_max},
                 {"urgency_levels", g.urgency_levels},
                 {"urgency_probs", g.urgency_probs},
                 {"alpha", g.alpha}};
  json pol = json::array();
  for (int u = 0; u < doc.policy.num_urgency(); ++u) {
    json rows = json::array();
    for (int k = 0; k < doc.policy.num_karma(); ++k) {
      const auto r = doc.policy.row(u, k);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    pol.push_back(std::move(rows));
  }
  out["policy"] = std::move(pol);
  if (doc.equilibrium) {
    const EquilibriumExtras& e = *doc.equilibrium;
    const SolverSchedule& s = e.schedule;
    out["equilibrium"] = {
        {"distribution", e.distribution.values},
        {"theta", e.theta.values},
        {"cbar", e.cbar.values},
        {"residuals",
         {{"stationarity", e.residuals.stationarity},
          {"bellman", e.residuals.bellman},
          {"best_response_gap", e.residuals.best_response_gap},
          {"stationarity_ok", e.residuals.stationarity_ok},
          {"bellman_ok", e.residuals.bellman_ok},
          {"rationality_ok", e.residuals.rationality_ok}}},
        {"schedule",
         {{"iterations", s.iterations},
          {"momentum", s.momentum},
          {"temp_init", s.temp_init},
          {"temp_decay", s.temp_decay},
          {"temp_floor", s.temp_floor},
          {"era_length", s.era_length},
          {"change_tolerance", s.change_tolerance},
          {"population_steps", s.population_steps},
          {"polish_rounds", s.polish_rounds},
          {"random_init", s.random_init},
          {"seed", s.seed}}},
        {"iterations", e.iterations},
        {"converged", e.converged},
        {"polished", e.polished},
        {"verified", e.verified}};
  }
  return out;
}

/// Parses and validates a document; throws std::invalid_argument on schema
/// or invariant violations.
[[nodiscard]] inline PolicyDocument decode(const nlohmann::json& j) {
  using detail::get_field;
  PolicyDocument doc;
  try {
    doc.schema_version = get_field<int>(j, "schema_version");
    if (doc.schema_version != kSchemaVersion) {
      throw std::invalid_argument("unsupported schema_version " +
                                  std::to_string(doc.schema_version));
    }
    const auto& g = j.at("game");
    doc.spec.k_max = get_field<int>(g, "k_max");
    doc.spec.urgency_levels = get_field<std::vector<double>>(g, "urgency_levels");
    doc.spec.urgency_probs = get_field<std::vector<double>>(g, "urgency_probs");
    doc.spec.alpha = get_field<double>(g, "alpha");
    doc.spec.validate(/*allow_unit_alpha=*/true);

    const auto pol = get_field<std::vector<std::vector<std::vector<double>>>>(j, "policy");
    if (static_cast<int>(pol.size()) != doc.spec.num_urgency()) {
      throw std::invalid_argument("policy has the wrong number of urgency levels");
    }
    doc.policy = Policy(doc.spec.num_urgency(), doc.spec.k_max);
    for (int u = 0; u < doc.spec.num_urgency(); ++u) {
      if (static_cast<int>(pol[u].size()) != doc.spec.num_karma()) {
        throw std::invalid_argument("policy has the wrong number of karma levels");
      }
      for (int k = 0; k < doc.spec.num_karma(); ++k) {
        if (static_cast<int>(pol[u][k].size()) != doc.spec.num_karma()) {
          throw std::invalid_argument("policy row has the wrong number of messages");
        }
        for (int m = 0; m < doc.spec.num_karma(); ++m) doc.policy(u, k, m) = pol[u][k][m];
      }
    }
    check_policy(doc.policy);

    if (j.contains("equilibrium")) {
      const auto& e = j.at("equilibrium");
      EquilibriumExtras x;
      x.distribution = KarmaDistribution(get_field<std::vector<double>>(e, "distribution"));
      x.theta = ValueFunction(get_field<std::vector<double>>(e, "theta"));
      x.cbar = StageCost(get_field<std::vector<double>>(e, "cbar"));
      for (int size : {x.distribution.size(), x.theta.size(), x.cbar.size()}) {
        if (size != doc.spec.num_karma()) {
          throw std::invalid_argument("equilibrium vector has the wrong length");
        }
      }
      check_distribution(x.distribution);
      const auto& r = e.at("residuals");
      x.residuals.stationarity = get_field<double>(r, "stationarity");
      x.residuals.bellman = get_field<double>(r, "bellman");
      x.residuals.best_response_gap = get_field<double>(r, "best_response_gap");
      x.residuals.stationarity_ok = get_field<bool>(r, "stationarity_ok");
      x.residuals.bellman_ok = get_field<bool>(r, "bellman_ok");
      x.residuals.rationality_ok = get_field<bool>(r, "rationality_ok");
      const auto& s = e.at("schedule");
      x.schedule.iterations = get_field<int>(s, "iterations");
      x.schedule.momentum = get_field<double>(s, "momentum");
      x.schedule.temp_init = get_field<double>(s, "temp_init");
      x.schedule.temp_decay = get_field<double>(s, "temp_decay");
      x.schedule.temp_floor = get_field<double>(s, "temp_floor");
      x.schedule.era_length = get_field<int>(s, "era_length");
      x.schedule.change_tolerance = get_field<double>(s, "change_tolerance");
      x.schedule.population_steps = get_field<int>(s, "population_steps");
      x.schedule.polish_rounds = get_field<int>(s, "polish_rounds");
      x.schedule.random_init = get_field<bool>(s, "random_init");
      x.schedule.seed = get_field<std::uint64_t>(s, "seed");
      x.schedule.validate();
      x.iterations = get_field<int>(e, "iterations");
      x.converged = get_field<bool>(e, "converged");
      x.polished = get_field<bool>(e, "polished");
      x.verified = get_field<bool>(e, "verified");
      doc.equilibrium = std::move(x);
    }
  } catch (const nlohmann::json::exception& err) {
    throw std::invalid_argument(std::string("malformed policy document: ") + err.what());
  }
  return doc;
}

inline void write_document(const std::string& path, const PolicyDocument& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << encode(doc).dump(2) << '\n';
}

[[nodiscard]] inline PolicyDocument read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open policy document " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& err) {
    throw std::invalid_argument(path + ": " + err.what());
  }
  return decode(j);
}

/// Fixed CSV number format: 9 significant digits.
[[nodiscard]] inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline constexpr const char* kTraceHeader =
    "epoch,agent_i,agent_j,u_i,u_j,m_i,m_j,delayed,transfer,cost_i,cost_j,"
    "k_i_after,k_j_after";

/// One row per interaction; `delayed` is "i" or "j".
inline void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.interactions) {
    out << r.epoch << ',' << r.agent_i << ',' << r.agent_j << ',' << fmt(r.u_i) << ','
        << fmt(r.u_j) << ',' << r.m_i << ',' << r.m_j << ','
        << (r.delayed == Agent::kFirst ? 'i' : 'j') << ',' << r.transfer << ','
        << fmt(r.cost_i) << ',' << fmt(r.cost_j) << ',' << r.k_i_after << ','
        << r.k_j_after << '\n';
  }
}

}  // namespace karma
