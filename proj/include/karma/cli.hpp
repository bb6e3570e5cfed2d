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

// Command implementations behind tools/karma. Each command takes parsed
// options, writes its report to `out` and returns a process exit code:
// 0 on success, 1 on validation errors, 2 when a solve does not converge.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "karma/game.hpp"
#include "karma/io.hpp"
#include "karma/policies.hpp"
#include "karma/simulator.hpp"
#include "karma/solver.hpp"

namespace karma::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNotConverged = 2;

/// Population settings shared by simulate, sweep and compare.
struct PopulationOptions {
  int n_agents = 200;
  int epochs = 1000;
  double encounter_rate = 0.1;
  int karma_lo = 0;
  /// Negative means k_max.
  int karma_hi = -1;
};

struct SolveOptions {
  GameSpec spec;
  SolverSchedule schedule;
  std::string out;
};

struct SimulateOptions {
  GameSpec spec;
  /// Set when the game was given explicitly on the command line; a policy
  /// document must then agree with it.
  bool spec_given = false;
  std::string policy;
  std::uint64_t seed = 1;
  PopulationOptions population;
  std::string trace_out;
  std::string out;
};

struct SweepOptions {
  GameSpec spec;
  SolverSchedule schedule;
  std::vector<double> alphas;
  int seeds = 5;
  std::uint64_t seed = 1;
  int jobs = 1;
  /// Admit alpha = 1, simulated with the last verified equilibrium.
  bool force_unit_alpha = false;
  PopulationOptions population;
  std::string out;
  std::string bids_out;
};

struct CompareOptions {
  GameSpec spec;
  bool spec_given = false;
  std::vector<std::string> policies;
  int seeds = 5;
  std::uint64_t seed = 1;
  PopulationOptions population;
  std::string out;
  std::string scatter_out;
};

struct VerifyOptions {
  std::string document;
};

/// a, a + step, ..., up to b inclusive, rounded to 1e-9 so that grid points
/// print cleanly.
[[nodiscard]] inline std::vector<double> alpha_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("invalid alpha grid");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double a = std::round((lo + i * step) * 1e9) / 1e9;
    if (a > hi + 1e-12) break;
    out.push_back(a);
  }
  return out;
}

/// Game spec equality ignoring the discount factor.
[[nodiscard]] inline bool same_game(const GameSpec& a, const GameSpec& b) {
  return a.k_max == b.k_max && a.urgency_levels == b.urgency_levels &&
         a.urgency_probs == b.urgency_probs;
}

/// Resolves a builtin policy name or a policy document path. Documents must
/// describe the same game (karma bound and urgency process) as `spec`.
[[nodiscard]] inline PolicySpec resolve_policy(const std::string& name_or_path,
                                               GameSpec& spec, bool spec_given) {
  for (PolicyKind kind : kBuiltinPolicies) {
    if (policy_name(kind) == name_or_path) return PolicySpec::builtin(kind);
  }
  if (!std::filesystem::exists(name_or_path)) {
    throw std::invalid_argument("unknown policy '" + name_or_path +
                                "' (not a builtin name or a document path)");
  }
  PolicyDocument doc = read_document(name_or_path);
  if (spec_given && !same_game(doc.spec, spec)) {
    throw std::invalid_argument("policy document " + name_or_path +
                                " was solved for a different game (k_max or "
                                "urgency levels differ)");
  }
  if (!spec_given) {
    const double alpha = spec.alpha;
    spec = doc.spec;
    spec.alpha = alpha;
  }
  std::ostringstream label;
  label << "karma-equilibrium(alpha=" << doc.spec.alpha << ")";
  return PolicySpec::equilibrium(std::move(doc.policy), label.str());
}

[[nodiscard]] inline SimConfig make_config(const GameSpec& spec, const PolicySpec& policy,
                                           const PopulationOptions& pop,
                                           std::uint64_t seed, bool record) {
  SimConfig c;
  c.n_agents = pop.n_agents;
  c.epochs = pop.epochs;
  c.encounter_rate = pop.encounter_rate;
  c.karma_lo = pop.karma_lo;
  c.karma_hi = pop.karma_hi < 0 ? spec.k_max : pop.karma_hi;
  c.seed = seed;
  c.spec = spec;
  c.policy = policy;
  c.record_interactions = record;
  return c;
}

/// Mean and population standard deviation of metrics over seeds.
struct SeedSummary {
  double inefficiency = 0.0;
  double unfairness = 0.0;
  double inefficiency_sd = 0.0;
  double unfairness_sd = 0.0;
  double w2_estimate = 0.0;
  int seeds = 0;
};

[[nodiscard]] inline SeedSummary run_seeds(const GameSpec& spec, const PolicySpec& policy,
                                           const PopulationOptions& pop,
                                           std::uint64_t first_seed, int seeds) {
  std::vector<double> ineff, unfair;
  SeedSummary s;
  for (int i = 0; i < seeds; ++i) {
    const auto r =
        run_simulation(make_config(spec, policy, pop, first_seed + i, false)).metrics;
    ineff.push_back(r.inefficiency);
    unfair.push_back(r.unfairness);
    s.w2_estimate += r.w2_estimate / seeds;
  }
  auto mean = [](const std::vector<double>& v) {
    double t = 0.0;
    for (double x : v) t += x;
    return t / v.size();
  };
  s.inefficiency = mean(ineff);
  s.unfairness = mean(unfair);
  s.inefficiency_sd = std::sqrt(population_variance(ineff));
  s.unfairness_sd = std::sqrt(population_variance(unfair));
  s.seeds = seeds;
  return s;
}

inline void print_residuals(std::ostream& out, const EquilibriumResiduals& r,
                            const EquilibriumTolerance& tol) {
  auto line = [&](const char* name, double v, double t, bool ok) {
    out << "  " << std::left << std::setw(20) << name << std::setw(14) << fmt(v)
        << "tol " << std::setw(10) << fmt(t) << (ok ? "pass" : "FAIL") << '\n';
  };
  line("stationarity (L1)", r.stationarity, tol.stationarity, r.stationarity_ok);
  line("bellman (sup)", r.bellman, tol.bellman, r.bellman_ok);
  line("best-response gap", r.best_response_gap, tol.best_response_gap,
       r.rationality_ok);
}

// solve -----------------------------------------------------------------------

inline int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    opt.spec.validate();
    opt.schedule.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  const EquilibriumSolution sol = solve_equilibrium(opt.spec, opt.schedule);
  if (!opt.out.empty()) write_document(opt.out, make_document(sol));

  const GameSpec& g = sol.spec;
  out << "alpha " << fmt(g.alpha) << ", k_max " << g.k_max << ", " << sol.iterations
      << " iterations, final temperature " << fmt(sol.final_temperature)
      << (sol.polished ? ", deterministic" : ", mixed") << '\n';
  if (!sol.verified) {
    out << "warning: alpha >= 0.9, solution is unverified\n";
  }
  print_residuals(out, sol.residuals, EquilibriumTolerance::for_game(g));

  out << "\n   k";
  for (double u : g.urgency_levels) out << std::setw(12) << ("E[m|u=" + fmt(u) + "]");
  out << std::setw(12) << "D(k)" << std::setw(12) << "theta(k)" << '\n';
  std::vector<std::vector<double>> bids;
  for (int u = 0; u < g.num_urgency(); ++u) bids.push_back(expected_bid(sol.policy, u));
  for (int k = 0; k <= g.k_max; ++k) {
    out << std::right << std::setw(4) << k;
    for (const auto& b : bids) out << std::setw(12) << std::fixed << std::setprecision(4) << b[k];
    out << std::setw(12) << sol.distribution[k] << std::setw(12) << sol.theta[k] << '\n';
    out.unsetf(std::ios::floatfield);
  }
  out << (sol.converged ? "converged\n" : "not converged\n");
  return sol.converged ? kExitOk : kExitNotConverged;
}

// simulate --------------------------------------------------------------------

[[nodiscard]] inline nlohmann::json metrics_json(const MetricsReport& m, const SimConfig& c) {
  return {{"policy", m.policy},
          {"seed", m.seed},
          {"inefficiency", m.inefficiency},
          {"unfairness", m.unfairness},
          {"w2_estimate", m.w2_estimate},
          {"interactions", m.interactions},
          {"n_agents", c.n_agents},
          {"epochs", c.epochs},
          {"encounter_rate", c.encounter_rate}};
}

inline int cmd_simulate(SimulateOptions opt, std::ostream& out, std::ostream& err) {
  SimConfig config;
  try {
    const PolicySpec policy = resolve_policy(opt.policy, opt.spec, opt.spec_given);
    config = make_config(opt.spec, policy, opt.population, opt.seed,
                         !opt.trace_out.empty());
    config.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  const SimResult result = run_simulation(config);
  if (!opt.trace_out.empty()) {
    std::ofstream trace(opt.trace_out);
    if (!trace) {
      err << "error: cannot write " << opt.trace_out << '\n';
      return kExitInvalid;
    }
    write_trace_csv(trace, result.trace);
  }
  const std::string text = metrics_json(result.metrics, config).dump(2) + "\n";
  if (opt.out.empty()) {
    out << text;
  } else {
    std::ofstream(opt.out) << text;
  }
  return kExitOk;
}

// sweep -----------------------------------------------------------------------

struct SweepRow {
  double alpha = 0.0;
  SeedSummary metrics;
  EquilibriumResiduals residuals;
  bool solved = false;
  bool converged = false;
  bool verified = false;
  /// "ok", "not-converged", "from-alpha=<a>" or an error message.
  std::string status;
  std::vector<double> urgent_bids;
};

inline constexpr const char* kSweepHeader =
    "alpha,inefficiency,unfairness,inefficiency_sd,unfairness_sd,w2_estimate,"
    "stationarity,bellman,best_response_gap,converged,verified,seeds,status";

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    out << fmt(r.alpha) << ',' << fmt(r.metrics.inefficiency) << ','
        << fmt(r.metrics.unfairness) << ',' << fmt(r.metrics.inefficiency_sd) << ','
        << fmt(r.metrics.unfairness_sd) << ',' << fmt(r.metrics.w2_estimate) << ','
        << fmt(r.residuals.stationarity) << ',' << fmt(r.residuals.bellman) << ','
        << fmt(r.residuals.best_response_gap) << ',' << r.converged << ','
        << r.verified << ',' << r.metrics.seeds << ',' << status << '\n';
  }
}

/// Solves and simulates every alpha of the grid. Rows come back sorted by
/// alpha regardless of `jobs`. Failures are recorded in the row.
[[nodiscard]] inline std::vector<SweepRow> run_sweep(const SweepOptions& opt) {
  std::vector<double> alphas = opt.alphas;
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  std::vector<SweepRow> rows(alphas.size());
  std::vector<std::optional<Policy>> policies(alphas.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < alphas.size(); i = next++) {
      SweepRow& row = rows[i];
      row.alpha = alphas[i];
      if (alphas[i] >= 1.0) continue;
      try {
        GameSpec spec = opt.spec;
        spec.alpha = alphas[i];
        const auto sol = solve_equilibrium(spec, opt.schedule);
        row.solved = true;
        row.residuals = sol.residuals;
        row.converged = sol.converged;
        row.verified = sol.verified;
        row.status = sol.converged ? "ok" : "not-converged";
        row.urgent_bids = expected_bid(sol.policy, spec.num_urgency() - 1);
        row.metrics = run_seeds(spec, PolicySpec::equilibrium(sol.policy),
                                opt.population, opt.seed, opt.seeds);
        policies[i] = sol.policy;
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(alphas.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // alpha = 1 reuses the last verified, converged equilibrium.
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] < 1.0) continue;
    SweepRow& row = rows[i];
    std::optional<std::size_t> src;
    for (std::size_t j = 0; j < i; ++j) {
      if (rows[j].verified && rows[j].converged && policies[j]) src = j;
    }
    if (!src) {
      row.status = "error: no verified equilibrium to simulate at alpha = 1";
      continue;
    }
    GameSpec spec = opt.spec;
    spec.alpha = 1.0;
    row.metrics = run_seeds(spec, PolicySpec::equilibrium(*policies[*src]),
                            opt.population, opt.seed, opt.seeds);
    row.urgent_bids = rows[*src].urgent_bids;
    row.status = "from-alpha=" + fmt(alphas[*src]);
  }
  return rows;
}

inline int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    opt.spec.validate();
    opt.schedule.validate();
    if (opt.alphas.empty()) throw std::invalid_argument("empty alpha grid");
    for (double a : opt.alphas) {
      if (!(a >= 0.0 && a <= 1.0)) {
        throw std::invalid_argument("alpha values must lie in [0, 1]");
      }
      if (a == 1.0 && !opt.force_unit_alpha) {
        throw std::invalid_argument(
            "alpha = 1 requested: equilibria are not well defined when alpha = 1; "
            "pass --force-unit-alpha to simulate it with the last verified policy");
      }
    }
    if (opt.seeds < 5) throw std::invalid_argument("a sweep needs at least 5 seeds");
    if (opt.jobs < 1) throw std::invalid_argument("--jobs must be positive");
    make_config(opt.spec, PolicySpec::builtin(PolicyKind::kBaselineRandom),
                opt.population, opt.seed, false)
        .validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  const auto rows = run_sweep(opt);
  if (opt.out.empty()) {
    write_sweep_csv(out, rows);
  } else {
    std::ofstream f(opt.out);
    write_sweep_csv(f, rows);
  }
  if (!opt.bids_out.empty()) {
    std::ofstream f(opt.bids_out);
    f << "alpha,k,expected_urgent_bid\n";
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.urgent_bids.size(); ++k) {
        f << fmt(r.alpha) << ',' << k << ',' << fmt(r.urgent_bids[k]) << '\n';
      }
    }
  }
  bool ok = true;
  for (const auto& r : rows) {
    if (r.alpha < 1.0 && r.verified && !r.converged) ok = false;
    if (r.status.rfind("error", 0) == 0) ok = false;
  }
  return ok ? kExitOk : kExitNotConverged;
}

// compare ---------------------------------------------------------------------

struct CompareRow {
  std::string policy;
  SeedSummary metrics;
};

inline constexpr const char* kCompareHeader =
    "policy,inefficiency,unfairness,inefficiency_sd,unfairness_sd,w2_estimate,seeds";

inline int cmd_compare(CompareOptions opt, std::ostream& out, std::ostream& err) {
  std::vector<PolicySpec> specs;
  try {
    if (opt.policies.empty()) throw std::invalid_argument("no policies to compare");
    if (opt.seeds < 1) throw std::invalid_argument("--seeds must be positive");
    for (const auto& p : opt.policies) {
      specs.push_back(resolve_policy(p, opt.spec, opt.spec_given));
      // The first document fixes the game for the ones that follow.
      if (specs.back().kind == PolicyKind::kKarmaEquilibrium) opt.spec_given = true;
    }
    for (const auto& s : specs) {
      make_config(opt.spec, s, opt.population, opt.seed, false).validate();
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  std::vector<CompareRow> rows;
  for (const auto& s : specs) {
    rows.push_back({s.label, run_seeds(opt.spec, s, opt.population, opt.seed, opt.seeds)});
  }

  std::ostringstream csv;
  csv << kCompareHeader << '\n';
  for (const auto& r : rows) {
    csv << r.policy << ',' << fmt(r.metrics.inefficiency) << ','
        << fmt(r.metrics.unfairness) << ',' << fmt(r.metrics.inefficiency_sd) << ','
        << fmt(r.metrics.unfairness_sd) << ',' << fmt(r.metrics.w2_estimate) << ','
        << r.metrics.seeds << '\n';
  }
  if (opt.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream(opt.out) << csv.str();
  }
  if (!opt.scatter_out.empty()) {
    std::ofstream f(opt.scatter_out);
    f << "# inefficiency unfairness label\n";
    for (const auto& r : rows) {
      f << fmt(r.metrics.inefficiency) << ' ' << fmt(r.metrics.unfairness) << " \""
        << r.policy << "\"\n";
    }
  }
  return kExitOk;
}

// verify ----------------------------------------------------------------------

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  PolicyDocument doc;
  try {
    doc = read_document(opt.document);
    if (!doc.equilibrium) {
      throw std::invalid_argument("document carries no equilibrium data");
    }
    doc.spec.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  EquilibriumSolution sol = assemble_solution(doc.spec, doc.policy,
                                              doc.equilibrium->distribution,
                                              doc.equilibrium->theta);
  const auto tol = EquilibriumTolerance::for_game(doc.spec);
  sol.residuals = verify_equilibrium(sol, tol);
  out << opt.document << ": alpha " << fmt(doc.spec.alpha)
      << (sol.verified ? "" : " (unverified range)") << '\n';
  print_residuals(out, sol.residuals, tol);
  out << (sol.residuals.ok() ? "equilibrium\n" : "not an equilibrium\n");
  return sol.residuals.ok() ? kExitOk : kExitNotConverged;
}

}  // namespace karma::cli
