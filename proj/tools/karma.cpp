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

// karma: solve, simulate, sweep, compare and verify karma games.
//
//   karma solve --alpha 0.8 --out eq_080.json
//   karma simulate --policy bid1-if-urgent --seed 7 --trace trace.csv
//   karma sweep --alpha-max 0.85 --jobs 2 --out sweep.csv
//   karma compare --policy baseline-random,centralized-urgency,eq_080.json
//   karma verify eq_080.json

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "karma/cli.hpp"

namespace {

using namespace karma;

struct GameFlags {
  int k_max = 12;
  std::vector<double> urgency{0.0, 3.0};
  std::vector<double> probs{0.5, 0.5};
  double alpha = 0.0;
  std::vector<CLI::Option*> options;

  void add(CLI::App* app, bool with_alpha) {
    options.push_back(app->add_option("--k-max", k_max, "Karma bound")->capture_default_str());
    options.push_back(app->add_option("--urgency", urgency, "Urgency levels")
                          ->delimiter(',')
                          ->capture_default_str());
    options.push_back(app->add_option("--p", probs, "Urgency probabilities")
                          ->delimiter(',')
                          ->capture_default_str());
    if (with_alpha) {
      options.push_back(
          app->add_option("--alpha", alpha, "Discount factor")->capture_default_str());
    }
  }
  [[nodiscard]] bool given() const {
    for (const auto* o : options) {
      if (o->count() > 0) return true;
    }
    return false;
  }
  [[nodiscard]] GameSpec spec() const { return {k_max, urgency, probs, alpha}; }
};

void add_schedule(CLI::App* app, SolverSchedule& s) {
  app->add_option("--iterations", s.iterations, "Solver iterations")->capture_default_str();
  app->add_option("--momentum", s.momentum, "Policy blending weight")->capture_default_str();
  app->add_option("--temp-init", s.temp_init, "Initial softmax temperature")
      ->capture_default_str();
  app->add_option("--temp-decay", s.temp_decay, "Temperature factor per era")
      ->capture_default_str();
  app->add_option("--temp-floor", s.temp_floor, "Lowest temperature")->capture_default_str();
  app->add_option("--era-length", s.era_length, "Iterations per era")->capture_default_str();
  app->add_option("--population-steps", s.population_steps,
                  "Population steps per iteration")
      ->capture_default_str();
  app->add_option("--polish-rounds", s.polish_rounds, "Greedy refinement rounds")
      ->capture_default_str();
  app->add_flag("--random-init", s.random_init, "Start from a random policy");
}

void add_population(CLI::App* app, cli::PopulationOptions& p) {
  app->add_option("--agents", p.n_agents, "Number of agents")->capture_default_str();
  app->add_option("--epochs", p.epochs, "Number of epochs")->capture_default_str();
  app->add_option("--rate", p.encounter_rate, "Interactions per agent per epoch")
      ->capture_default_str();
  app->add_option("--karma-lo", p.karma_lo, "Lowest initial karma")->capture_default_str();
  app->add_option("--karma-hi", p.karma_hi, "Highest initial karma (default k_max)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Karma game equilibria and population simulations"};
  app.require_subcommand(1);

  // solve
  GameFlags solve_game;
  cli::SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Compute a Nash equilibrium");
  solve_game.add(solve_cmd, true);
  add_schedule(solve_cmd, solve.schedule);
  solve_cmd->add_option("--seed", solve.schedule.seed, "Seed for --random-init")
      ->capture_default_str();
  solve_cmd->add_option("--out", solve.out, "Policy document to write");

  // simulate
  GameFlags sim_game;
  cli::SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the population experiment");
  sim_game.add(sim_cmd, false);
  sim_cmd->add_option("--policy", sim.policy, "Builtin policy name or document path")
      ->required();
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  add_population(sim_cmd, sim.population);
  sim_cmd->add_option("--trace", sim.trace_out, "Per-interaction CSV trace");
  sim_cmd->add_option("--out", sim.out, "Metrics JSON (default stdout)");

  // sweep
  GameFlags sweep_game;
  cli::SweepOptions sweep;
  double alpha_min = 0.0, alpha_max = 0.85, alpha_step = 0.05;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve and simulate over a grid of alpha");
  sweep_game.add(sweep_cmd, false);
  add_schedule(sweep_cmd, sweep.schedule);
  add_population(sweep_cmd, sweep.population);
  sweep_cmd->add_option("--alpha-min", alpha_min)->capture_default_str();
  sweep_cmd->add_option("--alpha-max", alpha_max)->capture_default_str();
  sweep_cmd->add_option("--alpha-step", alpha_step)->capture_default_str();
  auto* alphas_opt = sweep_cmd->add_option("--alphas", sweep.alphas, "Explicit alpha list")
                         ->delimiter(',');
  sweep_cmd->add_option("--seeds", sweep.seeds, "Simulation seeds per alpha")
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "First simulation seed")->capture_default_str();
  sweep_cmd->add_option("--jobs", sweep.jobs, "Concurrent alpha jobs")->capture_default_str();
  sweep_cmd->add_flag("--force-unit-alpha", sweep.force_unit_alpha,
                      "Simulate alpha = 1 with the last verified equilibrium");
  sweep_cmd->add_option("--out", sweep.out, "Sweep CSV (default stdout)");
  sweep_cmd->add_option("--bids-out", sweep.bids_out, "Expected urgent bid per karma CSV");

  // compare
  GameFlags cmp_game;
  cli::CompareOptions cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare policies on common seeds");
  cmp_game.add(cmp_cmd, false);
  cmp_cmd->add_option("--policy", cmp.policies, "Builtin names and/or document paths")
      ->delimiter(',')
      ->required();
  cmp_cmd->add_option("--seeds", cmp.seeds, "Seeds per policy")->capture_default_str();
  cmp_cmd->add_option("--seed", cmp.seed, "First seed")->capture_default_str();
  add_population(cmp_cmd, cmp.population);
  cmp_cmd->add_option("--out", cmp.out, "Comparison CSV (default stdout)");
  cmp_cmd->add_option("--scatter", cmp.scatter_out, "Gnuplot scatter data");

  // verify
  cli::VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Re-check a stored equilibrium");
  verify_cmd->add_option("document", verify.document, "Policy document")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitInvalid;
  }

  try {
    if (*solve_cmd) {
      solve.spec = solve_game.spec();
      return cli::cmd_solve(solve, std::cout, std::cerr);
    }
    if (*sim_cmd) {
      sim.spec = sim_game.spec();
      sim.spec_given = sim_game.given();
      return cli::cmd_simulate(sim, std::cout, std::cerr);
    }
    if (*sweep_cmd) {
      sweep.spec = sweep_game.spec();
      if (alphas_opt->count() == 0) {
        sweep.alphas = cli::alpha_grid(alpha_min, alpha_max, alpha_step);
      }
      return cli::cmd_sweep(sweep, std::cout, std::cerr);
    }
    if (*cmp_cmd) {
      cmp.spec = cmp_game.spec();
      cmp.spec_given = cmp_game.given();
      return cli::cmd_compare(cmp, std::cout, std::cerr);
    }
    if (*verify_cmd) return cli::cmd_verify(verify, std::cout, std::cerr);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitInvalid;
  }
  return cli::kExitInvalid;
}
