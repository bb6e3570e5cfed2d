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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "karma/tensors.hpp"

namespace karma {

/// D * T for a row vector D.
[[nodiscard]] inline std::vector<double> left_multiply(
    const std::vector<double>& dist, const TransitionMatrix& t) {
  const int n = t.size();
  std::vector<double> out(n, 0.0);
  for (int from = 0; from < n; ++from) {
    const double mass = dist[from];
    if (mass == 0.0) continue;
    for (int to = 0; to < n; ++to) out[to] += mass * t(from, to);
  }
  return out;
}

/// L1 norm of D - D*T.
[[nodiscard]] inline double stationarity_residual(const KarmaDistribution& d,
                                                  const TransitionMatrix& t) {
  const auto next = left_multiply(d.values, t);
  double r = 0.0;
  for (int k = 0; k < t.size(); ++k) r += std::abs(next[k] - d[k]);
  return r;
}

struct StationaryResult {
  KarmaDistribution distribution;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct StationaryOptions {
  double tolerance = 1e-11;
  int max_iterations = 200000;
};

/// Power iteration on the lazy chain (I + T) / 2, started from `init`. The
/// lazy chain has the same stationary distributions as T but is aperiodic,
/// so periodic chains converge too. For reducible chains the result is the
/// fixed point reached from `init`.
[[nodiscard]] inline StationaryResult stationary_distribution(
    const TransitionMatrix& t, const KarmaDistribution& init,
    StationaryOptions opts = {}) {
  if (init.size() != t.size()) {
    throw std::invalid_argument("distribution and transition sizes differ");
  }
  StationaryResult result;
  std::vector<double> d = init.values;
  const int n = t.size();
  for (int it = 0; it <= opts.max_iterations; ++it) {
    auto next = left_multiply(d, t);
    double residual = 0.0;
    for (int k = 0; k < n; ++k) residual += std::abs(next[k] - d[k]);
    result.iterations = it;
    result.residual = residual;
    if (residual <= opts.tolerance) {
      result.converged = true;
      break;
    }
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      d[k] = 0.5 * (d[k] + next[k]);
      total += d[k];
    }
    for (double& x : d) x /= total;
  }
  result.distribution = KarmaDistribution(std::move(d));
  return result;
}

/// sup-norm of theta - cbar - alpha * T * theta.
[[nodiscard]] inline double bellman_residual(const ValueFunction& theta,
                                             const StageCost& cbar,
                                             const TransitionMatrix& t,
                                             double alpha) {
  double r = 0.0;
  for (int k = 0; k < t.size(); ++k) {
    double future = 0.0;
    for (int to = 0; to < t.size(); ++to) future += t(k, to) * theta[to];
    r = std::max(r, std::abs(theta[k] - cbar[k] - alpha * future));
  }
  return r;
}

/// Solves theta = cbar + alpha * T * theta as the linear system
/// (I - alpha T) theta = cbar, with one step of iterative refinement.
[[nodiscard]] inline ValueFunction value_function(const StageCost& cbar,
                                                  const TransitionMatrix& t,
                                                  double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(
        "alpha must lie in [0, 1): the discounted cost is not well defined "
        "when alpha = 1");
  }
  const int n = t.size();
  if (cbar.size() != n) {
    throw std::invalid_argument("stage cost and transition sizes differ");
  }
  if (alpha == 0.0) return ValueFunction(cbar.values);

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    b(i) = cbar[i];
    for (int j = 0; j < n; ++j) a(i, j) -= alpha * t(i, j);
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd x = lu.solve(b);
  x += lu.solve(b - a * x);

  ValueFunction theta(n - 1);
  // theta is a discounted sum of non-negative costs; clip rounding noise.
  for (int i = 0; i < n; ++i) theta[i] = std::max(0.0, x(i));
  return theta;
}

}  // namespace karma
