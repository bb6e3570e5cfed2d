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

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "karma/game.hpp"

namespace karma {

/// Dense table indexed by agent type (urgency index, karma) and message.
/// Messages range over 0..k_max for every karma level. The tag keeps
/// policies and utility tables from being mixed up.
template <class Tag>
class TypeTensor {
 public:
  TypeTensor() = default;
  TypeTensor(int num_urgency, int k_max, double fill = 0.0)
      : num_urgency_(num_urgency),
        num_karma_(k_max + 1),
        data_(static_cast<std::size_t>(num_urgency) * (k_max + 1) * (k_max + 1),
              fill) {}

  [[nodiscard]] int num_urgency() const { return num_urgency_; }
  [[nodiscard]] int num_karma() const { return num_karma_; }
  [[nodiscard]] int k_max() const { return num_karma_ - 1; }

  double& operator()(int u, int k, int m) { return data_[index(u, k, m)]; }
  double operator()(int u, int k, int m) const { return data_[index(u, k, m)]; }

  /// Distribution (or utility) over messages for one type.
  [[nodiscard]] std::span<double> row(int u, int k) {
    return {data_.data() + index(u, k, 0), static_cast<std::size_t>(num_karma_)};
  }
  [[nodiscard]] std::span<const double> row(int u, int k) const {
    return {data_.data() + index(u, k, 0), static_cast<std::size_t>(num_karma_)};
  }

  [[nodiscard]] const std::vector<double>& data() const { return data_; }
  [[nodiscard]] std::vector<double>& data() { return data_; }

  [[nodiscard]] bool same_shape(const TypeTensor& o) const {
    return num_urgency_ == o.num_urgency_ && num_karma_ == o.num_karma_;
  }
  [[nodiscard]] bool matches(const GameSpec& spec) const {
    return num_urgency_ == spec.num_urgency() && num_karma_ == spec.num_karma();
  }

  friend bool operator==(const TypeTensor&, const TypeTensor&) = default;

 private:
  [[nodiscard]] std::size_t index(int u, int k, int m) const {
    return (static_cast<std::size_t>(u) * num_karma_ + k) * num_karma_ + m;
  }

  int num_urgency_ = 0;
  int num_karma_ = 0;
  std::vector<double> data_;
};

/// Vector indexed by karma level.
template <class Tag>
struct KarmaVector {
  std::vector<double> values;

  KarmaVector() = default;
  explicit KarmaVector(std::vector<double> v) : values(std::move(v)) {}
  explicit KarmaVector(int k_max, double fill = 0.0)
      : values(static_cast<std::size_t>(k_max + 1), fill) {}

  [[nodiscard]] int size() const { return static_cast<int>(values.size()); }
  double& operator[](int k) { return values[k]; }
  double operator[](int k) const { return values[k]; }

  friend bool operator==(const KarmaVector&, const KarmaVector&) = default;
};

struct PolicyTag;
struct UtilityTag;
struct DistributionTag;
struct ValueTag;
struct StageCostTag;

/// Message probabilities per (urgency, karma) type.
using Policy = TypeTensor<PolicyTag>;
/// Expected discounted cost of sending each message, per type.
using ExpectedUtility = TypeTensor<UtilityTag>;
/// Population distribution of karma.
using KarmaDistribution = KarmaVector<DistributionTag>;
/// Expected discounted cost of holding each karma level.
using ValueFunction = KarmaVector<ValueTag>;
/// Expected cost of one interaction per karma level.
using StageCost = KarmaVector<StageCostTag>;

/// Row-stochastic karma-to-karma matrix for one interaction.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(int k_max)
      : n_(k_max + 1), data_(static_cast<std::size_t>(n_) * n_, 0.0) {}

  static TransitionMatrix identity(int k_max) {
    TransitionMatrix t(k_max);
    for (int k = 0; k < t.n_; ++k) t(k, k) = 1.0;
    return t;
  }

  [[nodiscard]] int size() const { return n_; }
  double& operator()(int from, int to) { return data_[from * n_ + to]; }
  double operator()(int from, int to) const { return data_[from * n_ + to]; }
  [[nodiscard]] std::span<const double> row(int from) const {
    return {data_.data() + from * n_, static_cast<std::size_t>(n_)};
  }

  friend bool operator==(const TransitionMatrix&,
                         const TransitionMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<double> data_;
};

/// Uniform distribution over the legal messages 0..k for every type.
[[nodiscard]] inline Policy uniform_policy(const GameSpec& spec) {
  Policy p(spec.num_urgency(), spec.k_max);
  for (int u = 0; u < spec.num_urgency(); ++u) {
    for (int k = 0; k <= spec.k_max; ++k) {
      for (int m = 0; m <= k; ++m) p(u, k, m) = 1.0 / (k + 1);
    }
  }
  return p;
}

/// Policy placing all mass on `bid(u, k)` for each type.
template <class BidFn>
[[nodiscard]] Policy deterministic_policy(const GameSpec& spec, BidFn&& bid) {
  Policy p(spec.num_urgency(), spec.k_max);
  for (int u = 0; u < spec.num_urgency(); ++u) {
    for (int k = 0; k <= spec.k_max; ++k) {
      const int m = bid(u, k);
      if (m < 0 || m > k) throw std::invalid_argument("bid outside 0..k");
      p(u, k, m) = 1.0;
    }
  }
  return p;
}

[[nodiscard]] inline KarmaDistribution uniform_distribution(int k_max) {
  return KarmaDistribution(k_max, 1.0 / (k_max + 1));
}

[[nodiscard]] inline KarmaDistribution point_mass(int k_max, int k) {
  KarmaDistribution d(k_max, 0.0);
  d[k] = 1.0;
  return d;
}

/// Throws unless every type row is a probability vector supported on 0..k.
inline void check_policy(const Policy& p, double tol = 1e-9) {
  for (int u = 0; u < p.num_urgency(); ++u) {
    for (int k = 0; k < p.num_karma(); ++k) {
      double total = 0.0;
      for (int m = 0; m < p.num_karma(); ++m) {
        const double x = p(u, k, m);
        if (!(x >= 0.0)) throw std::invalid_argument("negative policy entry");
        if (m > k && x != 0.0) {
          throw std::invalid_argument("policy bids more than held karma at k=" +
                                      std::to_string(k));
        }
        total += x;
      }
      if (std::abs(total - 1.0) > tol) {
        throw std::invalid_argument("policy row does not sum to 1");
      }
    }
  }
}

inline void check_distribution(const KarmaDistribution& d, double tol = 1e-9) {
  double total = 0.0;
  for (double x : d.values) {
    if (!(x >= 0.0)) throw std::invalid_argument("negative karma mass");
    total += x;
  }
  if (std::abs(total - 1.0) > tol) {
    throw std::invalid_argument("karma distribution does not sum to 1");
  }
}

inline void check_transition(const TransitionMatrix& t, double tol = 1e-9) {
  for (int k = 0; k < t.size(); ++k) {
    double total = 0.0;
    for (double x : t.row(k)) {
      if (!(x >= 0.0)) throw std::invalid_argument("negative transition entry");
      total += x;
    }
    if (std::abs(total - 1.0) > tol) {
      throw std::invalid_argument("transition row does not sum to 1");
    }
  }
}

/// Expected message sent by each karma level, conditional on urgency index u.
[[nodiscard]] inline std::vector<double> expected_bid(const Policy& p, int u) {
  std::vector<double> out(p.num_karma(), 0.0);
  for (int k = 0; k < p.num_karma(); ++k) {
    for (int m = 0; m <= k; ++m) out[k] += m * p(u, k, m);
  }
  return out;
}

}  // namespace karma
