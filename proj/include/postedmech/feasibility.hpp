// Copyright 2026 The postedmech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "postedmech/agent_set.hpp"

namespace postedmech {

// Raised when an exhaustive routine is asked to work above its size cap.
class DeskScaleLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kExhaustiveLimit = 24;

class FeasibilitySystem;

struct UniformMatroid {
  std::size_t n = 0;
  std::size_t k = 0;
};
// Agents not listed in any part are unconstrained.
struct PartitionMatroid {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> parts;
  std::vector<std::size_t> caps;
};
// Agent i is edge i.
struct GraphicMatroid {
  std::size_t vertices = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};
struct IntersectionSystem {
  std::vector<FeasibilitySystem> members;
};
struct BundleSystem {
  std::vector<std::pair<std::string, std::size_t>> supplies;
  std::vector<std::vector<std::string>> bundles;  // one per agent
};
struct ExplicitSystem {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> maximal_sets;
};

// Incremental independence check along a growing set.
class IndependenceTracker {
 public:
  virtual ~IndependenceTracker() = default;
  virtual bool can_add(std::size_t i) const = 0;
  virtual void add(std::size_t i) = 0;
};

struct CriticalWeight {
  double threshold = 0.0;
  bool tie_wins = false;  // selected at exactly `threshold`
  bool selected_at(double w) const {
    return w > threshold || (w == threshold && tie_wins);
  }
};

class FeasibilitySystem {
 public:
  using Kind = std::variant<UniformMatroid, PartitionMatroid, GraphicMatroid,
                            IntersectionSystem, BundleSystem, ExplicitSystem>;

  FeasibilitySystem() = default;
  static FeasibilitySystem uniform(std::size_t n, std::size_t k);
  static FeasibilitySystem partition(std::size_t n,
                                     std::vector<std::vector<std::size_t>> parts,
                                     std::vector<std::size_t> caps);
  static FeasibilitySystem graphic(
      std::size_t vertices,
      std::vector<std::pair<std::size_t, std::size_t>> edges);
  static FeasibilitySystem intersection(std::vector<FeasibilitySystem> members);
  static FeasibilitySystem bundle(
      std::vector<std::pair<std::string, std::size_t>> supplies,
      std::vector<std::vector<std::string>> bundles);
  static FeasibilitySystem explicit_sets(
      std::size_t n, std::vector<std::vector<std::size_t>> maximal_sets);

  const Kind& kind() const;
  std::size_t ground_size() const;
  bool is_matroid() const;
  std::string kind_name() const;

  bool is_feasible(const AgentSet& s) const;
  std::size_t rank(const AgentSet& s) const;
  AgentSet span(const AgentSet& s) const;
  AgentSet max_weight_feasible(std::span<const double> weights) const;
  // Largest feasible set size (the k of the analysis).
  std::size_t max_feasible_size() const;
  std::unique_ptr<IndependenceTracker> tracker() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  void require_matroid(const char* op) const;
};

// Ascending price, ties by agent index.
std::vector<std::size_t> worst_order_increasing_price(
    const FeasibilitySystem& sys, std::span<const double> prices);

// Greedy threshold for element i on a matroid, other weights fixed.
CriticalWeight matroid_critical_weight(const FeasibilitySystem& sys,
                                       std::span<const double> weights,
                                       std::size_t i);

// All maximal feasible subsets of `within` (brute force, |within| <= 24;
// Explicit systems use their maximal-set list directly).
std::vector<AgentSet> maximal_feasible_subsets(const FeasibilitySystem& sys,
                                               const AgentSet& within);

}  // namespace postedmech
