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
#include <cstdint>
#include <functional>
#include <vector>

#include "postedmech/agent_set.hpp"
#include "postedmech/distribution.hpp"
#include "postedmech/feasibility.hpp"
#include "postedmech/rng.hpp"

namespace postedmech {

inline constexpr std::size_t kExactProfileLimit = 1'000'000;

struct Instance {
  std::vector<ValueDistribution> distributions;
  FeasibilitySystem feasibility;

  Instance() = default;
  Instance(std::vector<ValueDistribution> d, FeasibilitySystem f);
  std::size_t n() const { return distributions.size(); }
  bool all_discrete() const;
};

using Profile = std::vector<double>;

struct MechanismOutcome {
  AgentSet served;
  std::vector<double> payments;
  double revenue() const;
};

struct AllocationStats {
  std::vector<double> q_hat;
  std::vector<double> q_raw;  // plain serving frequencies before adjustment
  std::vector<bool> q_floor_applied;
  std::size_t num_samples = 0;
  std::size_t requested_samples = 0;
  std::uint64_t seed = 0;
  bool exact = false;
};

Profile sample_profile(const Instance& inst, Rng& rng);

// Product of support sizes, saturating at SIZE_MAX; requires discrete laws.
std::size_t product_support_size(const Instance& inst);

// Visits every profile of a discrete instance with its probability.
void for_each_profile(const Instance& inst,
                      const std::function<void(const Profile&, double)>& visit,
                      std::size_t limit = kExactProfileLimit);

}  // namespace postedmech
