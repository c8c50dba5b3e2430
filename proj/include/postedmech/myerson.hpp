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
#include <optional>
#include <span>
#include <vector>

#include "postedmech/instance.hpp"
#include "postedmech/monte_carlo.hpp"

namespace postedmech {

inline constexpr std::size_t kDefaultSampleCap = 1'000'000;

// Ironed virtual values of a profile.
std::vector<double> ironed_weights(const Instance& inst, const Profile& profile);
AgentSet myerson_allocation(const Instance& inst, const Profile& profile);
MechanismOutcome run_myerson(const Instance& inst, const Profile& profile);
// Sum of positive ironed virtual values over the served set.
double ironed_virtual_surplus(const Instance& inst, const Profile& profile);

// Sum over all profiles of Pr[profile] * f(profile); discrete laws only.
double exact_expectation(const Instance& inst,
                         const std::function<double(const Profile&)>& f);
double exact_myerson_revenue(const Instance& inst);
double exact_expected_virtual_surplus(const Instance& inst);
Evaluation monte_carlo_myerson_revenue(const Instance& inst, std::size_t samples,
                                       std::uint64_t seed);

// Serving probabilities by full enumeration.
AllocationStats exact_allocation_probabilities(const Instance& inst);

// ceil(4 n^4 ln n / eps^2) with eps = 1/(3n), saturating.
std::size_t sampling_sample_count(std::size_t n);

// Serving frequencies over sampled profiles. With `adjust`, frequencies
// below 1/n^2 are raised to 1/n^2 and the rest divided by (1 - 1/(3n)),
// capped at 1. Without a sample count, uses the formula above capped at
// kDefaultSampleCap.
AllocationStats estimate_allocation_probabilities(
    const Instance& inst, std::optional<std::size_t> num_samples,
    std::uint64_t seed, bool adjust = true);

}  // namespace postedmech
