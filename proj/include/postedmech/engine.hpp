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
#include <span>
#include <variant>
#include <vector>

#include "postedmech/instance.hpp"
#include "postedmech/monte_carlo.hpp"
#include "postedmech/price_rule.hpp"

namespace postedmech {

struct AcceptanceDraw {
  std::size_t agent = 0;
  double price = 0.0;
  bool accepted = false;
};

struct RunResult {
  AgentSet served;
  double revenue = 0.0;
  double welfare = 0.0;
  AgentSet offers_made;
  std::vector<AcceptanceDraw> acceptance_draws;
};

// One execution of the sequential posted-price loop.
RunResult run_spm(const SpmSpec& spec, const Profile& profile, Rng& rng);

struct SpmAnalysis {
  double revenue = 0.0;
  double welfare = 0.0;
  // Probability that the agent is still feasible when its turn comes.
  std::vector<double> offer_probs;
};

// Exact analysis by a forward pass over (position, served set); works for
// any value laws since only Pr[V >= p] and E[V; V >= p] enter.
SpmAnalysis analyze_spm(const SpmSpec& spec, const Instance& inst);
// Expected SPM revenue on a fixed profile, averaging coins and lotteries.
double spm_revenue_on_profile(const SpmSpec& spec, const Profile& profile);

// The OPM's rules run as an SPM in a fixed arrival order.
SpmSpec opm_in_order(const OpmSpec& spec, std::vector<std::size_t> order);

// Least revenue over maximal feasible subsets of the desired set, given the
// realized price per agent (kInf for agents not offered).
double opm_pessimistic_realized(const OpmSpec& spec, const Profile& profile,
                                std::span<const double> realized);
// As above, averaged over offer coins and lottery draws.
double opm_pessimistic_revenue(const OpmSpec& spec, const Profile& profile);
double opm_pessimistic_sampled(const OpmSpec& spec, const Profile& profile,
                               Rng& rng);
// Expected pessimistic revenue over the value laws.
double opm_exact_pessimistic_revenue(const OpmSpec& spec, const Instance& inst);

// Per agent, the least (over its own price branches) probability of being
// feasible when its turn comes, with agents arriving in increasing realized
// price. Matroid feasibility only. Dropped agents get 0.
std::vector<double> opm_offer_probabilities_exact(const OpmSpec& spec,
                                                  const Instance& inst);
std::vector<double> opm_offer_probabilities_mc(const OpmSpec& spec,
                                               const Instance& inst,
                                               std::size_t samples,
                                               std::uint64_t seed);

struct MyersonMechanism {};
struct VcgSpec {
  std::vector<double> reserves;
};
using Mechanism = std::variant<MyersonMechanism, SpmSpec, OpmSpec, VcgSpec>;

struct EvalMode {
  bool exact = true;
  std::size_t samples = 100'000;
  std::uint64_t seed = 1;
  static EvalMode exact_mode() { return {}; }
  static EvalMode monte_carlo(std::size_t samples, std::uint64_t seed) {
    return {false, samples, seed};
  }
};

Evaluation evaluate(const Mechanism& mech, const Instance& inst,
                    const EvalMode& mode);

}  // namespace postedmech
