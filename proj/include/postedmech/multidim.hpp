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
#include <span>
#include <string>
#include <vector>

#include "postedmech/constructions.hpp"
#include "postedmech/engine.hpp"
#include "postedmech/instance.hpp"

namespace postedmech {

// Unit-demand agents over services; service j belongs to agent
// service_agent[j] and has value law distributions[j].
struct MultiInstance {
  std::size_t agents = 0;
  std::vector<std::size_t> service_agent;
  std::vector<ValueDistribution> distributions;
  FeasibilitySystem feasibility;  // over services

  std::size_t services() const { return service_agent.size(); }
  std::vector<std::vector<std::size_t>> groups() const;
  void validate() const;
};

// One single-parameter agent per service; feasibility is the services'
// system intersected with the unit-demand partition (capacity 1 per agent).
Instance copies_instance(const MultiInstance& mi);
FeasibilitySystem unit_demand_partition(const MultiInstance& mi);

// Agents arrive in `arrival`; each sees the still-feasible services of its
// group at their realized prices and takes the one with the largest
// nonnegative utility (ties by lowest service index), or none.
RunResult run_multidim_opm(const MultiInstance& mi, const OpmSpec& spec,
                           std::span<const std::size_t> arrival,
                           const Profile& profile, Rng& rng);
// Same run for fixed realized prices (kInf = not offered).
RunResult run_multidim_opm_realized(const MultiInstance& mi, const OpmSpec& spec,
                                    std::span<const std::size_t> arrival,
                                    const Profile& profile,
                                    std::span<const double> realized);
// Expected revenue on a profile, averaged over coins and lotteries.
double multidim_opm_revenue(const MultiInstance& mi, const OpmSpec& spec,
                            std::span<const std::size_t> arrival,
                            const Profile& profile);
// Least exact expected revenue over all agent arrival orders.
double multidim_opm_worst_order_revenue(const MultiInstance& mi,
                                        const OpmSpec& spec);

struct OfferContext {
  std::size_t agent = 0;
  std::size_t service = 0;
  double price = 0.0;
  double value = 0.0;
  std::size_t desired_count = 0;   // services of this agent it would buy
  std::size_t remaining_later = 0;  // desired, later in the order, still feasible
};

class AgentStrategy {
 public:
  virtual ~AgentStrategy() = default;
  virtual std::string name() const = 0;
  // Called only for offers the agent can afford.
  virtual bool accept(const OfferContext& ctx) const = 0;
};

class MyopicStrategy : public AgentStrategy {
 public:
  std::string name() const override { return "myopic"; }
  bool accept(const OfferContext&) const override { return true; }
};

// Holds out for a later desired service while one is still available.
class GreedyWaitStrategy : public AgentStrategy {
 public:
  std::string name() const override { return "greedy_wait"; }
  bool accept(const OfferContext& ctx) const override {
    return ctx.desired_count == 1 || ctx.remaining_later == 0;
  }
};

// Services offered in spec.ordering; an agent already served is skipped.
// Throws std::logic_error when the strategy declines the only service the
// agent desires.
RunResult run_multidim_spm_undominated(const MultiInstance& mi,
                                       const SpmSpec& spec,
                                       const AgentStrategy& strategy,
                                       const Profile& profile, Rng& rng);
RunResult run_multidim_spm_realized(const MultiInstance& mi, const SpmSpec& spec,
                                    const AgentStrategy& strategy,
                                    const Profile& profile,
                                    std::span<const double> realized);
double multidim_spm_revenue(const MultiInstance& mi, const SpmSpec& spec,
                            const AgentStrategy& strategy, const Profile& profile);
double multidim_spm_exact_revenue(const MultiInstance& mi, const SpmSpec& spec,
                                  const AgentStrategy& strategy);

// SPM on the copies at half the Myerson probabilities.
SpmSpec build_multidim_spm(const MultiInstance& mi, const AllocationStats& copies_stats);

// Graphic matroid over services with unit demand: cut partition of the
// copies, prices at q/4, restricted to one service per part and per agent.
struct GraphicalUnitDemandOpm {
  OpmSpec spec;
  std::vector<std::vector<std::size_t>> parts;
};
GraphicalUnitDemandOpm build_multidim_graphical_opm(const MultiInstance& mi,
                                                    const AllocationStats& copies_stats);

}  // namespace postedmech
