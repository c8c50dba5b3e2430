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
#include <span>
#include <vector>

#include "postedmech/engine.hpp"
#include "postedmech/instance.hpp"
#include "postedmech/price_rule.hpp"
#include "postedmech/prophet.hpp"

namespace postedmech {

// Rules from price_rule_for_probability, ordered by non-increasing effective
// price with ties by index. Agents with q_i = 0 are never offered.
SpmSpec build_spm(const Instance& inst, const AllocationStats& stats);
SpmSpec build_spm(const Instance& inst, std::span<const double> q);
// Same construction; the m+1 bound is checked at evaluation time.
SpmSpec build_spm_intersection(const Instance& inst, const AllocationStats& stats);

// Sum over agents of hull_i(q_i): the revenue bound sum p_i q_i.
double myerson_upper_bound(const Instance& inst, std::span<const double> q);
double sum_price_probability(const SpmSpec& spec, const Instance& inst);

struct UniformOpm {
  OpmSpec spec;
  std::vector<std::vector<std::size_t>> parts;
  std::vector<ProphetThreshold> thresholds;  // one per part
};
// Prophet threshold over the laws of the positive ironed virtual values, per
// part; price_i = inf{v : ironed phi_i(v) >= c}.
UniformOpm build_opm_uniform(const Instance& inst, const AllocationStats& stats);

// Offer probabilities and worst-order revenue of a candidate OPM.
struct OpmEstimator {
  std::function<std::vector<double>(const OpmSpec&, const Instance&)> offer_probs;
  std::function<double(const OpmSpec&, const Instance&)> revenue;
};
OpmEstimator exact_opm_estimator();
OpmEstimator monte_carlo_opm_estimator(std::size_t samples, std::uint64_t seed);

struct LogKOpm {
  std::vector<OpmSpec> groups;
  std::vector<std::vector<std::size_t>> members;
  std::vector<double> group_revenue;
  std::size_t best = 0;
};
LogKOpm build_opm_log_k(const Instance& inst, const AllocationStats& stats,
                        const OpmEstimator& estimator);

// Repeatedly strips the edges at the lowest-index vertex whose remaining
// incident mass is at most 2 (the lightest vertex if none). Self-loops are
// left out of every part.
std::vector<std::vector<std::size_t>> graph_cut_partition(
    const GraphicMatroid& g, std::span<const double> q);

struct GraphicalOpm {
  OpmSpec spec;
  std::vector<std::vector<std::size_t>> parts;
  std::vector<double> thresholds;  // one per part
};
GraphicalOpm build_opm_graphical(const Instance& inst, const AllocationStats& stats);

// Rules at q_i / 3 on the instance's own feasibility.
OpmSpec build_opm_partition_intersection(const Instance& inst,
                                         const AllocationStats& stats);

// The SPM's prices; deterministic rules only.
std::vector<double> vcg_reserves_from_spm(const SpmSpec& spec);

struct VcgChoice {
  std::vector<double> reserves;
  double revenue = 0.0;
};
// Resolves each lottery to one of its prices and keeps the reserve vector
// with the highest exact revenue; at most 12 lottery agents.
VcgChoice best_vcg_reserves(const SpmSpec& spec, const Instance& inst);

struct IidSpm {
  std::vector<double> prices;  // in offer order
  double revenue = 0.0;
};
// Revenue-optimal single-item SPM for n iid agents by backward induction.
IidSpm optimal_iid_spm(const ValueDistribution& d, std::size_t n);

}  // namespace postedmech
