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

#include "postedmech/multidim.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "postedmech/myerson.hpp"

namespace postedmech {

namespace {

struct PriceOption {
  double price;
  double weight;
};

// Realized-price outcomes per service that matter on this profile:
// unaffordable branches merge into "not offered".
std::vector<std::vector<PriceOption>> price_options(
    const std::vector<PriceRule>& rules, const Profile& profile) {
  std::vector<std::vector<PriceOption>> options(rules.size());
  for (std::size_t j = 0; j < rules.size(); ++j) {
    double wanted = 0.0;
    for (const auto& b : price_branches(rules[j])) {
      if (profile[j] >= b.price) {
        options[j].push_back({b.price, b.weight});
        wanted += b.weight;
      }
    }
    if (wanted < 1.0) options[j].push_back({kInf, 1.0 - wanted});
  }
  return options;
}

template <class F>
double average_over_prices(const std::vector<PriceRule>& rules,
                           const Profile& profile, F revenue) {
  auto options = price_options(rules, profile);
  std::vector<std::size_t> branching;
  std::vector<double> realized(rules.size());
  for (std::size_t j = 0; j < rules.size(); ++j) {
    realized[j] = options[j].front().price;
    if (options[j].size() > 2)
      throw std::logic_error("price rule with more than two outcomes");
    if (options[j].size() == 2) branching.push_back(j);
  }
  if (branching.size() > 20)
    throw DeskScaleLimit("desk-scale limit: at most 20 randomized services");
  double total = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << branching.size()); ++mask) {
    double w = 1.0;
    for (std::size_t b = 0; b < branching.size(); ++b) {
      const auto& o = options[branching[b]][(mask >> b) & 1];
      realized[branching[b]] = o.price;
      w *= o.weight;
    }
    if (w > 0.0) total += w * revenue(realized);
  }
  return total;
}

std::vector<double> draw_all(const std::vector<PriceRule>& rules, Rng& rng) {
  std::vector<double> realized(rules.size(), kInf);
  for (std::size_t j = 0; j < rules.size(); ++j)
    if (auto p = draw_price(rules[j], rng)) realized[j] = *p;
  return realized;
}

PriceRule rule_at(const ValueDistribution& d, double q) {
  if (q <= 0.0) return DeterministicPrice{};
  return price_rule_for_probability(d, std::min(q, 1.0));
}

}  // namespace

std::vector<std::vector<std::size_t>> MultiInstance::groups() const {
  std::vector<std::vector<std::size_t>> g(agents);
  for (std::size_t j = 0; j < services(); ++j) g[service_agent[j]].push_back(j);
  return g;
}

void MultiInstance::validate() const {
  if (distributions.size() != services())
    throw std::invalid_argument("one value law per service is required");
  if (feasibility.ground_size() != services())
    throw std::invalid_argument("feasibility must range over the services");
  for (std::size_t a : service_agent)
    if (a >= agents) throw std::invalid_argument("service owner out of range");
}

FeasibilitySystem unit_demand_partition(const MultiInstance& mi) {
  std::vector<std::vector<std::size_t>> parts;
  for (auto& g : mi.groups())
    if (!g.empty()) parts.push_back(std::move(g));
  std::vector<std::size_t> caps(parts.size(), 1);
  return FeasibilitySystem::partition(mi.services(), std::move(parts), std::move(caps));
}

Instance copies_instance(const MultiInstance& mi) {
  mi.validate();
  return Instance(mi.distributions, FeasibilitySystem::intersection(
                                        {mi.feasibility, unit_demand_partition(mi)}));
}

// ---------------------------------------------------------------------------
// Menu OPM

RunResult run_multidim_opm_realized(const MultiInstance& mi, const OpmSpec& spec,
                                    std::span<const std::size_t> arrival,
                                    const Profile& profile,
                                    std::span<const double> realized) {
  const auto groups = mi.groups();
  RunResult out;
  out.served = AgentSet(mi.services());
  out.offers_made = AgentSet(mi.services());
  auto tracker = spec.feasibility.tracker();
  auto unit = unit_demand_partition(mi).tracker();
  std::vector<bool> done(mi.agents, false);
  for (std::size_t a : arrival) {
    std::size_t best = mi.services();
    double best_utility = -kInf;
    for (std::size_t j : groups[a]) {
      if (realized[j] == kInf || !tracker->can_add(j) || !unit->can_add(j)) continue;
      out.offers_made.insert(j);
      if (profile[j] < realized[j]) continue;
      double u = profile[j] - realized[j];
      if (u > best_utility) {
        best = j;
        best_utility = u;
      }
    }
    for (std::size_t j : groups[a])
      if (out.offers_made.contains(j))
        out.acceptance_draws.push_back({j, realized[j], j == best});
    if (best == mi.services()) continue;
    tracker->add(best);
    unit->add(best);
    out.served.insert(best);
    out.revenue += realized[best];
    out.welfare += profile[best];
    done[a] = true;
  }
  for (std::size_t a = 0; a < mi.agents; ++a) {
    if (done[a]) continue;
    for (std::size_t j : groups[a])
      if (realized[j] != kInf && profile[j] >= realized[j] && tracker->can_add(j) &&
          unit->can_add(j))
        throw std::logic_error("menu OPM ended with a non-maximal allocation");
  }
  return out;
}

RunResult run_multidim_opm(const MultiInstance& mi, const OpmSpec& spec,
                           std::span<const std::size_t> arrival,
                           const Profile& profile, Rng& rng) {
  auto realized = draw_all(spec.rules, rng);
  return run_multidim_opm_realized(mi, spec, arrival, profile, realized);
}

double multidim_opm_revenue(const MultiInstance& mi, const OpmSpec& spec,
                            std::span<const std::size_t> arrival,
                            const Profile& profile) {
  return average_over_prices(spec.rules, profile, [&](const std::vector<double>& r) {
    return run_multidim_opm_realized(mi, spec, arrival, profile, r).revenue;
  });
}

double multidim_opm_worst_order_revenue(const MultiInstance& mi,
                                        const OpmSpec& spec) {
  if (mi.agents > 8) throw DeskScaleLimit("desk-scale limit: at most 8 agents");
  Instance copies = copies_instance(mi);
  std::vector<std::size_t> order(mi.agents);
  std::iota(order.begin(), order.end(), 0);
  double worst = kInf;
  do {
    double r = exact_expectation(copies, [&](const Profile& p) {
      return multidim_opm_revenue(mi, spec, order, p);
    });
    worst = std::min(worst, r);
  } while (std::next_permutation(order.begin(), order.end()));
  return worst;
}

// ---------------------------------------------------------------------------
// Undominated-strategy SPM

RunResult run_multidim_spm_realized(const MultiInstance& mi, const SpmSpec& spec,
                                    const AgentStrategy& strategy,
                                    const Profile& profile,
                                    std::span<const double> realized) {
  const auto groups = mi.groups();
  std::vector<std::size_t> position(mi.services());
  for (std::size_t t = 0; t < spec.ordering.size(); ++t) position[spec.ordering[t]] = t;
  RunResult out;
  out.served = AgentSet(mi.services());
  out.offers_made = AgentSet(mi.services());
  auto tracker = spec.feasibility.tracker();
  std::vector<bool> done(mi.agents, false);
  auto desires = [&](std::size_t j) {
    return realized[j] != kInf && profile[j] >= realized[j];
  };
  for (std::size_t j : spec.ordering) {
    std::size_t a = mi.service_agent[j];
    if (done[a] || realized[j] == kInf || !tracker->can_add(j)) continue;
    out.offers_made.insert(j);
    if (!desires(j)) {
      out.acceptance_draws.push_back({j, realized[j], false});
      continue;
    }
    OfferContext ctx{a, j, realized[j], profile[j], 0, 0};
    for (std::size_t k : groups[a]) {
      if (!desires(k)) continue;
      ++ctx.desired_count;
      if (k != j && position[k] > position[j] && tracker->can_add(k)) ++ctx.remaining_later;
    }
    bool accepted = strategy.accept(ctx);
    if (!accepted && ctx.desired_count == 1)
      throw std::logic_error("strategy " + strategy.name() +
                             " declined the only service the agent desires");
    out.acceptance_draws.push_back({j, realized[j], accepted});
    if (!accepted) continue;
    tracker->add(j);
    out.served.insert(j);
    out.revenue += realized[j];
    out.welfare += profile[j];
    done[a] = true;
  }
  return out;
}

RunResult run_multidim_spm_undominated(const MultiInstance& mi,
                                       const SpmSpec& spec,
                                       const AgentStrategy& strategy,
                                       const Profile& profile, Rng& rng) {
  auto realized = draw_all(spec.rules, rng);
  return run_multidim_spm_realized(mi, spec, strategy, profile, realized);
}

double multidim_spm_revenue(const MultiInstance& mi, const SpmSpec& spec,
                            const AgentStrategy& strategy, const Profile& profile) {
  return average_over_prices(spec.rules, profile, [&](const std::vector<double>& r) {
    return run_multidim_spm_realized(mi, spec, strategy, profile, r).revenue;
  });
}

double multidim_spm_exact_revenue(const MultiInstance& mi, const SpmSpec& spec,
                                  const AgentStrategy& strategy) {
  return exact_expectation(copies_instance(mi), [&](const Profile& p) {
    return multidim_spm_revenue(mi, spec, strategy, p);
  });
}

SpmSpec build_multidim_spm(const MultiInstance& mi,
                           const AllocationStats& copies_stats) {
  std::vector<double> half(copies_stats.q_hat);
  for (double& q : half) q /= 2.0;
  return build_spm(copies_instance(mi), std::span<const double>(half));
}

GraphicalUnitDemandOpm build_multidim_graphical_opm(
    const MultiInstance& mi, const AllocationStats& copies_stats) {
  const auto* g = std::get_if<GraphicMatroid>(&mi.feasibility.kind());
  if (!g) throw std::invalid_argument("graphical menu OPM needs graphic feasibility");
  const auto& q = copies_stats.q_hat;
  if (q.size() != mi.services())
    throw std::invalid_argument("allocation probabilities do not match the services");
  GraphicalUnitDemandOpm out;
  out.parts = graph_cut_partition(*g, q);
  std::vector<bool> in_part(mi.services(), false);
  for (const auto& part : out.parts)
    for (std::size_t j : part) in_part[j] = true;
  out.spec.target_probs = q;
  out.spec.restricted = true;
  for (std::size_t j = 0; j < mi.services(); ++j)
    out.spec.rules.push_back(in_part[j] ? rule_at(mi.distributions[j], q[j] / 4.0)
                                        : PriceRule{DeterministicPrice{}});
  std::vector<std::size_t> caps(out.parts.size(), 1);
  out.spec.feasibility = FeasibilitySystem::intersection(
      {FeasibilitySystem::partition(mi.services(), out.parts, caps),
       unit_demand_partition(mi)});
  return out;
}

}  // namespace postedmech
