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

#include "postedmech/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "postedmech/myerson.hpp"
#include "postedmech/vcg.hpp"

namespace postedmech {

namespace {

constexpr std::size_t kMaxBranchAgents = 16;

struct StepLaw {
  double accept = 0.0;  // probability the agent takes the offer
  double pay = 0.0;     // expected payment from one offer
  double welfare = 0.0;
};

// Distribution over served sets along `order`; returns expected revenue.
double forward_pass(const FeasibilitySystem& sys,
                    const std::vector<std::size_t>& order,
                    const std::vector<StepLaw>& law,
                    std::vector<double>* offer_probs, double* welfare) {
  const std::size_t n = sys.ground_size();
  using Dist = std::unordered_map<AgentSet, double, AgentSetHash>;
  Dist cur;
  cur.emplace(AgentSet(n), 1.0);
  double revenue = 0.0;
  double wel = 0.0;
  if (offer_probs) offer_probs->assign(n, 0.0);
  for (std::size_t i : order) {
    const StepLaw& s = law[i];
    Dist next;
    next.reserve(cur.size() * 2);
    for (const auto& [set, pr] : cur) {
      AgentSet grown = set.with(i);
      if (sys.is_feasible(grown)) {
        if (offer_probs) (*offer_probs)[i] += pr;
        revenue += pr * s.pay;
        wel += pr * s.welfare;
        if (s.accept > 0.0) next[grown] += pr * s.accept;
        if (s.accept < 1.0) next[set] += pr * (1.0 - s.accept);
      } else {
        next[set] += pr;
      }
    }
    cur.swap(next);
  }
  if (welfare) *welfare = wel;
  return revenue;
}

std::vector<std::size_t> finite_price_order(std::span<const double> prices) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < prices.size(); ++i)
    if (prices[i] != kInf) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return prices[a] < prices[b];
  });
  return order;
}

struct LotteryCombo {
  std::vector<double> realized;       // price per agent, kInf when dropped
  std::vector<std::size_t> branch;    // branch index per agent
  std::vector<double> branch_weight;  // weight of that branch
  double weight = 1.0;
};

// Enumerates every joint draw of the lottery agents; deterministic rules keep
// their price (offer coins are folded into acceptance by the caller).
template <class Visit>
void for_each_lottery_combo(const OpmSpec& spec, Visit visit) {
  const std::size_t n = spec.n();
  std::vector<std::size_t> lottery;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_deterministic(spec.rules[i])) lottery.push_back(i);
  if (lottery.size() > kMaxBranchAgents)
    throw DeskScaleLimit("desk-scale limit: at most 16 lottery agents");
  LotteryCombo combo;
  combo.realized.assign(n, kInf);
  combo.branch.assign(n, 0);
  combo.branch_weight.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    if (auto* d = std::get_if<DeterministicPrice>(&spec.rules[i]))
      combo.realized[i] = d->offer_prob > 0.0 ? d->price : kInf;
  const std::size_t total = std::size_t{1} << lottery.size();
  for (std::size_t mask = 0; mask < total; ++mask) {
    combo.weight = 1.0;
    for (std::size_t b = 0; b < lottery.size(); ++b) {
      std::size_t i = lottery[b];
      const auto& t = std::get<LotteryPrice>(spec.rules[i]).split;
      bool high = (mask >> b) & 1;
      combo.branch[i] = high ? 1 : 0;
      combo.branch_weight[i] = high ? 1.0 - t.x : t.x;
      combo.realized[i] = high ? t.p_hi : t.p_lo;
      combo.weight *= combo.branch_weight[i];
    }
    if (combo.weight > 0.0) visit(combo);
  }
}

// Probability that agent i wants its realized price (offer coin included).
double desire_probability(const OpmSpec& spec, const Instance& inst,
                          const LotteryCombo& combo, std::size_t i) {
  double p = combo.realized[i];
  if (p == kInf) return 0.0;
  double s = inst.distributions[i].survival(p);
  if (auto* d = std::get_if<DeterministicPrice>(&spec.rules[i]))
    s *= d->offer_prob;
  return s;
}

double min_over_maximal(const FeasibilitySystem& sys, const AgentSet& desired,
                        std::span<const double> realized) {
  double best = kInf;
  for (const auto& s : maximal_feasible_subsets(sys, desired)) {
    double r = 0.0;
    for (std::size_t i : s.members()) r += realized[i];
    best = std::min(best, r);
  }
  return best == kInf ? 0.0 : best;
}

double greedy_increasing(const FeasibilitySystem& sys, const AgentSet& desired,
                         std::span<const double> realized) {
  auto members = desired.members();
  std::stable_sort(members.begin(), members.end(),
                   [&](std::size_t a, std::size_t b) {
                     return realized[a] < realized[b];
                   });
  auto t = sys.tracker();
  double r = 0.0;
  for (std::size_t i : members) {
    if (t->can_add(i)) {
      t->add(i);
      r += realized[i];
    }
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// SPM

RunResult run_spm(const SpmSpec& spec, const Profile& profile, Rng& rng) {
  const std::size_t n = spec.n();
  RunResult out;
  out.served = AgentSet(n);
  out.offers_made = AgentSet(n);
  auto tracker = spec.feasibility.tracker();
  for (std::size_t i : spec.ordering) {
    if (!tracker->can_add(i)) continue;
    auto price = draw_price(spec.rules[i], rng);
    if (!price) continue;
    out.offers_made.insert(i);
    bool accepted = profile[i] >= *price;
    out.acceptance_draws.push_back({i, *price, accepted});
    if (accepted) {
      tracker->add(i);
      out.served.insert(i);
      out.revenue += *price;
      out.welfare += profile[i];
    }
  }
  return out;
}

SpmAnalysis analyze_spm(const SpmSpec& spec, const Instance& inst) {
  std::vector<StepLaw> law(spec.n());
  for (std::size_t i = 0; i < spec.n(); ++i) {
    const auto& d = inst.distributions[i];
    for (const auto& b : price_branches(spec.rules[i])) {
      double s = d.survival(b.price);
      law[i].accept += b.weight * s;
      law[i].pay += b.weight * b.price * s;
      law[i].welfare += b.weight * d.partial_mean(b.price);
    }
    law[i].accept = std::min(law[i].accept, 1.0);
  }
  SpmAnalysis a;
  a.revenue = forward_pass(spec.feasibility, spec.ordering, law, &a.offer_probs,
                           &a.welfare);
  return a;
}

double spm_revenue_on_profile(const SpmSpec& spec, const Profile& profile) {
  std::vector<StepLaw> law(spec.n());
  for (std::size_t i = 0; i < spec.n(); ++i) {
    for (const auto& b : price_branches(spec.rules[i])) {
      if (profile[i] < b.price) continue;
      law[i].accept += b.weight;
      law[i].pay += b.weight * b.price;
      law[i].welfare += b.weight * profile[i];
    }
    law[i].accept = std::min(law[i].accept, 1.0);
  }
  return forward_pass(spec.feasibility, spec.ordering, law, nullptr, nullptr);
}

SpmSpec opm_in_order(const OpmSpec& spec, std::vector<std::size_t> order) {
  SpmSpec s;
  s.rules = spec.rules;
  s.ordering = std::move(order);
  s.feasibility = spec.feasibility;
  s.target_probs = spec.target_probs;
  return s;
}

// ---------------------------------------------------------------------------
// OPM

double opm_pessimistic_realized(const OpmSpec& spec, const Profile& profile,
                                std::span<const double> realized) {
  const std::size_t n = spec.n();
  AgentSet desired(n);
  for (std::size_t i = 0; i < n; ++i)
    if (realized[i] != kInf && profile[i] >= realized[i]) desired.insert(i);
  if (desired.empty()) return 0.0;
  const FeasibilitySystem& sys = spec.feasibility;
  if (!sys.is_matroid()) return min_over_maximal(sys, desired, realized);
  double greedy = greedy_increasing(sys, desired, realized);
  if (desired.size() <= 8) {
    double brute = min_over_maximal(sys, desired, realized);
    if (std::abs(brute - greedy) > 1e-9 * std::max(1.0, std::abs(brute)))
      throw std::logic_error("increasing-price greedy disagrees with the "
                             "brute-force pessimistic revenue");
  }
  return greedy;
}

double opm_pessimistic_revenue(const OpmSpec& spec, const Profile& profile) {
  const std::size_t n = spec.n();
  struct Outcome {
    double price;
    double weight;
  };
  std::vector<std::vector<Outcome>> options(n);
  std::vector<std::size_t> branching;
  for (std::size_t i = 0; i < n; ++i) {
    double wanted = 0.0;
    for (const auto& b : price_branches(spec.rules[i])) {
      if (profile[i] >= b.price) {
        options[i].push_back({b.price, b.weight});
        wanted += b.weight;
      }
    }
    if (wanted < 1.0) options[i].push_back({kInf, 1.0 - wanted});
    if (options[i].size() > 2)
      throw std::logic_error("price rule with more than two outcomes");
    if (options[i].size() == 2) branching.push_back(i);
  }
  if (branching.size() > 20)
    throw DeskScaleLimit("desk-scale limit: at most 20 randomized agents");
  std::vector<double> realized(n);
  for (std::size_t i = 0; i < n; ++i) realized[i] = options[i].front().price;
  double total = 0.0;
  const std::size_t combos = std::size_t{1} << branching.size();
  for (std::size_t mask = 0; mask < combos; ++mask) {
    double w = 1.0;
    for (std::size_t b = 0; b < branching.size(); ++b) {
      const auto& o = options[branching[b]][(mask >> b) & 1];
      realized[branching[b]] = o.price;
      w *= o.weight;
    }
    if (w > 0.0) total += w * opm_pessimistic_realized(spec, profile, realized);
  }
  return total;
}

double opm_pessimistic_sampled(const OpmSpec& spec, const Profile& profile,
                               Rng& rng) {
  std::vector<double> realized(spec.n(), kInf);
  for (std::size_t i = 0; i < spec.n(); ++i)
    if (auto p = draw_price(spec.rules[i], rng)) realized[i] = *p;
  return opm_pessimistic_realized(spec, profile, realized);
}

double opm_exact_pessimistic_revenue(const OpmSpec& spec, const Instance& inst) {
  const FeasibilitySystem& sys = spec.feasibility;
  const std::size_t n = spec.n();
  double total = 0.0;
  for_each_lottery_combo(spec, [&](const LotteryCombo& combo) {
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = desire_probability(spec, inst, combo, i);
    if (sys.is_matroid()) {
      std::vector<StepLaw> law(n);
      for (std::size_t i = 0; i < n; ++i) law[i] = {q[i], q[i] * combo.realized[i], 0.0};
      for (std::size_t i = 0; i < n; ++i)
        if (q[i] == 0.0) law[i].pay = 0.0;
      total += combo.weight *
               forward_pass(sys, finite_price_order(combo.realized), law, nullptr,
                            nullptr);
      return;
    }
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < n; ++i)
      if (q[i] > 0.0) live.push_back(i);
    if (live.size() > kMaxBranchAgents)
      throw DeskScaleLimit("desk-scale limit: exact pessimistic revenue over "
                           "non-matroid systems needs at most 16 live agents");
    const std::size_t patterns = std::size_t{1} << live.size();
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      double w = combo.weight;
      AgentSet desired(n);
      for (std::size_t b = 0; b < live.size(); ++b) {
        std::size_t i = live[b];
        if ((mask >> b) & 1) {
          w *= q[i];
          desired.insert(i);
        } else {
          w *= 1.0 - q[i];
        }
      }
      if (w > 0.0 && !desired.empty())
        total += w * min_over_maximal(sys, desired, combo.realized);
    }
  });
  return total;
}

std::vector<double> opm_offer_probabilities_exact(const OpmSpec& spec,
                                                  const Instance& inst) {
  const FeasibilitySystem& sys = spec.feasibility;
  if (!sys.is_matroid())
    throw std::invalid_argument("offer probabilities need matroid feasibility");
  const std::size_t n = spec.n();
  std::vector<std::array<double, 2>> acc(n, {0.0, 0.0});
  std::vector<std::array<double, 2>> norm(n, {0.0, 0.0});
  for_each_lottery_combo(spec, [&](const LotteryCombo& combo) {
    std::vector<StepLaw> law(n);
    for (std::size_t i = 0; i < n; ++i)
      law[i].accept = desire_probability(spec, inst, combo, i);
    std::vector<double> c;
    forward_pass(sys, finite_price_order(combo.realized), law, &c, nullptr);
    for (std::size_t i = 0; i < n; ++i) {
      double w = combo.weight / combo.branch_weight[i];
      acc[i][combo.branch[i]] += w * c[i];
      norm[i][combo.branch[i]] += w;
    }
  });
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (price_branches(spec.rules[i]).empty()) continue;
    double best = kInf;
    for (std::size_t b = 0; b < 2; ++b)
      if (norm[i][b] > 0.0) best = std::min(best, acc[i][b] / norm[i][b]);
    out[i] = best == kInf ? 0.0 : best;
  }
  return out;
}

std::vector<double> opm_offer_probabilities_mc(const OpmSpec& spec,
                                               const Instance& inst,
                                               std::size_t samples,
                                               std::uint64_t seed) {
  const FeasibilitySystem& sys = spec.feasibility;
  if (!sys.is_matroid())
    throw std::invalid_argument("offer probabilities need matroid feasibility");
  const std::size_t n = spec.n();
  // counts[i][b] = {draws with branch b, draws feasible at i's turn}
  using Counts = std::vector<std::array<std::array<double, 2>, 2>>;
  auto parts = run_batches<Counts>(samples, seed, kBatchSize,
                                   [&](Rng& rng, std::size_t count) {
    Counts c(n, {{{0, 0}, {0, 0}}});
    std::vector<double> realized(n);
    std::vector<std::size_t> branch(n);
    std::vector<bool> wants(n);
    for (std::size_t s = 0; s < count; ++s) {
      Profile v = sample_profile(inst, rng);
      for (std::size_t i = 0; i < n; ++i) {
        realized[i] = kInf;
        branch[i] = 0;
        if (auto* d = std::get_if<DeterministicPrice>(&spec.rules[i])) {
          realized[i] = d->price;
          wants[i] = d->price != kInf && bernoulli(rng, d->offer_prob) &&
                     v[i] >= d->price;
        } else {
          const auto& t = std::get<LotteryPrice>(spec.rules[i]).split;
          bool high = !bernoulli(rng, t.x);
          branch[i] = high ? 1 : 0;
          realized[i] = high ? t.p_hi : t.p_lo;
          wants[i] = v[i] >= realized[i];
        }
      }
      auto tracker = sys.tracker();
      for (std::size_t i : finite_price_order(realized)) {
        bool feasible = tracker->can_add(i);
        c[i][branch[i]][0] += 1;
        if (feasible) c[i][branch[i]][1] += 1;
        if (feasible && wants[i]) tracker->add(i);
      }
    }
    return c;
  });
  Counts total(n, {{{0, 0}, {0, 0}}});
  for (const auto& c : parts)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t k = 0; k < 2; ++k) total[i][b][k] += c[i][b][k];
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (price_branches(spec.rules[i]).empty()) continue;
    double best = kInf;
    for (std::size_t b = 0; b < 2; ++b)
      if (total[i][b][0] > 0) best = std::min(best, total[i][b][1] / total[i][b][0]);
    out[i] = best == kInf ? 0.0 : best;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Evaluation evaluate(const Mechanism& mech, const Instance& inst,
                    const EvalMode& mode) {
  Evaluation e;
  if (mode.exact) {
    e.exact = true;
    e.mean_revenue = std::visit(
        [&](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, MyersonMechanism>) {
            return exact_myerson_revenue(inst);
          } else if constexpr (std::is_same_v<T, SpmSpec>) {
            return analyze_spm(m, inst).revenue;
          } else if constexpr (std::is_same_v<T, OpmSpec>) {
            return opm_exact_pessimistic_revenue(m, inst);
          } else {
            return exact_expectation(inst, [&](const Profile& p) {
              return run_vcg_reserves(inst, m.reserves, p).revenue();
            });
          }
        },
        mech);
    return e;
  }
  return std::visit(
      [&](const auto& m) -> Evaluation {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MyersonMechanism>) {
          return monte_carlo_myerson_revenue(inst, mode.samples, mode.seed);
        } else if constexpr (std::is_same_v<T, SpmSpec>) {
          return monte_carlo(mode.samples, mode.seed, [&](Rng& rng) {
            Profile p = sample_profile(inst, rng);
            return run_spm(m, p, rng).revenue;
          });
        } else if constexpr (std::is_same_v<T, OpmSpec>) {
          return monte_carlo(mode.samples, mode.seed, [&](Rng& rng) {
            Profile p = sample_profile(inst, rng);
            return opm_pessimistic_sampled(m, p, rng);
          });
        } else {
          return monte_carlo(mode.samples, mode.seed, [&](Rng& rng) {
            return run_vcg_reserves(inst, m.reserves, sample_profile(inst, rng))
                .revenue();
          });
        }
      },
      mech);
}

}  // namespace postedmech
