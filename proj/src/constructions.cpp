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

#include "postedmech/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "postedmech/myerson.hpp"
#include "postedmech/vcg.hpp"

namespace postedmech {

namespace {

PriceRule rule_for(const ValueDistribution& d, double q) {
  if (q <= 0.0) return DeterministicPrice{};
  return price_rule_for_probability(d, std::min(q, 1.0));
}

const std::vector<double>& checked_q(const Instance& inst,
                                     const AllocationStats& stats) {
  if (stats.q_hat.size() != inst.n())
    throw std::invalid_argument("allocation probabilities do not match the instance");
  return stats.q_hat;
}

OpmSpec restrict_to(const std::vector<PriceRule>& rules,
                    const std::vector<std::size_t>& keep,
                    const FeasibilitySystem& sys, const std::vector<double>& q) {
  OpmSpec s;
  s.rules.assign(rules.size(), DeterministicPrice{});
  for (std::size_t i : keep) s.rules[i] = rules[i];
  s.feasibility = sys;
  s.target_probs = q;
  return s;
}

// Law of the payment collected from agent i when offered: price times accept.
PrizeLaw payment_law(const PriceRule& rule, const ValueDistribution& d) {
  std::vector<std::pair<double, double>> points;
  double paid = 0.0;
  for (const auto& b : price_branches(rule)) {
    double a = b.weight * d.survival(b.price);
    if (a > 0.0) {
      points.emplace_back(b.price, a);
      paid += a;
    }
  }
  if (paid < 1.0) points.emplace_back(0.0, 1.0 - paid);
  return PrizeLaw::discrete(std::move(points));
}

// Drops the branches of `rule` priced below c.
PriceRule branches_at_least(const PriceRule& rule, double c) {
  if (auto* d = std::get_if<DeterministicPrice>(&rule))
    return d->price >= c ? rule : PriceRule{DeterministicPrice{}};
  const auto& t = std::get<LotteryPrice>(rule).split;
  if (t.p_lo >= c) return rule;
  if (t.p_hi != kInf && t.p_hi >= c && t.x < 1.0)
    return DeterministicPrice{t.p_hi, 1.0 - t.x};
  return DeterministicPrice{};
}

double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && b - a > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    }
  }
  double m = (a + b) / 2.0;
  // Endpoints can win for monotone objectives.
  double best = m;
  for (double x : {lo, hi, m})
    if (f(x) > f(best)) best = x;
  return best;
}

}  // namespace

SpmSpec build_spm(const Instance& inst, std::span<const double> q) {
  if (q.size() != inst.n())
    throw std::invalid_argument("allocation probabilities do not match the instance");
  SpmSpec s;
  s.feasibility = inst.feasibility;
  s.target_probs.assign(q.begin(), q.end());
  for (std::size_t i = 0; i < inst.n(); ++i)
    s.rules.push_back(rule_for(inst.distributions[i], q[i]));
  auto eff = s.effective_prices();
  s.ordering.resize(inst.n());
  std::iota(s.ordering.begin(), s.ordering.end(), 0);
  std::stable_sort(s.ordering.begin(), s.ordering.end(),
                   [&](std::size_t a, std::size_t b) { return eff[a] > eff[b]; });
  return s;
}

SpmSpec build_spm(const Instance& inst, const AllocationStats& stats) {
  return build_spm(inst, std::span<const double>(checked_q(inst, stats)));
}

SpmSpec build_spm_intersection(const Instance& inst, const AllocationStats& stats) {
  return build_spm(inst, stats);
}

double myerson_upper_bound(const Instance& inst, std::span<const double> q) {
  double total = 0.0;
  for (std::size_t i = 0; i < inst.n(); ++i)
    if (q[i] > 0.0)
      total += inst.distributions[i].revenue_curve().hull(std::min(q[i], 1.0));
  return total;
}

double sum_price_probability(const SpmSpec& spec, const Instance& inst) {
  double total = 0.0;
  for (std::size_t i = 0; i < spec.n(); ++i)
    total += expected_payment(spec.rules[i], inst.distributions[i]);
  return total;
}

UniformOpm build_opm_uniform(const Instance& inst, const AllocationStats& stats) {
  const std::size_t n = inst.n();
  UniformOpm out;
  std::vector<std::size_t> caps;
  const auto& kind = inst.feasibility.kind();
  if (auto* u = std::get_if<UniformMatroid>(&kind)) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    out.parts.push_back(all);
    caps.push_back(u->k);
  } else if (auto* p = std::get_if<PartitionMatroid>(&kind)) {
    std::vector<bool> listed(n, false);
    for (std::size_t j = 0; j < p->parts.size(); ++j) {
      out.parts.push_back(p->parts[j]);
      caps.push_back(p->caps[j]);
      for (std::size_t i : p->parts[j]) listed[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!listed[i]) {
        out.parts.push_back({i});
        caps.push_back(1);
      }
  } else {
    throw std::invalid_argument("uniform OPM needs uniform or partition feasibility");
  }
  out.spec.rules.assign(n, DeterministicPrice{});
  out.spec.feasibility = inst.feasibility;
  out.spec.target_probs = stats.q_hat;
  for (std::size_t j = 0; j < out.parts.size(); ++j) {
    const auto& part = out.parts[j];
    ProphetThreshold thr;
    thr.k = caps[j];
    if (caps[j] > 0 && !part.empty()) {
      std::vector<PrizeLaw> laws;
      for (std::size_t i : part)
        laws.push_back(PrizeLaw::positive_ironed_virtual_value(inst.distributions[i]));
      thr = prophet_threshold(laws, caps[j]);
      for (std::size_t i : part) {
        double p = inst.distributions[i].value_for_ironed_virtual_value(thr.c);
        out.spec.rules[i] = DeterministicPrice{p, 1.0};
      }
    }
    out.thresholds.push_back(thr);
  }
  return out;
}

OpmEstimator exact_opm_estimator() {
  return {opm_offer_probabilities_exact, opm_exact_pessimistic_revenue};
}

OpmEstimator monte_carlo_opm_estimator(std::size_t samples, std::uint64_t seed) {
  return {[=](const OpmSpec& s, const Instance& inst) {
            return opm_offer_probabilities_mc(s, inst, samples, seed);
          },
          [=](const OpmSpec& s, const Instance& inst) {
            return evaluate(s, inst, EvalMode::monte_carlo(samples, seed)).mean_revenue;
          }};
}

LogKOpm build_opm_log_k(const Instance& inst, const AllocationStats& stats,
                        const OpmEstimator& estimator) {
  if (!inst.feasibility.is_matroid())
    throw std::invalid_argument("log-k OPM needs matroid feasibility");
  const auto& q = checked_q(inst, stats);
  const std::size_t n = inst.n();
  std::vector<PriceRule> base;
  for (std::size_t i = 0; i < n; ++i) base.push_back(rule_for(inst.distributions[i], q[i]));

  LogKOpm out;
  auto emit = [&](std::vector<std::size_t> members) {
    out.groups.push_back(restrict_to(base, members, inst.feasibility, q));
    out.members.push_back(std::move(members));
  };
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  while (!remaining.empty()) {
    double mass = 0.0;
    for (std::size_t i : remaining) mass += q[i];
    if (mass < 0.75) {
      emit(remaining);
      break;
    }
    auto c = estimator.offer_probs(restrict_to(base, remaining, inst.feasibility, q), inst);
    std::vector<std::size_t> group, rest;
    for (std::size_t i : remaining) (c[i] >= 0.25 ? group : rest).push_back(i);
    if (group.empty()) {
      emit(remaining);
      break;
    }
    emit(std::move(group));
    remaining = std::move(rest);
  }
  for (const auto& g : out.groups) out.group_revenue.push_back(estimator.revenue(g, inst));
  for (std::size_t j = 1; j < out.groups.size(); ++j)
    if (out.group_revenue[j] > out.group_revenue[out.best]) out.best = j;
  return out;
}

std::vector<std::vector<std::size_t>> graph_cut_partition(
    const GraphicMatroid& g, std::span<const double> q) {
  const std::size_t n = g.edges.size();
  std::vector<bool> edge_alive(n);
  for (std::size_t e = 0; e < n; ++e)
    edge_alive[e] = g.edges[e].first != g.edges[e].second;
  std::vector<bool> vertex_alive(g.vertices, true);
  auto incident = [&](std::size_t v) {
    std::vector<std::size_t> d;
    for (std::size_t e = 0; e < n; ++e)
      if (edge_alive[e] && (g.edges[e].first == v || g.edges[e].second == v))
        d.push_back(e);
    return d;
  };
  std::vector<std::vector<std::size_t>> parts;
  for (;;) {
    // Lowest vertex with incident mass at most 2, else the lightest one.
    std::size_t pick = g.vertices;
    double pick_mass = kInf;
    for (std::size_t v = 0; v < g.vertices; ++v) {
      if (!vertex_alive[v]) continue;
      auto d = incident(v);
      if (d.empty()) continue;
      double mass = 0.0;
      for (std::size_t e : d) mass += q[e];
      if (mass <= 2.0 + 1e-12) {
        pick = v;
        break;
      }
      if (mass < pick_mass) {
        pick = v;
        pick_mass = mass;
      }
    }
    if (pick == g.vertices) break;
    auto part = incident(pick);
    for (std::size_t e : part) edge_alive[e] = false;
    vertex_alive[pick] = false;
    parts.push_back(std::move(part));
  }
  return parts;
}

GraphicalOpm build_opm_graphical(const Instance& inst, const AllocationStats& stats) {
  const auto* g = std::get_if<GraphicMatroid>(&inst.feasibility.kind());
  if (!g) throw std::invalid_argument("graphical OPM needs graphic feasibility");
  const auto& q = checked_q(inst, stats);
  const std::size_t n = inst.n();
  GraphicalOpm out;
  out.parts = graph_cut_partition(*g, q);

  // Self-loops stay outside every part and keep the infinite price.
  out.spec.rules.assign(n, DeterministicPrice{});
  out.spec.target_probs = q;
  out.spec.restricted = true;
  std::vector<std::size_t> caps(out.parts.size(), 1);
  auto restricted_parts = out.parts;
  std::vector<std::size_t> loops;
  for (std::size_t e = 0; e < n; ++e)
    if (g->edges[e].first == g->edges[e].second) loops.push_back(e);
  if (!loops.empty()) {
    restricted_parts.push_back(loops);
    caps.push_back(0);
  }
  out.spec.feasibility = FeasibilitySystem::partition(n, restricted_parts, caps);
  for (const auto& part : out.parts) {
    std::vector<PrizeLaw> laws;
    std::vector<PriceRule> rules;
    for (std::size_t e : part) {
      rules.push_back(rule_for(inst.distributions[e], q[e]));
      laws.push_back(payment_law(rules.back(), inst.distributions[e]));
    }
    double c = prophet_threshold(laws, 1).c;
    out.thresholds.push_back(c);
    for (std::size_t j = 0; j < part.size(); ++j)
      out.spec.rules[part[j]] = branches_at_least(rules[j], c);
  }
  return out;
}

OpmSpec build_opm_partition_intersection(const Instance& inst,
                                         const AllocationStats& stats) {
  const auto* x = std::get_if<IntersectionSystem>(&inst.feasibility.kind());
  if (!x || x->members.size() != 2 ||
      !std::holds_alternative<PartitionMatroid>(x->members[0].kind()) ||
      !std::holds_alternative<PartitionMatroid>(x->members[1].kind()))
    throw std::invalid_argument(
        "partition-intersection OPM needs an intersection of two partition matroids");
  const auto& q = checked_q(inst, stats);
  OpmSpec s;
  s.feasibility = inst.feasibility;
  s.target_probs = q;
  for (std::size_t i = 0; i < inst.n(); ++i)
    s.rules.push_back(rule_for(inst.distributions[i], q[i] / 3.0));
  return s;
}

std::vector<double> vcg_reserves_from_spm(const SpmSpec& spec) {
  std::vector<double> r;
  for (const auto& rule : spec.rules) {
    auto* d = std::get_if<DeterministicPrice>(&rule);
    if (!d) throw std::invalid_argument("VCG reserves need deterministic prices");
    r.push_back(d->price);
  }
  return r;
}

VcgChoice best_vcg_reserves(const SpmSpec& spec, const Instance& inst) {
  std::vector<std::size_t> lottery;
  std::vector<double> reserves(spec.n());
  for (std::size_t i = 0; i < spec.n(); ++i) {
    if (auto* d = std::get_if<DeterministicPrice>(&spec.rules[i]))
      reserves[i] = d->price;
    else
      lottery.push_back(i);
  }
  if (lottery.size() > 12)
    throw DeskScaleLimit("desk-scale limit: at most 12 lottery agents");
  VcgChoice best;
  best.revenue = -kInf;
  for (std::size_t mask = 0; mask < (std::size_t{1} << lottery.size()); ++mask) {
    for (std::size_t b = 0; b < lottery.size(); ++b) {
      const auto& t = std::get<LotteryPrice>(spec.rules[lottery[b]]).split;
      reserves[lottery[b]] = ((mask >> b) & 1) ? t.p_hi : t.p_lo;
    }
    double r = exact_expectation(inst, [&](const Profile& p) {
      return run_vcg_reserves(inst, reserves, p).revenue();
    });
    if (r > best.revenue) best = {reserves, r};
  }
  return best;
}

IidSpm optimal_iid_spm(const ValueDistribution& d, std::size_t n) {
  IidSpm out;
  out.prices.assign(n, 0.0);
  double cont = 0.0;  // value of the remaining agents
  for (std::size_t t = n; t-- > 0;) {
    auto gain = [&](double p) { return d.survival(p) * (p - cont); };
    double p;
    if (d.is_discrete()) {
      p = d.support().front();
      for (double v : d.support())
        if (gain(v) > gain(p)) p = v;
    } else {
      double hi = std::holds_alternative<UniformLaw>(d.kind())
                      ? d.support_max()
                      : 4.0 * cont + 4.0;
      p = golden_max(gain, d.support_min(), hi);
    }
    if (gain(p) <= 0.0) {
      out.prices[t] = kInf;
      continue;
    }
    out.prices[t] = p;
    cont += gain(p);
  }
  out.revenue = cont;
  return out;
}

}  // namespace postedmech
