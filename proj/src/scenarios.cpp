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

#include "postedmech/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "postedmech/constructions.hpp"
#include "postedmech/engine.hpp"
#include "postedmech/myerson.hpp"
#include "postedmech/prophet.hpp"

namespace postedmech {

namespace {

// Frozen m = 3 ratios of the two gap families.
constexpr double kNonmatroidRatio3 = 2.74114848;
constexpr double kTreeRatio3 = 2.870997802;

ReferenceValue around(std::string name, double value, double tol, std::string prov) {
  return {std::move(name), value, value - tol, value + tol, std::move(prov)};
}
ReferenceValue relative(std::string name, double value, double rel, std::string prov) {
  double tol = std::abs(value) * rel;
  return {std::move(name), value, value - tol, value + tol, std::move(prov)};
}
ReferenceValue at_least(std::string name, double value, std::string prov) {
  return {std::move(name), value, value, kInf, std::move(prov)};
}
ReferenceValue at_most(std::string name, double value, std::string prov) {
  return {std::move(name), value, -kInf, value, std::move(prov)};
}
ReferenceValue range(std::string name, double value, double lo, double hi,
                     std::string prov) {
  return {std::move(name), value, lo, hi, std::move(prov)};
}
ReferenceValue info(std::string name, double value, std::string prov) {
  return {std::move(name), value, -kInf, kInf, std::move(prov)};
}

double param(const std::map<std::string, double>& p, const std::string& key,
             double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::size_t count_param(const std::map<std::string, double>& p, const std::string& key,
                        double fallback, std::size_t lo, std::size_t hi) {
  double v = param(p, key, fallback);
  if (v != std::floor(v) || v < double(lo) || v > double(hi))
    throw std::invalid_argument(key + " must be an integer in [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
  return static_cast<std::size_t>(v);
}

double probability_param(const std::map<std::string, double>& p, const std::string& key,
                         double fallback) {
  double v = param(p, key, fallback);
  if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument(key + " must lie in (0, 1)");
  return v;
}

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

SpmSpec fixed_spm(std::vector<double> prices, std::vector<std::size_t> order,
                  FeasibilitySystem sys) {
  SpmSpec s;
  for (double p : prices) s.rules.push_back(DeterministicPrice{p, 1.0});
  s.ordering = std::move(order);
  s.feasibility = std::move(sys);
  return s;
}

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> o(n);
  std::iota(o.begin(), o.end(), 0);
  return o;
}

const Instance& single(const Scenario& s) {
  if (auto* i = std::get_if<Instance>(&s.instance)) return *i;
  throw std::invalid_argument("scenario " + s.id + " has no single-parameter instance");
}

// Pr[Bin(m, p) >= t] for t = 0..m.
std::vector<double> binomial_tail(std::size_t m, double p) {
  std::vector<double> pmf(m + 1);
  for (std::size_t k = 0; k <= m; ++k)
    pmf[k] = std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(m - k + 1.0)) *
             std::pow(p, double(k)) * std::pow(1.0 - p, double(m - k));
  std::vector<double> tail(m + 2, 0.0);
  for (std::size_t t = m + 1; t-- > 0;) tail[t] = tail[t + 1] + pmf[t];
  return tail;
}

double uniform_price_fail_closed_form(std::size_t h) {
  // Agent i (1-based) pays i w.p. 1/(2 i^2) if reached; prices decrease in order.
  double total = 0.0, reach = 1.0;
  for (std::size_t i = h; i >= 1; --i) {
    double a = 1.0 / (2.0 * double(i) * double(i));
    total += reach * a * double(i);
    reach *= 1.0 - a;
  }
  return total;
}

// --- generators -------------------------------------------------------------

Scenario hotel_intro(const std::map<std::string, double>&) {
  Scenario s;
  s.id = "hotel_intro";
  s.instance = Instance({ValueDistribution::uniform(100, 200),
                         ValueDistribution::uniform(100, 200)},
                        FeasibilitySystem::uniform(2, 1));
  s.reference_values = {
      around("optimal_spm_revenue", 125.0, 1e-6, "paper"),
      around("optimal_spm_first_price", 150.0, 1e-6, "paper"),
      around("optimal_spm_second_price", 100.0, 1e-6, "paper"),
      around("myerson_revenue", 400.0 / 3.0, 0.5, "paper"),
      around("constructed_spm_revenue", 112.5, 1e-9, "closed-form"),
  };
  return s;
}

Scenario bh_gap(const std::map<std::string, double>& p) {
  std::size_t n = count_param(p, "n", 100, 1, 100000);
  Scenario s;
  s.id = "bh_gap";
  s.params = {{"n", double(n)}};
  s.instance = Instance(std::vector<ValueDistribution>(n, ValueDistribution::equal_revenue()),
                        FeasibilitySystem::uniform(n, 1));
  double myerson = std::tgamma(0.5) * std::sqrt(double(n)) / 2.0;
  double spm = std::sqrt(double(n) / 2.0);
  s.reference_values = {
      relative("myerson_revenue", myerson, 0.02, "paper"),
      relative("optimal_spm_revenue", spm, 0.02, "paper"),
      range("ratio", std::sqrt(std::numbers::pi / 2.0), 1.20, 1.31, "paper"),
  };
  return s;
}

Scenario spm_uniform_tight(const std::map<std::string, double>& p) {
  std::size_t n = count_param(p, "n", 20, 1, 100000);
  double eps = probability_param(p, "eps", 0.01);
  Scenario s;
  s.id = "spm_uniform_tight";
  s.params = {{"n", double(n)}, {"eps", eps}};
  s.instance = Instance(std::vector<ValueDistribution>(
                            n, ValueDistribution::discrete({{0.0, eps}, {1.0, 1.0 - eps}})),
                        FeasibilitySystem::uniform(n, 1));
  double tight = 1.0 - std::pow(1.0 - 1.0 / double(n), double(n));
  double opt = 1.0 - std::pow(eps, double(n));
  s.reference_values = {
      around("constructed_spm_revenue", tight, 1e-9, "closed-form"),
      around("certain_offer_spm_revenue", opt, 1e-9, "closed-form"),
      around("ratio", opt / tight, 1e-8, "closed-form"),
  };
  return s;
}

Scenario spm_nonmatroid_gap(const std::map<std::string, double>& p) {
  std::size_t m = count_param(p, "m", 3, 2, 4);
  std::size_t groups = ipow(m, m);
  std::size_t n = groups * m;
  double hi = double(m);
  Scenario s;
  s.id = "spm_nonmatroid_gap";
  s.params = {{"m", double(m)}};
  s.instance = Instance(
      std::vector<ValueDistribution>(
          n, ValueDistribution::discrete({{1.0, 1.0 - 1.0 / hi}, {hi, 1.0 / hi}})),
      group_system(groups, m));
  double myerson = nonmatroid_gap_myerson_revenue(m);
  s.reference_values = {
      around("myerson_revenue", myerson, 1e-9, "oracle"),
      at_most("constructed_spm_revenue", 3.0 * hi, "paper"),
      at_least("ratio", 2.0, "paper"),
  };
  if (m == 3) s.reference_values.push_back(around("ratio_regression", kNonmatroidRatio3, 1e-6, "oracle"));
  return s;
}

Scenario opm_uniform_price_fail(const std::map<std::string, double>& p) {
  std::size_t h = count_param(p, "n", 1000, 1, 100000);
  Scenario s;
  s.id = "opm_uniform_price_fail";
  s.params = {{"n", double(h)}};
  std::vector<ValueDistribution> d;
  for (std::size_t i = 1; i <= h; ++i) {
    double a = 1.0 / (2.0 * double(i) * double(i));
    d.push_back(ValueDistribution::discrete({{0.0, 1.0 - a}, {double(i), a}}));
  }
  s.instance = Instance(std::move(d), FeasibilitySystem::uniform(h, 1));
  double harmonic = 0.0;
  for (std::size_t i = 1; i <= h; ++i) harmonic += 1.0 / double(i);
  s.reference_values = {
      around("per_agent_spm_revenue", uniform_price_fail_closed_form(h), 1e-9, "closed-form"),
      at_least("per_agent_spm_over_quarter_log", 0.25 * harmonic, "closed-form"),
      at_most("uniform_price_bound_slack", 0.0, "closed-form"),
      info("best_uniform_price_revenue", 0.5, "paper"),
      info("per_agent_over_uniform", 0.0, "oracle"),
  };
  return s;
}

Scenario opm_gap2(const std::map<std::string, double>& p) {
  double eps = probability_param(p, "eps", 0.01);
  Scenario s;
  s.id = "opm_gap2";
  s.params = {{"eps", eps}};
  s.instance = Instance({ValueDistribution::discrete({{1.0, 1.0}}),
                         ValueDistribution::discrete({{0.0, 1.0 - eps}, {1.0 / eps, eps}})},
                        FeasibilitySystem::uniform(2, 1));
  s.reference_values = {
      around("worst_order_opm_revenue", 1.0, 1e-9, "paper"),
      around("myerson_revenue", 2.0 - eps, 1e-9, "paper"),
      around("threshold", 2.0 / (2.0 + eps), 1e-8, "closed-form"),
      at_least("threshold_rule_over_half_prophet", 1.0, "paper"),
  };
  return s;
}

Scenario opm_order_gap_tree(const std::map<std::string, double>& p) {
  std::size_t m = count_param(p, "m", 3, 2, 4);
  std::size_t levels = m + 1;
  auto sizes = tree_level_sizes(m, levels);
  std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  double hi = double(m);
  Scenario s;
  s.id = "opm_order_gap_tree";
  s.params = {{"m", double(m)}};
  s.instance = Instance(
      std::vector<ValueDistribution>(
          n, ValueDistribution::discrete({{0.0, 1.0 - 1.0 / hi}, {hi, 1.0 / hi}})),
      tree_path_system(m, levels));
  s.reference_values = {
      at_least("best_order_revenue", hi * hi * (1.0 - 1.0 / std::numbers::e), "paper"),
      around("worst_order_revenue", tree_gap_pessimistic_revenue(m), 1e-9, "oracle"),
      at_least("ratio", 2.0, "paper"),
      info("leaves_first_order_revenue", 0.0, "oracle"),
  };
  if (m == 3) s.reference_values.push_back(around("ratio_regression", kTreeRatio3, 1e-6, "oracle"));
  return s;
}

Scenario graphical_32_3(const std::map<std::string, double>&) {
  Scenario s;
  s.id = "graphical_32_3";
  MultiInstance mi;
  mi.agents = 3;
  mi.service_agent = {0, 0, 1, 1, 2, 2};
  auto law = ValueDistribution::discrete({{1.0, 0.5}, {2.0, 0.3}, {4.0, 0.2}});
  mi.distributions.assign(6, law);
  mi.feasibility = FeasibilitySystem::graphic(
      4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  s.instance = mi;
  s.reference_values = {
      at_least("worst_order_over_myerson", 3.0 / 32.0, "paper"),
      at_most("best_order_over_myerson", 1.0, "paper"),
  };
  return s;
}

// --- reproduce ---------------------------------------------------------------

struct Recorder {
  const Scenario& s;
  std::vector<Check>& out;
  void operator()(const std::string& name, double measured) {
    const ReferenceValue& r = s.reference(name);
    bool inf = r.lo == -kInf && r.hi == kInf;
    out.push_back({name, measured, r, inf});
  }
};

void reproduce_hotel(const Scenario& s, const ReproduceOptions& o, Recorder rec) {
  const Instance& inst = single(s);
  IidSpm opt = optimal_iid_spm(inst.distributions[0], 2);
  SpmSpec spec = fixed_spm(opt.prices, {0, 1}, inst.feasibility);
  rec("optimal_spm_revenue", analyze_spm(spec, inst).revenue);
  rec("optimal_spm_first_price", opt.prices[0]);
  rec("optimal_spm_second_price", opt.prices[1]);
  rec("myerson_revenue", monte_carlo_myerson_revenue(inst, o.samples, o.seed).mean_revenue);
  std::vector<double> q(2, 0.5);
  rec("constructed_spm_revenue", analyze_spm(build_spm(inst, std::span<const double>(q)), inst).revenue);
}

void reproduce_bh(const Scenario& s, const ReproduceOptions& o, Recorder rec) {
  const Instance& inst = single(s);
  IidSpm opt = optimal_iid_spm(inst.distributions[0], inst.n());
  SpmSpec spec = fixed_spm(opt.prices, identity_order(inst.n()), inst.feasibility);
  double spm = analyze_spm(spec, inst).revenue;
  double myerson = monte_carlo_myerson_revenue(inst, o.samples, o.seed).mean_revenue;
  rec("myerson_revenue", myerson);
  rec("optimal_spm_revenue", spm);
  rec("ratio", myerson / spm);
}

void reproduce_uniform_tight(const Scenario& s, const ReproduceOptions&, Recorder rec) {
  const Instance& inst = single(s);
  const std::size_t n = inst.n();
  double eps = s.params.at("eps");
  // Symmetric Myerson probabilities: the item goes to a uniformly random
  // high agent, so each is served w.p. (1 - eps^n) / n.
  std::vector<double> q(n, (1.0 - std::pow(eps, double(n))) / double(n));
  double constructed = analyze_spm(build_spm(inst, std::span<const double>(q)), inst).revenue;
  SpmSpec certain = fixed_spm(std::vector<double>(n, 1.0), identity_order(n), inst.feasibility);
  double opt = analyze_spm(certain, inst).revenue;
  rec("constructed_spm_revenue", constructed);
  rec("certain_offer_spm_revenue", opt);
  rec("ratio", opt / constructed);
}

void reproduce_nonmatroid(const Scenario& s, const ReproduceOptions& o, Recorder rec) {
  const Instance& inst = single(s);
  std::size_t m = static_cast<std::size_t>(s.params.at("m"));
  double myerson = nonmatroid_gap_myerson_revenue(m);
  // Served count is m * (revenue / m^2) in expectation, split evenly.
  std::vector<double> q(inst.n(), myerson / double(m) / double(inst.n()));
  double spm = analyze_spm(build_spm(inst, std::span<const double>(q)), inst).revenue;
  auto mc = monte_carlo_myerson_revenue(inst, std::min<std::size_t>(o.samples, 100'000), o.seed);
  rec("myerson_revenue", myerson);
  rec.out.push_back({"myerson_monte_carlo", mc.mean_revenue,
                     around("myerson_monte_carlo", myerson, 4.0 * mc.std_error, "oracle"),
                     false});
  rec("constructed_spm_revenue", spm);
  rec("ratio", myerson / spm);
  if (m == 3) rec("ratio_regression", myerson / spm);
}

void reproduce_uniform_fail(const Scenario& s, const ReproduceOptions&, Recorder rec) {
  const Instance& inst = single(s);
  const std::size_t h = inst.n();
  std::vector<double> prices(h);
  for (std::size_t i = 0; i < h; ++i) prices[i] = double(i + 1);
  std::vector<std::size_t> order(h);
  for (std::size_t i = 0; i < h; ++i) order[i] = h - 1 - i;
  double per_agent = analyze_spm(fixed_spm(prices, order, inst.feasibility), inst).revenue;
  // A uniform price c sells iff some agent i >= c is high.
  double best = 0.0, slack = -kInf, miss = 1.0;
  for (std::size_t c = h; c >= 1; --c) {
    miss *= 1.0 - 1.0 / (2.0 * double(c) * double(c));
    double rev = double(c) * (1.0 - miss);
    best = std::max(best, rev);
    slack = std::max(slack, rev - (0.5 + 0.5 / double(c)));
  }
  rec("per_agent_spm_revenue", per_agent);
  rec("per_agent_spm_over_quarter_log", per_agent);
  rec("uniform_price_bound_slack", slack);
  rec("best_uniform_price_revenue", best);
  rec("per_agent_over_uniform", per_agent / best);
}

void reproduce_gap2(const Scenario& s, const ReproduceOptions&, Recorder rec) {
  const Instance& inst = single(s);
  double eps = s.params.at("eps");
  AllocationStats stats = exact_allocation_probabilities(inst);
  UniformOpm opm = build_opm_uniform(inst, stats);
  double worst = opm_exact_pessimistic_revenue(opm.spec, inst);
  double myerson = exact_myerson_revenue(inst);
  std::vector<PrizeLaw> laws{PrizeLaw::discrete({{1.0, 1.0}}),
                             PrizeLaw::discrete({{0.0, 1.0 - eps}, {1.0 / eps, eps}})};
  double c = opm.thresholds.front().c;
  double rule = threshold_rule_value(laws, 1, c);
  rec("worst_order_opm_revenue", worst);
  rec("myerson_revenue", myerson);
  rec("threshold", c);
  rec("threshold_rule_over_half_prophet", rule / (0.5 * expected_top_k(laws, 1)));
}

void reproduce_tree(const Scenario& s, const ReproduceOptions& o, Recorder rec) {
  const Instance& inst = single(s);
  std::size_t m = static_cast<std::size_t>(s.params.at("m"));
  const std::size_t n = inst.n();
  std::vector<double> prices(n, double(m));
  double best = analyze_spm(fixed_spm(prices, identity_order(n), inst.feasibility), inst).revenue;
  std::vector<std::size_t> leaves_first(n);
  auto sizes = tree_level_sizes(m, m + 1);
  {
    std::size_t start = n, k = 0;
    for (std::size_t l = sizes.size(); l-- > 0;) {
      start -= sizes[l];
      for (std::size_t i = 0; i < sizes[l]; ++i) leaves_first[k++] = start + i;
    }
  }
  double bottom = analyze_spm(fixed_spm(prices, leaves_first, inst.feasibility), inst).revenue;
  double worst = tree_gap_pessimistic_revenue(m);
  OpmSpec opm;
  for (double p : prices) opm.rules.push_back(DeterministicPrice{p, 1.0});
  opm.feasibility = inst.feasibility;
  auto mc = evaluate(opm, inst, EvalMode::monte_carlo(std::min<std::size_t>(o.samples, 100'000), o.seed));
  rec("best_order_revenue", best);
  rec("worst_order_revenue", worst);
  rec.out.push_back({"worst_order_monte_carlo", mc.mean_revenue,
                     around("worst_order_monte_carlo", worst, 4.0 * mc.std_error, "oracle"),
                     false});
  rec("ratio", best / worst);
  rec("leaves_first_order_revenue", bottom);
  if (m == 3) rec("ratio_regression", best / worst);
}

void reproduce_graphical(const Scenario& s, const ReproduceOptions&, Recorder rec) {
  const auto& mi = std::get<MultiInstance>(s.instance);
  Instance copies = copies_instance(mi);
  AllocationStats stats = exact_allocation_probabilities(copies);
  double myerson = exact_myerson_revenue(copies);
  auto opm = build_multidim_graphical_opm(mi, stats);
  double worst = multidim_opm_worst_order_revenue(mi, opm.spec);
  double best = 0.0;
  std::vector<std::size_t> order(mi.agents);
  std::iota(order.begin(), order.end(), 0);
  do {
    best = std::max(best, exact_expectation(copies, [&](const Profile& p) {
                      return multidim_opm_revenue(mi, opm.spec, order, p);
                    }));
  } while (std::next_permutation(order.begin(), order.end()));
  rec("worst_order_over_myerson", worst / myerson);
  rec("best_order_over_myerson", best / myerson);
}

}  // namespace

// --- public ------------------------------------------------------------------

const ReferenceValue& Scenario::reference(const std::string& name) const {
  for (const auto& r : reference_values)
    if (r.name == name) return r;
  throw std::invalid_argument("scenario " + id + " has no reference value " + name);
}

const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids{
      "hotel_intro",       "bh_gap",           "spm_uniform_tight",
      "spm_nonmatroid_gap", "opm_uniform_price_fail", "opm_gap2",
      "opm_order_gap_tree", "graphical_32_3"};
  return ids;
}

Scenario generate(const std::string& id, const std::map<std::string, double>& params) {
  if (id == "hotel_intro") return hotel_intro(params);
  if (id == "bh_gap") return bh_gap(params);
  if (id == "spm_uniform_tight") return spm_uniform_tight(params);
  if (id == "spm_nonmatroid_gap") return spm_nonmatroid_gap(params);
  if (id == "opm_uniform_price_fail") return opm_uniform_price_fail(params);
  if (id == "opm_gap2") return opm_gap2(params);
  if (id == "opm_order_gap_tree") return opm_order_gap_tree(params);
  if (id == "graphical_32_3") return graphical_32_3(params);
  throw std::invalid_argument("unknown scenario id \"" + id + "\"");
}

bool Check::pass() const {
  return informational || (measured >= reference.lo && measured <= reference.hi);
}

bool ReproduceReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

ReproduceReport reproduce(const Scenario& s, const ReproduceOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  ReproduceReport rep;
  rep.id = s.id;
  Recorder rec{s, rep.checks};
  if (s.id == "hotel_intro") reproduce_hotel(s, opts, rec);
  else if (s.id == "bh_gap") reproduce_bh(s, opts, rec);
  else if (s.id == "spm_uniform_tight") reproduce_uniform_tight(s, opts, rec);
  else if (s.id == "spm_nonmatroid_gap") reproduce_nonmatroid(s, opts, rec);
  else if (s.id == "opm_uniform_price_fail") reproduce_uniform_fail(s, opts, rec);
  else if (s.id == "opm_gap2") reproduce_gap2(s, opts, rec);
  else if (s.id == "opm_order_gap_tree") reproduce_tree(s, opts, rec);
  else if (s.id == "graphical_32_3") reproduce_graphical(s, opts, rec);
  else throw std::invalid_argument("unknown scenario id \"" + s.id + "\"");
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

double nonmatroid_gap_myerson_revenue(std::size_t m) {
  auto tail = binomial_tail(m, 1.0 / double(m));
  double groups = double(ipow(m, m));
  double expected_max = 0.0;
  for (std::size_t t = 1; t <= m; ++t)
    expected_max += 1.0 - std::pow(1.0 - tail[t], groups);
  return double(m) * expected_max;
}

double tree_gap_pessimistic_revenue(std::size_t m) {
  // dist[t] = Pr[X = t] for t = 1..levels, with index 0 for "no desired
  // node below"; X is the least number of desired nodes on a path from
  // the subtree root to a desired node without desired descendants.
  const std::size_t levels = m + 1;
  const double p = 1.0 / double(m);
  auto min_of_children = [&](const std::vector<double>& child) {
    // Y = min over m iid children, ignoring the empty outcome.
    std::vector<double> ge(levels + 2, 0.0);  // Pr[X >= t or empty]
    for (std::size_t t = levels + 1; t-- > 1;)
      ge[t] = ge[t + 1] + (t <= levels ? child[t] : 0.0);
    for (std::size_t t = 1; t <= levels + 1; ++t) ge[t] += child[0];
    std::vector<double> y(levels + 1, 0.0);
    y[0] = std::pow(child[0], double(m));
    for (std::size_t t = 1; t <= levels; ++t)
      y[t] = std::pow(ge[t], double(m)) - std::pow(ge[t + 1], double(m));
    return y;
  };
  std::vector<double> dist(levels + 1, 0.0);
  dist[0] = 1.0 - p;
  dist[1] = p;
  for (std::size_t l = levels; l-- > 1;) {
    auto y = min_of_children(dist);
    std::vector<double> next(levels + 1, 0.0);
    next[0] = (1.0 - p) * y[0];
    next[1] = p * y[0];
    for (std::size_t t = 1; t <= levels; ++t) {
      next[t] += (1.0 - p) * y[t];
      if (t + 1 <= levels) next[t + 1] += p * y[t];
    }
    dist = next;
  }
  auto root = min_of_children(dist);
  double e = 0.0;
  for (std::size_t t = 1; t <= levels; ++t) e += double(t) * root[t];
  return double(m) * e;
}

FeasibilitySystem group_system(std::size_t groups, std::size_t group_size) {
  std::vector<std::vector<std::size_t>> sets(groups);
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t j = 0; j < group_size; ++j) sets[g].push_back(g * group_size + j);
  return FeasibilitySystem::explicit_sets(groups * group_size, std::move(sets));
}

std::vector<std::size_t> tree_level_sizes(std::size_t arity, std::size_t levels) {
  std::vector<std::size_t> sizes;
  for (std::size_t l = 1; l <= levels; ++l) sizes.push_back(ipow(arity, l));
  return sizes;
}

FeasibilitySystem tree_path_system(std::size_t arity, std::size_t levels) {
  auto sizes = tree_level_sizes(arity, levels);
  std::vector<std::size_t> offset(levels, 0);
  for (std::size_t l = 1; l < levels; ++l) offset[l] = offset[l - 1] + sizes[l - 1];
  std::size_t n = offset.back() + sizes.back();
  std::vector<std::vector<std::size_t>> paths;
  for (std::size_t leaf = 0; leaf < sizes.back(); ++leaf) {
    std::vector<std::size_t> path(levels);
    std::size_t k = leaf;
    for (std::size_t l = levels; l-- > 0;) {
      path[l] = offset[l] + k;
      k /= arity;
    }
    paths.push_back(std::move(path));
  }
  return FeasibilitySystem::explicit_sets(n, std::move(paths));
}

Json to_json(const Scenario& s) {
  Json refs = Json::array();
  for (const auto& r : s.reference_values)
    refs.push_back({{"name", r.name},
                    {"value", r.value},
                    {"lo", r.lo == -kInf ? Json("-inf") : Json(r.lo)},
                    {"hi", price_to_json(r.hi)},
                    {"provenance", r.provenance}});
  Json params = Json::object();
  for (const auto& [k, v] : s.params) params[k] = v;
  Json inst = std::visit([](const auto& i) { return to_json(i); }, s.instance);
  return {{"id", s.id}, {"instance", inst}, {"params", params}, {"reference_values", refs}};
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  try {
    s.id = j.at("id").get<std::string>();
    const Json& inst = j.at("instance");
    if (inst.contains("service_agent"))
      s.instance = multi_instance_from_json(inst);
    else
      s.instance = instance_from_json(inst);
    if (j.contains("params"))
      for (const auto& [k, v] : j["params"].items()) s.params[k] = v.get<double>();
    if (j.contains("reference_values"))
      for (const auto& r : j["reference_values"]) {
        auto bound = [](const Json& b) {
          if (b.is_string() && b.get<std::string>() == "-inf") return -kInf;
          return price_from_json(b);
        };
        s.reference_values.push_back({r.at("name").get<std::string>(),
                                      r.at("value").get<double>(), bound(r.at("lo")),
                                      bound(r.at("hi")),
                                      r.at("provenance").get<std::string>()});
      }
  } catch (const Json::exception& e) {
    throw JsonInputError(std::string("invalid scenario: ") + e.what(), 0, 0);
  }
  return s;
}

}  // namespace postedmech
