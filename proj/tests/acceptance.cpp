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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "postedmech/constructions.hpp"
#include "postedmech/engine.hpp"
#include "postedmech/multidim.hpp"
#include "postedmech/myerson.hpp"
#include "postedmech/prophet.hpp"
#include "postedmech/scenarios.hpp"
#include "postedmech/vcg.hpp"
#include "test_support.hpp"

using namespace postedmech;
using namespace testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::size_t violations = 0;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (violations++ < 3) detail << " [violation: " << what << "]";
    pass = false;
  }
};

using Criterion = std::function<void(Outcome&)>;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// Discrete support price per agent: deterministic rule prices, the high
// branch for lotteries.
std::vector<double> resolved_prices(const SpmSpec& spec) {
  std::vector<double> p;
  for (const auto& r : spec.rules) {
    if (const auto* d = std::get_if<DeterministicPrice>(&r)) p.push_back(d->price);
    else p.push_back(std::get<LotteryPrice>(r).split.p_hi);
  }
  return p;
}

SpmSpec fixed_spm(const FeasibilitySystem& f, const std::vector<double>& prices) {
  SpmSpec s;
  for (double p : prices) s.rules.push_back(DeterministicPrice{p, 1.0});
  s.ordering.resize(prices.size());
  std::iota(s.ordering.begin(), s.ordering.end(), 0);
  std::stable_sort(s.ordering.begin(), s.ordering.end(),
                   [&](std::size_t a, std::size_t b) { return prices[a] > prices[b]; });
  s.feasibility = f;
  return s;
}

void hotel(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  auto s = generate("hotel_intro");
  const auto& inst = std::get<Instance>(s.instance);
  auto best = optimal_iid_spm(inst.distributions[0], 2);
  auto spm = fixed_spm(inst.feasibility, best.prices);
  spm.ordering = {0, 1};
  double exact = evaluate(spm, inst, EvalMode::exact_mode()).mean_revenue;
  auto mc = monte_carlo_myerson_revenue(inst, 1'000'000, 1);
  double t = seconds_since(t0);
  o.detail << "SPM prices " << fmt(best.prices[0]) << "/" << fmt(best.prices[1])
           << ", exact SPM " << fmt(exact) << ", Myerson MC " << fmt(mc.mean_revenue)
           << " vs 400/3, " << fmt(t) << " s";
  o.require(std::abs(exact - 125.0) <= 1e-6, "SPM revenue");
  o.require(std::abs(mc.mean_revenue - 400.0 / 3.0) <= 0.5, "Myerson revenue");
  o.require(t < 5.0, "runtime");
}

void bh_gap(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  auto s = generate("bh_gap", {{"n", 100}});
  const auto& inst = std::get<Instance>(s.instance);
  auto mc = monte_carlo_myerson_revenue(inst, 1'000'000, 1);
  double spm = optimal_iid_spm(inst.distributions[0], 100).revenue;
  double ratio = mc.mean_revenue / spm;
  double t = seconds_since(t0);
  o.detail << "Myerson MC " << fmt(mc.mean_revenue) << " (target 8.862), optimal SPM "
           << fmt(spm) << " (target 7.071), ratio " << fmt(ratio) << ", " << fmt(t) << " s";
  o.require(std::abs(mc.mean_revenue / 8.862 - 1) <= 0.02, "Myerson within 2%");
  o.require(std::abs(spm / 7.071 - 1) <= 0.02, "SPM within 2%");
  o.require(ratio >= 1.20 && ratio <= 1.31, "ratio window");
  o.require(t < 60.0, "runtime");
}

void spm_half(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(301);
  double worst = kInf;
  for (int t = 0; t < 500; ++t) {
    std::size_t n = 1 + uniform_index(rng, 5);
    auto inst = random_instance(rng, random_matroid(rng, n), 3, true);
    auto stats = exact_allocation_probabilities(inst);
    auto spec = build_spm(inst, stats);
    double rev = analyze_spm(spec, inst).revenue;
    double pq = sum_price_probability(spec, inst);
    double opt = exact_myerson_revenue(inst);
    o.require(rev >= 0.5 * pq - 1e-9, "SPM < pq/2 on instance " + std::to_string(t));
    o.require(pq >= opt - 1e-9, "pq < Myerson on instance " + std::to_string(t));
    if (opt > 0) worst = std::min(worst, rev / opt);
  }
  double t = seconds_since(t0);
  o.detail << "500 instances, " << o.violations << " violations, least SPM/Myerson "
           << fmt(worst) << ", " << fmt(t) << " s";
  o.require(t < 120.0, "runtime");
}

void uniform_tight(Outcome& o) {
  std::size_t n = 20;
  auto s = generate("spm_uniform_tight", {{"n", double(n)}});
  const auto& inst = std::get<Instance>(s.instance);
  double eps = s.params.at("eps");
  std::vector<double> q(n, (1 - std::pow(eps, double(n))) / double(n));
  double rev = evaluate(build_spm(inst, q), inst, EvalMode::exact_mode()).mean_revenue;
  double closed = 1 - std::pow(19.0 / 20.0, 20.0);
  o.detail << "exact " << fmt(rev) << " vs 1-(19/20)^20 = " << fmt(closed);
  o.require(std::abs(rev - closed) <= 1e-9, "closed form");
}

void prophet(Outcome& o) {
  Rng rng(501);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 1 + uniform_index(rng, 5);
    std::size_t k = 1 + uniform_index(rng, 3);
    std::vector<PrizeLaw> laws;
    for (std::size_t i = 0; i < n; ++i) {
      auto d = random_discrete(rng, 3);
      std::vector<std::pair<double, double>> pts;
      for (std::size_t j = 0; j < d.support().size(); ++j)
        pts.emplace_back(d.support()[j] - 1.0, d.masses()[j]);  // include zero prizes
      laws.push_back(PrizeLaw::discrete(pts));
    }
    auto th = prophet_threshold(laws, k);
    double rule = threshold_rule_value(laws, k, th.c);
    double top = expected_top_k(laws, k);
    o.require(rule >= 0.5 * top - 1e-9, "collection " + std::to_string(t));
  }
  std::vector<ValueDistribution> u(2, ValueDistribution::uniform(0, 1));
  double b = prophet_threshold(u, 1).b_star;
  o.detail << "100 collections, " << o.violations << " violations; b* = " << fmt(b);
  o.require(std::abs(b - 0.38197) <= 1e-5, "b* for two uniforms");
}

void gap2(Outcome& o) {
  auto s = generate("opm_gap2", {{"eps", 0.01}});
  const auto& inst = std::get<Instance>(s.instance);
  auto opm = build_opm_uniform(inst, exact_allocation_probabilities(inst));
  double worst = opm_exact_pessimistic_revenue(opm.spec, inst);
  double opt = exact_myerson_revenue(inst);
  o.detail << "worst-order OPM " << fmt(worst) << ", Myerson " << fmt(opt);
  o.require(std::abs(worst - 1.0) <= 1e-12, "OPM revenue");
  o.require(std::abs(opt - 1.99) <= 1e-9, "Myerson revenue");
}

void partition_intersection(Outcome& o) {
  Rng rng(701);
  const std::size_t N = 100'000;
  double least_c = kInf, least_ratio = kInf;
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 1 + uniform_index(rng, 4);
    auto f = FeasibilitySystem::intersection({random_partition(rng, n), random_partition(rng, n)});
    auto inst = random_instance(rng, f, 3, false);
    auto stats = exact_allocation_probabilities(inst);
    auto spec = build_opm_partition_intersection(inst, stats);

    std::vector<double> feasible(n, 0.0);
    Rng sim(batch_seed(702, std::uint64_t(t)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t s = 0; s < N; ++s) {
      std::shuffle(order.begin(), order.end(), sim);
      auto p = sample_profile(inst, sim);
      auto tr = f.tracker();
      for (std::size_t i : order) {
        if (!tr->can_add(i)) continue;
        feasible[i] += 1;
        auto price = draw_price(spec.rules[i], sim);
        if (price && p[i] >= *price) tr->add(i);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double c = feasible[i] / double(N);
      double sigma = std::sqrt(c * (1 - c) / double(N));
      least_c = std::min(least_c, c);
      o.require(c >= 4.0 / 9.0 - 3 * sigma, "c_i on instance " + std::to_string(t));
    }
    double bound = myerson_upper_bound(inst, stats.q_hat);
    double worst = opm_exact_pessimistic_revenue(spec, inst);
    if (bound > 0) least_ratio = std::min(least_ratio, worst / bound);
    o.require(worst >= bound / 6.75 - 1e-9, "revenue on instance " + std::to_string(t));
  }
  o.detail << "100 instances, " << o.violations << " violations, least c_i " << fmt(least_c)
           << ", least worst-order / sum pq " << fmt(least_ratio);
}

void vcg(Outcome& o) {
  Rng rng(801);
  std::size_t profiles = 0;
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + uniform_index(rng, 8);
    auto inst = random_instance(rng, random_matroid(rng, n), 3, false);
    auto spm_rules = build_spm(inst, exact_allocation_probabilities(inst));
    auto prices = resolved_prices(spm_rules);
    auto spm = fixed_spm(inst.feasibility, prices);
    for_each_profile(inst, [&](const Profile& p, double) {
      ++profiles;
      double v = run_vcg_reserves(inst, prices, p).revenue();
      o.require(v >= spm_revenue_on_profile(spm, p) - 1e-9,
                "per-profile dominance on instance " + std::to_string(t));
    });
  }
  double least = kInf;
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + uniform_index(rng, 4);
    auto inst = random_instance(rng, random_matroid(rng, n), 3, true);
    auto spec = build_spm(inst, exact_allocation_probabilities(inst));
    double rev = best_vcg_reserves(spec, inst).revenue;
    double opt = exact_myerson_revenue(inst);
    if (opt > 0) least = std::min(least, rev / opt);
    o.require(rev >= 0.5 * opt - 1e-9, "half of Myerson on instance " + std::to_string(t));
  }
  o.detail << "200 instances / " << profiles << " profiles dominated; 200 regular instances, "
           << "least VCG/Myerson " << fmt(least) << "; " << o.violations << " violations";
}

void log_k(Outcome& o) {
  Rng rng(901);
  std::size_t most_groups = 0;
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 1 + uniform_index(rng, 8);
    auto inst = random_instance(rng, random_matroid(rng, n), 3, true);
    auto stats = exact_allocation_probabilities(inst);
    auto lk = build_opm_log_k(inst, stats, exact_opm_estimator());
    double k = double(std::max<std::size_t>(1, inst.feasibility.max_feasible_size()));
    double cap = std::ceil(1 + std::log(k) / std::log(1.5)) + 1;
    double groups = double(lk.groups.size());
    most_groups = std::max(most_groups, lk.groups.size());
    o.require(groups <= cap, "group count on instance " + std::to_string(t));
    double best = opm_exact_pessimistic_revenue(lk.groups[lk.best], inst);
    double pq = myerson_upper_bound(inst, stats.q_hat);
    o.require(best >= pq / (4 * groups) - 1e-9, "revenue on instance " + std::to_string(t));
  }
  o.detail << "100 instances, at most " << most_groups << " groups, " << o.violations
           << " violations";
}

MultiInstance random_multi(Rng& rng, bool items) {
  MultiInstance mi;
  mi.agents = 1 + uniform_index(rng, 3);
  for (std::size_t a = 0; a < mi.agents; ++a) {
    std::size_t k = 1 + uniform_index(rng, 2);
    for (std::size_t j = 0; j < k; ++j) {
      mi.service_agent.push_back(a);
      mi.distributions.push_back(random_discrete(rng, 3));
    }
  }
  std::size_t m = mi.services();
  if (items) {
    // Each service is one unit of one of up to three items.
    std::size_t count = 1 + uniform_index(rng, 3);
    std::vector<std::vector<std::size_t>> by_item(count);
    for (std::size_t j = 0; j < m; ++j) by_item[uniform_index(rng, count)].push_back(j);
    std::vector<std::size_t> caps;
    for (std::size_t i = 0; i < count; ++i) caps.push_back(1 + uniform_index(rng, 2));
    mi.feasibility = FeasibilitySystem::partition(m, by_item, caps);
  } else {
    mi.feasibility = random_matroid(rng, m);
  }
  return mi;
}

void multidim(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  double least_opm = kInf, least_spm = kInf;
  for (int t = 0; t < 50; ++t) {
    bool items = t % 2 == 0;
    auto mi = random_multi(rng, items);
    auto copies = copies_instance(mi);
    auto stats = exact_allocation_probabilities(copies);
    double opt = exact_myerson_revenue(copies);
    OpmSpec opm;
    if (items) {
      opm = build_opm_partition_intersection(copies, stats);
    } else {
      // Services Myerson never serves are dropped.
      for (std::size_t j = 0; j < mi.services(); ++j)
        opm.rules.push_back(stats.q_hat[j] > 0
                                ? price_rule_for_probability(copies.distributions[j], stats.q_hat[j] / 2)
                                : PriceRule{DeterministicPrice{}});
      opm.feasibility = copies.feasibility;
    }
    double worst = kInf;
    for (const auto& order : all_orders(mi.agents)) {
      double rev = exact_expectation(copies, [&](const Profile& p) {
        return multidim_opm_revenue(mi, opm, order, p);
      });
      worst = std::min(worst, rev);
      o.require(rev <= opt + 1e-9, "OPM above Myerson(copies) on instance " + std::to_string(t));
    }
    if (items) {
      if (opt > 0) least_opm = std::min(least_opm, worst / opt);
      o.require(worst >= opt / 6.75 - 1e-9, "OPM below 1/6.75 on instance " + std::to_string(t));
    }
    auto spm = build_multidim_spm(mi, stats);
    double myopic = multidim_spm_exact_revenue(mi, spm, MyopicStrategy{});
    if (opt > 0) least_spm = std::min(least_spm, myopic / opt);
    o.require(myopic >= opt / 8 - 1e-9, "SPM below 1/8 on instance " + std::to_string(t));
  }
  double t = seconds_since(t0);
  o.detail << "50 instances, least OPM/Myerson(copies) " << fmt(least_opm)
           << ", least myopic SPM/Myerson(copies) " << fmt(least_spm) << ", "
           << o.violations << " violations, " << fmt(t) << " s";
  o.require(t < 300.0, "runtime");
}

void gaps(Outcome& o) {
  ReproduceOptions ro{200'000, 1};
  auto a = reproduce(generate("spm_nonmatroid_gap", {{"m", 3}}), ro);
  auto b = reproduce(generate("opm_order_gap_tree", {{"m", 3}}), ro);
  auto measured = [](const ReproduceReport& r, const std::string& name) {
    for (const auto& c : r.checks)
      if (c.name == name) return c.measured;
    return 0.0;
  };
  double ra = measured(a, "ratio"), rb = measured(b, "ratio");
  o.detail << "Myerson/SPM " << fmt(ra) << " (nonmatroid, m=3), best/worst order " << fmt(rb)
           << " (tree, m=3)";
  o.require(a.pass(), "spm_nonmatroid_gap reproduction");
  o.require(b.pass(), "opm_order_gap_tree reproduction");
  o.require(ra >= 2.0, "nonmatroid ratio");
  o.require(rb >= 2.0, "tree ratio");
}

void foundations(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(1201);
  std::vector<ValueDistribution> kinds{
      ValueDistribution::uniform(0, 1), ValueDistribution::uniform(100, 200),
      ValueDistribution::equal_revenue(), ValueDistribution::two_point(1, 0.9, 10, 0.1),
      ValueDistribution::discrete({{1, 0.9}, {10, 0.1}})};
  for (int i = 0; i < 100; ++i) kinds.push_back(random_discrete(rng, 5));
  for (const auto& d : kinds) {
    std::vector<double> grid;
    if (d.is_discrete()) {
      grid = d.support();
    } else {
      double lo = d.support_min(), hi = d.support_max() == kInf ? 50.0 : d.support_max();
      for (int i = 0; i <= 2000; ++i) grid.push_back(lo + (hi - lo) * i / 2000.0);
    }
    for (std::size_t j = 1; j < grid.size(); ++j)
      o.require(d.ironed_virtual_value(grid[j - 1]) <= d.ironed_virtual_value(grid[j]) + 1e-12,
                "ironed monotonicity");
    const auto& c = d.revenue_curve();
    for (int j = 0; j <= 1000; ++j) {
      double q = j / 1000.0;
      o.require(c.hull(q) >= c.value(q) - 1e-12, "hull below revenue curve");
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const auto& d = kinds[uniform_index(rng, kinds.size())];
    double q = uniform_real(rng, 1e-6, 1.0);
    auto t = two_price_decomposition(d, q);
    o.require(std::abs(t.x * t.q_lo + (1 - t.x) * t.q_hi - q) <= 1e-10, "two-price reconstruction");
  }
  std::size_t rules = 0;
  for (std::size_t k = 0; k < 5; ++k)
    for (double q : {0.3, 0.75}) {
      const auto& d = kinds[k];
      auto rule = price_rule_for_probability(d, q);
      const int N = 100000;
      int acc = 0;
      for (int s = 0; s < N; ++s) {
        auto p = draw_price(rule, rng);
        acc += p && d.sample(rng) >= *p;
      }
      ++rules;
      o.require(std::abs(acc / double(N) - q) <= 3 * std::sqrt(q * (1 - q) / N),
                "calibration of rule " + std::to_string(rules));
    }
  double t = seconds_since(t0);
  o.detail << kinds.size() << " laws, 1000 two-price splits, " << rules
           << " calibrated rules, " << o.violations << " violations, " << fmt(t) << " s";
  o.require(t < 60.0, "runtime");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Criterion>> criteria{
      {"hotel_intro revenue figures", hotel},
      {"bh_gap at n=100", bh_gap},
      {"SPM half-approximation on matroids", spm_half},
      {"spm_uniform_tight closed form", uniform_tight},
      {"k-choice prophet inequality", prophet},
      {"opm_gap2 factor two", gap2},
      {"partition-matroid-intersection OPM", partition_intersection},
      {"VCG with reserves", vcg},
      {"O(log k) matroid OPM", log_k},
      {"multi-parameter layer", multidim},
      {"gap scenarios at m=3", gaps},
      {"numerical foundations", foundations},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    double t = seconds_since(t0);
    std::printf("%s criterion %zu: %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.str().c_str(), t);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%s: %d of %zu criteria failed\n", failures ? "FAIL" : "PASS", failures,
              criteria.size());
  return failures ? 1 : 0;
}
