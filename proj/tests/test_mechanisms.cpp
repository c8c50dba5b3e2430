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

#include <doctest.h>

#include <numeric>

#include "postedmech/engine.hpp"
#include "postedmech/myerson.hpp"
#include "postedmech/vcg.hpp"
#include "test_support.hpp"

using namespace postedmech;
using namespace testing_support;

namespace {

Instance iid(const ValueDistribution& d, std::size_t n, FeasibilitySystem f) {
  return Instance(std::vector<ValueDistribution>(n, d), std::move(f));
}

SpmSpec fixed_price_spm(const Instance& inst, const std::vector<double>& prices,
                        std::vector<std::size_t> order) {
  SpmSpec s;
  for (double p : prices) s.rules.push_back(DeterministicPrice{p, 1.0});
  s.ordering = std::move(order);
  s.feasibility = inst.feasibility;
  return s;
}

Profile random_profile(Rng& rng, const Instance& inst) { return sample_profile(inst, rng); }

}  // namespace

TEST_CASE("myerson on a single uniform agent posts the monopoly price") {
  auto inst = iid(ValueDistribution::uniform(0, 1), 1, FeasibilitySystem::uniform(1, 1));
  auto hi = run_myerson(inst, {0.7});
  CHECK(hi.served.contains(0));
  CHECK(hi.payments[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(run_myerson(inst, {0.4}).served.empty());
  CHECK(run_myerson(inst, {0.4}).revenue() == 0.0);
}

TEST_CASE("myerson on the two-guest hotel earns 400/3") {
  auto inst = iid(ValueDistribution::uniform(100, 200), 2, FeasibilitySystem::uniform(2, 1));
  auto e = monte_carlo_myerson_revenue(inst, 200000, 5);
  CHECK(std::abs(e.mean_revenue - 400.0 / 3.0) < 0.5);
}

TEST_CASE("myerson on two coin-flip agents") {
  auto d = ValueDistribution::discrete({{1, 0.5}, {2, 0.5}});
  auto inst = iid(d, 2, FeasibilitySystem::uniform(2, 1));
  // Only value 2 has positive virtual value; whoever holds it pays 2.
  double hand = 0.75 * 2.0;
  double enumerated = 0.0;
  for (double a : {1.0, 2.0})
    for (double b : {1.0, 2.0}) enumerated += 0.25 * run_myerson(inst, {a, b}).revenue();
  CHECK(enumerated == doctest::Approx(hand));
  CHECK(exact_myerson_revenue(inst) == doctest::Approx(hand));
  CHECK(exact_expected_virtual_surplus(inst) == doctest::Approx(hand));
  auto mc = monte_carlo_myerson_revenue(inst, 1000000, 9);
  CHECK(std::abs(mc.mean_revenue - hand) <= 3 * mc.std_error + 1e-12);
}

TEST_CASE("exact evaluation of trivial mechanisms") {
  auto inst = iid(ValueDistribution::discrete({{3, 1.0}}), 2, FeasibilitySystem::uniform(2, 2));
  CHECK(exact_myerson_revenue(inst) == doctest::Approx(6.0));
  auto high = fixed_price_spm(inst, {10, 10}, {0, 1});
  CHECK(evaluate(high, inst, EvalMode::exact_mode()).mean_revenue == 0.0);
  auto cont = iid(ValueDistribution::uniform(0, 1), 2, FeasibilitySystem::uniform(2, 1));
  CHECK_THROWS_AS(exact_myerson_revenue(cont), std::invalid_argument);
}

TEST_CASE("outcomes are feasible and individually rational") {
  Rng rng(31);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 1 + uniform_index(rng, 6);
    auto inst = random_instance(rng, random_matroid(rng, n), 4, false);
    auto p = random_profile(rng, inst);
    auto out = run_myerson(inst, p);
    CHECK(inst.feasibility.is_feasible(out.served));
    for (std::size_t i = 0; i < n; ++i) {
      if (out.served.contains(i)) {
        CHECK(out.payments[i] <= p[i] + 1e-12);
        CHECK(inst.distributions[i].ironed_virtual_value(p[i]) > 0);
      } else {
        CHECK(out.payments[i] == 0.0);
      }
    }
  }
}

TEST_CASE("myerson allocation is monotone in own value") {
  Rng rng(32);
  for (int t = 0; t < 500; ++t) {
    std::size_t n = 1 + uniform_index(rng, 5);
    FeasibilitySystem f = t % 4 == 0
        ? FeasibilitySystem::intersection({random_matroid(rng, n), random_matroid(rng, n)})
        : random_matroid(rng, n);
    auto inst = random_instance(rng, f, 4, false);
    auto p = random_profile(rng, inst);
    std::size_t i = uniform_index(rng, n);
    if (!run_myerson(inst, p).served.contains(i)) continue;
    for (double v : inst.distributions[i].support()) {
      if (v < p[i]) continue;
      auto q = p;
      q[i] = v;
      CHECK(run_myerson(inst, q).served.contains(i));
    }
  }
}

TEST_CASE("payments are critical values") {
  Rng rng(33);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 1 + uniform_index(rng, 5);
    auto inst = random_instance(rng, random_matroid(rng, n), 4, false);
    auto p = random_profile(rng, inst);
    auto out = run_myerson(inst, p);
    for (std::size_t i : out.served.members()) {
      double least = kInf;
      for (double v : inst.distributions[i].support()) {
        auto q = p;
        q[i] = v;
        if (run_myerson(inst, q).served.contains(i)) least = std::min(least, v);
      }
      CHECK(out.payments[i] == doctest::Approx(least));
    }
  }
}

TEST_CASE("revenue equals virtual surplus on regular laws") {
  Rng rng(34);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 1 + uniform_index(rng, 4);
    auto inst = random_instance(rng, random_matroid(rng, n), 4, true);
    double rev = exact_myerson_revenue(inst);
    double surplus = exact_expectation(inst, [&](const Profile& p) {
      double s = 0.0;
      for (std::size_t i : run_myerson(inst, p).served.members())
        s += inst.distributions[i].virtual_value(p[i]);
      return s;
    });
    CHECK(std::abs(rev - surplus) <= 1e-9);
  }
}

TEST_CASE("revenue never exceeds ironed virtual surplus") {
  Rng rng(35);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + uniform_index(rng, 4);
    auto inst = random_instance(rng, random_matroid(rng, n), 4, false);
    CHECK(exact_myerson_revenue(inst) <= exact_expected_virtual_surplus(inst) + 1e-9);
  }
}

TEST_CASE("myerson dominates posted prices and vcg with reserves") {
  Rng rng(36);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + uniform_index(rng, 4);
    auto inst = random_instance(rng, random_matroid(rng, n), 4, false);
    double opt = exact_myerson_revenue(inst);
    std::vector<double> prices(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = inst.distributions[i].support();
      prices[i] = s[uniform_index(rng, s.size())];
    }
    auto order = all_orders(n)[uniform_index(rng, all_orders(n).size())];
    double spm = evaluate(fixed_price_spm(inst, prices, order), inst, EvalMode::exact_mode())
                     .mean_revenue;
    double vcg = evaluate(VcgSpec{prices}, inst, EvalMode::exact_mode()).mean_revenue;
    CHECK(spm <= opt + 1e-9);
    CHECK(vcg <= opt + 1e-9);
  }
}

TEST_CASE("vcg with reserves examples") {
  auto inst = iid(ValueDistribution::discrete({{3, 0.5}, {5, 0.5}}), 2,
                  FeasibilitySystem::uniform(2, 1));
  std::vector<double> low{1, 1}, high{4, 4};
  auto a = run_vcg_reserves(inst, low, {5, 3});
  CHECK(a.served == AgentSet(2, {0}));
  CHECK(a.payments[0] == doctest::Approx(3.0));
  auto b = run_vcg_reserves(inst, high, {5, 3});
  CHECK(b.served == AgentSet(2, {0}));
  CHECK(b.payments[0] == doctest::Approx(4.0));
  auto nm = Instance(inst.distributions,
                     FeasibilitySystem::intersection({FeasibilitySystem::uniform(2, 1),
                                                      FeasibilitySystem::uniform(2, 2)}));
  CHECK_THROWS_AS(run_vcg_reserves(nm, low, {5, 3}), std::invalid_argument);
}

TEST_CASE("vcg with reserves dominates the same-price sequential mechanism per profile") {
  Rng rng(37);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 1 + uniform_index(rng, 8);
    auto inst = random_instance(rng, random_matroid(rng, n), 3, false);
    std::vector<double> prices(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = inst.distributions[i].support();
      prices[i] = s[uniform_index(rng, s.size())];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    auto spm = fixed_price_spm(inst, prices, order);
    for (int k = 0; k < 20; ++k) {
      auto p = random_profile(rng, inst);
      auto v = run_vcg_reserves(inst, prices, p);
      CHECK(inst.feasibility.is_feasible(v.served));
      CHECK(v.revenue() >= spm_revenue_on_profile(spm, p) - 1e-9);
    }
  }
}

TEST_CASE("allocation estimates") {
  auto one = iid(ValueDistribution::uniform(0, 1), 1, FeasibilitySystem::uniform(1, 1));
  auto s = estimate_allocation_probabilities(one, 100000, 3, false);
  CHECK(s.q_hat[0] == doctest::Approx(0.5).epsilon(0.02));
  CHECK(s.num_samples == 100000);

  // Agent 1 never beats agent 0.
  auto dom = Instance({ValueDistribution::discrete({{10, 1.0}}),
                       ValueDistribution::discrete({{1, 1.0}})},
                      FeasibilitySystem::uniform(2, 1));
  auto f = estimate_allocation_probabilities(dom, 1000, 4, true);
  CHECK(f.q_hat[1] == doctest::Approx(0.25));
  CHECK(f.q_floor_applied[1]);

  auto d = ValueDistribution::discrete({{1, 0.3}, {2, 0.3}, {4, 0.4}});
  auto two = iid(d, 2, FeasibilitySystem::uniform(2, 1));
  auto exact = exact_allocation_probabilities(two);
  std::size_t N = 100000;
  auto est = estimate_allocation_probabilities(two, N, 5, false);
  for (std::size_t i = 0; i < 2; ++i) {
    double q = exact.q_hat[i];
    double sigma = std::sqrt(q * (1 - q) / double(N));
    CHECK(std::abs(est.q_hat[i] - q) <= 3 * sigma);
  }
  // Same seed, same answer.
  auto again = estimate_allocation_probabilities(two, N, 5, false);
  CHECK(again.q_hat == est.q_hat);
}

TEST_CASE("sample count formula") {
  CHECK(sampling_sample_count(2) == std::size_t(std::ceil(4 * 16 * std::log(2.0) * 36)));
  CHECK(sampling_sample_count(3) == std::size_t(std::ceil(4 * 81 * std::log(3.0) * 81)));
}

TEST_CASE("estimates bracket the true probabilities at the formula sample count") {
  Rng rng(38);
  for (std::size_t n : {2, 3}) {
    auto inst = random_instance(rng, FeasibilitySystem::uniform(n, 1), 3, false);
    auto exact = exact_allocation_probabilities(inst);
    double eps = 1.0 / (3.0 * double(n));
    std::size_t good = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      auto est = estimate_allocation_probabilities(inst, std::nullopt, 1000 + trial, true);
      CHECK(est.num_samples == sampling_sample_count(n));
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) {
        double q = exact.q_hat[i];
        ok = ok && est.q_hat[i] >= q - 1e-12 &&
             est.q_hat[i] <= (1 + 3 * eps) * q + 2.0 / double(n * n) + 1e-12;
      }
      good += ok;
    }
    CHECK(good >= 95);
  }
}
