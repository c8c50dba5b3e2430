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

#include <cmath>

#include "postedmech/distribution.hpp"
#include "test_support.hpp"

using namespace postedmech;
using testing_support::random_discrete;
using testing_support::uniform_real;

namespace {

std::vector<ValueDistribution> all_kinds() {
  return {ValueDistribution::uniform(0, 1),
          ValueDistribution::uniform(100, 200),
          ValueDistribution::equal_revenue(),
          ValueDistribution::two_point(1, 0.9, 10, 0.1),
          ValueDistribution::discrete({{1, 0.5}, {3, 0.5}}),
          ValueDistribution::discrete({{1, 0.9}, {10, 0.1}}),
          ValueDistribution::discrete({{2, 0.2}, {3, 0.5}, {7, 0.3}})};
}

// Grid over the support; continuous tails are truncated.
std::vector<double> value_grid(const ValueDistribution& d) {
  if (d.is_discrete()) return d.support();
  double lo = d.support_min();
  double hi = d.support_max() == kInf ? 50.0 : d.support_max();
  std::vector<double> g;
  for (int i = 0; i <= 1000; ++i) g.push_back(lo + (hi - lo) * i / 1000.0);
  return g;
}

// Concave envelope at q by brute force over pairs of polyline vertices.
double brute_hull(const std::vector<QuantilePoint>& v, double q) {
  double best = -kInf;
  for (const auto& a : v)
    for (const auto& b : v) {
      if (a.q > q || b.q < q) continue;
      double r = a.q == b.q ? std::max(a.r, b.r)
                            : a.r + (b.r - a.r) * (q - a.q) / (b.q - a.q);
      best = std::max(best, r);
    }
  return best;
}

// Numeric inverse of the CDF by bisection.
double invert_cdf(const ValueDistribution& d, double target, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    double mid = (lo + hi) / 2;
    (d.cdf(mid) < target ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace

TEST_CASE("cdf examples") {
  CHECK(cdf(ValueDistribution::uniform(0, 1), 0.5) == doctest::Approx(0.5));
  CHECK(cdf(ValueDistribution::equal_revenue(), 2) == doctest::Approx(0.75));
  CHECK(cdf(ValueDistribution::discrete({{1, 0.5}, {3, 0.5}}), 1) == doctest::Approx(0.5));
}

TEST_CASE("price for probability examples") {
  auto [p1, o1] = price_for_probability(ValueDistribution::uniform(0, 1), 0.5);
  CHECK(p1 == doctest::Approx(0.5));
  CHECK(o1 == doctest::Approx(1.0));
  auto [p2, o2] = price_for_probability(ValueDistribution::discrete({{1, 1.0}}), 0.25);
  CHECK(p2 == 1.0);
  CHECK(o2 == doctest::Approx(0.25));
  auto er = ValueDistribution::equal_revenue();
  auto [p3, o3] = price_for_probability(er, 0.04);
  CHECK(p3 == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(o3 == doctest::Approx(1.0));
  CHECK(invert_cdf(er, 1 - 0.04, 1, 100) == doctest::Approx(p3).epsilon(1e-9));
  CHECK_THROWS_AS(price_for_probability(er, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(price_for_probability(er, 1.5), std::invalid_argument);
}

TEST_CASE("virtual value examples") {
  CHECK(virtual_value(ValueDistribution::uniform(0, 1), 0.75) == doctest::Approx(0.5));
  auto er = ValueDistribution::equal_revenue();
  CHECK(virtual_value(er, 4) == doctest::Approx(2.0));
  // Finite-difference density oracle.
  double h = 1e-5;
  double f = (er.cdf(4 + h) - er.cdf(4 - h)) / (2 * h);
  CHECK(4 - (1 - er.cdf(4)) / f == doctest::Approx(2.0).epsilon(1e-6));
  auto d = ValueDistribution::discrete({{1, 0.5}, {2, 0.5}});
  CHECK(virtual_value(d, 1) == doctest::Approx(0.0));
  // Revenue-curve slope between the vertices at q = 1 and q = 0.5.
  const auto& c = d.revenue_curve();
  CHECK((c.value(1.0) - c.value(0.5)) / 0.5 == doctest::Approx(0.0));
  CHECK_THROWS_AS(virtual_value(d, 1.5), std::invalid_argument);
}

TEST_CASE("ironed virtual value examples") {
  CHECK(ironed_virtual_value(ValueDistribution::uniform(0, 1), 0.75) == doctest::Approx(0.5));
  auto d = ValueDistribution::discrete({{1, 0.5}, {2, 0.5}});
  CHECK(ironed_virtual_value(d, 1) <= ironed_virtual_value(d, 2));
  auto e = ValueDistribution::discrete({{1, 0.9}, {10, 0.1}});
  const auto& curve = e.revenue_curve();
  for (int i = 1; i <= 100; ++i) {
    double q = i / 100.0;
    CHECK(curve.hull(q) >= curve.value(q) - 1e-12);
    CHECK(curve.hull(q) == doctest::Approx(brute_hull(curve.vertices(), q)));
  }
  // Slope at q = Pr[V >= 1] = 1 is that of the last hull segment.
  CHECK(ironed_virtual_value(e, 1) ==
        doctest::Approx((curve.hull(1.0) - curve.hull(0.1)) / 0.9));
}

TEST_CASE("two-price decomposition examples") {
  auto u = two_price_decomposition(ValueDistribution::uniform(0, 1), 0.5);
  CHECK(u.p_lo == doctest::Approx(0.5));
  CHECK(u.p_hi == doctest::Approx(0.5));
  CHECK(u.x == 1.0);
  CHECK(u.effective_price == doctest::Approx(0.5));
  CHECK(u.degenerate());

  auto d = ValueDistribution::discrete({{1, 0.5}, {2, 0.5}});
  auto t = two_price_decomposition(d, 0.75);
  CHECK(t.p_lo == 1.0);
  CHECK(t.p_hi == 2.0);
  CHECK(t.q_lo == doctest::Approx(1.0));
  CHECK(t.q_hi == doctest::Approx(0.5));
  CHECK(t.x == doctest::Approx(0.5));
  // Brute force: best mix of two support prices serving with probability 0.75.
  double best = 0.0;
  for (double a : d.support())
    for (double b : d.support()) {
      double sa = d.survival(a), sb = d.survival(b);
      if (sa == sb) continue;
      double x = (0.75 - sb) / (sa - sb);
      if (x < 0 || x > 1) continue;
      best = std::max(best, x * a * sa + (1 - x) * b * sb);
    }
  CHECK(t.effective_price * 0.75 == doctest::Approx(best));

  for (const auto& k : all_kinds()) {
    auto one = two_price_decomposition(k, 1.0);
    CHECK(one.p_lo == doctest::Approx(k.support_min()));
    CHECK(one.p_hi == doctest::Approx(k.support_min()));
    CHECK(one.effective_price == doctest::Approx(k.support_min()));
  }
  CHECK_THROWS_AS(two_price_decomposition(d, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(two_price_decomposition(d, 1.01), std::invalid_argument);
}

TEST_CASE("sampling examples") {
  Rng rng(7);
  auto seven = ValueDistribution::discrete({{7, 1.0}});
  for (int i = 0; i < 100; ++i) CHECK(sample(seven, rng) == 7.0);

  auto u = ValueDistribution::uniform(0, 1);
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(sample(u, a) == sample(u, b));

  auto er = ValueDistribution::equal_revenue();
  Rng r(3);
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += sample(er, r) >= 2.0;
  CHECK(hits / 100000.0 == doctest::Approx(0.25).epsilon(0.04));
}

TEST_CASE("quantile is the generalized inverse of the cdf") {
  for (const auto& d : all_kinds())
    for (int i = 1; i < 1000; ++i) {
      double u = i / 1000.0;
      double v = d.quantile(u);
      CHECK(d.cdf(v) >= u - 1e-12);
      // Nothing smaller reaches level u.
      double below = d.is_discrete() ? std::nextafter(v, -kInf) : v - 1e-9 * std::max(1.0, v);
      if (below >= d.support_min()) CHECK(d.cdf(below) <= u + 1e-9);
    }
}

TEST_CASE("ironed virtual value is monotone on every kind") {
  Rng rng(11);
  auto kinds = all_kinds();
  for (int i = 0; i < 200; ++i) kinds.push_back(random_discrete(rng, 5));
  for (const auto& d : kinds) {
    auto grid = value_grid(d);
    for (std::size_t j = 1; j < grid.size(); ++j)
      CHECK(d.ironed_virtual_value(grid[j - 1]) <= d.ironed_virtual_value(grid[j]) + 1e-12);
  }
}

TEST_CASE("hull dominates the revenue curve and is concave") {
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    auto d = random_discrete(rng, 5);
    const auto& c = d.revenue_curve();
    for (int j = 0; j <= 200; ++j) {
      double q = j / 200.0;
      CHECK(c.hull(q) >= c.value(q) - 1e-12);
    }
    const auto& h = c.hull_vertices();
    CHECK(h.front().q == 0.0);
    CHECK(h.front().r == 0.0);
    for (std::size_t a = 0; a < h.size(); ++a)
      for (std::size_t b = a + 1; b < h.size(); ++b) {
        double mq = (h[a].q + h[b].q) / 2;
        CHECK(c.hull(mq) >= (h[a].r + h[b].r) / 2 - 1e-12);
      }
  }
  for (auto c : {RevenueCurve::uniform(0, 1), RevenueCurve::equal_revenue()})
    for (int j = 1; j < 100; ++j) {
      double a = (j - 1) / 100.0, b = (j + 1) / 100.0;
      CHECK(c.hull((a + b) / 2) >= (c.hull(a) + c.hull(b)) / 2 - 1e-12);
    }
}

TEST_CASE("regular continuous kinds are not ironed") {
  for (const auto& d : {ValueDistribution::uniform(0, 1), ValueDistribution::uniform(100, 200),
                        ValueDistribution::equal_revenue()}) {
    CHECK(d.is_regular());
    for (double v : value_grid(d))
      CHECK(d.ironed_virtual_value(v) == doctest::Approx(d.virtual_value(v)).epsilon(1e-9));
  }
}

TEST_CASE("two-price reconstruction is exact") {
  Rng rng(13);
  auto kinds = all_kinds();
  for (int i = 0; i < 1000; ++i) {
    ValueDistribution d = i % 4 == 0 ? kinds[uniform_index(rng, kinds.size())]
                                     : random_discrete(rng, 5);
    double q = uniform_real(rng, 1e-6, 1.0);
    auto t = two_price_decomposition(d, q);
    CHECK(std::abs(t.x * t.q_lo + (1 - t.x) * t.q_hi - q) <= 1e-10);
    CHECK(t.q_hi <= q + 1e-12);
    CHECK(q <= t.q_lo + 1e-12);
    double rev = t.x * t.p_lo * t.q_lo + (t.q_hi > 0 ? (1 - t.x) * t.p_hi * t.q_hi : 0.0);
    CHECK(t.effective_price * q == doctest::Approx(rev));
    CHECK(t.effective_price * q == doctest::Approx(d.revenue_curve().hull(q)));
  }
}

TEST_CASE("price for probability is exact") {
  Rng rng(14);
  auto kinds = all_kinds();
  for (int i = 0; i < 1000; ++i) {
    ValueDistribution d = i % 4 == 0 ? kinds[uniform_index(rng, kinds.size())]
                                     : random_discrete(rng, 5);
    double q = uniform_real(rng, 1e-6, 1.0);
    auto [p, o] = d.price_for_probability(q);
    CHECK(o > 0.0);
    CHECK(o <= 1.0);
    CHECK(std::abs(o * d.survival(p) - q) <= 1e-12);
  }
}

TEST_CASE("sampling matches the cdf in Kolmogorov distance") {
  for (const auto& d : all_kinds()) {
    Rng rng(99);
    std::vector<double> xs(100000);
    for (double& x : xs) x = d.sample(rng);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i + 1 < xs.size() && xs[i + 1] == xs[i]) continue;
      double emp = double(i + 1) / double(xs.size());
      ks = std::max(ks, std::abs(emp - d.cdf(xs[i])));
    }
    CHECK(ks < 0.01);
  }
}

TEST_CASE("invalid laws are rejected") {
  CHECK_THROWS_AS(ValueDistribution::discrete({{1, 0.5}, {2, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(ValueDistribution::discrete({{1, 0.0}, {2, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ValueDistribution::uniform(2, 1), std::invalid_argument);
  CHECK_THROWS_AS(ValueDistribution::uniform(-1, 1), std::invalid_argument);
}
