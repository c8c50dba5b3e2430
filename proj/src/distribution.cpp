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

#include "postedmech/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace postedmech {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kQuantileTol = 1e-12;

double cross(const QuantilePoint& o, const QuantilePoint& a,
             const QuantilePoint& b) {
  return (a.q - o.q) * (b.r - o.r) - (a.r - o.r) * (b.q - o.q);
}

std::vector<QuantilePoint> upper_hull(const std::vector<QuantilePoint>& pts) {
  std::vector<QuantilePoint> h;
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, std::abs(p.r));
  for (const auto& p : pts) {
    while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), p) >= -1e-14 * scale)
      h.pop_back();
    h.push_back(p);
  }
  return h;
}

double check_probability(double q) {
  if (!(q > 0.0) || q > 1.0 + kQuantileTol)
    throw std::invalid_argument("probability must lie in (0, 1], got " +
                                std::to_string(q));
  return std::min(q, 1.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// RevenueCurve

RevenueCurve RevenueCurve::polyline(std::vector<QuantilePoint> vertices) {
  RevenueCurve c;
  c.shape_ = Shape::kPolyline;
  c.vertices_ = std::move(vertices);
  c.hull_ = upper_hull(c.vertices_);
  return c;
}

RevenueCurve RevenueCurve::uniform(double lo, double hi) {
  RevenueCurve c;
  c.shape_ = Shape::kUniform;
  c.lo_ = lo;
  c.hi_ = hi;
  return c;
}

RevenueCurve RevenueCurve::equal_revenue() {
  RevenueCurve c;
  c.shape_ = Shape::kEqualRevenue;
  return c;
}

namespace {
double interpolate(const std::vector<QuantilePoint>& pts, double q) {
  if (q <= 0.0) return pts.front().r;
  if (q >= pts.back().q) return pts.back().r;
  auto it = std::lower_bound(
      pts.begin(), pts.end(), q,
      [](const QuantilePoint& p, double v) { return p.q < v; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  if (b.q == q) return b.r;
  double t = (q - a.q) / (b.q - a.q);
  return a.r + t * (b.r - a.r);
}
}  // namespace

double RevenueCurve::value(double q) const {
  switch (shape_) {
    case Shape::kUniform:
      return q * (hi_ - q * (hi_ - lo_));
    case Shape::kEqualRevenue:
      return std::sqrt(std::max(q, 0.0));
    case Shape::kPolyline:
      break;
  }
  return interpolate(vertices_, q);
}

double RevenueCurve::hull(double q) const {
  if (shape_ != Shape::kPolyline) return value(q);
  return interpolate(hull_, q);
}

std::size_t RevenueCurve::hull_segment(double q) const {
  if (hull_.size() < 2) return 0;
  auto it = std::lower_bound(
      hull_.begin() + 1, hull_.end(), q,
      [](const QuantilePoint& p, double v) { return p.q < v; });
  if (it == hull_.end()) --it;
  return static_cast<std::size_t>(it - hull_.begin()) - 1;
}

double RevenueCurve::hull_slope(double q) const {
  switch (shape_) {
    case Shape::kUniform:
      return hi_ - 2.0 * q * (hi_ - lo_);
    case Shape::kEqualRevenue:
      return 0.5 / std::sqrt(q);
    case Shape::kPolyline:
      break;
  }
  std::size_t k = hull_segment(q);
  const auto& a = hull_[k];
  const auto& b = hull_[k + 1];
  return (b.r - a.r) / (b.q - a.q);
}

// ---------------------------------------------------------------------------
// ValueDistribution construction

void ValueDistribution::build_table(
    std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw std::invalid_argument("discrete law needs points");
  std::sort(points.begin(), points.end());
  auto t = std::make_shared<Table>();
  double total = 0.0;
  for (const auto& [v, m] : points) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("support values must be finite and >= 0");
    if (!(m > 0.0)) throw std::invalid_argument("masses must be positive");
    total += m;
    if (!t->values.empty() && t->values.back() == v) {
      t->masses.back() += m;
    } else {
      t->values.push_back(v);
      t->masses.push_back(m);
    }
  }
  if (std::abs(total - 1.0) > kMassTol)
    throw std::invalid_argument("masses must sum to 1");

  const std::size_t m = t->values.size();
  t->below.resize(m);
  t->above.resize(m);
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    acc += t->masses[j];
    t->below[j] = acc;
  }
  t->below[m - 1] = 1.0;
  acc = 0.0;
  for (std::size_t j = m; j-- > 0;) {
    acc += t->masses[j];
    t->above[j] = acc;
  }
  t->above[0] = 1.0;

  t->phi.resize(m);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    t->phi[j] = t->values[j] - t->above[j + 1] *
                                   (t->values[j + 1] - t->values[j]) /
                                   t->masses[j];
  }
  t->phi[m - 1] = t->values[m - 1];

  std::vector<QuantilePoint> verts;
  verts.push_back({0.0, 0.0});
  for (std::size_t j = m; j-- > 0;)
    verts.push_back({t->above[j], t->values[j] * t->above[j]});
  auto curve = std::make_shared<RevenueCurve>(RevenueCurve::polyline(verts));

  t->ironed.resize(m);
  for (std::size_t j = 0; j < m; ++j) t->ironed[j] = curve->hull_slope(t->above[j]);

  table_ = std::move(t);
  curve_ = std::move(curve);
}

ValueDistribution ValueDistribution::discrete(
    std::vector<std::pair<double, double>> points) {
  ValueDistribution d;
  d.build_table(points);
  DiscreteLaw law;
  law.values = d.table_->values;
  law.masses = d.table_->masses;
  d.kind_ = std::move(law);
  return d;
}

ValueDistribution ValueDistribution::uniform(double lo, double hi) {
  if (!(lo < hi) || lo < 0.0 || !std::isfinite(hi))
    throw std::invalid_argument("uniform law requires 0 <= lo < hi");
  ValueDistribution d;
  d.kind_ = UniformLaw{lo, hi};
  d.curve_ = std::make_shared<RevenueCurve>(RevenueCurve::uniform(lo, hi));
  return d;
}

ValueDistribution ValueDistribution::equal_revenue() {
  ValueDistribution d;
  d.kind_ = EqualRevenueLaw{};
  d.curve_ = std::make_shared<RevenueCurve>(RevenueCurve::equal_revenue());
  return d;
}

ValueDistribution ValueDistribution::two_point(double lo_value, double lo_prob,
                                               double hi_value, double hi_prob) {
  if (!(lo_value < hi_value))
    throw std::invalid_argument("two-point law requires lo value < hi value");
  ValueDistribution d;
  d.build_table({{lo_value, lo_prob}, {hi_value, hi_prob}});
  d.kind_ = TwoPointLaw{lo_value, lo_prob, hi_value, hi_prob};
  return d;
}

// ---------------------------------------------------------------------------
// Queries

const std::vector<double>& ValueDistribution::support() const {
  if (!table_) throw std::logic_error("support() needs a discrete law");
  return table_->values;
}

const std::vector<double>& ValueDistribution::masses() const {
  if (!table_) throw std::logic_error("masses() needs a discrete law");
  return table_->masses;
}

std::size_t ValueDistribution::support_index(double v) const {
  const auto& vs = support();
  auto it = std::lower_bound(vs.begin(), vs.end(), v);
  if (it == vs.end() || *it != v)
    throw std::invalid_argument("value " + std::to_string(v) +
                                " is not a support point");
  return static_cast<std::size_t>(it - vs.begin());
}

double ValueDistribution::support_min() const {
  if (table_) return table_->values.front();
  if (auto* u = std::get_if<UniformLaw>(&kind_)) return u->lo;
  return 1.0;
}

double ValueDistribution::support_max() const {
  if (table_) return table_->values.back();
  if (auto* u = std::get_if<UniformLaw>(&kind_)) return u->hi;
  return kInf;
}

bool ValueDistribution::in_support(double v) const {
  if (table_)
    return std::binary_search(table_->values.begin(), table_->values.end(), v);
  return v >= support_min() && v <= support_max() && std::isfinite(v);
}

double ValueDistribution::cdf(double v) const {
  if (table_) {
    const auto& vs = table_->values;
    auto it = std::upper_bound(vs.begin(), vs.end(), v);
    if (it == vs.begin()) return 0.0;
    return table_->below[static_cast<std::size_t>(it - vs.begin()) - 1];
  }
  if (auto* u = std::get_if<UniformLaw>(&kind_)) {
    if (v <= u->lo) return 0.0;
    if (v >= u->hi) return 1.0;
    return (v - u->lo) / (u->hi - u->lo);
  }
  if (v <= 1.0) return 0.0;
  return 1.0 - 1.0 / (v * v);
}

double ValueDistribution::survival(double p) const {
  if (p == kInf) return 0.0;
  if (table_) {
    const auto& vs = table_->values;
    auto it = std::lower_bound(vs.begin(), vs.end(), p);
    if (it == vs.end()) return 0.0;
    return table_->above[static_cast<std::size_t>(it - vs.begin())];
  }
  if (auto* u = std::get_if<UniformLaw>(&kind_)) {
    if (p <= u->lo) return 1.0;
    if (p >= u->hi) return 0.0;
    return (u->hi - p) / (u->hi - u->lo);
  }
  if (p <= 1.0) return 1.0;
  return 1.0 / (p * p);
}

double ValueDistribution::quantile(double u) const {
  if (table_) {
    const auto& below = table_->below;
    auto it = std::lower_bound(below.begin(), below.end(), u);
    if (it == below.end()) --it;
    return table_->values[static_cast<std::size_t>(it - below.begin())];
  }
  if (auto* law = std::get_if<UniformLaw>(&kind_)) {
    u = std::clamp(u, 0.0, 1.0);
    return law->lo + u * (law->hi - law->lo);
  }
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return kInf;
  return 1.0 / std::sqrt(1.0 - u);
}

double ValueDistribution::sample(Rng& rng) const {
  double u = canonical(rng);
  if (table_) {
    const auto& below = table_->below;
    auto it = std::upper_bound(below.begin(), below.end(), u);
    if (it == below.end()) --it;
    return table_->values[static_cast<std::size_t>(it - below.begin())];
  }
  if (auto* law = std::get_if<UniformLaw>(&kind_))
    return law->lo + u * (law->hi - law->lo);
  return 1.0 / std::sqrt(1.0 - u);
}

double ValueDistribution::mean() const {
  if (table_) {
    double s = 0.0;
    for (std::size_t j = 0; j < table_->values.size(); ++j)
      s += table_->values[j] * table_->masses[j];
    return s;
  }
  if (auto* u = std::get_if<UniformLaw>(&kind_)) return 0.5 * (u->lo + u->hi);
  return 2.0;
}

double ValueDistribution::expected_excess(double t) const {
  if (table_) {
    double s = 0.0;
    for (std::size_t j = 0; j < table_->values.size(); ++j)
      if (table_->values[j] > t) s += (table_->values[j] - t) * table_->masses[j];
    return s;
  }
  if (auto* u = std::get_if<UniformLaw>(&kind_)) {
    if (t <= u->lo) return mean() - t;
    if (t >= u->hi) return 0.0;
    return (u->hi - t) * (u->hi - t) / (2.0 * (u->hi - u->lo));
  }
  if (t <= 1.0) return 2.0 - t;
  return 1.0 / t;
}

double ValueDistribution::partial_mean(double p) const {
  if (p == kInf) return 0.0;
  if (table_) {
    double s = 0.0;
    for (std::size_t j = 0; j < table_->values.size(); ++j)
      if (table_->values[j] >= p) s += table_->values[j] * table_->masses[j];
    return s;
  }
  if (auto* u = std::get_if<UniformLaw>(&kind_)) {
    if (p <= u->lo) return mean();
    if (p >= u->hi) return 0.0;
    return (u->hi * u->hi - p * p) / (2.0 * (u->hi - u->lo));
  }
  if (p <= 1.0) return 2.0;
  return 2.0 / p;
}

std::pair<double, double> ValueDistribution::virtual_value_affine() const {
  if (auto* u = std::get_if<UniformLaw>(&kind_)) return {2.0, -u->hi};
  if (std::holds_alternative<EqualRevenueLaw>(kind_)) return {0.5, 0.0};
  throw std::logic_error("virtual value is affine only for continuous laws");
}

double ValueDistribution::virtual_value(double v) const {
  if (table_) return table_->phi[support_index(v)];
  if (!in_support(v))
    throw std::invalid_argument("value " + std::to_string(v) +
                                " outside the support");
  auto [a, b] = virtual_value_affine();
  return a * v + b;
}

double ValueDistribution::ironed_virtual_value(double v) const {
  if (table_) return table_->ironed[support_index(v)];
  return virtual_value(v);
}

bool ValueDistribution::is_regular() const {
  if (!table_) return true;
  const auto& phi = table_->phi;
  for (std::size_t j = 0; j + 1 < phi.size(); ++j)
    if (phi[j + 1] < phi[j] - 1e-12) return false;
  return true;
}

double ValueDistribution::value_for_ironed_virtual_value(double w) const {
  if (table_) {
    for (std::size_t j = 0; j < table_->values.size(); ++j)
      if (table_->ironed[j] >= w) return table_->values[j];
    return kInf;
  }
  auto [a, b] = virtual_value_affine();
  double v = std::max((w - b) / a, support_min());
  return v > support_max() ? kInf : v;
}

// ---------------------------------------------------------------------------
// Pricing

std::pair<double, double> ValueDistribution::price_for_probability(
    double q) const {
  q = check_probability(q);
  if (table_) {
    const auto& above = table_->above;
    std::size_t j = 0;
    for (std::size_t l = 0; l < above.size(); ++l)
      if (above[l] >= q - kQuantileTol) j = l;
    return {table_->values[j], std::min(1.0, q / above[j])};
  }
  if (auto* u = std::get_if<UniformLaw>(&kind_))
    return {u->hi - q * (u->hi - u->lo), 1.0};
  return {1.0 / std::sqrt(q), 1.0};
}

TwoPriceDecomposition ValueDistribution::two_price_decomposition(
    double q) const {
  q = check_probability(q);
  TwoPriceDecomposition t;
  if (!table_) {
    double p = price_for_probability(q).first;
    t.p_lo = t.p_hi = p;
    t.q_lo = t.q_hi = q;
    t.x = 1.0;
    t.effective_price = p;
    return t;
  }
  const auto& hull = curve_->hull_vertices();
  auto value_at = [&](double qv) {
    const auto& above = table_->above;
    for (std::size_t j = 0; j < above.size(); ++j)
      if (above[j] == qv) return table_->values[j];
    throw std::logic_error("hull vertex without a support point");
  };
  std::size_t k = curve_->hull_segment(q);
  const QuantilePoint& a = hull[k];
  const QuantilePoint& b = hull[k + 1];
  const QuantilePoint* vertex = nullptr;
  if (std::abs(q - b.q) <= kQuantileTol) vertex = &b;
  else if (a.q > 0.0 && std::abs(q - a.q) <= kQuantileTol) vertex = &a;
  if (vertex) {
    double p = value_at(vertex->q);
    t.p_lo = t.p_hi = p;
    t.q_lo = t.q_hi = q;
    t.x = 1.0;
    t.effective_price = p;
    return t;
  }
  t.q_lo = b.q;
  t.p_lo = value_at(b.q);
  if (a.q > 0.0) {
    t.q_hi = a.q;
    t.p_hi = value_at(a.q);
  } else {
    t.q_hi = 0.0;
    t.p_hi = kInf;
  }
  t.x = (q - t.q_hi) / (t.q_lo - t.q_hi);
  double rev = t.x * t.p_lo * t.q_lo;
  if (t.q_hi > 0.0) rev += (1.0 - t.x) * t.p_hi * t.q_hi;
  t.effective_price = rev / q;
  return t;
}

}  // namespace postedmech
