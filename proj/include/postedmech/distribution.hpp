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
#include <limits>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "postedmech/rng.hpp"

namespace postedmech {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct DiscreteLaw {
  std::vector<double> values;  // strictly increasing
  std::vector<double> masses;
};
struct UniformLaw {
  double lo = 0.0;
  double hi = 1.0;
};
// Support [1, inf), F(v) = 1 - 1/v^2.
struct EqualRevenueLaw {};
struct TwoPointLaw {
  double lo_value = 0.0;
  double lo_prob = 0.5;
  double hi_value = 1.0;
  double hi_prob = 0.5;
};

struct QuantilePoint {
  double q = 0.0;
  double r = 0.0;
};

struct TwoPriceDecomposition {
  double p_lo = 0.0;
  double p_hi = 0.0;  // kInf when q_hi == 0
  double q_lo = 0.0;
  double q_hi = 0.0;
  double x = 1.0;
  double effective_price = 0.0;

  bool degenerate() const { return p_lo == p_hi || x >= 1.0; }
};

// R(q) = q * F^{-1}(1 - q) over quantile space, with its concave envelope.
class RevenueCurve {
 public:
  enum class Shape { kPolyline, kUniform, kEqualRevenue };

  static RevenueCurve polyline(std::vector<QuantilePoint> vertices);
  static RevenueCurve uniform(double lo, double hi);
  static RevenueCurve equal_revenue();

  Shape shape() const { return shape_; }
  double value(double q) const;
  double hull(double q) const;
  // Slope of the hull on the segment (a, b] containing q.
  double hull_slope(double q) const;

  // Polyline only: vertices sorted by q, starting at (0, 0).
  const std::vector<QuantilePoint>& vertices() const { return vertices_; }
  const std::vector<QuantilePoint>& hull_vertices() const { return hull_; }
  // Index into hull_vertices() of the segment (a, b] containing q.
  std::size_t hull_segment(double q) const;

 private:
  Shape shape_ = Shape::kPolyline;
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<QuantilePoint> vertices_;
  std::vector<QuantilePoint> hull_;
};

class ValueDistribution {
 public:
  using Kind = std::variant<DiscreteLaw, UniformLaw, EqualRevenueLaw, TwoPointLaw>;

  // Points are (value, mass); sorted and merged on construction.
  static ValueDistribution discrete(std::vector<std::pair<double, double>> points);
  static ValueDistribution uniform(double lo, double hi);
  static ValueDistribution equal_revenue();
  static ValueDistribution two_point(double lo_value, double lo_prob,
                                     double hi_value, double hi_prob);

  const Kind& kind() const { return kind_; }
  bool is_discrete() const { return static_cast<bool>(table_); }
  // Discrete kinds only.
  const std::vector<double>& support() const;
  const std::vector<double>& masses() const;
  std::size_t support_index(double v) const;  // throws if v not a support point

  double support_min() const;
  double support_max() const;
  bool in_support(double v) const;

  double cdf(double v) const;
  // Pr[V >= p], the left limit 1 - F(p-).
  double survival(double p) const;
  // Generalized inverse inf{v : F(v) >= u}.
  double quantile(double u) const;
  double sample(Rng& rng) const;

  double mean() const;
  // E[(V - t)^+].
  double expected_excess(double t) const;
  // E[V 1{V >= p}].
  double partial_mean(double p) const;

  double virtual_value(double v) const;
  double ironed_virtual_value(double v) const;
  bool is_regular() const;
  // For the continuous kinds the virtual value is affine: phi(v) = a v + b.
  std::pair<double, double> virtual_value_affine() const;
  // inf{v in support : ironed phi(v) >= w}, or kInf when empty.
  double value_for_ironed_virtual_value(double w) const;

  const RevenueCurve& revenue_curve() const { return *curve_; }
  TwoPriceDecomposition two_price_decomposition(double q) const;
  // (price, offer probability) with offer * Pr[V >= price] = q.
  std::pair<double, double> price_for_probability(double q) const;

 private:
  struct Table {
    std::vector<double> values;
    std::vector<double> masses;
    std::vector<double> below;  // Pr[V <= v_j]
    std::vector<double> above;  // Pr[V >= v_j]
    std::vector<double> phi;
    std::vector<double> ironed;
  };

  ValueDistribution() = default;
  void build_table(std::vector<std::pair<double, double>> points);

  Kind kind_;
  std::shared_ptr<const Table> table_;
  std::shared_ptr<const RevenueCurve> curve_;
};

inline double cdf(const ValueDistribution& d, double v) { return d.cdf(v); }
inline double virtual_value(const ValueDistribution& d, double v) {
  return d.virtual_value(v);
}
inline double ironed_virtual_value(const ValueDistribution& d, double v) {
  return d.ironed_virtual_value(v);
}
inline std::pair<double, double> price_for_probability(
    const ValueDistribution& d, double q) {
  return d.price_for_probability(q);
}
inline TwoPriceDecomposition two_price_decomposition(const ValueDistribution& d,
                                                     double q) {
  return d.two_price_decomposition(q);
}
inline double sample(const ValueDistribution& d, Rng& rng) {
  return d.sample(rng);
}

}  // namespace postedmech
