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
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "postedmech/distribution.hpp"
#include "postedmech/rng.hpp"

namespace postedmech {

// Law of a nonnegative prize X = max(0, scale * V + shift).
class PrizeLaw {
 public:
  static PrizeLaw of(const ValueDistribution& d);
  // X = max(0, ironed phi(V)).
  static PrizeLaw positive_ironed_virtual_value(const ValueDistribution& d);
  static PrizeLaw discrete(std::vector<std::pair<double, double>> points);

  bool is_discrete() const { return base_.is_discrete(); }
  std::vector<double> support() const;
  const std::vector<double>& masses() const { return base_.masses(); }
  double expected_excess(double t) const;
  double mean() const { return expected_excess(0.0); }
  double sample(Rng& rng) const;

 private:
  explicit PrizeLaw(ValueDistribution base) : base_(std::move(base)) {}
  ValueDistribution base_;
  double scale_ = 1.0;
  double shift_ = 0.0;
};

struct ProphetThreshold {
  double a_star = 0.0;
  double b_star = 0.0;
  double c = 0.0;
  std::size_t k = 1;
};

inline constexpr std::size_t kProphetSamples = 100'000;

// a* from exact enumeration when the laws are discrete with product support
// within the exact limit, else from kProphetSamples seeded draws.
ProphetThreshold prophet_threshold(std::span<const PrizeLaw> laws, std::size_t k,
                                   std::uint64_t seed = 0x9b1d5eedULL);
ProphetThreshold prophet_threshold(std::span<const ValueDistribution> laws,
                                   std::size_t k,
                                   std::uint64_t seed = 0x9b1d5eedULL);

// Expected total of the k-choice threshold rule in index order: take X_j
// when X_j >= c, and take every remaining index once only as many remain as
// picks are left. Exact; discrete laws only.
double threshold_rule_value(std::span<const PrizeLaw> laws, std::size_t k,
                            double c);
// E[sum of the k largest]; exact, discrete laws only.
double expected_top_k(std::span<const PrizeLaw> laws, std::size_t k);

}  // namespace postedmech
