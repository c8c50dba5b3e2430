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
#include <optional>
#include <variant>
#include <vector>

#include "postedmech/distribution.hpp"
#include "postedmech/feasibility.hpp"
#include "postedmech/rng.hpp"

namespace postedmech {

struct DeterministicPrice {
  double price = kInf;
  double offer_prob = 1.0;
};
// Offers p_lo with probability x and p_hi otherwise, drawn at offer time.
struct LotteryPrice {
  TwoPriceDecomposition split;
};
using PriceRule = std::variant<DeterministicPrice, LotteryPrice>;

struct PriceBranch {
  double price = kInf;
  double weight = 0.0;  // probability that this price is the one offered
};

std::vector<PriceBranch> price_branches(const PriceRule& rule);
bool is_deterministic(const PriceRule& rule);
double effective_price(const PriceRule& rule);
// Unconditional probability that an offered agent accepts.
double acceptance_probability(const PriceRule& rule, const ValueDistribution& d);
// Expected payment collected from one offer.
double expected_payment(const PriceRule& rule, const ValueDistribution& d);
// Realized price, or nullopt when the offer coin says no offer.
std::optional<double> draw_price(const PriceRule& rule, Rng& rng);

// Rule with acceptance probability q: a plain price when the two-price
// split is degenerate, a lottery otherwise.
PriceRule price_rule_for_probability(const ValueDistribution& d, double q);

struct SpmSpec {
  std::vector<PriceRule> rules;
  std::vector<std::size_t> ordering;
  FeasibilitySystem feasibility;
  std::vector<double> target_probs;

  std::size_t n() const { return rules.size(); }
  std::vector<double> effective_prices() const;
};

struct OpmSpec {
  std::vector<PriceRule> rules;  // price kInf drops the agent
  FeasibilitySystem feasibility;  // the restricted system when `restricted`
  bool restricted = false;
  std::vector<double> target_probs;

  std::size_t n() const { return rules.size(); }
  std::vector<double> effective_prices() const;
};

}  // namespace postedmech
