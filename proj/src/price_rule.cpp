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

#include "postedmech/price_rule.hpp"

namespace postedmech {

std::vector<PriceBranch> price_branches(const PriceRule& rule) {
  if (auto* d = std::get_if<DeterministicPrice>(&rule)) {
    if (d->price == kInf || d->offer_prob <= 0.0) return {};
    return {{d->price, d->offer_prob}};
  }
  const auto& t = std::get<LotteryPrice>(rule).split;
  std::vector<PriceBranch> out;
  if (t.x > 0.0) out.push_back({t.p_lo, t.x});
  if (t.x < 1.0 && t.p_hi != kInf) out.push_back({t.p_hi, 1.0 - t.x});
  return out;
}

bool is_deterministic(const PriceRule& rule) {
  return std::holds_alternative<DeterministicPrice>(rule);
}

double effective_price(const PriceRule& rule) {
  if (auto* d = std::get_if<DeterministicPrice>(&rule)) return d->price;
  return std::get<LotteryPrice>(rule).split.effective_price;
}

double acceptance_probability(const PriceRule& rule, const ValueDistribution& d) {
  double q = 0.0;
  for (const auto& b : price_branches(rule)) q += b.weight * d.survival(b.price);
  return q;
}

double expected_payment(const PriceRule& rule, const ValueDistribution& d) {
  double r = 0.0;
  for (const auto& b : price_branches(rule))
    r += b.weight * b.price * d.survival(b.price);
  return r;
}

std::optional<double> draw_price(const PriceRule& rule, Rng& rng) {
  if (auto* d = std::get_if<DeterministicPrice>(&rule)) {
    if (d->price == kInf) return std::nullopt;
    if (d->offer_prob < 1.0 && !bernoulli(rng, d->offer_prob)) return std::nullopt;
    return d->price;
  }
  const auto& t = std::get<LotteryPrice>(rule).split;
  double p = bernoulli(rng, t.x) ? t.p_lo : t.p_hi;
  if (p == kInf) return std::nullopt;
  return p;
}

PriceRule price_rule_for_probability(const ValueDistribution& d, double q) {
  TwoPriceDecomposition t = d.two_price_decomposition(q);
  if (t.degenerate() || t.q_hi == 0.0) {
    auto [price, offer] = d.price_for_probability(q);
    return DeterministicPrice{price, offer};
  }
  return LotteryPrice{t};
}

std::vector<double> SpmSpec::effective_prices() const {
  std::vector<double> p;
  for (const auto& r : rules) p.push_back(effective_price(r));
  return p;
}

std::vector<double> OpmSpec::effective_prices() const {
  std::vector<double> p;
  for (const auto& r : rules) p.push_back(effective_price(r));
  return p;
}

}  // namespace postedmech
