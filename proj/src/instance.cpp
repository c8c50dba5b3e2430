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

#include "postedmech/instance.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace postedmech {

Instance::Instance(std::vector<ValueDistribution> d, FeasibilitySystem f)
    : distributions(std::move(d)), feasibility(std::move(f)) {
  if (distributions.size() != feasibility.ground_size())
    throw std::invalid_argument(
        "instance: " + std::to_string(distributions.size()) +
        " distributions but feasibility ground set of size " +
        std::to_string(feasibility.ground_size()));
}

bool Instance::all_discrete() const {
  for (const auto& d : distributions)
    if (!d.is_discrete()) return false;
  return true;
}

double MechanismOutcome::revenue() const {
  double r = 0.0;
  for (std::size_t i : served.members()) r += payments[i];
  return r;
}

Profile sample_profile(const Instance& inst, Rng& rng) {
  Profile p(inst.n());
  for (std::size_t i = 0; i < inst.n(); ++i) p[i] = inst.distributions[i].sample(rng);
  return p;
}

std::size_t product_support_size(const Instance& inst) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 1;
  for (const auto& d : inst.distributions) {
    if (!d.is_discrete())
      throw std::invalid_argument("exact enumeration needs discrete laws");
    std::size_t m = d.support().size();
    if (total > kMax / m) return kMax;
    total *= m;
  }
  return total;
}

void for_each_profile(const Instance& inst,
                      const std::function<void(const Profile&, double)>& visit,
                      std::size_t limit) {
  std::size_t total = product_support_size(inst);
  if (total > limit)
    throw DeskScaleLimit("exact enumeration limited to " +
                         std::to_string(limit) + " profiles");
  const std::size_t n = inst.n();
  std::vector<std::size_t> idx(n, 0);
  Profile p(n);
  for (std::size_t count = 0; count < total; ++count) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = inst.distributions[i].support()[idx[i]];
      prob *= inst.distributions[i].masses()[idx[i]];
    }
    visit(p, prob);
    for (std::size_t i = 0; i < n; ++i) {
      if (++idx[i] < inst.distributions[i].support().size()) break;
      idx[i] = 0;
    }
  }
}

}  // namespace postedmech
