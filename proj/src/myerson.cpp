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

#include "postedmech/myerson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace postedmech {

std::vector<double> ironed_weights(const Instance& inst, const Profile& profile) {
  std::vector<double> w(inst.n());
  for (std::size_t i = 0; i < inst.n(); ++i)
    w[i] = inst.distributions[i].ironed_virtual_value(profile[i]);
  return w;
}

AgentSet myerson_allocation(const Instance& inst, const Profile& profile) {
  auto w = ironed_weights(inst, profile);
  return inst.feasibility.max_weight_feasible(w);
}

namespace {

double critical_value(const Instance& inst, const std::vector<double>& weights,
                      const Profile& profile, std::size_t i) {
  const ValueDistribution& d = inst.distributions[i];
  const FeasibilitySystem& sys = inst.feasibility;
  if (sys.is_matroid()) {
    CriticalWeight cw = matroid_critical_weight(sys, weights, i);
    if (d.is_discrete()) {
      for (double u : d.support())
        if (cw.selected_at(d.ironed_virtual_value(u))) return u;
      return profile[i];
    }
    return std::min(d.value_for_ironed_virtual_value(cw.threshold), profile[i]);
  }
  std::vector<double> w = weights;
  auto served_at = [&](double u) {
    w[i] = d.ironed_virtual_value(u);
    return sys.max_weight_feasible(w).contains(i);
  };
  if (d.is_discrete()) {
    for (double u : d.support())
      if (u > profile[i]) break;
      else if (served_at(u)) return u;
    return profile[i];
  }
  double lo = d.support_min();
  double hi = profile[i];
  if (served_at(lo)) return lo;
  while (hi - lo > 1e-9 * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    if (served_at(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

}  // namespace

MechanismOutcome run_myerson(const Instance& inst, const Profile& profile) {
  auto w = ironed_weights(inst, profile);
  MechanismOutcome out;
  out.served = inst.feasibility.max_weight_feasible(w);
  out.payments.assign(inst.n(), 0.0);
  for (std::size_t i : out.served.members())
    out.payments[i] = critical_value(inst, w, profile, i);
  return out;
}

double ironed_virtual_surplus(const Instance& inst, const Profile& profile) {
  auto w = ironed_weights(inst, profile);
  double s = 0.0;
  for (std::size_t i : inst.feasibility.max_weight_feasible(w).members()) s += w[i];
  return s;
}

double exact_expectation(const Instance& inst,
                         const std::function<double(const Profile&)>& f) {
  double total = 0.0;
  for_each_profile(inst, [&](const Profile& p, double prob) {
    total += prob * f(p);
  });
  return total;
}

double exact_myerson_revenue(const Instance& inst) {
  return exact_expectation(
      inst, [&](const Profile& p) { return run_myerson(inst, p).revenue(); });
}

double exact_expected_virtual_surplus(const Instance& inst) {
  return exact_expectation(
      inst, [&](const Profile& p) { return ironed_virtual_surplus(inst, p); });
}

Evaluation monte_carlo_myerson_revenue(const Instance& inst, std::size_t samples,
                                       std::uint64_t seed) {
  return monte_carlo(samples, seed, [&](Rng& rng) {
    return run_myerson(inst, sample_profile(inst, rng)).revenue();
  });
}

AllocationStats exact_allocation_probabilities(const Instance& inst) {
  AllocationStats s;
  s.q_hat.assign(inst.n(), 0.0);
  for_each_profile(inst, [&](const Profile& p, double prob) {
    for (std::size_t i : myerson_allocation(inst, p).members()) s.q_hat[i] += prob;
  });
  for (auto& q : s.q_hat) q = std::min(q, 1.0);
  s.q_raw = s.q_hat;
  s.q_floor_applied.assign(inst.n(), false);
  s.exact = true;
  return s;
}

std::size_t sampling_sample_count(std::size_t n) {
  if (n <= 1) return 0;
  double nd = static_cast<double>(n);
  double eps = 1.0 / (3.0 * nd);
  double count = std::ceil(4.0 * std::pow(nd, 4) * std::log(nd) / (eps * eps));
  if (count >= static_cast<double>(std::numeric_limits<std::size_t>::max()))
    return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(count);
}

AllocationStats estimate_allocation_probabilities(
    const Instance& inst, std::optional<std::size_t> num_samples,
    std::uint64_t seed, bool adjust) {
  const std::size_t n = inst.n();
  AllocationStats s;
  s.requested_samples = num_samples ? *num_samples : sampling_sample_count(n);
  s.num_samples = num_samples
                      ? *num_samples
                      : std::clamp<std::size_t>(s.requested_samples, 1,
                                                kDefaultSampleCap);
  if (s.num_samples == 0) throw std::invalid_argument("need at least one sample");
  s.seed = seed;
  using Counts = std::vector<std::size_t>;
  auto parts = run_batches<Counts>(s.num_samples, seed, kBatchSize,
                                   [&](Rng& rng, std::size_t count) {
                                     Counts c(n, 0);
                                     for (std::size_t k = 0; k < count; ++k) {
                                       auto served = myerson_allocation(
                                           inst, sample_profile(inst, rng));
                                       for (std::size_t i : served.members()) ++c[i];
                                     }
                                     return c;
                                   });
  Counts total(n, 0);
  for (const auto& c : parts)
    for (std::size_t i = 0; i < n; ++i) total[i] += c[i];
  s.q_raw.resize(n);
  s.q_hat.resize(n);
  s.q_floor_applied.assign(n, false);
  double nd = static_cast<double>(n);
  double eps = 1.0 / (3.0 * nd);
  double floor = 1.0 / (nd * nd);
  for (std::size_t i = 0; i < n; ++i) {
    s.q_raw[i] = static_cast<double>(total[i]) / static_cast<double>(s.num_samples);
    if (!adjust) {
      s.q_hat[i] = s.q_raw[i];
    } else if (s.q_raw[i] < floor) {
      s.q_hat[i] = floor;
      s.q_floor_applied[i] = true;
    } else {
      s.q_hat[i] = std::min(1.0, s.q_raw[i] / (1.0 - eps));
    }
  }
  return s;
}

}  // namespace postedmech
