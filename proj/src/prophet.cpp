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

#include "postedmech/prophet.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

#include "postedmech/feasibility.hpp"
#include "postedmech/instance.hpp"

namespace postedmech {

PrizeLaw PrizeLaw::of(const ValueDistribution& d) { return PrizeLaw(d); }

PrizeLaw PrizeLaw::positive_ironed_virtual_value(const ValueDistribution& d) {
  if (d.is_discrete()) {
    std::map<double, double> merged;
    for (std::size_t j = 0; j < d.support().size(); ++j)
      merged[std::max(0.0, d.ironed_virtual_value(d.support()[j]))] +=
          d.masses()[j];
    return discrete({merged.begin(), merged.end()});
  }
  auto [a, b] = d.virtual_value_affine();
  PrizeLaw law(d);
  law.scale_ = a;
  law.shift_ = b;
  return law;
}

PrizeLaw PrizeLaw::discrete(std::vector<std::pair<double, double>> points) {
  return PrizeLaw(ValueDistribution::discrete(std::move(points)));
}

std::vector<double> PrizeLaw::support() const {
  std::vector<double> s;
  for (double v : base_.support()) s.push_back(std::max(0.0, scale_ * v + shift_));
  return s;
}

double PrizeLaw::expected_excess(double t) const {
  t = std::max(t, 0.0);
  return scale_ * base_.expected_excess((t - shift_) / scale_);
}

double PrizeLaw::sample(Rng& rng) const {
  return std::max(0.0, scale_ * base_.sample(rng) + shift_);
}

namespace {

using TopK = std::vector<std::pair<double, std::vector<double>>>;

bool enumerable(std::span<const PrizeLaw> laws) {
  std::size_t total = 1;
  for (const auto& l : laws) {
    if (!l.is_discrete()) return false;
    std::size_t m = l.masses().size();
    if (total > kExactProfileLimit / m) return false;
    total *= m;
  }
  return true;
}

// Calls visit(values, probability) over the joint support.
void enumerate(std::span<const PrizeLaw> laws,
               const std::function<void(const std::vector<double>&, double)>& visit) {
  if (!enumerable(laws))
    throw DeskScaleLimit("prize enumeration needs small discrete laws");
  std::vector<std::vector<double>> supports;
  for (const auto& l : laws) supports.push_back(l.support());
  std::vector<std::size_t> idx(laws.size(), 0);
  std::vector<double> x(laws.size());
  while (true) {
    double prob = 1.0;
    for (std::size_t i = 0; i < laws.size(); ++i) {
      x[i] = supports[i][idx[i]];
      prob *= laws[i].masses()[idx[i]];
    }
    visit(x, prob);
    std::size_t i = 0;
    for (; i < laws.size(); ++i) {
      if (++idx[i] < supports[i].size()) break;
      idx[i] = 0;
    }
    if (i == laws.size()) break;
  }
}

std::vector<double> top_k(std::vector<double> x, std::size_t k) {
  std::sort(x.begin(), x.end(), std::greater<>());
  x.resize(std::min(k, x.size()));
  return x;
}

template <class Residual>
double solve_increasing(Residual residual, double hi) {
  if (hi <= 0.0) return 0.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ProphetThreshold prophet_threshold(std::span<const PrizeLaw> laws, std::size_t k,
                                   std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("prophet threshold needs k >= 1");
  ProphetThreshold out;
  out.k = k;
  const double kd = static_cast<double>(k);

  double mean_sum = 0.0;
  for (const auto& l : laws) mean_sum += l.mean();
  out.b_star = solve_increasing(
      [&](double b) {
        double s = 0.0;
        for (const auto& l : laws) s += l.expected_excess(b / kd);
        return b - s;
      },
      mean_sum);

  TopK tops;
  if (enumerable(laws)) {
    enumerate(laws, [&](const std::vector<double>& x, double p) {
      tops.emplace_back(p, top_k(x, k));
    });
  } else {
    Rng rng(seed);
    double w = 1.0 / static_cast<double>(kProphetSamples);
    std::vector<double> x(laws.size());
    for (std::size_t s = 0; s < kProphetSamples; ++s) {
      for (std::size_t i = 0; i < laws.size(); ++i) x[i] = laws[i].sample(rng);
      tops.emplace_back(w, top_k(x, k));
    }
  }
  double top_sum = 0.0;
  for (const auto& [p, t] : tops)
    for (double v : t) top_sum += p * v;
  out.a_star = solve_increasing(
      [&](double a) {
        double s = 0.0;
        for (const auto& [p, t] : tops)
          for (double v : t)
            if (v > a / kd) s += p * (v - a / kd);
        return a - s;
      },
      top_sum);
  out.c = out.b_star / kd;
  return out;
}

ProphetThreshold prophet_threshold(std::span<const ValueDistribution> laws,
                                   std::size_t k, std::uint64_t seed) {
  std::vector<PrizeLaw> prizes;
  for (const auto& d : laws) prizes.push_back(PrizeLaw::of(d));
  return prophet_threshold(prizes, k, seed);
}

double threshold_rule_value(std::span<const PrizeLaw> laws, std::size_t k,
                            double c) {
  const std::size_t n = laws.size();
  double total = 0.0;
  enumerate(laws, [&](const std::vector<double>& x, double p) {
    std::size_t picks = 0;
    double got = 0.0;
    for (std::size_t j = 0; j < n && picks < k; ++j) {
      if (x[j] >= c || n - j <= k - picks) {
        got += x[j];
        ++picks;
      }
    }
    total += p * got;
  });
  return total;
}

double expected_top_k(std::span<const PrizeLaw> laws, std::size_t k) {
  double total = 0.0;
  enumerate(laws, [&](const std::vector<double>& x, double p) {
    for (double v : top_k(x, k)) total += p * v;
  });
  return total;
}

}  // namespace postedmech
