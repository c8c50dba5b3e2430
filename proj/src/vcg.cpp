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

#include "postedmech/vcg.hpp"

#include <algorithm>
#include <stdexcept>

namespace postedmech {

MechanismOutcome run_vcg_reserves(const Instance& inst,
                                  std::span<const double> reserves,
                                  const Profile& profile) {
  const FeasibilitySystem& sys = inst.feasibility;
  if (!sys.is_matroid())
    throw std::invalid_argument("VCG with reserves requires a matroid, got " +
                                sys.kind_name());
  if (reserves.size() != inst.n())
    throw std::invalid_argument("reserve vector size mismatch");
  std::vector<double> w(inst.n(), 0.0);
  for (std::size_t i = 0; i < inst.n(); ++i)
    if (profile[i] >= reserves[i]) w[i] = profile[i];
  MechanismOutcome out;
  out.served = sys.max_weight_feasible(w);
  out.payments.assign(inst.n(), 0.0);
  for (std::size_t i : out.served.members()) {
    double crit = matroid_critical_weight(sys, w, i).threshold;
    out.payments[i] = std::max(reserves[i], crit);
  }
  return out;
}

}  // namespace postedmech
