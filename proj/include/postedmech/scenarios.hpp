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
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "postedmech/instance.hpp"
#include "postedmech/json_io.hpp"
#include "postedmech/multidim.hpp"

namespace postedmech {

// An expected quantity: pass iff lo <= measured <= hi.
struct ReferenceValue {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string provenance;  // "paper", "closed-form" or "oracle"
};

struct Scenario {
  std::string id;
  std::variant<Instance, MultiInstance> instance;
  std::map<std::string, double> params;
  std::vector<ReferenceValue> reference_values;

  const ReferenceValue& reference(const std::string& name) const;
};

const std::vector<std::string>& scenario_ids();
// Unknown ids throw std::invalid_argument.
Scenario generate(const std::string& id, const std::map<std::string, double>& params = {});

Json to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

struct Check {
  std::string name;
  double measured = 0.0;
  ReferenceValue reference;
  bool informational = false;  // reported, never fails
  bool pass() const;
};

struct ReproduceOptions {
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 1;
};

struct ReproduceReport {
  std::string id;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool pass() const;
};

ReproduceReport reproduce(const Scenario& s, const ReproduceOptions& opts = {});

// Exact structural oracles for the two gap families.
// m * E[max over m^m groups of the number of high agents in the group].
double nonmatroid_gap_myerson_revenue(std::size_t m);
// Pessimistic revenue of price m for every tree agent.
double tree_gap_pessimistic_revenue(std::size_t m);

// Explicit systems of the two gap families.
FeasibilitySystem group_system(std::size_t groups, std::size_t group_size);
FeasibilitySystem tree_path_system(std::size_t arity, std::size_t levels);
// Agents of the tree system, level by level from the root's children.
std::vector<std::size_t> tree_level_sizes(std::size_t arity, std::size_t levels);

}  // namespace postedmech
