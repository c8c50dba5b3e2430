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
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "postedmech/engine.hpp"
#include "postedmech/instance.hpp"
#include "postedmech/multidim.hpp"
#include "postedmech/price_rule.hpp"

namespace postedmech {

using Json = nlohmann::json;

// Malformed or ill-typed input; line and column are 1-based, 0 when unknown.
class JsonInputError : public std::runtime_error {
 public:
  JsonInputError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

Json parse_json_text(const std::string& text);
Json read_json_file(const std::string& path);

// Prices use the string "inf" for infinity.
Json price_to_json(double p);
double price_from_json(const Json& j);

Json to_json(const ValueDistribution& d);
ValueDistribution distribution_from_json(const Json& j);

Json to_json(const FeasibilitySystem& sys);
FeasibilitySystem feasibility_from_json(const Json& j);

Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

Json to_json(const MultiInstance& mi);
MultiInstance multi_instance_from_json(const Json& j);

Json to_json(const AllocationStats& s);
AllocationStats allocation_stats_from_json(const Json& j);

Json to_json(const SpmSpec& spec);
Json to_json(const OpmSpec& spec);
SpmSpec spm_spec_from_json(const Json& j);
OpmSpec opm_spec_from_json(const Json& j);

Json to_json(const RunResult& r);

}  // namespace postedmech
