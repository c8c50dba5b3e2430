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

#include "postedmech/json_io.hpp"

#include <fstream>
#include <sstream>

namespace postedmech {

namespace {

std::pair<std::size_t, std::size_t> line_column(const std::string& text,
                                                std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

[[noreturn]] void fail(const std::string& what) { throw JsonInputError(what, 0, 0); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <class F>
auto guarded(F f) -> decltype(f()) {
  try {
    return f();
  } catch (const JsonInputError&) {
    throw;
  } catch (const Json::exception& e) {
    fail(e.what());
  }
}

Json rule_fields(const std::vector<PriceRule>& rules) {
  Json prices = Json::array(), offers = Json::array(), lotteries = Json::array();
  for (const auto& r : rules) {
    if (auto* d = std::get_if<DeterministicPrice>(&r)) {
      prices.push_back(price_to_json(d->price));
      offers.push_back(d->offer_prob);
      lotteries.push_back(nullptr);
    } else {
      const auto& t = std::get<LotteryPrice>(r).split;
      prices.push_back(price_to_json(t.effective_price));
      offers.push_back(1.0);
      lotteries.push_back({{"p_lo", price_to_json(t.p_lo)},
                           {"p_hi", price_to_json(t.p_hi)},
                           {"q_lo", t.q_lo},
                           {"q_hi", t.q_hi},
                           {"x", t.x},
                           {"effective_price", price_to_json(t.effective_price)}});
    }
  }
  return {{"prices", prices}, {"offer_probs", offers}, {"lotteries", lotteries}};
}

std::vector<PriceRule> rules_from_json(const Json& j) {
  const auto& prices = field(j, "prices");
  std::vector<PriceRule> rules;
  for (std::size_t i = 0; i < prices.size(); ++i) {
    const Json* lot = nullptr;
    if (j.contains("lotteries") && !j["lotteries"].is_null() && !j["lotteries"][i].is_null())
      lot = &j["lotteries"][i];
    if (lot) {
      TwoPriceDecomposition t;
      t.p_lo = price_from_json(field(*lot, "p_lo"));
      t.p_hi = price_from_json(field(*lot, "p_hi"));
      t.q_lo = field(*lot, "q_lo").get<double>();
      t.q_hi = field(*lot, "q_hi").get<double>();
      t.x = field(*lot, "x").get<double>();
      t.effective_price = price_from_json(field(*lot, "effective_price"));
      rules.push_back(LotteryPrice{t});
    } else {
      double offer = j.contains("offer_probs") ? j["offer_probs"][i].get<double>() : 1.0;
      rules.push_back(DeterministicPrice{price_from_json(prices[i]), offer});
    }
  }
  return rules;
}

}  // namespace

JsonInputError::JsonInputError(const std::string& what, std::size_t line,
                               std::size_t column)
    : std::runtime_error(line ? what + " (line " + std::to_string(line) + ", column " +
                                    std::to_string(column) + ")"
                              : what),
      line_(line),
      column_(column) {}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, column] = line_column(text, e.byte);
    std::string msg = e.what();
    // Keep only the description after the library's location prefix.
    if (auto pos = msg.find(": "); pos != std::string::npos) msg = msg.substr(pos + 2);
    throw JsonInputError("malformed JSON: " + msg, line, column);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw JsonInputError("cannot open " + path, 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

Json price_to_json(double p) {
  if (p == kInf) return "inf";
  return p;
}

double price_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    fail("price must be a number or \"inf\"");
  }
  if (!j.is_number()) fail("price must be a number or \"inf\"");
  return j.get<double>();
}

// ---------------------------------------------------------------------------
// Distributions

Json to_json(const ValueDistribution& d) {
  return std::visit(
      [](const auto& k) -> Json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DiscreteLaw>) {
          Json pts = Json::array();
          for (std::size_t i = 0; i < k.values.size(); ++i)
            pts.push_back({k.values[i], k.masses[i]});
          return {{"kind", "discrete"}, {"points", pts}};
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return {{"kind", "uniform"}, {"lo", k.lo}, {"hi", k.hi}};
        } else if constexpr (std::is_same_v<T, EqualRevenueLaw>) {
          return {{"kind", "equal_revenue"}};
        } else {
          return {{"kind", "two_point"},
                  {"lo", {k.lo_value, k.lo_prob}},
                  {"hi", {k.hi_value, k.hi_prob}}};
        }
      },
      d.kind());
}

ValueDistribution distribution_from_json(const Json& j) {
  return guarded([&] {
    std::string kind = field(j, "kind").get<std::string>();
    try {
      if (kind == "discrete") {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : field(j, "points"))
          pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        return ValueDistribution::discrete(std::move(pts));
      }
      if (kind == "uniform")
        return ValueDistribution::uniform(field(j, "lo").get<double>(),
                                          field(j, "hi").get<double>());
      if (kind == "equal_revenue") return ValueDistribution::equal_revenue();
      if (kind == "two_point") {
        const auto& lo = field(j, "lo");
        const auto& hi = field(j, "hi");
        return ValueDistribution::two_point(lo.at(0).get<double>(), lo.at(1).get<double>(),
                                            hi.at(0).get<double>(), hi.at(1).get<double>());
      }
    } catch (const std::invalid_argument& e) {
      fail(std::string("invalid distribution: ") + e.what());
    }
    fail("unknown distribution kind \"" + kind + "\"");
  });
}

// ---------------------------------------------------------------------------
// Feasibility

Json to_json(const FeasibilitySystem& sys) {
  return std::visit(
      [](const auto& k) -> Json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformMatroid>) {
          return {{"kind", "uniform"}, {"n", k.n}, {"k", k.k}};
        } else if constexpr (std::is_same_v<T, PartitionMatroid>) {
          return {{"kind", "partition"}, {"n", k.n}, {"parts", k.parts}, {"caps", k.caps}};
        } else if constexpr (std::is_same_v<T, GraphicMatroid>) {
          Json edges = Json::array();
          for (const auto& [u, v] : k.edges) edges.push_back({u, v});
          return {{"kind", "graphic"}, {"vertices", k.vertices}, {"edges", edges}};
        } else if constexpr (std::is_same_v<T, IntersectionSystem>) {
          Json members = Json::array();
          for (const auto& m : k.members) members.push_back(to_json(m));
          return {{"kind", "intersection"}, {"members", members}};
        } else if constexpr (std::is_same_v<T, BundleSystem>) {
          Json supplies = Json::object();
          for (const auto& [item, count] : k.supplies) supplies[item] = count;
          return {{"kind", "bundle"}, {"supplies", supplies}, {"bundles", k.bundles}};
        } else {
          return {{"kind", "explicit"}, {"n", k.n}, {"maximal_sets", k.maximal_sets}};
        }
      },
      sys.kind());
}

FeasibilitySystem feasibility_from_json(const Json& j) {
  return guarded([&] {
    std::string kind = field(j, "kind").get<std::string>();
    try {
      if (kind == "uniform")
        return FeasibilitySystem::uniform(field(j, "n").get<std::size_t>(),
                                          field(j, "k").get<std::size_t>());
      if (kind == "partition") {
        auto parts = field(j, "parts").get<std::vector<std::vector<std::size_t>>>();
        std::size_t n = 0;
        if (j.contains("n")) {
          n = j["n"].get<std::size_t>();
        } else {
          for (const auto& p : parts)
            for (std::size_t i : p) n = std::max(n, i + 1);
        }
        return FeasibilitySystem::partition(
            n, std::move(parts), field(j, "caps").get<std::vector<std::size_t>>());
      }
      if (kind == "graphic") {
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (const auto& e : field(j, "edges"))
          edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
        return FeasibilitySystem::graphic(field(j, "vertices").get<std::size_t>(),
                                          std::move(edges));
      }
      if (kind == "intersection") {
        std::vector<FeasibilitySystem> members;
        for (const auto& m : field(j, "members")) members.push_back(feasibility_from_json(m));
        return FeasibilitySystem::intersection(std::move(members));
      }
      if (kind == "bundle") {
        std::vector<std::pair<std::string, std::size_t>> supplies;
        for (const auto& [item, count] : field(j, "supplies").items())
          supplies.emplace_back(item, count.get<std::size_t>());
        return FeasibilitySystem::bundle(
            std::move(supplies),
            field(j, "bundles").get<std::vector<std::vector<std::string>>>());
      }
      if (kind == "explicit")
        return FeasibilitySystem::explicit_sets(
            field(j, "n").get<std::size_t>(),
            field(j, "maximal_sets").get<std::vector<std::vector<std::size_t>>>());
    } catch (const std::invalid_argument& e) {
      fail(std::string("invalid feasibility system: ") + e.what());
    }
    fail("unknown feasibility kind \"" + kind + "\"");
  });
}

// ---------------------------------------------------------------------------
// Instances

Json to_json(const Instance& inst) {
  Json d = Json::array();
  for (const auto& x : inst.distributions) d.push_back(to_json(x));
  return {{"distributions", d}, {"feasibility", to_json(inst.feasibility)}};
}

Instance instance_from_json(const Json& j) {
  return guarded([&] {
    std::vector<ValueDistribution> d;
    for (const auto& x : field(j, "distributions")) d.push_back(distribution_from_json(x));
    try {
      return Instance(std::move(d), feasibility_from_json(field(j, "feasibility")));
    } catch (const std::invalid_argument& e) {
      fail(std::string("invalid instance: ") + e.what());
    }
  });
}

Json to_json(const MultiInstance& mi) {
  Json d = Json::array();
  for (const auto& x : mi.distributions) d.push_back(to_json(x));
  return {{"agents", mi.agents},
          {"service_agent", mi.service_agent},
          {"distributions", d},
          {"feasibility", to_json(mi.feasibility)}};
}

MultiInstance multi_instance_from_json(const Json& j) {
  return guarded([&] {
    MultiInstance mi;
    mi.agents = field(j, "agents").get<std::size_t>();
    mi.service_agent = field(j, "service_agent").get<std::vector<std::size_t>>();
    for (const auto& x : field(j, "distributions"))
      mi.distributions.push_back(distribution_from_json(x));
    mi.feasibility = feasibility_from_json(field(j, "feasibility"));
    try {
      mi.validate();
    } catch (const std::invalid_argument& e) {
      fail(std::string("invalid multi-service instance: ") + e.what());
    }
    return mi;
  });
}

Json to_json(const AllocationStats& s) {
  return {{"q_hat", s.q_hat},
          {"q_raw", s.q_raw},
          {"n_samples", s.num_samples},
          {"requested_samples", s.requested_samples},
          {"seed", s.seed},
          {"exact", s.exact}};
}

AllocationStats allocation_stats_from_json(const Json& j) {
  return guarded([&] {
    AllocationStats s;
    s.q_hat = field(j, "q_hat").get<std::vector<double>>();
    s.q_raw = j.value("q_raw", s.q_hat);
    s.q_floor_applied.assign(s.q_hat.size(), false);
    s.num_samples = j.value("n_samples", std::size_t{0});
    s.requested_samples = j.value("requested_samples", s.num_samples);
    s.seed = j.value("seed", std::uint64_t{0});
    s.exact = j.value("exact", false);
    return s;
  });
}

// ---------------------------------------------------------------------------
// Specs

Json to_json(const SpmSpec& spec) {
  Json j = rule_fields(spec.rules);
  j["type"] = "spm";
  j["ordering"] = spec.ordering;
  j["restricted"] = nullptr;
  j["feasibility"] = to_json(spec.feasibility);
  j["target_probs"] = spec.target_probs;
  return j;
}

Json to_json(const OpmSpec& spec) {
  Json j = rule_fields(spec.rules);
  j["type"] = "opm";
  j["ordering"] = nullptr;
  j["restricted"] = spec.restricted ? to_json(spec.feasibility) : Json(nullptr);
  j["feasibility"] = to_json(spec.feasibility);
  j["target_probs"] = spec.target_probs;
  return j;
}

SpmSpec spm_spec_from_json(const Json& j) {
  return guarded([&] {
    SpmSpec s;
    s.rules = rules_from_json(j);
    s.ordering = field(j, "ordering").get<std::vector<std::size_t>>();
    s.feasibility = feasibility_from_json(field(j, "feasibility"));
    s.target_probs = j.value("target_probs", std::vector<double>{});
    return s;
  });
}

OpmSpec opm_spec_from_json(const Json& j) {
  return guarded([&] {
    OpmSpec s;
    s.rules = rules_from_json(j);
    s.restricted = j.contains("restricted") && !j["restricted"].is_null();
    s.feasibility = feasibility_from_json(s.restricted ? j["restricted"]
                                                       : field(j, "feasibility"));
    s.target_probs = j.value("target_probs", std::vector<double>{});
    return s;
  });
}

Json to_json(const RunResult& r) {
  Json draws = Json::array();
  for (const auto& d : r.acceptance_draws)
    draws.push_back({{"agent", d.agent}, {"price", price_to_json(d.price)},
                     {"accepted", d.accepted}});
  return {{"served", r.served.members()},
          {"revenue", r.revenue},
          {"welfare", r.welfare},
          {"offers_made", r.offers_made.members()},
          {"acceptance_draws", draws}};
}

}  // namespace postedmech
