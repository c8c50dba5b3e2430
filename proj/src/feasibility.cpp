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

#include "postedmech/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace postedmech {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

struct FeasibilitySystem::Impl {
  Kind kind;
  std::size_t n = 0;
  // partition
  std::vector<long> part_of;
  std::vector<std::size_t> caps;
  // bundle
  std::vector<std::vector<std::size_t>> agent_items;
  std::vector<std::size_t> supply;
  // explicit
  std::vector<AgentSet> maximal;
};

namespace {

// Keeps the system's data alive for as long as the tracker exists.
class OwningTracker : public IndependenceTracker {
 public:
  std::shared_ptr<const void> owner;
};

class UniformTracker : public OwningTracker {
 public:
  explicit UniformTracker(std::size_t k) : k_(k) {}
  bool can_add(std::size_t) const override { return count_ < k_; }
  void add(std::size_t) override { ++count_; }

 private:
  std::size_t k_;
  std::size_t count_ = 0;
};

class PartitionTracker : public OwningTracker {
 public:
  PartitionTracker(const std::vector<long>& part_of,
                   const std::vector<std::size_t>& caps)
      : part_of_(part_of), left_(caps) {}
  bool can_add(std::size_t i) const override {
    long p = part_of_[i];
    return p < 0 || left_[static_cast<std::size_t>(p)] > 0;
  }
  void add(std::size_t i) override {
    long p = part_of_[i];
    if (p >= 0) --left_[static_cast<std::size_t>(p)];
  }

 private:
  const std::vector<long>& part_of_;
  std::vector<std::size_t> left_;
};

class GraphicTracker : public OwningTracker {
 public:
  explicit GraphicTracker(const GraphicMatroid& g)
      : g_(g), uf_(g.vertices) {}
  bool can_add(std::size_t e) const override {
    auto [u, v] = g_.edges[e];
    return uf_.find(u) != uf_.find(v);
  }
  void add(std::size_t e) override {
    auto [u, v] = g_.edges[e];
    uf_.unite(u, v);
  }

 private:
  const GraphicMatroid& g_;
  UnionFind uf_;
};

class IntersectionTracker : public OwningTracker {
 public:
  explicit IntersectionTracker(const IntersectionSystem& s) {
    for (const auto& m : s.members) parts_.push_back(m.tracker());
  }
  bool can_add(std::size_t i) const override {
    for (const auto& t : parts_)
      if (!t->can_add(i)) return false;
    return true;
  }
  void add(std::size_t i) override {
    for (auto& t : parts_) t->add(i);
  }

 private:
  std::vector<std::unique_ptr<IndependenceTracker>> parts_;
};

class BundleTracker : public OwningTracker {
 public:
  BundleTracker(const std::vector<std::vector<std::size_t>>& items,
                const std::vector<std::size_t>& supply)
      : items_(items), left_(supply) {}
  bool can_add(std::size_t i) const override {
    for (std::size_t it : items_[i])
      if (left_[it] == 0) return false;
    return true;
  }
  void add(std::size_t i) override {
    for (std::size_t it : items_[i]) --left_[it];
  }

 private:
  const std::vector<std::vector<std::size_t>>& items_;
  std::vector<std::size_t> left_;
};

class ExplicitTracker : public OwningTracker {
 public:
  explicit ExplicitTracker(const std::vector<AgentSet>& maximal)
      : maximal_(maximal), alive_(maximal.size()) {
    std::iota(alive_.begin(), alive_.end(), 0);
  }
  bool can_add(std::size_t i) const override {
    for (std::size_t m : alive_)
      if (maximal_[m].contains(i)) return true;
    return false;
  }
  void add(std::size_t i) override {
    std::erase_if(alive_, [&](std::size_t m) { return !maximal_[m].contains(i); });
  }

 private:
  const std::vector<AgentSet>& maximal_;
  std::vector<std::size_t> alive_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Construction

FeasibilitySystem FeasibilitySystem::uniform(std::size_t n, std::size_t k) {
  FeasibilitySystem s;
  auto impl = std::make_shared<Impl>();
  impl->kind = UniformMatroid{n, k};
  impl->n = n;
  s.impl_ = std::move(impl);
  return s;
}

FeasibilitySystem FeasibilitySystem::partition(
    std::size_t n, std::vector<std::vector<std::size_t>> parts,
    std::vector<std::size_t> caps) {
  if (parts.size() != caps.size())
    throw std::invalid_argument("partition: parts and caps differ in length");
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->part_of.assign(n, -1);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (std::size_t i : parts[p]) {
      if (i >= n) throw std::invalid_argument("partition: agent out of range");
      if (impl->part_of[i] >= 0)
        throw std::invalid_argument("partition: parts must be disjoint");
      impl->part_of[i] = static_cast<long>(p);
    }
  }
  impl->caps = caps;
  impl->kind = PartitionMatroid{n, std::move(parts), std::move(caps)};
  FeasibilitySystem s;
  s.impl_ = std::move(impl);
  return s;
}

FeasibilitySystem FeasibilitySystem::graphic(
    std::size_t vertices,
    std::vector<std::pair<std::size_t, std::size_t>> edges) {
  for (auto [u, v] : edges)
    if (u >= vertices || v >= vertices)
      throw std::invalid_argument("graphic: edge endpoint out of range");
  auto impl = std::make_shared<Impl>();
  impl->n = edges.size();
  impl->kind = GraphicMatroid{vertices, std::move(edges)};
  FeasibilitySystem s;
  s.impl_ = std::move(impl);
  return s;
}

FeasibilitySystem FeasibilitySystem::intersection(
    std::vector<FeasibilitySystem> members) {
  if (members.empty())
    throw std::invalid_argument("intersection needs at least one member");
  std::size_t n = members.front().ground_size();
  for (const auto& m : members)
    if (m.ground_size() != n)
      throw std::invalid_argument("intersection members differ in size");
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->kind = IntersectionSystem{std::move(members)};
  FeasibilitySystem s;
  s.impl_ = std::move(impl);
  return s;
}

FeasibilitySystem FeasibilitySystem::bundle(
    std::vector<std::pair<std::string, std::size_t>> supplies,
    std::vector<std::vector<std::string>> bundles) {
  auto impl = std::make_shared<Impl>();
  impl->n = bundles.size();
  std::map<std::string, std::size_t> index;
  for (const auto& [item, count] : supplies) {
    if (index.count(item)) throw std::invalid_argument("bundle: duplicate item");
    index[item] = impl->supply.size();
    impl->supply.push_back(count);
  }
  for (const auto& b : bundles) {
    std::vector<std::size_t> items;
    for (const auto& item : b) {
      auto it = index.find(item);
      if (it == index.end())
        throw std::invalid_argument("bundle: unknown item '" + item + "'");
      items.push_back(it->second);
    }
    impl->agent_items.push_back(std::move(items));
  }
  impl->kind = BundleSystem{std::move(supplies), std::move(bundles)};
  FeasibilitySystem s;
  s.impl_ = std::move(impl);
  return s;
}

FeasibilitySystem FeasibilitySystem::explicit_sets(
    std::size_t n, std::vector<std::vector<std::size_t>> maximal_sets) {
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  for (auto& m : maximal_sets) {
    std::sort(m.begin(), m.end());
    for (std::size_t i : m)
      if (i >= n) throw std::invalid_argument("explicit: agent out of range");
    impl->maximal.push_back(AgentSet::from_indices(n, m));
  }
  impl->kind = ExplicitSystem{n, std::move(maximal_sets)};
  FeasibilitySystem s;
  s.impl_ = std::move(impl);
  return s;
}

// ---------------------------------------------------------------------------
// Oracles

const FeasibilitySystem::Kind& FeasibilitySystem::kind() const {
  return impl_->kind;
}

std::size_t FeasibilitySystem::ground_size() const { return impl_->n; }

bool FeasibilitySystem::is_matroid() const {
  return std::holds_alternative<UniformMatroid>(impl_->kind) ||
         std::holds_alternative<PartitionMatroid>(impl_->kind) ||
         std::holds_alternative<GraphicMatroid>(impl_->kind);
}

std::string FeasibilitySystem::kind_name() const {
  static const char* names[] = {"uniform",      "partition", "graphic",
                                "intersection", "bundle",    "explicit"};
  return names[impl_->kind.index()];
}

void FeasibilitySystem::require_matroid(const char* op) const {
  if (!is_matroid())
    throw std::invalid_argument(std::string(op) + " requires a matroid, got " +
                                kind_name());
}

std::unique_ptr<IndependenceTracker> FeasibilitySystem::tracker() const {
  const Impl& d = *impl_;
  std::unique_ptr<OwningTracker> t = std::visit(
      [&](const auto& k) -> std::unique_ptr<OwningTracker> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformMatroid>)
          return std::make_unique<UniformTracker>(k.k);
        else if constexpr (std::is_same_v<T, PartitionMatroid>)
          return std::make_unique<PartitionTracker>(d.part_of, d.caps);
        else if constexpr (std::is_same_v<T, GraphicMatroid>)
          return std::make_unique<GraphicTracker>(k);
        else if constexpr (std::is_same_v<T, IntersectionSystem>)
          return std::make_unique<IntersectionTracker>(k);
        else if constexpr (std::is_same_v<T, BundleSystem>)
          return std::make_unique<BundleTracker>(d.agent_items, d.supply);
        else
          return std::make_unique<ExplicitTracker>(d.maximal);
      },
      d.kind);
  t->owner = impl_;
  return t;
}

bool FeasibilitySystem::is_feasible(const AgentSet& s) const {
  const Impl& d = *impl_;
  if (std::holds_alternative<ExplicitSystem>(d.kind)) {
    if (s.empty()) return true;
    for (const auto& m : d.maximal)
      if (s.is_subset_of(m)) return true;
    return false;
  }
  if (auto* in = std::get_if<IntersectionSystem>(&d.kind)) {
    for (const auto& m : in->members)
      if (!m.is_feasible(s)) return false;
    return true;
  }
  auto t = tracker();
  for (std::size_t i : s.members()) {
    if (!t->can_add(i)) return false;
    t->add(i);
  }
  return true;
}

std::size_t FeasibilitySystem::rank(const AgentSet& s) const {
  require_matroid("rank");
  auto t = tracker();
  std::size_t r = 0;
  for (std::size_t i : s.members()) {
    if (t->can_add(i)) {
      t->add(i);
      ++r;
    }
  }
  return r;
}

AgentSet FeasibilitySystem::span(const AgentSet& s) const {
  require_matroid("span");
  auto t = tracker();
  for (std::size_t i : s.members())
    if (t->can_add(i)) t->add(i);
  AgentSet out = s;
  for (std::size_t e = 0; e < ground_size(); ++e)
    if (!out.contains(e) && !t->can_add(e)) out.insert(e);
  return out;
}

namespace {

double weight_of(const AgentSet& s, std::span<const double> w) {
  double total = 0.0;
  for (std::size_t i : s.members()) total += w[i];
  return total;
}

bool better(double wa, const AgentSet& a, double wb, const AgentSet& b) {
  double tol = 1e-12 * std::max({1.0, std::abs(wa), std::abs(wb)});
  if (wa > wb + tol) return true;
  if (wa < wb - tol) return false;
  return a.lex_less(b);
}

}  // namespace

AgentSet FeasibilitySystem::max_weight_feasible(
    std::span<const double> weights) const {
  const std::size_t n = ground_size();
  if (weights.size() != n)
    throw std::invalid_argument("max_weight_feasible: weight vector size");
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < n; ++i)
    if (weights[i] > 0.0) positive.push_back(i);

  if (is_matroid()) {
    std::stable_sort(positive.begin(), positive.end(),
                     [&](std::size_t a, std::size_t b) {
                       return weights[a] > weights[b];
                     });
    auto t = tracker();
    AgentSet out(n);
    for (std::size_t i : positive) {
      if (t->can_add(i)) {
        t->add(i);
        out.insert(i);
      }
    }
    return out;
  }

  if (std::holds_alternative<ExplicitSystem>(impl_->kind)) {
    AgentSet pos = AgentSet::from_indices(n, positive);
    AgentSet best(n);
    double best_w = 0.0;
    for (const auto& m : impl_->maximal) {
      AgentSet cand = m & pos;
      double w = weight_of(cand, weights);
      if (better(w, cand, best_w, best)) {
        best = cand;
        best_w = w;
      }
    }
    return best;
  }

  if (n > kExhaustiveLimit)
    throw DeskScaleLimit("desk-scale limit: exhaustive optimization over " +
                         kind_name() + " needs n <= 24, got " +
                         std::to_string(n));
  std::vector<double> suffix(positive.size() + 1, 0.0);
  for (std::size_t k = positive.size(); k-- > 0;)
    suffix[k] = suffix[k + 1] + weights[positive[k]];
  AgentSet best(n);
  double best_w = 0.0;
  AgentSet cur(n);
  std::function<void(std::size_t, double)> dfs = [&](std::size_t k, double w) {
    double tol = 1e-12 * std::max(1.0, std::abs(best_w));
    if (w + suffix[k] < best_w - tol) return;
    if (k == positive.size()) {
      if (better(w, cur, best_w, best)) {
        best = cur;
        best_w = w;
      }
      return;
    }
    std::size_t i = positive[k];
    cur.insert(i);
    if (is_feasible(cur)) dfs(k + 1, w + weights[i]);
    cur.erase(i);
    dfs(k + 1, w);
  };
  dfs(0, 0.0);
  return best;
}

std::size_t FeasibilitySystem::max_feasible_size() const {
  const std::size_t n = ground_size();
  if (is_matroid()) return rank(AgentSet::full(n));
  if (std::holds_alternative<ExplicitSystem>(impl_->kind)) {
    std::size_t k = 0;
    for (const auto& m : impl_->maximal) k = std::max(k, m.size());
    return k;
  }
  std::vector<double> ones(n, 1.0);
  return max_weight_feasible(ones).size();
}

// ---------------------------------------------------------------------------
// Free functions

std::vector<std::size_t> worst_order_increasing_price(
    const FeasibilitySystem& sys, std::span<const double> prices) {
  if (prices.size() != sys.ground_size())
    throw std::invalid_argument("price vector size mismatch");
  std::vector<std::size_t> order(prices.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return prices[a] < prices[b];
  });
  return order;
}

CriticalWeight matroid_critical_weight(const FeasibilitySystem& sys,
                                       std::span<const double> weights,
                                       std::size_t i) {
  if (!sys.is_matroid())
    throw std::invalid_argument("critical weight requires a matroid");
  auto t = sys.tracker();
  if (!t->can_add(i)) return {std::numeric_limits<double>::infinity(), false};
  std::vector<std::size_t> others;
  for (std::size_t e = 0; e < weights.size(); ++e)
    if (e != i && weights[e] > 0.0) others.push_back(e);
  std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
    return weights[a] > weights[b];
  });
  for (std::size_t e : others) {
    if (!t->can_add(e)) continue;
    t->add(e);
    if (!t->can_add(i)) return {weights[e], i < e};
  }
  return {0.0, false};
}

std::vector<AgentSet> maximal_feasible_subsets(const FeasibilitySystem& sys,
                                               const AgentSet& within) {
  const std::size_t n = sys.ground_size();
  std::vector<AgentSet> out;
  if (auto* e = std::get_if<ExplicitSystem>(&sys.kind())) {
    std::vector<AgentSet> cands;
    for (const auto& m : e->maximal_sets)
      cands.push_back(AgentSet::from_indices(n, m) & within);
    for (std::size_t a = 0; a < cands.size(); ++a) {
      bool keep = true;
      for (std::size_t b = 0; b < cands.size() && keep; ++b) {
        if (a == b) continue;
        if (cands[a].is_subset_of(cands[b]) &&
            (!(cands[a] == cands[b]) || b < a))
          keep = false;
      }
      if (keep) out.push_back(cands[a]);
    }
    if (out.empty()) out.push_back(AgentSet(n));
    return out;
  }
  auto elems = within.members();
  if (elems.size() > kExhaustiveLimit)
    throw DeskScaleLimit("desk-scale limit: maximal-set enumeration needs at "
                         "most 24 candidates");
  AgentSet cur(n);
  std::function<void(std::size_t)> dfs = [&](std::size_t k) {
    if (k == elems.size()) {
      for (std::size_t e : elems)
        if (!cur.contains(e) && sys.is_feasible(cur.with(e))) return;
      out.push_back(cur);
      return;
    }
    std::size_t e = elems[k];
    cur.insert(e);
    if (sys.is_feasible(cur)) dfs(k + 1);
    cur.erase(e);
    dfs(k + 1);
  };
  dfs(0);
  return out;
}

}  // namespace postedmech
