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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

namespace postedmech {

// Subset of agents {0, ..., n-1} as a packed bitset.
class AgentSet {
 public:
  AgentSet() = default;
  explicit AgentSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}
  AgentSet(std::size_t n, std::initializer_list<std::size_t> members)
      : AgentSet(n) {
    for (std::size_t i : members) insert(i);
  }

  static AgentSet full(std::size_t n) {
    AgentSet s(n);
    for (std::size_t i = 0; i < n; ++i) s.insert(i);
    return s;
  }
  static AgentSet from_mask(std::size_t n, std::uint64_t mask) {
    AgentSet s(n);
    if (!s.words_.empty()) s.words_[0] = mask;
    return s;
  }
  static AgentSet from_indices(std::size_t n,
                               const std::vector<std::size_t>& idx) {
    AgentSet s(n);
    for (std::size_t i : idx) s.insert(i);
    return s;
  }

  std::size_t universe() const { return n_; }
  bool contains(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1ULL;
  }
  void insert(std::size_t i) { words_[i >> 6] |= 1ULL << (i & 63); }
  void erase(std::size_t i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }
  AgentSet with(std::size_t i) const {
    AgentSet s = *this;
    s.insert(i);
    return s;
  }
  AgentSet without(std::size_t i) const {
    AgentSet s = *this;
    s.erase(i);
    return s;
  }

  std::size_t size() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }
  bool is_subset_of(const AgentSet& o) const {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~o.words_[k]) return false;
    return true;
  }
  AgentSet operator&(const AgentSet& o) const {
    AgentSet s = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) s.words_[k] &= o.words_[k];
    return s;
  }
  AgentSet operator|(const AgentSet& o) const {
    AgentSet s = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) s.words_[k] |= o.words_[k];
    return s;
  }
  AgentSet minus(const AgentSet& o) const {
    AgentSet s = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) s.words_[k] &= ~o.words_[k];
    return s;
  }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        out.push_back(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }

  // Lexicographic comparison of sorted member lists.
  bool lex_less(const AgentSet& o) const {
    auto a = members();
    auto b = o.members();
    return a < b;
  }

  std::uint64_t low_word() const { return words_.empty() ? 0 : words_[0]; }

  bool operator==(const AgentSet& o) const {
    return n_ == o.n_ && words_ == o.words_;
  }

  std::size_t hash() const {
    std::uint64_t h = 0x84222325cbf29ce4ULL ^ n_;
    for (auto w : words_) h = (h ^ w) * 0x100000001b3ULL + (h >> 29);
    return static_cast<std::size_t>(h);
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct AgentSetHash {
  std::size_t operator()(const AgentSet& s) const { return s.hash(); }
};

}  // namespace postedmech
