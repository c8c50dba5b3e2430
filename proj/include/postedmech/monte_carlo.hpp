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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "postedmech/rng.hpp"

namespace postedmech {

struct Evaluation {
  double mean_revenue = 0.0;
  double std_error = 0.0;
  std::size_t num_samples = 0;
  bool exact = false;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kBatchSize = 4096;

// Runs ceil(samples / batch) batches, batch b seeded with batch_seed(seed, b)
// and given min(batch, remaining) draws. Results come back in batch order,
// independent of how many workers ran them.
template <class T, class Fn>
std::vector<T> run_batches(std::size_t samples, std::uint64_t seed,
                           std::size_t batch, Fn fn) {
  const std::size_t num = (samples + batch - 1) / batch;
  std::vector<T> out(num);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b; (b = next.fetch_add(1)) < num;) {
      Rng rng(batch_seed(seed, b));
      std::size_t count = std::min(batch, samples - b * batch);
      out[b] = fn(rng, count);
    }
  };
  std::size_t threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  threads = std::min(threads, num);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

// Mean and standard error of draw(rng) over `samples` seeded draws.
inline Evaluation monte_carlo(std::size_t samples, std::uint64_t seed,
                              const std::function<double(Rng&)>& draw,
                              std::size_t batch = kBatchSize) {
  struct Moments {
    double count = 0, mean = 0, m2 = 0;
  };
  auto parts = run_batches<Moments>(samples, seed, batch,
                                    [&](Rng& rng, std::size_t count) {
                                      Moments m;
                                      for (std::size_t s = 0; s < count; ++s) {
                                        double x = draw(rng);
                                        m.count += 1;
                                        double d = x - m.mean;
                                        m.mean += d / m.count;
                                        m.m2 += d * (x - m.mean);
                                      }
                                      return m;
                                    });
  Moments total;
  for (const auto& m : parts) {
    if (m.count == 0) continue;
    double c = total.count + m.count;
    double d = m.mean - total.mean;
    total.mean += d * m.count / c;
    total.m2 += m.m2 + d * d * total.count * m.count / c;
    total.count = c;
  }
  Evaluation e;
  e.mean_revenue = total.mean;
  e.num_samples = samples;
  e.seed = seed;
  if (total.count > 1)
    e.std_error = std::sqrt(total.m2 / (total.count - 1) / total.count);
  return e;
}

}  // namespace postedmech
