// Copyright 2026 The dsgd Authors. All Rights Reserved.
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

#include "dsgd/pool.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "dsgd/error.hpp"

namespace dsgd::harness {

std::vector<Minibatch> make_epoch_batches(const Dataset& data, std::size_t batch_size,
                                          std::uint64_t seed, int epoch) {
  require(batch_size >= 1, "batch size must be >= 1");
  std::vector<std::size_t> order(data.train_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Minibatch> out;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(order.size(), begin + batch_size);
    out.push_back(Minibatch{{order.begin() + begin, order.begin() + end}});
  }
  return out;
}

void MinibatchPool::reset(std::vector<Minibatch> batches) {
  batches_ = std::move(batches);
  cursor_.store(0);
}

std::optional<Claim> MinibatchPool::next() noexcept {
  const std::size_t i = cursor_.fetch_add(1, std::memory_order_acq_rel);
  if (i >= batches_.size()) return std::nullopt;
  return Claim{&batches_[i], i};
}

std::size_t MinibatchPool::handed_out() const noexcept {
  return std::min(cursor_.load(), batches_.size());
}

std::optional<Claim> next_minibatch(MinibatchPool& pool, std::size_t) noexcept {
  return pool.next();
}

}  // namespace dsgd::harness
