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

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dsgd/dataset.hpp"

namespace dsgd::harness {

// The epoch's training rows, shuffled by (seed, epoch), cut into consecutive
// batches of batch_size. The last batch is short when the training range is
// not a multiple of batch_size. The permutation does not depend on
// batch_size, so a batch of k*m rows is the union of k consecutive m-batches.
std::vector<Minibatch> make_epoch_batches(const Dataset& data, std::size_t batch_size,
                                          std::uint64_t seed, int epoch);

struct Claim {
  const Minibatch* batch = nullptr;
  std::size_t index = 0;  // position in the pool
};

/// Epoch-wide shared queue of minibatches. Every batch is handed out exactly
/// once, in pool order, to whichever learner asks first.
class MinibatchPool {
 public:
  MinibatchPool() = default;
  explicit MinibatchPool(std::vector<Minibatch> batches) : batches_(std::move(batches)) {}

  MinibatchPool(const MinibatchPool&) = delete;
  MinibatchPool& operator=(const MinibatchPool&) = delete;

  // Replaces the contents. Not safe while other threads call next().
  void reset(std::vector<Minibatch> batches);

  std::optional<Claim> next() noexcept;

  std::size_t size() const noexcept { return batches_.size(); }
  std::size_t handed_out() const noexcept;
  const std::vector<Minibatch>& batches() const noexcept { return batches_; }

 private:
  std::vector<Minibatch> batches_;
  std::atomic<std::size_t> cursor_{0};
};

// Hands out the next unclaimed batch, or nullopt once the pool is exhausted.
// The learner id is accepted for symmetry with callers that record counts.
std::optional<Claim> next_minibatch(MinibatchPool& pool, std::size_t learner_id) noexcept;

}  // namespace dsgd::harness
