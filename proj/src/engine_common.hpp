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
#include <functional>
#include <string>
#include <vector>

#include "dsgd/protocols.hpp"
#include "dsgd/runtime.hpp"

namespace dsgd::protocols::detail {

inline harness::MetricsRecord make_record(int epoch, Strategy strategy, std::size_t learners,
                                          double heldout, double wall_s,
                                          const StalenessRecord& staleness,
                                          std::vector<std::size_t> counts, std::uint64_t bytes) {
  harness::MetricsRecord r;
  r.epoch = epoch;
  r.strategy = strategy;
  r.learners = learners;
  r.heldout_loss = heldout;
  r.epoch_wall_s = wall_s;
  r.staleness_mean = staleness.mean();
  r.staleness_max = staleness.max();
  r.minibatch_counts = std::move(counts);
  r.bytes_exchanged = bytes;
  return r;
}

// Runs the actors and rethrows any failure as an EngineError carrying the
// epoch that was in progress.
inline void run_tagged(rt::Runtime& runtime, std::vector<std::function<void()>> actors,
                       const std::atomic<int>& epoch) {
  try {
    runtime.run(std::move(actors));
  } catch (const EngineError&) {
    throw;
  } catch (const std::exception& e) {
    throw EngineError(epoch.load(), e.what());
  }
}

inline void require_learners(std::size_t learners, std::size_t min, const char* engine) {
  if (learners < min) {
    throw InvalidArgument(std::string(engine) + " needs at least " + std::to_string(min) +
                          " learners, got " + std::to_string(learners));
  }
}

}  // namespace dsgd::protocols::detail
