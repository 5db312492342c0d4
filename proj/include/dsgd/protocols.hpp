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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsgd/dataset.hpp"
#include "dsgd/delays.hpp"
#include "dsgd/metrics.hpp"
#include "dsgd/objective.hpp"
#include "dsgd/optim.hpp"
#include "dsgd/topology.hpp"

namespace dsgd::protocols {

/// What every engine trains on. The objective and dataset are borrowed and
/// must outlive the call.
struct TrainingSetup {
  const Objective* objective = nullptr;
  const Dataset* data = nullptr;
  ScheduleSpec schedule;
  double momentum = 0.9;
  int epochs = 1;
  std::size_t batch_size = 32;  // per learner
  std::uint64_t seed = 0;
  // Defaults to initial_weights(*objective, seed).
  std::optional<ParameterVector> initial;
  // Defaults to harness::make_epoch_batches(*data, batch_size, seed, epoch).
  std::function<std::vector<Minibatch>(int epoch)> batch_source;

  void validate() const;
  std::vector<Minibatch> batches(int epoch) const;
  ParameterVector start() const;
};

enum class WeightsPoint {
  after_update,  // right after a local gradient step
  working,       // hybrid: the averaged weights a learner pulled
};

struct ExchangeRecord {
  std::size_t sender = 0;
  std::size_t receiver = 0;
  std::uint64_t exchange_index = 0;
  ParameterVector sender_before;
  ParameterVector receiver_before;
  ParameterVector after;
};

/// Optional hooks for tests and tracing. Called from learner contexts,
/// possibly concurrently; implementations synchronize themselves.
class Observer {
 public:
  virtual ~Observer() = default;
  // iteration is the learner's 1-based iteration counter across epochs.
  virtual void on_weights(std::size_t /*learner_id*/, std::uint64_t /*iteration*/,
                          WeightsPoint /*point*/, const ParameterVector& /*w*/) {}
  virtual void on_exchange(const ExchangeRecord& /*record*/) {}
};

struct EngineOptions {
  harness::DelayModel delays;
  Observer* observer = nullptr;
  std::size_t chunk_count = 0;  // ring allreduce chunks, 0 = one per learner
  // PS-ASGD fault injection: the server shuts down after this many updates.
  std::optional<std::uint64_t> ps_stop_after_updates;
};

struct RunResult {
  ParameterVector weights;  // final model (the learner average for ADPSGD)
  std::vector<harness::MetricsRecord> metrics;
  std::vector<StalenessRecord> staleness;  // one per completed epoch
  bool aborted = false;
  std::string abort_reason;
};

// A failure inside an engine, tagged with the epoch it happened in.
class EngineError : public Error {
 public:
  EngineError(int epoch, const std::string& what)
      : Error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

// Sequential minibatch SGD baseline.
RunResult run_single(const TrainingSetup& setup, const EngineOptions& options = {});

// Synchronous SGD: per-iteration ring allreduce of gradients, static batch
// partition (iteration j gives learner i batch j*lambda + i).
RunResult run_ssgd(std::size_t learners, const TrainingSetup& setup,
                   const EngineOptions& options = {});

// Parameter-server asynchronous SGD. Learners pull weights, compute a
// gradient on a batch drawn from the shared pool, and push it; the server
// applies pushes in arrival order.
RunResult run_ps_asgd(std::size_t learners, const TrainingSetup& setup,
                      const EngineOptions& options = {});

// Asynchronous decentralized parallel SGD on the bipartite ring.
RunResult run_adpsgd(std::size_t learners, const TrainingSetup& setup,
                     const EngineOptions& options = {});

// Local update followed by a non-blocking allreduce of the weights that
// overlaps the next gradient computation.
RunResult run_hybrid(std::size_t learners, const TrainingSetup& setup,
                     const EngineOptions& options = {});

}  // namespace dsgd::protocols
