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

// Hybrid: local update plus a non-blocking weight allreduce.
//
// Iteration k of a learner:
//   g       = gradient at the current working weights
//   working = pull()  -- average of the iteration k-1 pushes (initial weights at k = 1)
//   w'      = working - lr * g  (momentum step)
//   push(w')          -- hands w' to the communication agent, returns at once
// The agent runs the ring allreduce while the next gradient is computed, so
// every gradient is applied to weights one averaging round newer than the
// ones it was computed from.

#include <atomic>
#include <memory>

#include "dsgd/collective.hpp"
#include "dsgd/pool.hpp"
#include "engine_common.hpp"

namespace dsgd::protocols {

namespace {

struct Learner {
  Learner(rt::Runtime& rt, ParameterVector w, std::size_t dim, double mu)
      : mu(rt), cv(rt), working(std::move(w)), momentum(dim, mu), result(working) {}

  rt::Mutex mu;  // guards the push/pull slot below
  rt::CondVar cv;
  ParameterVector working;
  MomentumState momentum;

  std::optional<ParameterVector> pending;  // pushed, not yet taken by the agent
  std::uint64_t pushed = 0;
  std::uint64_t completed = 0;
  ParameterVector result;  // last allreduce sum (or the initial weights, pre-scaled)
  bool stop = false;

  std::size_t count = 0;
  std::vector<std::uint32_t> staleness;
};

}  // namespace

RunResult run_hybrid(std::size_t learners, const TrainingSetup& setup,
                     const EngineOptions& options) {
  detail::require_learners(learners, 2, "hybrid");
  setup.validate();
  options.delays.validate(learners);
  auto runtime = rt::Runtime::create(options.delays.clock);
  const Objective& obj = *setup.objective;
  const Dataset& data = *setup.data;
  const std::size_t dim = obj.param_dim();
  const double lambda = static_cast<double>(learners);

  collective::RingGroup group(*runtime, collective::ChunkPlan::make(dim, learners, options.chunk_count),
                              options.delays.link());

  std::vector<std::unique_ptr<Learner>> ls;
  for (std::size_t i = 0; i < learners; ++i) {
    ls.push_back(std::make_unique<Learner>(*runtime, setup.start(), dim, setup.momentum));
  }

  // Averaged result of the most recent push; blocks until it has completed.
  // Returns the working weights unchanged when nothing was pushed yet.
  auto pull = [&](Learner& me) {
    std::unique_lock lock(me.mu);
    me.cv.wait(lock, [&] { return me.completed == me.pushed; });
    if (me.pushed == 0) return std::pair{me.working, std::uint64_t{0}};
    ParameterVector avg = me.result;
    for (auto& v : avg) v /= lambda;
    return std::pair{std::move(avg), me.completed};
  };

  auto push = [&](Learner& me, ParameterVector w) {
    std::unique_lock lock(me.mu);
    me.pending = std::move(w);
    ++me.pushed;
    me.cv.notify_all();
  };

  RunResult result;
  std::vector<Minibatch> batches = setup.epochs > 0 ? setup.batches(1) : std::vector<Minibatch>{};
  std::atomic<int> current_epoch{setup.epochs > 0 ? 1 : 0};
  double epoch_start = runtime->now();
  std::uint64_t bytes_mark = 0;
  std::vector<ParameterVector> epoch_models(learners);

  auto finish_epoch = [&] {
    const int epoch = current_epoch.load();
    const double now = runtime->now();
    for (std::size_t i = 1; i < learners; ++i) {
      if (!bit_equal(epoch_models[i], epoch_models[0])) {
        throw CommunicationError("hybrid: learners pulled different averaged weights");
      }
    }
    StalenessRecord staleness{Strategy::hybrid, {}};
    std::vector<std::size_t> counts;
    std::uint64_t bytes = 0;
    for (std::size_t i = 0; i < learners; ++i) {
      auto& l = *ls[i];
      staleness.samples.insert(staleness.samples.end(), l.staleness.begin(), l.staleness.end());
      l.staleness.clear();
      counts.push_back(l.count);
      l.count = 0;
      bytes += group.stats(i).bytes_sent;
    }
    result.weights = epoch_models[0];
    const double heldout = harness::evaluate_heldout(obj, data, result.weights);
    result.metrics.push_back(detail::make_record(epoch, Strategy::hybrid, learners, heldout,
                                                 now - epoch_start, staleness, std::move(counts),
                                                 bytes - bytes_mark));
    result.staleness.push_back(std::move(staleness));
    bytes_mark = bytes;
    if (epoch < setup.epochs) {
      current_epoch = epoch + 1;
      batches = setup.batches(epoch + 1);
    }
    epoch_start = runtime->now();
  };
  rt::Barrier epoch_barrier(*runtime, learners, finish_epoch);

  std::vector<std::function<void()>> actors;

  for (std::size_t r = 0; r < learners; ++r) {
    // Training loop.
    actors.emplace_back([&, r] {
      Learner& me = *ls[r];
      const std::size_t id = r + 1;
      std::uint64_t compute_events = 0, iteration = 0;
      std::uint64_t working_timestamp = 0;
      for (int epoch = 1; epoch <= setup.epochs; ++epoch) {
        const std::size_t pool = batches.size();
        const std::size_t iters = (pool + learners - 1) / learners;
        for (std::size_t j = 0; j < iters; ++j) {
          const std::size_t idx = j * learners + r;
          std::optional<ParameterVector> g;
          if (idx < pool) {
            g = obj.gradient(me.working, batches[idx], data);
            runtime->sleep_for(options.delays.compute_time(id, compute_events++));
            ++me.count;
          }
          auto [pulled, timestamp] = pull(me);
          ++iteration;
          if (options.observer) {
            options.observer->on_weights(id, iteration, WeightsPoint::working, pulled);
          }
          me.staleness.push_back(static_cast<std::uint32_t>(timestamp - working_timestamp));
          me.working = std::move(pulled);
          working_timestamp = timestamp;
          ParameterVector updated = me.working;
          if (g) {
            sgd_step(updated, *g, learning_rate(setup.schedule, epoch, j, iters), me.momentum);
          }
          if (options.observer) {
            options.observer->on_weights(id, iteration, WeightsPoint::after_update, updated);
          }
          push(me, std::move(updated));
        }
        epoch_models[r] = pull(me).first;
        epoch_barrier.arrive_and_wait();
      }
      std::unique_lock lock(me.mu);
      me.cv.wait(lock, [&] { return me.completed == me.pushed; });
      me.stop = true;
      me.cv.notify_all();
    });

    // Communication agent.
    actors.emplace_back([&, r] {
      Learner& me = *ls[r];
      for (;;) {
        ParameterVector buffer;
        {
          std::unique_lock lock(me.mu);
          me.cv.wait(lock, [&] { return me.pending.has_value() || me.stop; });
          if (!me.pending) return;
          buffer = std::move(*me.pending);
          me.pending.reset();
        }
        group.allreduce(r, buffer.span());
        std::unique_lock lock(me.mu);
        me.result = std::move(buffer);
        ++me.completed;
        me.cv.notify_all();
      }
    });
  }

  detail::run_tagged(*runtime, std::move(actors), current_epoch);
  if (setup.epochs == 0) result.weights = setup.start();
  return result;
}

}  // namespace dsgd::protocols
