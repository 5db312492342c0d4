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

// Sequential baseline and synchronous allreduce SGD.

#include <atomic>
#include <memory>

#include "dsgd/collective.hpp"
#include "dsgd/pool.hpp"
#include "engine_common.hpp"

namespace dsgd::protocols {

void TrainingSetup::validate() const {
  require(objective != nullptr && data != nullptr, "training setup needs an objective and a dataset");
  require(epochs >= 0, "epochs must be >= 0");
  require(epochs <= schedule.total_epochs, "epochs exceed the schedule's total_epochs");
  require(batch_size >= 1, "batch size must be >= 1");
  require(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0,1)");
  schedule.validate();
  if (initial && initial->dim() != objective->param_dim()) {
    throw DimensionMismatch("initial weights", objective->param_dim(), initial->dim());
  }
}

std::vector<Minibatch> TrainingSetup::batches(int epoch) const {
  auto out = batch_source ? batch_source(epoch)
                          : harness::make_epoch_batches(*data, batch_size, seed, epoch);
  require(!out.empty(), "epoch " + std::to_string(epoch) + " has no minibatches");
  return out;
}

ParameterVector TrainingSetup::start() const {
  return initial ? *initial : initial_weights(*objective, seed);
}

RunResult run_single(const TrainingSetup& setup, const EngineOptions& options) {
  setup.validate();
  options.delays.validate(1);
  auto runtime = rt::Runtime::create(options.delays.clock);
  const Objective& obj = *setup.objective;
  const Dataset& data = *setup.data;

  RunResult result;
  result.weights = setup.start();
  std::atomic<int> current_epoch{0};

  auto body = [&] {
    MomentumState momentum(obj.param_dim(), setup.momentum);
    ParameterVector& theta = result.weights;
    std::uint64_t step = 0;
    for (int epoch = 1; epoch <= setup.epochs; ++epoch) {
      current_epoch = epoch;
      const double start = runtime->now();
      const auto batches = setup.batches(epoch);
      StalenessRecord staleness{Strategy::single, {}};
      for (std::size_t k = 0; k < batches.size(); ++k) {
        const ParameterVector g = obj.gradient(theta, batches[k], data);
        runtime->sleep_for(options.delays.compute_time(1, step));
        sgd_step(theta, g, learning_rate(setup.schedule, epoch, k, batches.size()), momentum);
        ++step;
        staleness.samples.push_back(0);
        if (options.observer) {
          options.observer->on_weights(1, step, WeightsPoint::after_update, theta);
        }
      }
      const double heldout = harness::evaluate_heldout(obj, data, theta);
      result.metrics.push_back(detail::make_record(epoch, Strategy::single, 1, heldout,
                                                   runtime->now() - start, staleness,
                                                   {batches.size()}, 0));
      result.staleness.push_back(std::move(staleness));
    }
  };
  detail::run_tagged(*runtime, {body}, current_epoch);
  return result;
}

RunResult run_ssgd(std::size_t learners, const TrainingSetup& setup,
                   const EngineOptions& options) {
  detail::require_learners(learners, 2, "ssgd");
  setup.validate();
  options.delays.validate(learners);
  auto runtime = rt::Runtime::create(options.delays.clock);
  const Objective& obj = *setup.objective;
  const Dataset& data = *setup.data;
  const std::size_t dim = obj.param_dim();

  collective::RingGroup group(*runtime, collective::ChunkPlan::make(dim, learners, options.chunk_count),
                              options.delays.link());

  struct Learner {
    ParameterVector theta;
    MomentumState momentum;
    std::size_t count = 0;
    std::vector<std::uint32_t> staleness;
  };
  std::vector<Learner> ls;
  for (std::size_t i = 0; i < learners; ++i) {
    ls.push_back({setup.start(), MomentumState(dim, setup.momentum), 0, {}});
  }

  RunResult result;
  std::atomic<int> current_epoch{setup.epochs > 0 ? 1 : 0};
  std::vector<Minibatch> batches = setup.epochs > 0 ? setup.batches(1) : std::vector<Minibatch>{};
  double epoch_start = runtime->now();
  std::uint64_t bytes_mark = 0;

  auto finish_epoch = [&] {
    const int epoch = current_epoch.load();
    for (std::size_t i = 1; i < learners; ++i) {
      if (!bit_equal(ls[i].theta, ls[0].theta)) {
        throw CommunicationError("ssgd: learner weights diverged after synchronous update");
      }
    }
    StalenessRecord staleness{Strategy::ssgd, {}};
    std::vector<std::size_t> counts;
    std::uint64_t bytes = 0;
    for (std::size_t i = 0; i < learners; ++i) {
      staleness.samples.insert(staleness.samples.end(), ls[i].staleness.begin(),
                               ls[i].staleness.end());
      ls[i].staleness.clear();
      counts.push_back(ls[i].count);
      ls[i].count = 0;
      bytes += group.stats(i).bytes_sent;
    }
    const double now = runtime->now();
    const double heldout = harness::evaluate_heldout(obj, data, ls[0].theta);
    result.metrics.push_back(detail::make_record(epoch, Strategy::ssgd, learners, heldout,
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
    actors.emplace_back([&, r] {
      Learner& me = ls[r];
      const std::size_t id = r + 1;
      std::uint64_t step = 0, iteration = 0;
      for (int epoch = 1; epoch <= setup.epochs; ++epoch) {
        const std::size_t pool = batches.size();
        const std::size_t iters = (pool + learners - 1) / learners;
        for (std::size_t j = 0; j < iters; ++j) {
          const std::size_t idx = j * learners + r;
          const std::size_t contributors = std::min(learners, pool - j * learners);
          ParameterVector g(dim);
          if (idx < pool) {
            g = obj.gradient(me.theta, batches[idx], data);
            runtime->sleep_for(options.delays.compute_time(id, step++));
            ++me.count;
          }
          group.allreduce(r, g.span());
          for (auto& v : g) v /= static_cast<double>(contributors);
          sgd_step(me.theta, g, learning_rate(setup.schedule, epoch, j, iters), me.momentum);
          me.staleness.push_back(0);
          ++iteration;
          if (options.observer) {
            options.observer->on_weights(id, iteration, WeightsPoint::after_update, me.theta);
          }
        }
        epoch_barrier.arrive_and_wait();
      }
    });
  }
  detail::run_tagged(*runtime, std::move(actors), current_epoch);
  result.weights = ls[0].theta;
  return result;
}

}  // namespace dsgd::protocols
