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

// Parameter-server asynchronous SGD.

#include <atomic>
#include <memory>
#include <variant>

#include "dsgd/pool.hpp"
#include "engine_common.hpp"

namespace dsgd::protocols {

namespace {

struct PullRequest {
  std::size_t learner = 0;  // 0-based
};
struct PushRequest {
  std::size_t learner = 0;
  std::uint64_t pulled_timestamp = 0;
  std::size_t pool_index = 0;
  ParameterVector gradient;
};
struct DoneNotice {
  std::size_t learner = 0;
};
using ServerMessage = std::variant<PullRequest, PushRequest, DoneNotice>;

struct Snapshot {
  ParameterVector theta;
  std::uint64_t timestamp = 0;
};

class ServerShutdown : public CommunicationError {
 public:
  ServerShutdown() : CommunicationError("parameter server shut down mid-run") {}
};

}  // namespace

RunResult run_ps_asgd(std::size_t learners, const TrainingSetup& setup,
                      const EngineOptions& options) {
  detail::require_learners(learners, 1, "ps-asgd");
  setup.validate();
  options.delays.validate(learners);
  auto runtime = rt::Runtime::create(options.delays.clock);
  const Objective& obj = *setup.objective;
  const Dataset& data = *setup.data;
  const std::size_t dim = obj.param_dim();
  const std::size_t payload_bytes = dim * sizeof(double);

  rt::Channel<ServerMessage> inbox(*runtime);
  std::vector<std::unique_ptr<rt::Channel<Snapshot>>> replies;
  for (std::size_t i = 0; i < learners; ++i) {
    replies.push_back(std::make_unique<rt::Channel<Snapshot>>(*runtime));
  }

  RunResult result;
  result.weights = setup.start();
  MomentumState momentum(dim, setup.momentum);
  std::uint64_t server_timestamp = 0;
  std::uint64_t updates = 0;
  bool shut_down = false;

  harness::MinibatchPool pool;
  if (setup.epochs > 0) pool.reset(setup.batches(1));
  std::atomic<int> current_epoch{setup.epochs > 0 ? 1 : 0};
  std::vector<std::size_t> counts(learners, 0);
  StalenessRecord staleness{Strategy::ps_asgd, {}};
  std::atomic<std::uint64_t> bytes{0};
  double epoch_start = runtime->now();

  auto finish_epoch = [&] {
    const int epoch = current_epoch.load();
    const double now = runtime->now();
    const double heldout = harness::evaluate_heldout(obj, data, result.weights);
    result.metrics.push_back(detail::make_record(epoch, Strategy::ps_asgd, learners, heldout,
                                                 now - epoch_start, staleness, counts, bytes.load()));
    result.staleness.push_back(std::move(staleness));
    staleness = StalenessRecord{Strategy::ps_asgd, {}};
    std::fill(counts.begin(), counts.end(), 0);
    bytes = 0;
    if (epoch < setup.epochs) {
      current_epoch = epoch + 1;
      pool.reset(setup.batches(epoch + 1));
    }
    epoch_start = runtime->now();
  };
  rt::Barrier epoch_barrier(*runtime, learners + 1, finish_epoch);

  auto send_to_server = [&](std::size_t learner, std::uint64_t event, ServerMessage msg,
                            std::size_t msg_bytes) {
    runtime->sleep_for(options.delays.message_cost(learner + 1, event, msg_bytes));
    try {
      inbox.send(std::move(msg));
    } catch (const rt::ChannelClosed&) {
      throw ServerShutdown();
    }
  };

  auto shutdown = [&] {
    shut_down = true;
    inbox.close();
    for (auto& r : replies) r->close();
  };

  std::vector<std::function<void()>> actors;

  // Server.
  actors.emplace_back([&] {
    for (int epoch = 1; epoch <= setup.epochs; ++epoch) {
      std::size_t done = 0;
      const std::size_t pool_size = pool.size();
      while (done < learners) {
        auto msg = inbox.receive();
        if (!msg) throw ServerShutdown();
        if (auto* pull = std::get_if<PullRequest>(&*msg)) {
          replies[pull->learner]->send({result.weights, server_timestamp});
          bytes += payload_bytes;
        } else if (auto* push = std::get_if<PushRequest>(&*msg)) {
          staleness.samples.push_back(
              static_cast<std::uint32_t>(server_timestamp - push->pulled_timestamp));
          const double lr = learning_rate(setup.schedule, epoch, push->pool_index, pool_size);
          sgd_step(result.weights, push->gradient, lr, momentum);
          ++server_timestamp;
          ++updates;
          if (options.observer) {
            options.observer->on_weights(push->learner + 1, updates, WeightsPoint::after_update,
                                         result.weights);
          }
          if (options.ps_stop_after_updates && updates >= *options.ps_stop_after_updates) {
            shutdown();
            return;
          }
          replies[push->learner]->send({result.weights, server_timestamp});
          bytes += payload_bytes;
        } else {
          ++done;
        }
      }
      epoch_barrier.arrive_and_wait();
    }
  });

  // Learners.
  for (std::size_t r = 0; r < learners; ++r) {
    actors.emplace_back([&, r] {
      const std::size_t id = r + 1;
      std::uint64_t compute_events = 0, message_events = 0;
      auto await_reply = [&] {
        auto snap = replies[r]->receive();
        if (!snap) throw ServerShutdown();
        return std::move(*snap);
      };
      for (int epoch = 1; epoch <= setup.epochs; ++epoch) {
        send_to_server(r, message_events++, PullRequest{r}, 0);
        Snapshot snap = await_reply();
        while (auto claim = harness::next_minibatch(pool, id)) {
          ParameterVector g = obj.gradient(snap.theta, *claim->batch, data);
          runtime->sleep_for(options.delays.compute_time(id, compute_events++));
          ++counts[r];
          send_to_server(r, message_events++,
                         PushRequest{r, snap.timestamp, claim->index, std::move(g)}, payload_bytes);
          bytes += payload_bytes;
          snap = await_reply();
        }
        send_to_server(r, message_events++, DoneNotice{r}, 0);
        epoch_barrier.arrive_and_wait();
      }
    });
  }

  try {
    detail::run_tagged(*runtime, std::move(actors), current_epoch);
  } catch (const EngineError& e) {
    if (!shut_down) throw;
    result.aborted = true;
    result.abort_reason = e.what();
  }
  return result;
}

}  // namespace dsgd::protocols
