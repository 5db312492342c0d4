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

// Asynchronous decentralized parallel SGD.
//
// Each learner runs a training loop and a communication agent. Learners with
// odd ids are senders: after every local update the training loop signals its
// agent, which (holding the learner's weight lock for the whole exchange)
// ships the weights to the scheduled neighbour, waits for the neighbour's
// weights and replaces its own with the pairwise mean. Receiver agents serve
// incoming exchanges one at a time: under their own lock they reply with
// their current weights and adopt the same pairwise mean. Senders only ever
// wait on receivers, so the wait-for graph is acyclic.

#include <atomic>
#include <memory>
#include <variant>

#include "dsgd/pool.hpp"
#include "engine_common.hpp"

namespace dsgd::protocols {

namespace {

struct ExchangeRequest {
  WeightMessage message;
  rt::Channel<WeightMessage>* reply = nullptr;
  std::uint64_t exchange_index = 0;
};
struct EpochDone {
  std::size_t origin = 0;
};
using ReceiverMessage = std::variant<ExchangeRequest, EpochDone>;

struct Learner {
  Learner(rt::Runtime& rt, ParameterVector w, std::size_t dim, double mu)
      : mu(rt), signal(rt), theta(std::move(w)), momentum(dim, mu), inbox(rt), reply(rt) {}

  rt::Mutex mu;        // guards theta, momentum, version, updates, fresh, trainer_done
  rt::CondVar signal;  // training loop -> sender agent
  ParameterVector theta;
  MomentumState momentum;
  std::uint64_t version = 0;  // bumped by every local update and every mix
  std::uint64_t updates = 0;
  bool fresh = false;
  bool trainer_done = false;

  rt::Channel<ReceiverMessage> inbox;  // receivers only
  rt::Channel<WeightMessage> reply;    // senders only

  // Owned by the training loop or agent; merged at the epoch barrier.
  std::size_t count = 0;
  std::vector<std::uint32_t> staleness;
  std::uint64_t bytes = 0;
  std::uint64_t message_events = 0;
};

}  // namespace

RunResult run_adpsgd(std::size_t learners, const TrainingSetup& setup,
                     const EngineOptions& options) {
  const Topology topo(learners, true);
  setup.validate();
  options.delays.validate(learners);
  auto runtime = rt::Runtime::create(options.delays.clock);
  const Objective& obj = *setup.objective;
  const Dataset& data = *setup.data;
  const std::size_t dim = obj.param_dim();
  const std::size_t payload_bytes = dim * sizeof(double);

  std::vector<std::unique_ptr<Learner>> ls;
  for (std::size_t i = 0; i < learners; ++i) {
    ls.push_back(std::make_unique<Learner>(*runtime, setup.start(), dim, setup.momentum));
  }
  auto at = [&](std::size_t id) -> Learner& { return *ls[id - 1]; };

  RunResult result;
  harness::MinibatchPool pool;
  if (setup.epochs > 0) pool.reset(setup.batches(1));
  std::atomic<int> current_epoch{setup.epochs > 0 ? 1 : 0};
  double epoch_start = runtime->now();

  auto average = [&] {
    ParameterVector mean(dim);
    for (const auto& l : ls) mean += l->theta;
    mean *= 1.0 / static_cast<double>(learners);
    return mean;
  };

  auto finish_epoch = [&] {
    const int epoch = current_epoch.load();
    const double now = runtime->now();
    StalenessRecord staleness{Strategy::adpsgd, {}};
    std::vector<std::size_t> counts;
    std::uint64_t bytes = 0;
    for (auto& l : ls) {
      staleness.samples.insert(staleness.samples.end(), l->staleness.begin(), l->staleness.end());
      l->staleness.clear();
      counts.push_back(l->count);
      l->count = 0;
      bytes += l->bytes;
      l->bytes = 0;
    }
    result.weights = average();
    const double heldout = harness::evaluate_heldout(obj, data, result.weights);
    result.metrics.push_back(detail::make_record(epoch, Strategy::adpsgd, learners, heldout,
                                                 now - epoch_start, staleness, std::move(counts),
                                                 bytes));
    result.staleness.push_back(std::move(staleness));
    if (epoch < setup.epochs) {
      current_epoch = epoch + 1;
      pool.reset(setup.batches(epoch + 1));
    }
    epoch_start = runtime->now();
  };
  // Every training loop and every agent arrives once per epoch.
  rt::Barrier epoch_barrier(*runtime, 2 * learners, finish_epoch);

  auto send_costed = [&](Learner& me, std::size_t id, auto& channel, auto msg, std::size_t bytes) {
    runtime->sleep_for(options.delays.message_cost(id, me.message_events++, bytes));
    me.bytes += bytes;
    channel.send(std::move(msg));
  };

  std::vector<std::function<void()>> actors;

  // Training loops.
  for (std::size_t id = 1; id <= learners; ++id) {
    actors.emplace_back([&, id] {
      Learner& me = at(id);
      const bool sender = topo.role(id) == Role::sender;
      std::uint64_t compute_events = 0;
      for (int epoch = 1; epoch <= setup.epochs; ++epoch) {
        const std::size_t pool_size = pool.size();
        while (auto claim = harness::next_minibatch(pool, id)) {
          ParameterVector snapshot;
          std::uint64_t seen_version = 0;
          {
            std::unique_lock lock(me.mu);
            snapshot = me.theta;
            seen_version = me.version;
          }
          const ParameterVector g = obj.gradient(snapshot, *claim->batch, data);
          runtime->sleep_for(options.delays.compute_time(id, compute_events++));
          {
            std::unique_lock lock(me.mu);
            const double lr = learning_rate(setup.schedule, epoch, claim->index, pool_size);
            sgd_step(me.theta, g, lr, me.momentum);
            me.staleness.push_back(static_cast<std::uint32_t>(me.version - seen_version));
            ++me.version;
            ++me.updates;
            ++me.count;
            if (options.observer) {
              options.observer->on_weights(id, me.updates, WeightsPoint::after_update, me.theta);
            }
            if (sender) {
              me.fresh = true;
              me.signal.notify_all();
            }
          }
        }
        if (sender) {
          std::unique_lock lock(me.mu);
          me.trainer_done = true;
          me.signal.notify_all();
        }
        epoch_barrier.arrive_and_wait();
      }
    });
  }

  // Communication agents.
  for (std::size_t id = 1; id <= learners; ++id) {
    if (topo.role(id) == Role::sender) {
      actors.emplace_back([&, id] {
        Learner& me = at(id);
        std::uint64_t exchange_index = 0;
        for (int epoch = 1; epoch <= setup.epochs; ++epoch) {
          for (;;) {
            std::unique_lock lock(me.mu);
            me.signal.wait(lock, [&] { return me.fresh || me.trainer_done; });
            if (!me.fresh) break;  // trainer finished and nothing left to send
            me.fresh = false;
            const std::size_t peer = topo.partner(id, exchange_index);
            ParameterVector before = me.theta;
            send_costed(me, id, at(peer).inbox,
                        ReceiverMessage{ExchangeRequest{WeightMessage::seal(id, me.updates, before),
                                                        &me.reply, exchange_index}},
                        payload_bytes);
            auto answer = me.reply.receive();
            if (!answer) throw CommunicationError("adpsgd: reply channel closed");
            answer->require_valid();
            if (answer->origin != peer) {
              throw CommunicationError("adpsgd: reply from unexpected learner");
            }
            auto [mixed, peer_mixed] = adpsgd_mix(before, answer->payload);
            me.theta = std::move(mixed);
            ++me.version;
            if (options.observer) {
              options.observer->on_exchange(
                  {id, peer, exchange_index, std::move(before), std::move(answer->payload),
                   me.theta});
            }
            ++exchange_index;
          }
          {
            std::unique_lock lock(me.mu);
            me.trainer_done = false;
          }
          for (std::size_t peer : topo.neighbours(id)) {
            send_costed(me, id, at(peer).inbox, ReceiverMessage{EpochDone{id}}, 0);
          }
          epoch_barrier.arrive_and_wait();
        }
      });
    } else {
      actors.emplace_back([&, id] {
        Learner& me = at(id);
        const std::size_t expected_done = topo.neighbours(id).size();
        for (int epoch = 1; epoch <= setup.epochs; ++epoch) {
          std::size_t done = 0;
          while (done < expected_done) {
            auto msg = me.inbox.receive();
            if (!msg) throw CommunicationError("adpsgd: receiver inbox closed");
            if (std::holds_alternative<EpochDone>(*msg)) {
              ++done;
              continue;
            }
            auto& req = std::get<ExchangeRequest>(*msg);
            req.message.require_valid();
            if (topo.role(req.message.origin) != Role::sender) {
              throw CommunicationError("adpsgd: exchange between two receivers");
            }
            std::unique_lock lock(me.mu);
            send_costed(me, id, *req.reply, WeightMessage::seal(id, me.updates, me.theta),
                        payload_bytes);
            auto [mixed, unused] = adpsgd_mix(req.message.payload, me.theta);
            me.theta = std::move(mixed);
            ++me.version;
          }
          epoch_barrier.arrive_and_wait();
        }
      });
    }
  }

  detail::run_tagged(*runtime, std::move(actors), current_epoch);
  if (setup.epochs == 0) result.weights = average();
  return result;
}

}  // namespace dsgd::protocols
