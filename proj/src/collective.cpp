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

#include "dsgd/collective.hpp"

#include <algorithm>
#include <string>

#include "dsgd/error.hpp"

namespace dsgd::collective {

ChunkPlan ChunkPlan::make(std::size_t dim, std::size_t participants, std::size_t chunk_count) {
  if (participants < 2) {
    throw InvalidArgument("ring allreduce needs at least 2 participants, got " +
                          std::to_string(participants));
  }
  if (chunk_count == 0) chunk_count = participants;
  if (chunk_count < participants) {
    throw InvalidArgument("chunk_count must be >= participant count");
  }
  ChunkPlan plan;
  plan.dim = dim;
  plan.participants = participants;
  const std::size_t width = (dim + chunk_count - 1) / chunk_count;
  std::size_t begin = 0;
  for (std::size_t j = 0; j < chunk_count; ++j) {
    const std::size_t end = std::min(dim, begin + width);
    plan.chunks.push_back({begin, end});
    begin = end;
  }
  return plan;
}

std::size_t ChunkPlan::max_chunk_bytes() const noexcept {
  std::size_t m = 0;
  for (const auto& c : chunks) m = std::max(m, c.size());
  return m * sizeof(double);
}

std::size_t transfer_phase_count(std::size_t participants) {
  if (participants < 2) {
    throw InvalidArgument("transfer_phase_count: need at least 2 participants");
  }
  return 2 * (participants - 1);
}

double LinkModel::cost(std::size_t rank, std::uint64_t seq, std::size_t bytes) const {
  double t = latency_s;
  if (bandwidth_bytes_per_s > 0.0) t += static_cast<double>(bytes) / bandwidth_bytes_per_s;
  if (jitter) t += jitter(rank, seq);
  return t;
}

struct RingGroup::Message {
  std::uint64_t generation = 0;
  std::size_t chunk = 0;
  std::vector<double> payload;
};

struct RingGroup::RankState {
  explicit RankState(rt::Runtime& rt) : inbox(rt) {}
  rt::Channel<Message> inbox;  // from the left neighbour
  std::uint64_t generation = 0;
  std::uint64_t send_seq = 0;
  RingStats stats;
};

RingGroup::RingGroup(rt::Runtime& rt, ChunkPlan plan, LinkModel link)
    : rt_(rt), plan_(std::move(plan)), link_(std::move(link)) {
  if (plan_.participants < 2) throw InvalidArgument("RingGroup: need at least 2 participants");
  for (std::size_t r = 0; r < plan_.participants; ++r) {
    ranks_.push_back(std::make_unique<RankState>(rt_));
  }
}

RingGroup::~RingGroup() = default;

RingStats RingGroup::stats(std::size_t rank) const { return ranks_.at(rank)->stats; }

std::uint64_t RingGroup::generation(std::size_t rank) const { return ranks_.at(rank)->generation; }

void RingGroup::shutdown() {
  for (auto& r : ranks_) r->inbox.close();
}

void RingGroup::allreduce(std::size_t rank, std::span<double> data) {
  const std::size_t n = plan_.participants;
  if (rank >= n) throw InvalidArgument("RingGroup::allreduce: rank out of range");
  if (data.size() != plan_.dim) {
    throw DimensionMismatch("RingGroup::allreduce payload", plan_.dim, data.size());
  }
  RankState& self = *ranks_[rank];
  RankState& right = *ranks_[(rank + 1) % n];
  const std::uint64_t gen = self.generation++;

  auto send_segment = [&](std::size_t segment) {
    for (std::size_t c = segment; c < plan_.chunk_count(); c += n) {
      const IndexRange range = plan_.chunks[c];
      Message msg{gen, c, std::vector<double>(data.begin() + range.begin, data.begin() + range.end)};
      const std::size_t bytes = msg.payload.size() * sizeof(double);
      const double cost = link_.cost(rank, self.send_seq++, bytes);
      if (cost > 0.0) rt_.sleep_for(cost);
      right.inbox.send(std::move(msg));
      ++self.stats.messages_sent;
      self.stats.bytes_sent += bytes;
    }
  };

  // accumulate: data[chunk] = received + data[chunk]; otherwise overwrite.
  auto receive_segment = [&](std::size_t segment, bool accumulate) {
    for (std::size_t c = segment; c < plan_.chunk_count(); c += n) {
      auto msg = self.inbox.receive();
      if (!msg) throw CommunicationError("ring allreduce: group shut down mid-collective");
      if (msg->generation != gen || msg->chunk != c) {
        throw CommunicationError("ring allreduce: out-of-sequence message (generation " +
                                 std::to_string(msg->generation) + ", expected " +
                                 std::to_string(gen) + ")");
      }
      const IndexRange range = plan_.chunks[c];
      if (msg->payload.size() != range.size()) {
        throw CommunicationError("ring allreduce: chunk size mismatch");
      }
      for (std::size_t i = 0; i < range.size(); ++i) {
        double& slot = data[range.begin + i];
        slot = accumulate ? msg->payload[i] + slot : msg->payload[i];
      }
    }
  };

  // Reduce-scatter: after step t, rank r holds the partial sum of segment
  // (r - t - 1) over ranks (r - t - 1) .. r.
  for (std::size_t t = 0; t + 1 < n; ++t) {
    send_segment((rank + n - t) % n);
    receive_segment((rank + 2 * n - t - 1) % n, true);
    ++self.stats.phases;
  }
  // Allgather: rank r now owns the complete segment (r + 1) % n.
  for (std::size_t t = 0; t + 1 < n; ++t) {
    send_segment((rank + 1 + n - t) % n);
    receive_segment((rank + n - t) % n, false);
    ++self.stats.phases;
  }
}

RingAllreduceResult ring_allreduce(const std::vector<ParameterVector>& inputs,
                                   const ChunkPlan& plan, const RingAllreduceOptions& options) {
  if (inputs.size() < 2) {
    throw InvalidArgument("ring_allreduce needs at least 2 participants, got " +
                          std::to_string(inputs.size()));
  }
  if (plan.participants != inputs.size()) {
    throw InvalidArgument("ring_allreduce: plan participant count differs from input count");
  }
  for (const auto& v : inputs) {
    if (v.dim() != plan.dim) throw DimensionMismatch("ring_allreduce input", plan.dim, v.dim());
  }

  auto runtime = rt::Runtime::create(options.clock);
  RingGroup group(*runtime, plan, options.link);
  RingAllreduceResult result;
  result.outputs = inputs;
  std::vector<std::function<void()>> actors;
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    actors.emplace_back([&, r] { group.allreduce(r, result.outputs[r].span()); });
  }
  runtime->run(std::move(actors));
  for (std::size_t r = 0; r < inputs.size(); ++r) result.stats.push_back(group.stats(r));
  return result;
}

ParameterVector sequential_reduce_oracle(const std::vector<ParameterVector>& inputs) {
  if (inputs.empty()) throw InvalidArgument("sequential_reduce_oracle: empty input list");
  ParameterVector acc = inputs.front();
  for (std::size_t i = 1; i < inputs.size(); ++i) acc += inputs[i];
  return acc;
}

}  // namespace dsgd::collective
