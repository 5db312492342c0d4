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
#include <memory>
#include <span>
#include <vector>

#include "dsgd/dataset.hpp"
#include "dsgd/parameter_vector.hpp"
#include "dsgd/runtime.hpp"

namespace dsgd::collective {

/// Partition of [0, dim) into chunk_count contiguous chunks. Chunk j travels
/// with segment j % participants; segment s starts its reduction at rank s.
struct ChunkPlan {
  std::size_t dim = 0;
  std::size_t participants = 0;
  std::vector<IndexRange> chunks;

  // chunk_count == 0 selects one chunk per participant. When dim is not a
  // multiple of chunk_count the trailing chunk(s) are shorter.
  static ChunkPlan make(std::size_t dim, std::size_t participants, std::size_t chunk_count = 0);

  std::size_t chunk_count() const noexcept { return chunks.size(); }
  std::size_t segment_of(std::size_t chunk) const noexcept { return chunk % participants; }
  std::size_t max_chunk_bytes() const noexcept;
};

// Number of communication phases of a ring allreduce: reduce-scatter plus
// allgather, 2 (participants - 1).
std::size_t transfer_phase_count(std::size_t participants);

struct RingStats {
  std::size_t phases = 0;
  std::size_t messages_sent = 0;
  std::size_t bytes_sent = 0;
};

/// Per-message transfer cost. Each send occupies the sender for
/// latency + bytes / bandwidth + jitter(rank, sequence) seconds.
struct LinkModel {
  double latency_s = 0.0;
  double bandwidth_bytes_per_s = 0.0;  // 0 = unlimited
  std::function<double(std::size_t rank, std::uint64_t seq)> jitter;

  double cost(std::size_t rank, std::uint64_t seq, std::size_t bytes) const;
};

/// A ring of participants that can run successive allreduce collectives.
///
/// allreduce() is called concurrently by every rank (each from its own actor)
/// and blocks until that rank holds the full sum. Within every chunk the
/// summation order is fixed, owner rank first then ring order, so all ranks
/// get bit-identical results regardless of message timing. Successive
/// collectives are matched by a per-rank generation counter.
class RingGroup {
 public:
  RingGroup(rt::Runtime& rt, ChunkPlan plan, LinkModel link = {});
  ~RingGroup();
  RingGroup(const RingGroup&) = delete;
  RingGroup& operator=(const RingGroup&) = delete;

  const ChunkPlan& plan() const noexcept { return plan_; }

  // In-place elementwise sum across all ranks.
  void allreduce(std::size_t rank, std::span<double> data);

  // Cumulative counters for one rank. Read only when the group is quiescent.
  RingStats stats(std::size_t rank) const;
  std::uint64_t generation(std::size_t rank) const;

  // Wakes every rank blocked in allreduce with a CommunicationError.
  void shutdown();

 private:
  struct Message;
  struct RankState;

  rt::Runtime& rt_;
  ChunkPlan plan_;
  LinkModel link_;
  std::vector<std::unique_ptr<RankState>> ranks_;
};

struct RingAllreduceOptions {
  rt::ClockMode clock = rt::ClockMode::virtual_time;
  LinkModel link;
};

struct RingAllreduceResult {
  std::vector<ParameterVector> outputs;  // one per participant
  std::vector<RingStats> stats;
};

// Runs one allreduce with one actor per input vector.
RingAllreduceResult ring_allreduce(const std::vector<ParameterVector>& inputs,
                                   const ChunkPlan& plan, const RingAllreduceOptions& options = {});

// Left-to-right elementwise sum in participant order.
ParameterVector sequential_reduce_oracle(const std::vector<ParameterVector>& inputs);

}  // namespace dsgd::collective
