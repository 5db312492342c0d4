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

#include "dsgd/delays.hpp"

#include <string>

#include "dsgd/error.hpp"

namespace dsgd::harness {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Disjoint event streams for compute and messages.
constexpr std::uint64_t kComputeStream = 0x636f6d70ULL;
constexpr std::uint64_t kMessageStream = 0x6d736773ULL;

}  // namespace

double hashed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void DelayModel::validate(std::size_t learners) const {
  require(base_compute_s >= 0.0, "delays: base compute time must be >= 0");
  require(compute_jitter >= 0.0, "delays: compute jitter must be >= 0");
  require(message_latency_s >= 0.0 && message_jitter_s >= 0.0,
          "delays: message latency and jitter must be >= 0");
  require(bandwidth_bytes_per_s >= 0.0, "delays: bandwidth must be >= 0");
  for (const auto& [id, s] : slowdown) {
    require(id >= 1 && id <= learners,
            "delays: straggler id " + std::to_string(id) + " is not a learner in 1.." +
                std::to_string(learners));
    require(s >= 1.0, "delays: slowdown factor for learner " + std::to_string(id) +
                          " must be >= 1");
  }
}

double DelayModel::slowdown_of(std::size_t learner_id) const noexcept {
  const auto it = slowdown.find(learner_id);
  return it == slowdown.end() ? 1.0 : it->second;
}

double DelayModel::compute_time(std::size_t learner_id, std::uint64_t event) const noexcept {
  double t = base_compute_s * slowdown_of(learner_id);
  if (compute_jitter > 0.0) {
    t *= 1.0 + compute_jitter * hashed_uniform(seed ^ kComputeStream, learner_id, event);
  }
  return t;
}

double DelayModel::message_cost(std::size_t learner_id, std::uint64_t event,
                                std::size_t bytes) const noexcept {
  double t = message_latency_s;
  if (bandwidth_bytes_per_s > 0.0) t += static_cast<double>(bytes) / bandwidth_bytes_per_s;
  if (message_jitter_s > 0.0) {
    t += message_jitter_s * hashed_uniform(seed ^ kMessageStream, learner_id, event);
  }
  return t;
}

collective::LinkModel DelayModel::link() const {
  collective::LinkModel link;
  link.latency_s = message_latency_s;
  link.bandwidth_bytes_per_s = bandwidth_bytes_per_s;
  if (message_jitter_s > 0.0) {
    link.jitter = [seed = seed, j = message_jitter_s](std::size_t rank, std::uint64_t seq) {
      return j * hashed_uniform(seed ^ kMessageStream, rank + 1, seq);
    };
  }
  return link;
}

}  // namespace dsgd::harness
