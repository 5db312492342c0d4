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
#include <map>

#include "dsgd/collective.hpp"
#include "dsgd/runtime.hpp"

namespace dsgd::harness {

/// Every timing perturbation of a run. Per-event delays are a pure function
/// of (seed, learner, event counter), so a virtual-clock run is fully
/// reproducible.
struct DelayModel {
  rt::ClockMode clock = rt::ClockMode::virtual_time;
  double base_compute_s = 0.0;              // simulated compute per minibatch
  std::map<std::size_t, double> slowdown;   // learner id (1-based) -> factor >= 1
  double compute_jitter = 0.0;              // compute *= 1 + jitter * U[0,1)
  double message_latency_s = 0.0;
  double message_jitter_s = 0.0;            // + message_jitter_s * U[0,1)
  double bandwidth_bytes_per_s = 0.0;       // 0 = unlimited
  std::uint64_t seed = 0;

  void validate(std::size_t learners) const;

  double slowdown_of(std::size_t learner_id) const noexcept;
  double compute_time(std::size_t learner_id, std::uint64_t event) const noexcept;
  double message_cost(std::size_t learner_id, std::uint64_t event, std::size_t bytes) const noexcept;
  collective::LinkModel link() const;

  friend bool operator==(const DelayModel&, const DelayModel&) = default;
};

// Uniform [0,1) from a counter-based hash.
double hashed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace dsgd::harness
