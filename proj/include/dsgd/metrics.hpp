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
#include <vector>

#include "dsgd/dataset.hpp"
#include "dsgd/objective.hpp"
#include "dsgd/topology.hpp"

namespace dsgd::harness {

// One row per epoch.
struct MetricsRecord {
  int epoch = 0;
  protocols::Strategy strategy = protocols::Strategy::single;
  std::size_t learners = 1;
  double heldout_loss = 0.0;
  double epoch_wall_s = 0.0;
  double staleness_mean = 0.0;
  std::uint32_t staleness_max = 0;
  std::vector<std::size_t> minibatch_counts;  // per learner, sums to the pool size
  std::uint64_t bytes_exchanged = 0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

// Mean data loss over the held-out rows, no regularization term.
double evaluate_heldout(const Objective& obj, const Dataset& data, const ParameterVector& theta);

}  // namespace dsgd::harness
