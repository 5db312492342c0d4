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

#include "dsgd/parameter_vector.hpp"

namespace dsgd {

/// Learning-rate schedule: linear warmup from base_lr to peak_lr over the
/// first warmup_epochs epochs (interpolated per iteration), flat at peak_lr
/// until anneal_start_epoch, then multiplied by anneal_factor once per epoch.
struct ScheduleSpec {
  double base_lr = 0.1;
  double peak_lr = 0.1;
  int warmup_epochs = 0;
  double anneal_factor = 0.70710678118654752440;  // 1/sqrt(2)
  int anneal_start_epoch = 11;
  int total_epochs = 16;

  // Throws InvalidArgument when any invariant is violated.
  void validate() const;

  friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

// 0.1 constant, anneal by 1/sqrt(2) from epoch 11, 16 epochs.
ScheduleSpec baseline_schedule();
// 0.1 -> 1.0 warmup over 10 epochs, anneal by 1/sqrt(2) from epoch 11, 16 epochs.
ScheduleSpec large_batch_schedule();

// epoch is 1-based; iter_in_epoch is 0-based and < iters_per_epoch.
double learning_rate(const ScheduleSpec& spec, int epoch, std::size_t iter_in_epoch,
                     std::size_t iters_per_epoch);

/// Heavy-ball momentum buffer owned by one learner.
class MomentumState {
 public:
  MomentumState() = default;
  MomentumState(std::size_t dim, double coefficient);

  double coefficient() const noexcept { return coefficient_; }
  const ParameterVector& velocity() const noexcept { return velocity_; }

 private:
  friend void sgd_step(ParameterVector&, const ParameterVector&, double, MomentumState&);
  ParameterVector velocity_;
  double coefficient_ = 0.0;
};

// velocity <- mu * velocity + g;  theta <- theta - alpha * velocity  (in place).
void sgd_step(ParameterVector& theta, const ParameterVector& g, double alpha,
              MomentumState& state);

}  // namespace dsgd
