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

#include "dsgd/optim.hpp"

#include <cmath>
#include <string>

#include "dsgd/error.hpp"

namespace dsgd {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}  // namespace

void ScheduleSpec::validate() const {
  require(base_lr > 0.0, "schedule: base_lr must be > 0");
  require(peak_lr > 0.0, "schedule: peak_lr must be > 0");
  require(base_lr <= peak_lr, "schedule: base_lr must not exceed peak_lr");
  require(warmup_epochs >= 0, "schedule: warmup_epochs must be >= 0");
  require(anneal_factor > 0.0 && anneal_factor < 1.0, "schedule: anneal_factor must lie in (0,1)");
  require(anneal_start_epoch >= 1, "schedule: anneal_start_epoch must be >= 1");
  require(anneal_start_epoch > warmup_epochs,
          "schedule: anneal_start_epoch must come after the warmup epochs");
  require(total_epochs >= 1, "schedule: total_epochs must be >= 1");
}

ScheduleSpec baseline_schedule() { return ScheduleSpec{0.1, 0.1, 0, kInvSqrt2, 11, 16}; }

ScheduleSpec large_batch_schedule() {
  return ScheduleSpec{0.1, 1.0, 10, kInvSqrt2, 11, 16};
}

double learning_rate(const ScheduleSpec& spec, int epoch, std::size_t iter_in_epoch,
                     std::size_t iters_per_epoch) {
  if (epoch < 1 || epoch > spec.total_epochs) {
    throw InvalidArgument("learning_rate: epoch " + std::to_string(epoch) + " outside [1, " +
                          std::to_string(spec.total_epochs) + "]");
  }
  require(iters_per_epoch >= 1, "learning_rate: iters_per_epoch must be >= 1");
  require(iter_in_epoch < iters_per_epoch, "learning_rate: iter_in_epoch out of range");

  if (epoch <= spec.warmup_epochs) {
    const std::size_t span = static_cast<std::size_t>(spec.warmup_epochs) * iters_per_epoch;
    if (span <= 1) return spec.peak_lr;
    const std::size_t step = static_cast<std::size_t>(epoch - 1) * iters_per_epoch + iter_in_epoch;
    const double frac = static_cast<double>(step) / static_cast<double>(span - 1);
    return spec.base_lr + (spec.peak_lr - spec.base_lr) * frac;
  }
  if (epoch >= spec.anneal_start_epoch) {
    return spec.peak_lr * std::pow(spec.anneal_factor, epoch - spec.anneal_start_epoch + 1);
  }
  return spec.peak_lr;
}

MomentumState::MomentumState(std::size_t dim, double coefficient)
    : velocity_(dim), coefficient_(coefficient) {
  require(coefficient >= 0.0 && coefficient < 1.0, "momentum coefficient must lie in [0,1)");
}

void sgd_step(ParameterVector& theta, const ParameterVector& g, double alpha,
              MomentumState& state) {
  require_same_dim(theta, g, "sgd_step gradient");
  require_same_dim(theta, state.velocity_, "sgd_step momentum");
  require(alpha > 0.0, "sgd_step: learning rate must be > 0");
  auto& v = state.velocity_;
  const double mu = state.coefficient_;
  for (std::size_t i = 0; i < theta.dim(); ++i) {
    v[i] = mu * v[i] + g[i];
    theta[i] -= alpha * v[i];
  }
  theta.check_finite("sgd_step");
}

}  // namespace dsgd
