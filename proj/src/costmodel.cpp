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

#include "dsgd/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsgd/error.hpp"

namespace dsgd::costmodel {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite");
  }
}

double max_slowdown(const std::vector<double>& slowdowns) {
  require(!slowdowns.empty(), "slowdown list is empty");
  for (double s : slowdowns) {
    if (!(s >= 1.0) || !std::isfinite(s)) throw InvalidArgument("slowdown factors must be >= 1");
  }
  return *std::max_element(slowdowns.begin(), slowdowns.end());
}

}  // namespace

void HardwareSpec::validate() const {
  require_positive(model_bytes, "model size");
  require_positive(per_batch_compute_s, "per-batch compute time");
  require_positive(bandwidth_bytes_per_s, "bandwidth");
  require(learners >= 1, "learner count must be >= 1");
}

double min_breakeven_bandwidth(double model_bytes, double compute_time_s) {
  require_positive(model_bytes, "model size");
  require_positive(compute_time_s, "compute time");
  return 2.0 * model_bytes / compute_time_s;
}

double min_breakeven_bandwidth(const HardwareSpec& hw) {
  return min_breakeven_bandwidth(hw.model_bytes, hw.per_batch_compute_s);
}

double allreduce_time(const HardwareSpec& hw) {
  hw.validate();
  const double l = static_cast<double>(hw.learners);
  return 2.0 * (l - 1.0) / l * hw.model_bytes / hw.bandwidth_bytes_per_s;
}

SsgdFit fit_ssgd(double t1, double t2) {
  require_positive(t1, "s=1 epoch time");
  require_positive(t2, "s=2 epoch time");
  SsgdFit fit{t2 - t1, 2.0 * t1 - t2};
  if (!(fit.compute > 0.0) || !(fit.communication > 0.0)) {
    throw InvalidArgument("epoch times do not admit a positive (c, k) fit; need t1 < t2 < 2*t1");
  }
  return fit;
}

double ssgd_epoch_time(double c, double k, const std::vector<double>& slowdowns) {
  require_positive(c, "compute portion c");
  require_positive(k, "communication portion k");
  return max_slowdown(slowdowns) * c + k;
}

double adpsgd_epoch_time(double t1, std::size_t learners, const std::vector<double>& slowdowns,
                         double exchange_overhead_s, double exchanges_per_epoch) {
  require_positive(t1, "T1");
  require(learners >= 2, "adpsgd model needs at least 2 learners");
  if (slowdowns.size() != learners) {
    throw DimensionMismatch("slowdown list", learners, slowdowns.size());
  }
  max_slowdown(slowdowns);
  require(exchange_overhead_s >= 0.0 && exchanges_per_epoch >= 0.0,
          "exchange overhead must be >= 0");
  double rate = 0.0;
  for (double s : slowdowns) rate += 1.0 / s;
  return t1 * static_cast<double>(learners) / rate + exchange_overhead_s * exchanges_per_epoch;
}

double hybrid_epoch_time(double c, double k, const std::vector<double>& slowdowns,
                         double overhead_s) {
  require_positive(c, "compute portion c");
  require_positive(k, "communication portion k");
  require(overhead_s >= 0.0, "overhead must be >= 0");
  return std::max(max_slowdown(slowdowns) * c, k) + overhead_s;
}

double predict_speedup(double serial_epoch_time, double strategy_epoch_time) {
  require_positive(serial_epoch_time, "serial epoch time");
  require_positive(strategy_epoch_time, "strategy epoch time");
  return serial_epoch_time / strategy_epoch_time;
}

std::vector<double> one_straggler(std::size_t learners, double s) {
  require(learners >= 1, "learner count must be >= 1");
  std::vector<double> out(learners, 1.0);
  out[0] = s;
  return out;
}

}  // namespace dsgd::costmodel
