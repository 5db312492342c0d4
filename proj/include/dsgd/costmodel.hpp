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

// Closed-form runtime models for data-parallel SGD.

#include <cstddef>
#include <vector>

namespace dsgd::costmodel {

struct HardwareSpec {
  double model_bytes = 0.0;
  double per_batch_compute_s = 0.0;
  double bandwidth_bytes_per_s = 0.0;
  std::size_t learners = 1;

  void validate() const;
};

// Bandwidth at which a ring allreduce of M bytes (about 2M on the wire per
// participant) takes as long as one minibatch of compute.
double min_breakeven_bandwidth(double model_bytes, double compute_time_s);
double min_breakeven_bandwidth(const HardwareSpec& hw);

// Time of a ring allreduce of the model at the given bandwidth.
double allreduce_time(const HardwareSpec& hw);

struct SsgdFit {
  double compute = 0.0;        // c
  double communication = 0.0;  // k
};

// Solves c + k = t1 and 2c + k = t2 for the straggler-free and s = 2 epoch times.
SsgdFit fit_ssgd(double t1, double t2);

// max_i(s_i) * c + k
double ssgd_epoch_time(double c, double k, const std::vector<double>& slowdowns);
inline double ssgd_epoch_time(const SsgdFit& fit, const std::vector<double>& slowdowns) {
  return ssgd_epoch_time(fit.compute, fit.communication, slowdowns);
}

// T1 * lambda / sum_i(1/s_i), plus an optional per-exchange averaging overhead
// (exchanges per epoch times the cost of one).
double adpsgd_epoch_time(double t1, std::size_t learners, const std::vector<double>& slowdowns,
                         double exchange_overhead_s = 0.0, double exchanges_per_epoch = 0.0);

// max(max_i(s_i) * c, k) + overhead: communication overlaps computation.
double hybrid_epoch_time(double c, double k, const std::vector<double>& slowdowns,
                         double overhead_s = 0.0);

double predict_speedup(double serial_epoch_time, double strategy_epoch_time);

// Slowdown list of `learners` entries, all 1 except learner 1 which gets s.
std::vector<double> one_straggler(std::size_t learners, double s);

}  // namespace dsgd::costmodel
