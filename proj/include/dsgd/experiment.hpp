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

// Experiment orchestration: one run of an engine built from a flat config,
// and straggler sweeps over it.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsgd/error.hpp"
#include "dsgd/protocols.hpp"

namespace dsgd::harness {

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::logistic;
  std::size_t input_dim = 10;
  std::size_t hidden = 16;                // tiny-mlp only
  std::optional<double> regularization;   // kind default when unset

  double effective_regularization() const noexcept;
  Objective build() const;

  friend bool operator==(const ObjectiveSpec&, const ObjectiveSpec&) = default;
};

struct DatasetSpec {
  std::size_t samples = 4000;
  std::optional<std::uint64_t> seed;  // run seed when unset

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

// Delay settings as written in a config file; times in milliseconds.
struct DelaySpec {
  rt::ClockMode clock = rt::ClockMode::virtual_time;
  double base_compute_ms = 0.0;
  double compute_jitter = 0.0;
  double message_latency_ms = 0.0;
  double message_jitter_ms = 0.0;
  double bandwidth_bytes_per_s = 0.0;
  std::uint64_t seed = 0;
  std::map<std::size_t, double> stragglers;  // learner id -> slowdown factor

  DelayModel model() const;

  friend bool operator==(const DelaySpec&, const DelaySpec&) = default;
};

struct RunConfig {
  protocols::Strategy strategy = protocols::Strategy::single;
  std::size_t learners = 1;
  ObjectiveSpec objective;
  DatasetSpec dataset;
  ScheduleSpec schedule = baseline_schedule();
  int epochs = 16;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double momentum = 0.9;
  std::size_t chunk_count = 0;
  DelaySpec delays;

  // Throws ConfigFieldError naming the offending key.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Validation failure tied to a dotted config key such as "delays.stragglers".
class ConfigFieldError : public InvalidArgument {
 public:
  ConfigFieldError(std::string field, const std::string& what)
      : InvalidArgument(field + ": " + what), field_(std::move(field)), message_(what) {}
  const std::string& field() const noexcept { return field_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string field_;
  std::string message_;
};

Dataset build_dataset(const RunConfig& config);

// Dispatches to the engine named by config.strategy. Engine failures surface
// as protocols::EngineError carrying the epoch.
protocols::RunResult run_experiment(const RunConfig& config, protocols::Observer* observer = nullptr);

struct StragglerRow {
  double factor = 1.0;
  double epoch_time_s = 0.0;  // mean over the run's epochs
  double speedup = 0.0;       // single-learner epoch time / epoch_time_s
  double degradation = 1.0;   // epoch_time_s / (epoch time at factor 1)
};

struct StragglerTable {
  double single_epoch_time_s = 0.0;  // 0 when the reference was skipped
  std::vector<StragglerRow> rows;
};

double mean_epoch_time(const std::vector<MetricsRecord>& metrics);

// Runs `config` once per factor with learner 1 slowed down by it (replacing
// any straggler map in the config). The factor-1 run is always performed and
// serves as the degradation reference. The speedup reference is run_single on
// the same data, batch size and compute delay.
StragglerTable measure_straggler_degradation(const RunConfig& config,
                                             const std::vector<double>& factors,
                                             bool with_speedup = true);

}  // namespace dsgd::harness
