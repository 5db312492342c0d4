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

#include "dsgd/experiment.hpp"

#include <numeric>

namespace dsgd::harness {

using protocols::Strategy;

double ObjectiveSpec::effective_regularization() const noexcept {
  if (regularization) return *regularization;
  return kind == ObjectiveKind::logistic ? 1e-4 : 0.0;
}

Objective ObjectiveSpec::build() const {
  switch (kind) {
    case ObjectiveKind::quadratic:
      return Objective::quadratic(input_dim, effective_regularization());
    case ObjectiveKind::logistic:
      return Objective::logistic(input_dim, effective_regularization());
    case ObjectiveKind::tiny_mlp:
      return Objective::tiny_mlp(input_dim, hidden, effective_regularization());
  }
  throw InvalidArgument("unknown objective kind");
}

DelayModel DelaySpec::model() const {
  DelayModel m;
  m.clock = clock;
  m.base_compute_s = base_compute_ms * 1e-3;
  m.compute_jitter = compute_jitter;
  m.message_latency_s = message_latency_ms * 1e-3;
  m.message_jitter_s = message_jitter_ms * 1e-3;
  m.bandwidth_bytes_per_s = bandwidth_bytes_per_s;
  m.seed = seed;
  m.slowdown = stragglers;
  return m;
}

void RunConfig::validate() const {
  auto fail = [](const char* field, const std::string& what) { throw ConfigFieldError(field, what); };

  if (learners < 1) fail("learners", "must be >= 1");
  switch (strategy) {
    case Strategy::single:
      if (learners != 1) fail("learners", "strategy single runs exactly 1 learner");
      break;
    case Strategy::ssgd:
    case Strategy::hybrid:
      if (learners < 2) fail("learners", "strategy " + std::string(to_string(strategy)) +
                                             " needs at least 2 learners");
      break;
    case Strategy::adpsgd:
      if (learners < 2 || learners % 2 != 0) {
        fail("learners", "adpsgd requires an even number of learners (>= 2), got " +
                             std::to_string(learners));
      }
      break;
    case Strategy::ps_asgd:
      break;
  }
  if (objective.input_dim < 1) fail("objective.input_dim", "must be >= 1");
  if (objective.kind == ObjectiveKind::tiny_mlp && objective.hidden < 1) {
    fail("objective.hidden", "must be >= 1");
  }
  if (objective.regularization && !(*objective.regularization >= 0.0)) {
    fail("objective.regularization", "must be >= 0");
  }
  if (dataset.samples < 10) fail("dataset.samples", "must be >= 10");
  try {
    schedule.validate();
  } catch (const InvalidArgument& e) {
    fail("schedule", e.what());
  }
  if (epochs < 0) fail("epochs", "must be >= 0");
  if (epochs > schedule.total_epochs) {
    fail("epochs", "exceeds schedule.total_epochs (" + std::to_string(schedule.total_epochs) + ")");
  }
  if (batch_size < 1) fail("batch_size", "must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum", "must lie in [0, 1)");
  if (!(delays.base_compute_ms >= 0.0)) fail("delays.base_compute_ms", "must be >= 0");
  if (!(delays.compute_jitter >= 0.0)) fail("delays.compute_jitter", "must be >= 0");
  if (!(delays.message_latency_ms >= 0.0)) fail("delays.message_latency_ms", "must be >= 0");
  if (!(delays.message_jitter_ms >= 0.0)) fail("delays.message_jitter_ms", "must be >= 0");
  if (!(delays.bandwidth_bytes_per_s >= 0.0)) fail("delays.bandwidth_bytes_per_s", "must be >= 0");
  for (const auto& [id, s] : delays.stragglers) {
    if (id < 1 || id > learners) {
      fail("delays.stragglers", "learner id " + std::to_string(id) + " is outside 1.." +
                                    std::to_string(learners));
    }
    if (!(s >= 1.0)) {
      fail("delays.stragglers", "slowdown for learner " + std::to_string(id) + " must be >= 1");
    }
  }
}

Dataset build_dataset(const RunConfig& config) {
  return make_dataset(config.objective.kind, config.dataset.samples, config.objective.input_dim,
                      config.dataset.seed.value_or(config.seed));
}

protocols::RunResult run_experiment(const RunConfig& config, protocols::Observer* observer) {
  config.validate();
  const Dataset data = build_dataset(config);
  const Objective obj = config.objective.build();

  protocols::TrainingSetup setup;
  setup.objective = &obj;
  setup.data = &data;
  setup.schedule = config.schedule;
  setup.momentum = config.momentum;
  setup.epochs = config.epochs;
  setup.batch_size = config.batch_size;
  setup.seed = config.seed;

  protocols::EngineOptions options;
  options.delays = config.delays.model();
  options.observer = observer;
  options.chunk_count = config.chunk_count;

  switch (config.strategy) {
    case Strategy::single: return protocols::run_single(setup, options);
    case Strategy::ssgd: return protocols::run_ssgd(config.learners, setup, options);
    case Strategy::ps_asgd: return protocols::run_ps_asgd(config.learners, setup, options);
    case Strategy::adpsgd: return protocols::run_adpsgd(config.learners, setup, options);
    case Strategy::hybrid: return protocols::run_hybrid(config.learners, setup, options);
  }
  throw InvalidArgument("unknown strategy");
}

double mean_epoch_time(const std::vector<MetricsRecord>& metrics) {
  require(!metrics.empty(), "no epochs were run");
  double total = 0.0;
  for (const auto& m : metrics) total += m.epoch_wall_s;
  return total / static_cast<double>(metrics.size());
}

StragglerTable measure_straggler_degradation(const RunConfig& config,
                                             const std::vector<double>& factors,
                                             bool with_speedup) {
  require(!factors.empty(), "no straggler factors given");
  for (double s : factors) require(s >= 1.0, "straggler factors must be >= 1");
  require(config.epochs >= 1, "straggler sweep needs at least one epoch");

  auto time_with = [&](double s) {
    RunConfig c = config;
    c.delays.stragglers.clear();
    if (s != 1.0) c.delays.stragglers[1] = s;
    return mean_epoch_time(run_experiment(c).metrics);
  };

  StragglerTable table;
  if (with_speedup) {
    RunConfig single = config;
    single.strategy = Strategy::single;
    single.learners = 1;
    single.delays.stragglers.clear();
    table.single_epoch_time_s = mean_epoch_time(run_experiment(single).metrics);
  }

  std::map<double, double> measured;
  measured[1.0] = time_with(1.0);
  for (double s : factors) {
    if (!measured.contains(s)) measured[s] = time_with(s);
  }
  const double reference = measured[1.0];
  for (double s : factors) {
    StragglerRow row;
    row.factor = s;
    row.epoch_time_s = measured[s];
    row.degradation = row.epoch_time_s / reference;
    if (with_speedup && row.epoch_time_s > 0.0) {
      row.speedup = table.single_epoch_time_s / row.epoch_time_s;
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace dsgd::harness
