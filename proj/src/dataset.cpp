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

#include "dsgd/dataset.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "dsgd/error.hpp"

namespace dsgd {

std::string_view to_string(ObjectiveKind kind) noexcept {
  switch (kind) {
    case ObjectiveKind::quadratic:
      return "quadratic";
    case ObjectiveKind::logistic:
      return "logistic";
    case ObjectiveKind::tiny_mlp:
      return "tiny-mlp";
  }
  return "unknown";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  if (name == "quadratic") return ObjectiveKind::quadratic;
  if (name == "logistic") return ObjectiveKind::logistic;
  if (name == "tiny-mlp") return ObjectiveKind::tiny_mlp;
  throw InvalidArgument("unknown objective kind '" + std::string(name) +
                        "' (expected quadratic, logistic or tiny-mlp)");
}

Dataset make_dataset(ObjectiveKind kind, std::size_t n_samples, std::size_t input_dim,
                     std::uint64_t seed) {
  if (n_samples < 10) {
    throw InvalidArgument("make_dataset: n_samples must be >= 10, got " +
                          std::to_string(n_samples));
  }
  if (input_dim < 1) throw InvalidArgument("make_dataset: input_dim must be >= 1");

  Dataset d;
  d.kind = kind;
  d.input_dim = input_dim;
  d.n_samples = n_samples;
  d.train_count = n_samples - n_samples / 10;
  d.inputs.resize(n_samples * input_dim);
  d.targets.assign(n_samples, 0.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& x : d.inputs) x = normal(rng);

  std::vector<double> hidden(input_dim);
  for (auto& w : hidden) w = normal(rng);

  auto project = [&](std::size_t i) {
    const auto r = d.row(i);
    return std::inner_product(r.begin(), r.end(), hidden.begin(), 0.0);
  };

  switch (kind) {
    case ObjectiveKind::quadratic:
      d.center = hidden;
      break;
    case ObjectiveKind::logistic: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (std::size_t i = 0; i < n_samples; ++i) {
        double y = project(i) >= 0.0 ? 1.0 : -1.0;
        if (unif(rng) < 0.1) y = -y;
        d.targets[i] = y;
      }
      break;
    }
    case ObjectiveKind::tiny_mlp: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
      for (std::size_t i = 0; i < n_samples; ++i) {
        d.targets[i] = std::sin(project(i) * scale) + 0.05 * normal(rng);
      }
      break;
    }
  }
  return d;
}

Minibatch full_training_batch(const Dataset& data) {
  Minibatch b;
  b.indices.resize(data.train_count);
  std::iota(b.indices.begin(), b.indices.end(), std::size_t{0});
  return b;
}

}  // namespace dsgd
