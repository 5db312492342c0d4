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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dsgd {

enum class ObjectiveKind { quadratic, logistic, tiny_mlp };

std::string_view to_string(ObjectiveKind kind) noexcept;
// Accepts "quadratic", "logistic", "tiny-mlp". Throws InvalidArgument otherwise.
ObjectiveKind parse_objective_kind(std::string_view name);

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
};

/// Synthetic dataset, row-major features.
///
/// Rows [0, train_count) are training rows, the rest are held out. For
/// the quadratic kind the targets are unused and `center` holds the point
/// every per-sample cost is minimized at.
struct Dataset {
  ObjectiveKind kind = ObjectiveKind::logistic;
  std::size_t input_dim = 0;
  std::size_t n_samples = 0;
  std::size_t train_count = 0;
  std::vector<double> inputs;
  std::vector<double> targets;
  std::vector<double> center;

  std::span<const double> row(std::size_t i) const noexcept {
    return {inputs.data() + i * input_dim, input_dim};
  }
  IndexRange train_range() const noexcept { return {0, train_count}; }
  IndexRange heldout_range() const noexcept { return {train_count, n_samples}; }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Gaussian features, 90/10 train/held-out split, deterministic in seed.
//   logistic: labels in {-1, +1} from a hidden separator, 10% flipped.
//   tiny-mlp: regression targets from a smooth hidden function plus noise.
//   quadratic: targets are zero; a hidden center defines the minimizer.
Dataset make_dataset(ObjectiveKind kind, std::size_t n_samples, std::size_t input_dim,
                     std::uint64_t seed);

struct Minibatch {
  std::vector<std::size_t> indices;
  std::size_t size() const noexcept { return indices.size(); }
  friend bool operator==(const Minibatch&, const Minibatch&) = default;
};

// Minibatch of every training row, in order.
Minibatch full_training_batch(const Dataset& data);

}  // namespace dsgd
