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
#include <optional>
#include <span>
#include <vector>

#include "dsgd/dataset.hpp"
#include "dsgd/parameter_vector.hpp"

namespace dsgd {

// 0.5 * theta' A theta - b' theta + offset, with A dense row-major.
struct QuadraticSystem {
  std::size_t dim = 0;
  std::vector<double> A;
  ParameterVector b;
  double offset = 0.0;

  double value(const ParameterVector& theta) const;
};

/// Differentiable minibatch cost.
///
/// Kinds:
///  - quadratic: per-sample cost 0.5 * (x . (theta - center))^2, or a fixed
///    batch-independent 0.5 theta'A theta - b'theta when built from an
///    explicit system.
///  - logistic: log(1 + exp(-y x.theta)) with labels y in {-1, +1}.
///  - tiny-mlp: one tanh hidden layer, scalar output, squared error 0.5 (yhat - y)^2.
///
/// Every kind adds 0.5 * regularization * |theta|^2.
class Objective {
 public:
  static Objective quadratic(std::size_t input_dim, double regularization = 0.0);
  static Objective explicit_quadratic(std::vector<double> A, ParameterVector b,
                                      double regularization = 0.0);
  static Objective logistic(std::size_t input_dim, double regularization = 1e-4);
  static Objective tiny_mlp(std::size_t input_dim = 10, std::size_t hidden = 16,
                            double regularization = 0.0);

  ObjectiveKind kind() const noexcept { return kind_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden() const noexcept { return hidden_; }
  double regularization() const noexcept { return regularization_; }
  std::size_t param_dim() const noexcept;
  bool is_explicit() const noexcept { return explicit_.has_value(); }

  // Mean per-sample cost over the batch plus the regularization term.
  double evaluate(const ParameterVector& theta, const Minibatch& batch, const Dataset& data) const;
  // Analytic gradient of evaluate().
  ParameterVector gradient(const ParameterVector& theta, const Minibatch& batch,
                           const Dataset& data) const;

  // Mean per-sample cost over arbitrary rows, without regularization.
  double data_loss(const ParameterVector& theta, std::span<const std::size_t> rows,
                   const Dataset& data) const;

  // Full training-set system for the quadratic kind (includes regularization).
  QuadraticSystem quadratic_system(const Dataset& data) const;

 private:
  void check_inputs(const ParameterVector& theta, const Minibatch& batch,
                    const Dataset& data) const;
  double sample_cost(const ParameterVector& theta, std::size_t row, const Dataset& data) const;
  void accumulate_sample_gradient(const ParameterVector& theta, std::size_t row,
                                  const Dataset& data, double weight, ParameterVector& out,
                                  std::vector<double>& scratch) const;

  ObjectiveKind kind_ = ObjectiveKind::quadratic;
  std::size_t input_dim_ = 0;
  std::size_t hidden_ = 0;
  double regularization_ = 0.0;
  std::optional<QuadraticSystem> explicit_;
};

// Central differences (f(theta + h e_i) - f(theta - h e_i)) / 2h per coordinate.
ParameterVector finite_diff_gradient(const Objective& obj, const ParameterVector& theta,
                                     const Minibatch& batch, const Dataset& data, double h);

// Deterministic starting point: zeros for the convex kinds, small Gaussian
// weights for tiny-mlp.
ParameterVector initial_weights(const Objective& obj, std::uint64_t seed);

}  // namespace dsgd
