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

#include "dsgd/objective.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dsgd/error.hpp"

namespace dsgd {

namespace {

// log(1 + exp(-t)) without overflow.
double softplus_neg(double t) { return std::max(-t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

// 1 / (1 + exp(t)) without overflow.
double sigmoid_neg(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

}  // namespace

double QuadraticSystem::value(const ParameterVector& theta) const {
  if (theta.dim() != dim) throw DimensionMismatch("QuadraticSystem::value", dim, theta.dim());
  double quad = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < dim; ++j) row += A[i * dim + j] * theta[j];
    quad += theta[i] * row;
  }
  return 0.5 * quad - b.dot(theta) + offset;
}

Objective Objective::quadratic(std::size_t input_dim, double regularization) {
  require(input_dim >= 1, "quadratic objective: input_dim must be >= 1");
  require(regularization >= 0.0, "objective regularization must be nonnegative");
  Objective o;
  o.kind_ = ObjectiveKind::quadratic;
  o.input_dim_ = input_dim;
  o.regularization_ = regularization;
  return o;
}

Objective Objective::explicit_quadratic(std::vector<double> A, ParameterVector b,
                                        double regularization) {
  const std::size_t n = b.dim();
  require(n >= 1, "explicit quadratic: b must be nonempty");
  require(A.size() == n * n, "explicit quadratic: A must be dim x dim");
  require(regularization >= 0.0, "objective regularization must be nonnegative");
  Objective o = quadratic(n, regularization);
  o.explicit_ = QuadraticSystem{n, std::move(A), std::move(b), 0.0};
  return o;
}

Objective Objective::logistic(std::size_t input_dim, double regularization) {
  require(input_dim >= 1, "logistic objective: input_dim must be >= 1");
  require(regularization >= 0.0, "objective regularization must be nonnegative");
  Objective o;
  o.kind_ = ObjectiveKind::logistic;
  o.input_dim_ = input_dim;
  o.regularization_ = regularization;
  return o;
}

Objective Objective::tiny_mlp(std::size_t input_dim, std::size_t hidden, double regularization) {
  require(input_dim >= 1 && hidden >= 1, "tiny-mlp objective: widths must be >= 1");
  require(regularization >= 0.0, "objective regularization must be nonnegative");
  Objective o;
  o.kind_ = ObjectiveKind::tiny_mlp;
  o.input_dim_ = input_dim;
  o.hidden_ = hidden;
  o.regularization_ = regularization;
  return o;
}

std::size_t Objective::param_dim() const noexcept {
  switch (kind_) {
    case ObjectiveKind::quadratic:
    case ObjectiveKind::logistic:
      return input_dim_;
    case ObjectiveKind::tiny_mlp:
      // W1 (hidden x input), b1 (hidden), w2 (hidden), b2.
      return hidden_ * input_dim_ + 2 * hidden_ + 1;
  }
  return 0;
}

void Objective::check_inputs(const ParameterVector& theta, const Minibatch& batch,
                             const Dataset& data) const {
  if (theta.dim() != param_dim()) {
    throw DimensionMismatch("objective parameter dimension", param_dim(), theta.dim());
  }
  if (explicit_) return;
  if (data.input_dim != input_dim_) {
    throw DimensionMismatch("objective input dimension vs dataset", input_dim_, data.input_dim);
  }
  if (kind_ == ObjectiveKind::quadratic && data.center.size() != input_dim_) {
    throw InvalidArgument("quadratic objective needs a dataset generated for the quadratic kind");
  }
  if (batch.size() == 0) throw InvalidArgument("minibatch must be nonempty");
  for (std::size_t i : batch.indices) {
    if (i >= data.train_count) {
      throw InvalidArgument("minibatch index " + std::to_string(i) +
                            " lies outside the training range");
    }
  }
}

double Objective::sample_cost(const ParameterVector& theta, std::size_t row,
                              const Dataset& data) const {
  const auto x = data.row(row);
  switch (kind_) {
    case ObjectiveKind::quadratic: {
      double z = 0.0;
      for (std::size_t j = 0; j < input_dim_; ++j) z += x[j] * (theta[j] - data.center[j]);
      return 0.5 * z * z;
    }
    case ObjectiveKind::logistic: {
      double z = 0.0;
      for (std::size_t j = 0; j < input_dim_; ++j) z += x[j] * theta[j];
      return softplus_neg(data.targets[row] * z);
    }
    case ObjectiveKind::tiny_mlp: {
      const std::size_t d = input_dim_, h = hidden_;
      const double* w1 = theta.data();
      const double* b1 = w1 + h * d;
      const double* w2 = b1 + h;
      const double b2 = w2[h];
      double yhat = b2;
      for (std::size_t k = 0; k < h; ++k) {
        double a = b1[k];
        for (std::size_t j = 0; j < d; ++j) a += w1[k * d + j] * x[j];
        yhat += w2[k] * std::tanh(a);
      }
      const double r = yhat - data.targets[row];
      return 0.5 * r * r;
    }
  }
  return 0.0;
}

void Objective::accumulate_sample_gradient(const ParameterVector& theta, std::size_t row,
                                           const Dataset& data, double weight,
                                           ParameterVector& out,
                                           std::vector<double>& scratch) const {
  const auto x = data.row(row);
  switch (kind_) {
    case ObjectiveKind::quadratic: {
      double z = 0.0;
      for (std::size_t j = 0; j < input_dim_; ++j) z += x[j] * (theta[j] - data.center[j]);
      for (std::size_t j = 0; j < input_dim_; ++j) out[j] += weight * z * x[j];
      return;
    }
    case ObjectiveKind::logistic: {
      const double y = data.targets[row];
      double z = 0.0;
      for (std::size_t j = 0; j < input_dim_; ++j) z += x[j] * theta[j];
      const double coeff = -y * sigmoid_neg(y * z);
      for (std::size_t j = 0; j < input_dim_; ++j) out[j] += weight * coeff * x[j];
      return;
    }
    case ObjectiveKind::tiny_mlp: {
      const std::size_t d = input_dim_, h = hidden_;
      const double* w1 = theta.data();
      const double* b1 = w1 + h * d;
      const double* w2 = b1 + h;
      scratch.resize(h);
      double yhat = w2[h];
      for (std::size_t k = 0; k < h; ++k) {
        double a = b1[k];
        for (std::size_t j = 0; j < d; ++j) a += w1[k * d + j] * x[j];
        scratch[k] = std::tanh(a);
        yhat += w2[k] * scratch[k];
      }
      const double r = weight * (yhat - data.targets[row]);
      double* g = out.data();
      double* gb1 = g + h * d;
      double* gw2 = gb1 + h;
      for (std::size_t k = 0; k < h; ++k) {
        const double da = r * w2[k] * (1.0 - scratch[k] * scratch[k]);
        for (std::size_t j = 0; j < d; ++j) g[k * d + j] += da * x[j];
        gb1[k] += da;
        gw2[k] += r * scratch[k];
      }
      gw2[h] += r;
      return;
    }
  }
}

double Objective::evaluate(const ParameterVector& theta, const Minibatch& batch,
                           const Dataset& data) const {
  check_inputs(theta, batch, data);
  double value = explicit_ ? explicit_->value(theta) : data_loss(theta, batch.indices, data);
  if (regularization_ > 0.0) value += 0.5 * regularization_ * theta.dot(theta);
  if (!std::isfinite(value)) throw NonFiniteValue("objective value is not finite");
  return value;
}

ParameterVector Objective::gradient(const ParameterVector& theta, const Minibatch& batch,
                                    const Dataset& data) const {
  check_inputs(theta, batch, data);
  ParameterVector g(theta.dim());
  if (explicit_) {
    const auto& sys = *explicit_;
    for (std::size_t i = 0; i < sys.dim; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < sys.dim; ++j) row += sys.A[i * sys.dim + j] * theta[j];
      g[i] = row - sys.b[i];
    }
  } else {
    const double w = 1.0 / static_cast<double>(batch.size());
    std::vector<double> scratch;
    for (std::size_t i : batch.indices) accumulate_sample_gradient(theta, i, data, w, g, scratch);
  }
  if (regularization_ > 0.0) g.axpy(regularization_, theta);
  g.check_finite("objective gradient");
  return g;
}

double Objective::data_loss(const ParameterVector& theta, std::span<const std::size_t> rows,
                            const Dataset& data) const {
  if (theta.dim() != param_dim()) {
    throw DimensionMismatch("objective parameter dimension", param_dim(), theta.dim());
  }
  if (explicit_) return explicit_->value(theta);
  if (rows.empty()) throw InvalidArgument("data_loss over an empty row set");
  double acc = 0.0;
  for (std::size_t i : rows) acc += sample_cost(theta, i, data);
  return acc / static_cast<double>(rows.size());
}

QuadraticSystem Objective::quadratic_system(const Dataset& data) const {
  if (kind_ != ObjectiveKind::quadratic) {
    throw InvalidArgument("quadratic_system is only defined for the quadratic kind");
  }
  QuadraticSystem sys;
  if (explicit_) {
    sys = *explicit_;
  } else {
    if (data.input_dim != input_dim_ || data.center.size() != input_dim_) {
      throw DimensionMismatch("quadratic_system dataset", input_dim_, data.input_dim);
    }
    const std::size_t n = input_dim_;
    sys.dim = n;
    sys.A.assign(n * n, 0.0);
    const double w = 1.0 / static_cast<double>(data.train_count);
    for (std::size_t s = 0; s < data.train_count; ++s) {
      const auto x = data.row(s);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sys.A[i * n + j] += w * x[i] * x[j];
    }
    sys.b = ParameterVector(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sys.b[i] += sys.A[i * n + j] * data.center[j];
    ParameterVector c(data.center);
    sys.offset = 0.5 * sys.b.dot(c);
  }
  for (std::size_t i = 0; i < sys.dim; ++i) sys.A[i * sys.dim + i] += regularization_;
  return sys;
}

ParameterVector finite_diff_gradient(const Objective& obj, const ParameterVector& theta,
                                     const Minibatch& batch, const Dataset& data, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite_diff_gradient: step h must be > 0");
  ParameterVector g(theta.dim());
  ParameterVector probe = theta;
  for (std::size_t i = 0; i < theta.dim(); ++i) {
    probe[i] = theta[i] + h;
    const double up = obj.evaluate(probe, batch, data);
    probe[i] = theta[i] - h;
    const double down = obj.evaluate(probe, batch, data);
    probe[i] = theta[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

ParameterVector initial_weights(const Objective& obj, std::uint64_t seed) {
  ParameterVector w(obj.param_dim());
  if (obj.kind() == ObjectiveKind::tiny_mlp) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(obj.input_dim()));
    for (auto& v : w) v = scale * normal(rng);
  }
  return w;
}

}  // namespace dsgd
