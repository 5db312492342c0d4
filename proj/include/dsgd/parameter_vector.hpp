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
#include <initializer_list>
#include <span>
#include <vector>

#include "dsgd/error.hpp"

namespace dsgd {

/// Flat, fixed-dimension real vector used for both weights and gradients.
///
/// The dimension is fixed at construction. Arithmetic helpers reject
/// mismatched dimensions with DimensionMismatch.
class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::size_t dim, double fill = 0.0) : values_(dim, fill) {}
  explicit ParameterVector(std::vector<double> values) : values_(std::move(values)) {}
  ParameterVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t dim() const noexcept { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> span() noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::size_t byte_size() const noexcept { return values_.size() * sizeof(double); }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  ParameterVector& operator+=(const ParameterVector& other);
  ParameterVector& operator-=(const ParameterVector& other);
  ParameterVector& operator*=(double s) noexcept;

  // this += a * x
  void axpy(double a, const ParameterVector& x);

  double dot(const ParameterVector& other) const;
  double norm() const noexcept;
  bool all_finite() const noexcept;

  // Throws NonFiniteValue naming `context` if any entry is NaN or Inf.
  void check_finite(const char* context) const;

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;

 private:
  std::vector<double> values_;
};

ParameterVector operator+(ParameterVector a, const ParameterVector& b);
ParameterVector operator-(ParameterVector a, const ParameterVector& b);
ParameterVector operator*(double s, ParameterVector a);

void require_same_dim(const ParameterVector& a, const ParameterVector& b, const char* context);

// max_i |a_i - b_i|
double max_abs_diff(const ParameterVector& a, const ParameterVector& b);

// Bitwise equality (distinguishes -0.0 from 0.0, NaN payloads).
bool bit_equal(const ParameterVector& a, const ParameterVector& b) noexcept;

}  // namespace dsgd
