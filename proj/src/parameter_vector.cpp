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

#include "dsgd/parameter_vector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace dsgd {

void require_same_dim(const ParameterVector& a, const ParameterVector& b, const char* context) {
  if (a.dim() != b.dim()) throw DimensionMismatch(context, a.dim(), b.dim());
}

ParameterVector& ParameterVector::operator+=(const ParameterVector& other) {
  require_same_dim(*this, other, "ParameterVector +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ParameterVector& ParameterVector::operator-=(const ParameterVector& other) {
  require_same_dim(*this, other, "ParameterVector -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ParameterVector& ParameterVector::operator*=(double s) noexcept {
  for (auto& v : values_) v *= s;
  return *this;
}

void ParameterVector::axpy(double a, const ParameterVector& x) {
  require_same_dim(*this, x, "ParameterVector axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
}

double ParameterVector::dot(const ParameterVector& other) const {
  require_same_dim(*this, other, "ParameterVector dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i] * other.values_[i];
  return acc;
}

double ParameterVector::norm() const noexcept {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return std::sqrt(acc);
}

bool ParameterVector::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void ParameterVector::check_finite(const char* context) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw NonFiniteValue(std::string(context) + ": non-finite value at coordinate " +
                           std::to_string(i));
    }
  }
}

ParameterVector operator+(ParameterVector a, const ParameterVector& b) { return a += b; }
ParameterVector operator-(ParameterVector a, const ParameterVector& b) { return a -= b; }
ParameterVector operator*(double s, ParameterVector a) { return a *= s; }

double max_abs_diff(const ParameterVector& a, const ParameterVector& b) {
  require_same_dim(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool bit_equal(const ParameterVector& a, const ParameterVector& b) noexcept {
  return a.dim() == b.dim() &&
         (a.dim() == 0 || std::memcmp(a.data(), b.data(), a.byte_size()) == 0);
}

}  // namespace dsgd
