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

#include "dsgd/metrics.hpp"

#include <numeric>

#include "dsgd/error.hpp"

namespace dsgd::harness {

double evaluate_heldout(const Objective& obj, const Dataset& data, const ParameterVector& theta) {
  if (theta.dim() != obj.param_dim()) {
    throw DimensionMismatch("evaluate_heldout parameter dimension", obj.param_dim(), theta.dim());
  }
  if (obj.is_explicit()) return obj.data_loss(theta, {}, data);
  const IndexRange range = data.heldout_range();
  std::vector<std::size_t> rows(range.size());
  std::iota(rows.begin(), rows.end(), range.begin);
  return obj.data_loss(theta, rows, data);
}

}  // namespace dsgd::harness
