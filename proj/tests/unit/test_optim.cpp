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

#include <cmath>

#include "doctest.h"
#include "dsgd/error.hpp"
#include "dsgd/optim.hpp"

using namespace dsgd;

TEST_SUITE("optim") {
  TEST_CASE("baseline schedule is flat then annealed") {
    const auto s = baseline_schedule();
    for (int e = 1; e <= 10; ++e) CHECK(learning_rate(s, e, 0, 100) == 0.1);
    for (int e = 11; e <= 16; ++e) {
      CHECK(learning_rate(s, e, 50, 100) ==
            doctest::Approx(0.1 * std::pow(1.0 / std::sqrt(2.0), e - 10)).epsilon(1e-14));
    }
  }

  TEST_CASE("large-batch warmup is linear per iteration") {
    const auto s = large_batch_schedule();
    const std::size_t ipe = 40;
    CHECK(learning_rate(s, 1, 0, ipe) == doctest::Approx(0.1));
    CHECK(std::abs(learning_rate(s, 10, ipe - 1, ipe) - 1.0) < 1e-12);
    // Midpoint of the ramp.
    const std::size_t total = 10 * ipe;
    const double mid = learning_rate(s, 5, ipe - 1, ipe);
    CHECK(mid == doctest::Approx(0.1 + 0.9 * (5.0 * ipe - 1) / (total - 1)).epsilon(1e-14));
    double prev = 0.0;
    for (int e = 1; e <= 10; ++e) {
      for (std::size_t k = 0; k < ipe; ++k) {
        const double lr = learning_rate(s, e, k, ipe);
        CHECK(lr > prev);
        prev = lr;
      }
    }
  }

  TEST_CASE("gap between warmup and anneal holds the peak") {
    ScheduleSpec s{0.1, 1.0, 2, 0.5, 5, 8};
    CHECK(learning_rate(s, 3, 0, 10) == 1.0);
    CHECK(learning_rate(s, 4, 9, 10) == 1.0);
    CHECK(learning_rate(s, 5, 0, 10) == 0.5);
    CHECK(learning_rate(s, 6, 0, 10) == 0.25);
  }

  TEST_CASE("single-iteration warmup jumps to the peak") {
    ScheduleSpec s{0.1, 1.0, 1, 0.5, 2, 4};
    CHECK(learning_rate(s, 1, 0, 1) == 1.0);
  }

  TEST_CASE("schedule validation") {
    ScheduleSpec s = baseline_schedule();
    s.base_lr = 0.0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s = baseline_schedule();
    s.anneal_factor = 1.0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s = large_batch_schedule();
    s.anneal_start_epoch = 10;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    CHECK_THROWS_AS(learning_rate(baseline_schedule(), 17, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(learning_rate(baseline_schedule(), 0, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(learning_rate(baseline_schedule(), 1, 5, 5), InvalidArgument);
  }

  TEST_CASE("heavy-ball momentum step") {
    ParameterVector theta{1.0, -2.0};
    MomentumState m(2, 0.9);
    sgd_step(theta, ParameterVector{1.0, 1.0}, 0.5, m);
    CHECK(theta == ParameterVector{0.5, -2.5});
    sgd_step(theta, ParameterVector{0.0, 2.0}, 0.5, m);
    // v = (0.9, 0.9 + 2) -> theta -= 0.5 v
    CHECK(theta[0] == doctest::Approx(0.05));
    CHECK(theta[1] == doctest::Approx(-2.5 - 0.5 * 2.9));
  }

  TEST_CASE("zero momentum is plain SGD") {
    ParameterVector theta{3.0};
    MomentumState m(1, 0.0);
    for (int i = 0; i < 3; ++i) sgd_step(theta, ParameterVector{1.0}, 1.0, m);
    CHECK(theta[0] == 0.0);
  }

  TEST_CASE("step errors") {
    ParameterVector theta(2);
    MomentumState m(2, 0.5);
    CHECK_THROWS_AS(sgd_step(theta, ParameterVector(3), 0.1, m), DimensionMismatch);
    CHECK_THROWS_AS(sgd_step(theta, ParameterVector(2), 0.0, m), InvalidArgument);
    CHECK_THROWS_AS(MomentumState(2, 1.0), InvalidArgument);
    CHECK_THROWS_AS(sgd_step(theta, ParameterVector{1e308, 0.0}, 1e10, m), NonFiniteValue);
  }
}
