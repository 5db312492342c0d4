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

#include <random>

#include "doctest.h"
#include "dsgd/collective.hpp"
#include "dsgd/delays.hpp"

using namespace dsgd;
using namespace dsgd::collective;

namespace {

std::vector<ParameterVector> random_inputs(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ParameterVector> out(n, ParameterVector(dim));
  for (auto& v : out)
    for (auto& x : v) x = u(rng);
  return out;
}

}  // namespace

TEST_SUITE("collective") {
  TEST_CASE("chunk plan covers the vector") {
    const auto plan = ChunkPlan::make(10, 3);
    CHECK(plan.chunk_count() == 3);
    std::size_t covered = 0;
    for (const auto& c : plan.chunks) covered += c.size();
    CHECK(covered == 10);
    CHECK(plan.max_chunk_bytes() == 4 * sizeof(double));
    const auto fine = ChunkPlan::make(100, 4, 12);
    CHECK(fine.chunk_count() == 12);
    CHECK(fine.segment_of(5) == 1);
    CHECK_THROWS(ChunkPlan::make(10, 0));
  }

  TEST_CASE("transfer phases") {
    CHECK_THROWS_AS(transfer_phase_count(1), InvalidArgument);
    CHECK(transfer_phase_count(2) == 2);
    CHECK(transfer_phase_count(8) == 14);
  }

  TEST_CASE("two participants, exact small sums") {
    const auto r = ring_allreduce({ParameterVector{1, 2, 3}, ParameterVector{4, 5, 6}},
                                  ChunkPlan::make(3, 2));
    for (const auto& out : r.outputs) CHECK(out == ParameterVector{5, 7, 9});
  }

  TEST_CASE("a ring needs two participants") {
    CHECK_THROWS_AS(ring_allreduce({ParameterVector{1, 2}}, ChunkPlan::make(2, 1)), InvalidArgument);
  }

  TEST_CASE("matches the sequential oracle and is bit-identical across ranks") {
    for (std::size_t n : {2u, 3u, 4u, 5u, 8u}) {
      for (std::size_t chunks : {std::size_t{0}, 2 * n + 1}) {
        CAPTURE(n);
        CAPTURE(chunks);
        const auto inputs = random_inputs(n, 37, n * 100 + chunks);
        const auto r = ring_allreduce(inputs, ChunkPlan::make(37, n, chunks));
        const auto oracle = sequential_reduce_oracle(inputs);
        for (const auto& out : r.outputs) {
          CHECK(max_abs_diff(out, oracle) <= 1e-12);
          CHECK(bit_equal(out, r.outputs[0]));
        }
      }
    }
  }

  TEST_CASE("result is independent of message timing") {
    const auto inputs = random_inputs(4, 50, 3);
    const auto plan = ChunkPlan::make(50, 4, 9);
    const auto reference = ring_allreduce(inputs, plan).outputs[0];
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      RingAllreduceOptions opt;
      harness::DelayModel d;
      d.message_jitter_s = 1e-3;
      d.seed = seed;
      opt.link = d.link();
      for (const auto& out : ring_allreduce(inputs, plan, opt).outputs) {
        CHECK(bit_equal(out, reference));
      }
    }
    RingAllreduceOptions real;
    real.clock = rt::ClockMode::real;
    for (const auto& out : ring_allreduce(inputs, plan, real).outputs) {
      CHECK(bit_equal(out, reference));
    }
  }

  TEST_CASE("bytes per participant follow the ring volume") {
    const std::size_t dim = 1000, n = 4;
    const auto plan = ChunkPlan::make(dim, n);
    const auto r = ring_allreduce(random_inputs(n, dim, 1), plan);
    const double expected = 2.0 * (n - 1) / n * dim * sizeof(double);
    for (const auto& s : r.stats) {
      CHECK(s.phases == transfer_phase_count(n));
      CHECK(std::abs(static_cast<double>(s.bytes_sent) - expected) <= plan.max_chunk_bytes());
    }
  }

  TEST_CASE("input errors") {
    CHECK_THROWS_AS(sequential_reduce_oracle({}), InvalidArgument);
    CHECK_THROWS_AS(ring_allreduce({ParameterVector(3), ParameterVector(4)}, ChunkPlan::make(3, 2)),
                    DimensionMismatch);
    CHECK_THROWS(ring_allreduce({ParameterVector(3)}, ChunkPlan::make(3, 2)));
  }

  TEST_CASE("a group runs successive collectives") {
    auto rt = rt::Runtime::create(rt::ClockMode::virtual_time);
    RingGroup group(*rt, ChunkPlan::make(3, 3));
    std::vector<ParameterVector> data(3, ParameterVector{1, 1, 1});
    std::vector<std::function<void()>> actors;
    for (std::size_t r = 0; r < 3; ++r) {
      actors.emplace_back([&, r] {
        for (int k = 0; k < 3; ++k) group.allreduce(r, data[r].span());
      });
    }
    rt->run(std::move(actors));
    for (const auto& d : data) CHECK(d == ParameterVector{27, 27, 27});
    CHECK(group.generation(0) == 3);
  }

  TEST_CASE("shutdown releases blocked ranks") {
    auto rt = rt::Runtime::create(rt::ClockMode::virtual_time);
    RingGroup group(*rt, ChunkPlan::make(4, 2));
    ParameterVector v(4);
    CHECK_THROWS(rt->run({[&] { group.allreduce(0, v.span()); },
                          [&] {
                            rt->sleep_for(1.0);
                            group.shutdown();
                          }}));
  }
}
