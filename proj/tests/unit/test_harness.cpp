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

#include <algorithm>
#include <numeric>
#include <thread>

#include "doctest.h"
#include "dsgd/costmodel.hpp"
#include "dsgd/experiment.hpp"
#include "dsgd/pool.hpp"

using namespace dsgd;
using namespace dsgd::harness;
using protocols::Strategy;

namespace {

std::vector<Minibatch> numbered(std::size_t n) {
  std::vector<Minibatch> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Minibatch{{i}});
  return out;
}

RunConfig base_config(Strategy strategy, std::size_t learners) {
  RunConfig c;
  c.strategy = strategy;
  c.learners = learners;
  c.objective.kind = ObjectiveKind::logistic;
  c.objective.input_dim = 4;
  c.dataset.samples = 2000;
  c.epochs = 1;
  c.batch_size = 8;
  c.seed = 3;
  c.delays.base_compute_ms = 1.0;
  return c;
}

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("pool hands out batches in order, then reports exhaustion") {
    MinibatchPool pool(numbered(10));
    for (std::size_t i = 0; i < 10; ++i) {
      const auto c = next_minibatch(pool, 1);
      REQUIRE(c);
      CHECK(c->index == i);
      CHECK(c->batch->indices[0] == i);
    }
    CHECK_FALSE(next_minibatch(pool, 1));
    CHECK_FALSE(next_minibatch(pool, 1));
    CHECK(pool.handed_out() == 10);
    MinibatchPool empty;
    CHECK_FALSE(next_minibatch(empty, 1));
  }

  TEST_CASE("pool delivers exactly once under concurrency") {
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = 100;
      MinibatchPool pool(numbered(n));
      std::vector<std::vector<std::size_t>> seen(4);
      std::vector<std::thread> threads;
      for (std::size_t t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
          while (auto c = next_minibatch(pool, t + 1)) seen[t].push_back(c->batch->indices[0]);
        });
      }
      for (auto& th : threads) th.join();
      std::vector<std::size_t> all;
      for (const auto& s : seen) all.insert(all.end(), s.begin(), s.end());
      std::sort(all.begin(), all.end());
      std::vector<std::size_t> expected(n);
      std::iota(expected.begin(), expected.end(), std::size_t{0});
      REQUIRE(all == expected);
    }
  }

  TEST_CASE("epoch batches cover the training split once, seeded per epoch") {
    const Dataset d = make_dataset(ObjectiveKind::logistic, 500, 3, 1);
    const auto a = make_epoch_batches(d, 32, 7, 1);
    std::vector<std::size_t> flat;
    for (const auto& b : a) flat.insert(flat.end(), b.indices.begin(), b.indices.end());
    CHECK(flat.size() == d.train_count);
    CHECK(std::all_of(flat.begin(), flat.end(), [&](std::size_t i) { return i < d.train_count; }));
    std::vector<std::size_t> sorted = flat;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    CHECK(make_epoch_batches(d, 32, 7, 1) == a);
    CHECK_FALSE(make_epoch_batches(d, 32, 7, 2) == a);
    // The permutation does not depend on the batch size.
    std::vector<std::size_t> flat8;
    for (const auto& b : make_epoch_batches(d, 8, 7, 1))
      flat8.insert(flat8.end(), b.indices.begin(), b.indices.end());
    CHECK(flat8 == flat);
  }

  TEST_CASE("delay model") {
    DelayModel m;
    m.base_compute_s = 0.01;
    m.slowdown = {{2, 4.0}};
    CHECK(m.compute_time(1, 0) == 0.01);
    CHECK(m.compute_time(2, 5) == doctest::Approx(0.04));
    m.compute_jitter = 0.5;
    const double t = m.compute_time(1, 3);
    CHECK(t >= 0.01);
    CHECK(t < 0.015);
    CHECK(m.compute_time(1, 3) == t);
    CHECK_THROWS(m.validate(1));
    m.slowdown = {{1, 0.5}};
    CHECK_THROWS(m.validate(2));
  }

  TEST_CASE("config validation names the field") {
    auto c = base_config(Strategy::adpsgd, 3);
    try {
      c.validate();
      FAIL("expected failure");
    } catch (const ConfigFieldError& e) {
      CHECK(e.field() == "learners");
      CHECK(std::string(e.what()).find("even") != std::string::npos);
    }
    c = base_config(Strategy::ssgd, 4);
    c.delays.stragglers[5] = 2.0;
    CHECK_THROWS_AS(c.validate(), ConfigFieldError);
    c = base_config(Strategy::single, 2);
    CHECK_THROWS_AS(c.validate(), ConfigFieldError);
  }

  TEST_CASE("single run over 16 epochs on a convex objective") {
    auto c = base_config(Strategy::single, 1);
    c.objective.kind = ObjectiveKind::quadratic;
    c.epochs = 16;
    c.delays.base_compute_ms = 0.0;
    const auto r = run_experiment(c);
    REQUIRE(r.metrics.size() == 16);
    for (std::size_t e = 1; e < r.metrics.size(); ++e) {
      CHECK(r.metrics[e].heldout_loss <= r.metrics[e - 1].heldout_loss * (1 + 1e-9) + 1e-15);
    }
  }

  TEST_CASE("adpsgd without stragglers balances the work") {
    const auto r = run_experiment(base_config(Strategy::adpsgd, 4));
    const auto& counts = r.metrics[0].minibatch_counts;
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CHECK(static_cast<double>(*hi - *lo) <= 0.1 * static_cast<double>(*hi));
  }

  TEST_CASE("adpsgd hands a straggler proportionally fewer batches") {
    auto c = base_config(Strategy::adpsgd, 4);
    c.dataset.samples = 8000;
    c.delays.stragglers[1] = 10.0;
    const auto r = run_experiment(c);
    const auto& counts = r.metrics[0].minibatch_counts;
    const double pool = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    const double rate = 1.0 / 10 + 3.0;
    CHECK(relative(counts[0], pool * 0.1 / rate) <= 0.15);
    for (std::size_t i = 1; i < 4; ++i) CHECK(relative(counts[i], pool / rate) <= 0.15);
  }

  TEST_CASE("straggler sweep reports degradation and speedup") {
    auto c = base_config(Strategy::ssgd, 4);
    const auto table = measure_straggler_degradation(c, {1.0, 4.0});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].degradation == 1.0);
    CHECK(table.rows[1].degradation > 2.0);
    CHECK(table.rows[0].speedup > 3.0);
    CHECK_THROWS(measure_straggler_degradation(c, {0.5}));
  }

  TEST_CASE("measured epoch times follow the closed-form models") {
    // Virtual clock; a finite bandwidth makes the SSGD communication term visible.
    for (std::size_t lambda : {4u, 8u}) {
      auto ssgd = base_config(Strategy::ssgd, lambda);
      ssgd.dataset.samples = 4000;
      // Communication stays well below compute; when it dominates, the ring's
      // pipelining hides part of a mild straggler's delay and the fit degrades.
      ssgd.delays.bandwidth_bytes_per_s = 400e3;
      const auto t = measure_straggler_degradation(ssgd, {1.0, 2.0, 10.0, 100.0}, false);
      const auto fit = costmodel::fit_ssgd(t.rows[0].epoch_time_s, t.rows[1].epoch_time_s);
      for (const auto& row : t.rows) {
        const double model =
            costmodel::ssgd_epoch_time(fit, costmodel::one_straggler(lambda, row.factor));
        CAPTURE(lambda);
        CAPTURE(row.factor);
        CHECK(relative(row.epoch_time_s, model) <= 0.25);
      }

      auto ad = base_config(Strategy::adpsgd, lambda);
      ad.dataset.samples = 40000;
      const auto a = measure_straggler_degradation(ad, {1.0, 2.0, 10.0, 100.0}, false);
      for (const auto& row : a.rows) {
        const double model = costmodel::adpsgd_epoch_time(
            a.rows[0].epoch_time_s, lambda, costmodel::one_straggler(lambda, row.factor));
        CAPTURE(lambda);
        CAPTURE(row.factor);
        CHECK(relative(row.epoch_time_s, model) <= 0.25);
      }
    }
  }

  TEST_CASE("virtual runs give identical metrics") {
    auto c = base_config(Strategy::ps_asgd, 4);
    c.delays.compute_jitter = 0.5;
    c.delays.message_jitter_ms = 0.2;
    CHECK(run_experiment(c).metrics == run_experiment(c).metrics);
  }

  TEST_CASE("engine errors surface with the epoch") {
    auto c = base_config(Strategy::ssgd, 2);
    c.objective.kind = ObjectiveKind::quadratic;
    c.schedule.base_lr = c.schedule.peak_lr = 1e300;
    CHECK_THROWS_AS(run_experiment(c), protocols::EngineError);
  }
}
