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

#include <map>
#include <mutex>
#include <random>

#include "doctest.h"
#include "dsgd/protocols.hpp"

using namespace dsgd;
using namespace dsgd::protocols;

namespace {

struct Fixture {
  explicit Fixture(ObjectiveKind kind = ObjectiveKind::logistic, std::size_t samples = 1200,
                   std::size_t dim = 6)
      : data(make_dataset(kind, samples, dim, 42)),
        obj(kind == ObjectiveKind::quadratic  ? Objective::quadratic(dim)
            : kind == ObjectiveKind::logistic ? Objective::logistic(dim)
                                              : Objective::tiny_mlp(dim, 4)) {
    setup.objective = &obj;
    setup.data = &data;
    setup.schedule = baseline_schedule();
    setup.epochs = 2;
    setup.batch_size = 16;
    setup.seed = 5;
  }
  Dataset data;
  Objective obj;
  TrainingSetup setup;
};

// Records every weight snapshot reported by an engine.
class Recorder : public Observer {
 public:
  void on_weights(std::size_t id, std::uint64_t iteration, WeightsPoint point,
                  const ParameterVector& w) override {
    std::lock_guard lock(mu_);
    (point == WeightsPoint::working ? working : updated)[{iteration, id}] = w;
  }
  void on_exchange(const ExchangeRecord& r) override {
    std::lock_guard lock(mu_);
    exchanges.push_back(r);
  }

  std::map<std::pair<std::uint64_t, std::size_t>, ParameterVector> working, updated;
  std::vector<ExchangeRecord> exchanges;

 private:
  std::mutex mu_;
};

EngineOptions virtual_delays(double compute = 1e-3, std::uint64_t seed = 0, double jitter = 0.0) {
  EngineOptions o;
  o.delays.base_compute_s = compute;
  o.delays.compute_jitter = jitter;
  o.delays.message_jitter_s = jitter * compute;
  o.delays.seed = seed;
  return o;
}

std::size_t total(const std::vector<std::size_t>& counts) {
  std::size_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

}  // namespace

TEST_SUITE("protocols") {
  TEST_CASE("strategy names") {
    CHECK(parse_strategy("ps-asgd") == Strategy::ps_asgd);
    CHECK(to_string(Strategy::hybrid) == "hybrid");
    CHECK_THROWS_AS(parse_strategy("allreduce"), InvalidArgument);
  }

  TEST_CASE("bipartite ring topology") {
    const Topology t(8);
    for (std::size_t s : t.senders()) {
      CHECK(t.role(s) == Role::sender);
      for (std::uint64_t k = 0; k < 4; ++k) CHECK(t.role(t.partner(s, k)) == Role::receiver);
      CHECK(t.partner(s, 0) == t.left(s));
      CHECK(t.partner(s, 1) == t.right(s));
    }
    CHECK(t.left(1) == 8);
    CHECK(t.right(8) == 1);
    CHECK(Topology(2).neighbours(1) == std::vector<std::size_t>{2});
    CHECK_THROWS_WITH_AS(Topology(5), doctest::Contains("even number of learners"), InvalidArgument);
    CHECK_THROWS_AS(t.partner(2, 0), InvalidArgument);
    CHECK_THROWS_AS(t.role(9), InvalidArgument);
  }

  TEST_CASE("weight message checksum") {
    auto m = WeightMessage::seal(3, 7, ParameterVector{1.0, 2.0});
    CHECK(m.verify());
    m.payload[1] = 2.0000000001;
    CHECK_FALSE(m.verify());
    CHECK_THROWS_AS(m.require_valid(), IntegrityError);
    auto n = WeightMessage::seal(3, 7, ParameterVector{1.0, 2.0});
    n.origin = 4;
    CHECK_FALSE(n.verify());
  }

  TEST_CASE("pairwise mixing conserves the sum exactly") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd(0.0, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
      ParameterVector a(5), b(5);
      for (auto& x : a) x = nd(rng);
      for (auto& x : b) x = nd(rng);
      const auto [x, y] = adpsgd_mix(a, b);
      CHECK(bit_equal(x, y));
      for (std::size_t i = 0; i < 5; ++i) CHECK(x[i] + y[i] == a[i] + b[i]);
    }
    CHECK_THROWS_AS(adpsgd_mix(ParameterVector(2), ParameterVector(3)), DimensionMismatch);
  }

  TEST_CASE("setup validation") {
    Fixture f;
    f.setup.epochs = 17;
    CHECK_THROWS_AS(run_single(f.setup), InvalidArgument);
    f.setup.epochs = 1;
    f.setup.initial = ParameterVector(3);
    CHECK_THROWS_AS(run_single(f.setup), DimensionMismatch);
    f.setup.initial.reset();
    CHECK_THROWS_AS(run_ssgd(1, f.setup), InvalidArgument);
    CHECK_THROWS_AS(run_hybrid(1, f.setup), InvalidArgument);
    CHECK_THROWS_AS(run_adpsgd(3, f.setup), InvalidArgument);
    CHECK_THROWS_AS(run_ps_asgd(0, f.setup), InvalidArgument);
  }

  TEST_CASE("single: one record per epoch with finite loss") {
    Fixture f;
    f.setup.epochs = 3;
    const auto r = run_single(f.setup, virtual_delays());
    REQUIRE(r.metrics.size() == 3);
    for (const auto& m : r.metrics) {
      CHECK(std::isfinite(m.heldout_loss));
      CHECK(m.minibatch_counts.size() == 1);
      CHECK(m.staleness_max == 0);
    }
  }

  TEST_CASE("ssgd: replicas stay bit-identical and staleness is zero") {
    Fixture f;
    Recorder rec;
    auto opt = virtual_delays(1e-3, 3, 0.5);
    opt.observer = &rec;
    const auto r = run_ssgd(4, f.setup, opt);
    std::size_t checked = 0;
    for (const auto& [key, w] : rec.updated) {
      CHECK(bit_equal(w, rec.updated.at({key.first, 1})));
      ++checked;
    }
    CHECK(checked > 100);
    for (const auto& s : r.staleness)
      for (auto v : s.samples) CHECK(v == 0);
    for (const auto& m : r.metrics) {
      CHECK(total(m.minibatch_counts) == f.setup.batches(m.epoch).size());
      CHECK(m.bytes_exchanged > 0);
    }
  }

  TEST_CASE("ssgd with real threads keeps replicas identical") {
    Fixture f;
    f.setup.epochs = 1;
    Recorder rec;
    EngineOptions opt;
    opt.delays.clock = rt::ClockMode::real;
    opt.observer = &rec;
    run_ssgd(3, f.setup, opt);
    for (const auto& [key, w] : rec.updated) CHECK(bit_equal(w, rec.updated.at({key.first, 1})));
  }

  TEST_CASE("engine failures carry the epoch") {
    Fixture f(ObjectiveKind::quadratic);
    f.setup.schedule.base_lr = f.setup.schedule.peak_lr = 1e200;
    f.setup.momentum = 0.0;
    f.setup.initial = ParameterVector(f.obj.param_dim(), 1e200);
    try {
      run_ssgd(2, f.setup, virtual_delays());
      FAIL("expected an engine error");
    } catch (const EngineError& e) {
      CHECK(e.epoch() == 1);
    }
  }

  TEST_CASE("hybrid: working weights are the average of the previous pushes") {
    Fixture f(ObjectiveKind::quadratic);
    Recorder rec;
    auto opt = virtual_delays(1e-3, 9, 0.5);
    opt.observer = &rec;
    const std::size_t n = 4;
    const auto r = run_hybrid(n, f.setup, opt);
    std::size_t checked = 0;
    for (const auto& [key, w] : rec.working) {
      const auto [k, id] = key;
      CHECK(bit_equal(w, rec.working.at({k, 1})));
      if (k == 1) {
        CHECK(w == f.setup.start());
        continue;
      }
      ParameterVector mean(w.dim());
      for (std::size_t j = 1; j <= n; ++j) mean += rec.updated.at({k - 1, j});
      mean *= 1.0 / static_cast<double>(n);
      CHECK(max_abs_diff(w, mean) <= 1e-12);
      ++checked;
    }
    CHECK(checked > 100);
    // Staleness after the very first iteration is exactly 1.
    for (std::size_t e = 0; e < r.staleness.size(); ++e) {
      const auto& s = r.staleness[e].samples;
      REQUIRE(!s.empty());
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (e == 0 && s[i] == 0) continue;  // iteration 1 of each learner
        CHECK(s[i] == 1);
      }
      if (e == 0) CHECK(std::count(s.begin(), s.end(), 0u) == static_cast<long>(n));
    }
  }

  TEST_CASE("hybrid: zero gradient is a fixed point") {
    Fixture f;
    const auto obj = Objective::explicit_quadratic({1.0, 0.0, 0.0, 1.0}, ParameterVector{0.0, 0.0});
    f.setup.objective = &obj;
    f.setup.initial = ParameterVector(2);
    Recorder rec;
    auto opt = virtual_delays();
    opt.observer = &rec;
    const auto r = run_hybrid(2, f.setup, opt);
    for (const auto& [key, w] : rec.working) CHECK(w == ParameterVector(2));
    CHECK(r.weights == ParameterVector(2));
  }

  TEST_CASE("ps-asgd with one learner reproduces the sequential run") {
    Fixture f;
    f.setup.epochs = 2;
    const auto single = run_single(f.setup, virtual_delays());
    const auto ps = run_ps_asgd(1, f.setup, virtual_delays());
    CHECK(max_abs_diff(single.weights, ps.weights) <= 1e-12);
    for (const auto& s : ps.staleness)
      for (auto v : s.samples) CHECK(v == 0);
  }

  TEST_CASE("ps-asgd: staleness grows with the number of learners") {
    Fixture f;
    f.setup.epochs = 1;
    double prev = -1.0;
    for (std::size_t n : {1u, 2u, 4u, 8u}) {
      const auto r = run_ps_asgd(n, f.setup, virtual_delays(1e-3, 1, 0.3));
      const double mean = r.metrics[0].staleness_mean;
      CHECK(mean >= prev);
      prev = mean;
      CHECK(total(r.metrics[0].minibatch_counts) == f.setup.batches(1).size());
    }
  }

  TEST_CASE("ps-asgd: server shutdown aborts cleanly with partial metrics") {
    Fixture f;
    f.setup.epochs = 3;
    auto opt = virtual_delays();
    const std::size_t per_epoch = f.setup.batches(1).size();
    opt.ps_stop_after_updates = per_epoch + 5;
    const auto r = run_ps_asgd(4, f.setup, opt);
    CHECK(r.aborted);
    CHECK(r.metrics.size() == 1);
    CHECK(r.abort_reason.find("shut down") != std::string::npos);
  }

  TEST_CASE("adpsgd: exchanges conserve the pair sum and pair senders with receivers") {
    Fixture f;
    Recorder rec;
    auto opt = virtual_delays(1e-3, 4, 0.5);
    opt.observer = &rec;
    const Topology topo(4);
    const auto r = run_adpsgd(4, f.setup, opt);
    CHECK(rec.exchanges.size() > 50);
    for (const auto& x : rec.exchanges) {
      CHECK(topo.role(x.sender) == Role::sender);
      CHECK(topo.role(x.receiver) == Role::receiver);
      CHECK(x.receiver == topo.partner(x.sender, x.exchange_index));
      for (std::size_t i = 0; i < x.after.dim(); ++i) {
        CHECK(x.after[i] + x.after[i] == x.sender_before[i] + x.receiver_before[i]);
      }
    }
    for (const auto& m : r.metrics) {
      CHECK(total(m.minibatch_counts) == f.setup.batches(m.epoch).size());
    }
  }

  TEST_CASE("adpsgd: every epoch terminates under randomized delays") {
    Fixture f(ObjectiveKind::logistic, 300, 3);
    f.setup.epochs = 2;
    f.setup.batch_size = 8;
    int runs = 0;
    for (std::size_t n : {2u, 4u, 8u}) {
      for (std::uint64_t seed = 0; seed < 334; ++seed) {
        auto opt = virtual_delays(1e-3, seed * 31 + n, 3.0);
        const auto r = run_adpsgd(n, f.setup, opt);
        CHECK(r.metrics.size() == 2);
        ++runs;
      }
    }
    CHECK(runs >= 1000);
  }

  TEST_CASE("adpsgd with real threads validates every message") {
    Fixture f;
    f.setup.epochs = 1;
    Recorder rec;
    EngineOptions opt;
    opt.delays.clock = rt::ClockMode::real;
    opt.observer = &rec;
    const auto r = run_adpsgd(4, f.setup, opt);
    CHECK(r.metrics.size() == 1);
    for (const auto& x : rec.exchanges) {
      for (std::size_t i = 0; i < x.after.dim(); ++i) {
        CHECK(x.after[i] + x.after[i] == x.sender_before[i] + x.receiver_before[i]);
      }
    }
  }

  TEST_CASE("zero epochs returns the initial model") {
    Fixture f(ObjectiveKind::tiny_mlp);
    f.setup.epochs = 0;
    const auto start = f.setup.start();
    CHECK(run_single(f.setup).weights == start);
    CHECK(run_ssgd(2, f.setup).weights == start);
    CHECK(run_ps_asgd(2, f.setup).weights == start);
    CHECK(run_adpsgd(2, f.setup).weights == start);
    CHECK(run_hybrid(2, f.setup).weights == start);
  }

  TEST_CASE("virtual runs are reproducible") {
    Fixture f;
    auto opt = virtual_delays(1e-3, 8, 0.7);
    for (auto run : {+[](const TrainingSetup& s, const EngineOptions& o) { return run_adpsgd(4, s, o); },
                     +[](const TrainingSetup& s, const EngineOptions& o) { return run_ps_asgd(4, s, o); },
                     +[](const TrainingSetup& s, const EngineOptions& o) { return run_hybrid(4, s, o); }}) {
      const auto a = run(f.setup, opt);
      const auto b = run(f.setup, opt);
      CHECK(a.metrics == b.metrics);
      CHECK(bit_equal(a.weights, b.weights));
      REQUIRE(a.staleness.size() == b.staleness.size());
      for (std::size_t e = 0; e < a.staleness.size(); ++e) {
        CHECK(a.staleness[e].samples == b.staleness[e].samples);
      }
    }
  }
}
