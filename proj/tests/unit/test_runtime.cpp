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

#include <atomic>
#include <thread>

#include "doctest.h"
#include "dsgd/runtime.hpp"

using namespace dsgd;

TEST_SUITE("runtime") {
  TEST_CASE("clock mode names") {
    CHECK(rt::parse_clock_mode("virtual") == rt::ClockMode::virtual_time);
    CHECK(rt::to_string(rt::ClockMode::real) == "real");
    CHECK_THROWS(rt::parse_clock_mode("fast"));
  }

  TEST_CASE("virtual time advances only through sleeps") {
    auto r = rt::Runtime::create(rt::ClockMode::virtual_time);
    double a_end = 0, b_end = 0;
    r->run({[&] { r->sleep_for(2.0); r->sleep_for(1.0); a_end = r->now(); },
            [&] { r->sleep_for(5.0); b_end = r->now(); }});
    CHECK(a_end == 3.0);
    CHECK(b_end == 5.0);
  }

  TEST_CASE("channels deliver in order and close") {
    for (auto mode : {rt::ClockMode::virtual_time, rt::ClockMode::real}) {
      auto r = rt::Runtime::create(mode, 10.0);
      rt::Channel<int> ch(*r);
      std::vector<int> got;
      r->run({[&] {
                for (int i = 0; i < 100; ++i) ch.send(i);
                ch.close();
              },
              [&] {
                while (auto v = ch.receive()) got.push_back(*v);
                CHECK_THROWS_AS(ch.send(1), rt::ChannelClosed);
              }});
      REQUIRE(got.size() == 100);
      for (int i = 0; i < 100; ++i) CHECK(got[i] == i);
    }
  }

  TEST_CASE("barrier runs its completion once per generation") {
    for (auto mode : {rt::ClockMode::virtual_time, rt::ClockMode::real}) {
      auto r = rt::Runtime::create(mode, 10.0);
      int completions = 0;
      std::atomic<int> after{0};
      rt::Barrier barrier(*r, 4, [&] { ++completions; });
      std::vector<std::function<void()>> actors;
      for (int i = 0; i < 4; ++i) {
        actors.emplace_back([&, i] {
          for (int g = 0; g < 5; ++g) {
            r->sleep_for(0.001 * i);
            barrier.arrive_and_wait();
            ++after;
          }
        });
      }
      r->run(std::move(actors));
      CHECK(completions == 5);
      CHECK(after == 20);
    }
  }

  TEST_CASE("virtual deadlock is detected") {
    auto r = rt::Runtime::create(rt::ClockMode::virtual_time);
    rt::Channel<int> ch(*r);
    CHECK_THROWS_AS(r->run({[&] { (void)ch.receive(); }}), rt::DeadlockDetected);
  }

  TEST_CASE("a failing actor aborts the others") {
    for (auto mode : {rt::ClockMode::virtual_time, rt::ClockMode::real}) {
      auto r = rt::Runtime::create(mode, 10.0);
      rt::Channel<int> ch(*r);
      CHECK_THROWS_WITH(r->run({[&] { (void)ch.receive(); },
                                [&] {
                                  r->sleep_for(0.01);
                                  throw std::runtime_error("boom");
                                }}),
                        "boom");
    }
  }

  TEST_CASE("real-mode waits time out instead of hanging") {
    auto r = rt::Runtime::create(rt::ClockMode::real, 0.2);
    rt::Channel<int> ch(*r);
    CHECK_THROWS(r->run({[&] { (void)ch.receive(); }}));
  }

  TEST_CASE("virtual runs are deterministic") {
    auto trace = [] {
      auto r = rt::Runtime::create(rt::ClockMode::virtual_time);
      rt::Mutex mu(*r);
      std::vector<int> order;
      std::vector<std::function<void()>> actors;
      for (int i = 0; i < 6; ++i) {
        actors.emplace_back([&, i] {
          for (int k = 0; k < 20; ++k) {
            r->sleep_for(0.001 * ((i * 7 + k * 3) % 5));
            std::unique_lock lock(mu);
            order.push_back(i);
          }
        });
      }
      r->run(std::move(actors));
      return order;
    };
    CHECK(trace() == trace());
  }
}
