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

#include "dsgd/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <queue>
#include <string>
#include <thread>

namespace dsgd::rt {

std::string_view to_string(ClockMode mode) noexcept {
  return mode == ClockMode::real ? "real" : "virtual";
}

ClockMode parse_clock_mode(std::string_view name) {
  if (name == "real") return ClockMode::real;
  if (name == "virtual") return ClockMode::virtual_time;
  throw InvalidArgument("unknown clock mode '" + std::string(name) +
                        "' (expected real or virtual)");
}

namespace {

// ---------------------------------------------------------------------------
// Real clock
// ---------------------------------------------------------------------------

class RealRuntime;

struct RealMutex final : detail::MutexImpl {
  std::mutex m;
  void lock() override { m.lock(); }
  void unlock() override { m.unlock(); }
};

class RealRuntime final : public Runtime {
 public:
  explicit RealRuntime(double wait_timeout_s)
      : start_(std::chrono::steady_clock::now()), wait_timeout_s_(wait_timeout_s) {}

  ClockMode mode() const noexcept override { return ClockMode::real; }

  double now() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void sleep_for(double seconds) override {
    if (aborted_.load()) throw Aborted{};
    if (seconds > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    if (aborted_.load()) throw Aborted{};
  }

  void run(std::vector<std::function<void()>> actors) override {
    aborted_ = false;
    error_ = nullptr;
    std::vector<std::thread> threads;
    threads.reserve(actors.size());
    for (auto& body : actors) {
      threads.emplace_back([this, body = std::move(body)] {
        try {
          body();
        } catch (const Aborted&) {
        } catch (...) {
          fail(std::current_exception());
        }
      });
    }
    for (auto& t : threads) t.join();
    if (error_) std::rethrow_exception(error_);
  }

  std::unique_ptr<detail::MutexImpl> make_mutex() override { return std::make_unique<RealMutex>(); }
  std::unique_ptr<detail::CondImpl> make_cond() override;

  bool aborted() const noexcept { return aborted_.load(); }
  double wait_timeout() const noexcept { return wait_timeout_s_; }

  void fail(std::exception_ptr e) {
    std::lock_guard lock(error_mu_);
    if (!error_) error_ = std::move(e);
    aborted_ = true;
  }

 private:
  std::chrono::steady_clock::time_point start_;
  double wait_timeout_s_;
  std::atomic<bool> aborted_{false};
  std::mutex error_mu_;
  std::exception_ptr error_;
};

struct RealCond final : detail::CondImpl {
  explicit RealCond(RealRuntime& rt) : rt(rt) {}

  void wait(detail::MutexImpl& m) override {
    auto& rm = static_cast<RealMutex&>(m);
    std::unique_lock<std::mutex> lk(rm.m, std::adopt_lock);
    const std::uint64_t seen = epoch;
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(rt.wait_timeout()));
    // Slice the wait so an abort elsewhere is noticed promptly.
    while (epoch == seen) {
      if (rt.aborted()) {
        lk.release();
        throw Aborted{};
      }
      if (std::chrono::steady_clock::now() > deadline) {
        lk.release();
        throw DeadlockDetected("real-clock wait exceeded the watchdog timeout");
      }
      cv.wait_for(lk, std::chrono::milliseconds(20));
    }
    lk.release();
  }
  // Callers hold the associated mutex, so `epoch` is protected by it.
  void notify_one() override {
    ++epoch;
    cv.notify_all();
  }
  void notify_all() override {
    ++epoch;
    cv.notify_all();
  }

  RealRuntime& rt;
  std::condition_variable cv;
  std::uint64_t epoch = 0;
};

std::unique_ptr<detail::CondImpl> RealRuntime::make_cond() {
  return std::make_unique<RealCond>(*this);
}

// ---------------------------------------------------------------------------
// Virtual clock
// ---------------------------------------------------------------------------

class VirtualRuntime;

thread_local int t_actor = -1;
thread_local const void* t_runtime = nullptr;

struct VirtualMutex final : detail::MutexImpl {
  explicit VirtualMutex(VirtualRuntime& rt) : rt(rt) {}
  void lock() override;
  void unlock() override;
  void lock_locked(std::unique_lock<std::mutex>& lk);
  void unlock_locked();

  VirtualRuntime& rt;
  int owner = -1;
  std::deque<int> waiters;
};

struct VirtualCond final : detail::CondImpl {
  explicit VirtualCond(VirtualRuntime& rt) : rt(rt) {}
  void wait(detail::MutexImpl& m) override;
  void notify_one() override;
  void notify_all() override;

  VirtualRuntime& rt;
  std::deque<int> waiters;
};

class VirtualRuntime final : public Runtime {
 public:
  ClockMode mode() const noexcept override { return ClockMode::virtual_time; }

  double now() const override {
    std::lock_guard lock(big_);
    return now_;
  }

  void sleep_for(double seconds) override {
    std::unique_lock lk(big_);
    const int self = require_actor();
    if (aborted_) throw Aborted{};
    make_ready(self, now_ + std::max(seconds, 0.0));
    block(lk);
  }

  void run(std::vector<std::function<void()>> bodies) override {
    std::unique_lock lk(big_);
    actors_.clear();
    runq_ = {};
    finished_ = 0;
    aborted_ = false;
    error_ = nullptr;
    current_ = -1;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      actors_.push_back(std::make_unique<Actor>());
      make_ready(static_cast<int>(i), now_);
    }
    std::vector<std::thread> threads;
    threads.reserve(bodies.size());
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      threads.emplace_back(
          [this, id = static_cast<int>(i), body = std::move(bodies[i])] { actor_main(id, body); });
    }
    if (!actors_.empty()) dispatch();
    done_cv_.wait(lk, [&] { return finished_ == actors_.size(); });
    lk.unlock();
    for (auto& t : threads) t.join();
    if (error_) std::rethrow_exception(error_);
  }

  std::unique_ptr<detail::MutexImpl> make_mutex() override {
    return std::make_unique<VirtualMutex>(*this);
  }
  std::unique_ptr<detail::CondImpl> make_cond() override {
    return std::make_unique<VirtualCond>(*this);
  }

  // --- scheduler internals, all called with big_ held ---

  int require_actor() const {
    if (t_runtime != this || t_actor < 0) {
      throw std::logic_error("virtual runtime primitive used outside an actor");
    }
    return t_actor;
  }

  void make_ready(int id, double at) { runq_.push(Entry{at, seq_++, id}); }

  // Hand the baton on and park the caller until it is scheduled again.
  void block(std::unique_lock<std::mutex>& lk) {
    const int self = t_actor;
    dispatch();
    actors_[self]->cv.wait(lk, [&] { return current_ == self || aborted_; });
    if (aborted_) throw Aborted{};
  }

  void dispatch() {
    if (runq_.empty()) {
      current_ = -1;
      if (finished_ != actors_.size()) {
        fail(std::make_exception_ptr(DeadlockDetected(
            "virtual scheduler: all " + std::to_string(actors_.size() - finished_) +
            " live actors are blocked")));
      }
      return;
    }
    const Entry e = runq_.top();
    runq_.pop();
    now_ = std::max(now_, e.time);
    current_ = e.id;
    actors_[e.id]->cv.notify_one();
  }

  void fail(std::exception_ptr e) {
    if (!error_) error_ = std::move(e);
    aborted_ = true;
    for (auto& a : actors_) a->cv.notify_all();
    done_cv_.notify_all();
  }

  bool aborted() const noexcept { return aborted_; }
  double virtual_now() const noexcept { return now_; }
  std::mutex& big() const noexcept { return big_; }

 private:
  struct Actor {
    std::condition_variable cv;
  };
  struct Entry {
    double time;
    std::uint64_t seq;
    int id;
    bool operator>(const Entry& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  void actor_main(int id, const std::function<void()>& body) {
    t_actor = id;
    t_runtime = this;
    bool run_body = false;
    {
      std::unique_lock lk(big_);
      actors_[id]->cv.wait(lk, [&] { return current_ == id || aborted_; });
      run_body = !aborted_;
    }
    if (run_body) {
      try {
        body();
      } catch (const Aborted&) {
      } catch (...) {
        std::lock_guard lk(big_);
        fail(std::current_exception());
      }
    }
    std::unique_lock lk(big_);
    ++finished_;
    if (aborted_) {
      if (finished_ == actors_.size()) done_cv_.notify_all();
    } else {
      dispatch();
      if (finished_ == actors_.size()) done_cv_.notify_all();
    }
    t_actor = -1;
    t_runtime = nullptr;
  }

  mutable std::mutex big_;
  std::condition_variable done_cv_;
  std::vector<std::unique_ptr<Actor>> actors_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> runq_;
  double now_ = 0.0;
  std::uint64_t seq_ = 0;
  int current_ = -1;
  std::size_t finished_ = 0;
  bool aborted_ = false;
  std::exception_ptr error_;
};

void VirtualMutex::lock() {
  std::unique_lock lk(rt.big());
  lock_locked(lk);
}

void VirtualMutex::lock_locked(std::unique_lock<std::mutex>& lk) {
  const int self = rt.require_actor();
  if (rt.aborted()) throw Aborted{};
  if (owner < 0) {
    owner = self;
    return;
  }
  waiters.push_back(self);
  rt.block(lk);  // ownership is handed over by unlock()
}

void VirtualMutex::unlock() {
  std::lock_guard lk(rt.big());
  unlock_locked();
}

void VirtualMutex::unlock_locked() {
  if (rt.aborted() || waiters.empty()) {
    owner = -1;
    return;
  }
  owner = waiters.front();
  waiters.pop_front();
  rt.make_ready(owner, rt.virtual_now());
}

void VirtualCond::wait(detail::MutexImpl& m) {
  auto& vm = static_cast<VirtualMutex&>(m);
  std::unique_lock lk(rt.big());
  const int self = rt.require_actor();
  if (rt.aborted()) throw Aborted{};
  waiters.push_back(self);
  vm.unlock_locked();
  rt.block(lk);
  vm.lock_locked(lk);
}

void VirtualCond::notify_one() {
  std::lock_guard lk(rt.big());
  if (waiters.empty() || rt.aborted()) return;
  rt.make_ready(waiters.front(), rt.virtual_now());
  waiters.pop_front();
}

void VirtualCond::notify_all() {
  std::lock_guard lk(rt.big());
  if (rt.aborted()) return;
  for (int id : waiters) rt.make_ready(id, rt.virtual_now());
  waiters.clear();
}

}  // namespace

std::unique_ptr<Runtime> Runtime::create(ClockMode mode, double real_wait_timeout_s) {
  if (mode == ClockMode::real) return std::make_unique<RealRuntime>(real_wait_timeout_s);
  return std::make_unique<VirtualRuntime>();
}

}  // namespace dsgd::rt
