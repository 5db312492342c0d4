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
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "dsgd/error.hpp"

namespace dsgd::rt {

/// real: actors are free-running threads, sleep_for() really sleeps and
///       now() is the steady clock.
/// virtual_time: actors are threads, but exactly one runs at a time. A
///       scheduler hands the baton to the runnable actor with the smallest
///       (wake time, enqueue sequence) pair, so a run is a deterministic
///       function of its inputs and sleep_for() only advances a virtual clock.
enum class ClockMode { real, virtual_time };

std::string_view to_string(ClockMode mode) noexcept;
ClockMode parse_clock_mode(std::string_view name);

// Thrown inside actors when the run is being torn down after another actor
// failed. Actors must let it propagate.
struct Aborted {};

// Virtual scheduler found every live actor blocked, or a real-mode wait
// exceeded the watchdog timeout.
class DeadlockDetected : public CommunicationError {
 public:
  using CommunicationError::CommunicationError;
};

namespace detail {
struct MutexImpl {
  virtual ~MutexImpl() = default;
  virtual void lock() = 0;
  virtual void unlock() = 0;
};
struct CondImpl {
  virtual ~CondImpl() = default;
  virtual void wait(MutexImpl& m) = 0;
  virtual void notify_one() = 0;
  virtual void notify_all() = 0;
};
}  // namespace detail

class Runtime {
 public:
  virtual ~Runtime() = default;

  // real_wait_timeout_s bounds any single blocking wait in real mode.
  static std::unique_ptr<Runtime> create(ClockMode mode, double real_wait_timeout_s = 300.0);

  virtual ClockMode mode() const noexcept = 0;
  // Seconds since the runtime was created (virtual seconds in virtual mode).
  virtual double now() const = 0;
  // Occupy the calling actor for `seconds`. Must be called from an actor.
  virtual void sleep_for(double seconds) = 0;
  // Runs every actor to completion and rethrows the first failure. May be
  // called more than once, never concurrently.
  virtual void run(std::vector<std::function<void()>> actors) = 0;

  virtual std::unique_ptr<detail::MutexImpl> make_mutex() = 0;
  virtual std::unique_ptr<detail::CondImpl> make_cond() = 0;
};

// BasicLockable mutex whose blocking is mediated by the runtime.
class Mutex {
 public:
  explicit Mutex(Runtime& rt) : impl_(rt.make_mutex()) {}
  void lock() { impl_->lock(); }
  void unlock() { impl_->unlock(); }

 private:
  friend class CondVar;
  std::unique_ptr<detail::MutexImpl> impl_;
};

class CondVar {
 public:
  explicit CondVar(Runtime& rt) : impl_(rt.make_cond()) {}

  void wait(std::unique_lock<Mutex>& lock) { impl_->wait(*lock.mutex()->impl_); }
  template <class Pred>
  void wait(std::unique_lock<Mutex>& lock, Pred pred) {
    while (!pred()) wait(lock);
  }
  void notify_one() { impl_->notify_one(); }
  void notify_all() { impl_->notify_all(); }

 private:
  std::unique_ptr<detail::CondImpl> impl_;
};

class ChannelClosed : public CommunicationError {
 public:
  ChannelClosed() : CommunicationError("send on a closed channel") {}
};

/// Unbounded FIFO channel. Messages from one sender arrive in send order.
template <class T>
class Channel {
 public:
  explicit Channel(Runtime& rt) : mu_(rt), cv_(rt) {}

  void send(T value) {
    std::unique_lock lock(mu_);
    if (closed_) throw ChannelClosed();
    queue_.push_back(std::move(value));
    cv_.notify_all();
  }

  // Blocks until a message arrives; nullopt once closed and drained.
  std::optional<T> receive() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return std::nullopt;
    T value = std::move(queue_.front());
    queue_.pop_front();
    return value;
  }

  void close() {
    std::unique_lock lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }

 private:
  Mutex mu_;
  CondVar cv_;
  std::deque<T> queue_;
  bool closed_ = false;
};

/// Reusable barrier. The last arriver runs `completion` before anyone is
/// released.
class Barrier {
 public:
  Barrier(Runtime& rt, std::size_t count, std::function<void()> completion = {})
      : mu_(rt), cv_(rt), count_(count), completion_(std::move(completion)) {}

  void arrive_and_wait() {
    std::unique_lock lock(mu_);
    const std::size_t gen = generation_;
    if (++arrived_ == count_) {
      if (completion_) completion_();
      arrived_ = 0;
      ++generation_;
      cv_.notify_all();
      return;
    }
    cv_.wait(lock, [&] { return generation_ != gen; });
  }

 private:
  Mutex mu_;
  CondVar cv_;
  std::size_t count_;
  std::size_t arrived_ = 0;
  std::size_t generation_ = 0;
  std::function<void()> completion_;
};

}  // namespace dsgd::rt
