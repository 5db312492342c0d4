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
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "dsgd/parameter_vector.hpp"

namespace dsgd::protocols {

enum class Strategy { single, ssgd, ps_asgd, adpsgd, hybrid };

std::string_view to_string(Strategy s) noexcept;
// Accepts single, ssgd, ps-asgd, adpsgd, hybrid.
Strategy parse_strategy(std::string_view name);

enum class Role { sender, receiver };

/// Ring of learners with ids 1..n. Odd ids send, even ids receive, so every
/// ring edge joins a sender and a receiver. A sender alternates between its
/// left neighbour (even exchange index) and its right neighbour (odd index).
class Topology {
 public:
  // Throws InvalidArgument when n < 2 or, for the decentralized ring, n is odd.
  explicit Topology(std::size_t learners, bool bipartite = true);

  std::size_t size() const noexcept { return n_; }
  Role role(std::size_t id) const;
  std::size_t left(std::size_t id) const;
  std::size_t right(std::size_t id) const;
  std::size_t partner(std::size_t sender, std::uint64_t exchange_index) const;
  // Distinct neighbours (1 when n == 2).
  std::vector<std::size_t> neighbours(std::size_t id) const;
  std::vector<std::size_t> senders() const;
  std::vector<std::size_t> receivers() const;

 private:
  void check_id(std::size_t id) const;
  std::size_t n_;
};

// FNV-1a over origin, timestamp and the payload bytes.
std::uint64_t weight_checksum(std::size_t origin, std::uint64_t timestamp,
                              const ParameterVector& payload) noexcept;

struct WeightMessage {
  std::size_t origin = 0;
  std::uint64_t timestamp = 0;
  ParameterVector payload;
  std::uint64_t checksum = 0;

  static WeightMessage seal(std::size_t origin, std::uint64_t timestamp, ParameterVector payload);
  bool verify() const noexcept;
  // Throws IntegrityError if verify() fails.
  void require_valid() const;
};

// Pairwise averaging. Both outputs are the same computed vector (a + b) / 2,
// so the two-learner mixing matrix is symmetric and doubly stochastic.
std::pair<ParameterVector, ParameterVector> adpsgd_mix(const ParameterVector& a,
                                                       const ParameterVector& b);

struct StalenessRecord {
  Strategy strategy = Strategy::single;
  std::vector<std::uint32_t> samples;

  double mean() const noexcept;
  std::uint32_t max() const noexcept;
};

}  // namespace dsgd::protocols
