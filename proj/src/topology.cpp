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

#include "dsgd/topology.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <string>

#include "dsgd/error.hpp"

namespace dsgd::protocols {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::single:
      return "single";
    case Strategy::ssgd:
      return "ssgd";
    case Strategy::ps_asgd:
      return "ps-asgd";
    case Strategy::adpsgd:
      return "adpsgd";
    case Strategy::hybrid:
      return "hybrid";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "single") return Strategy::single;
  if (name == "ssgd") return Strategy::ssgd;
  if (name == "ps-asgd") return Strategy::ps_asgd;
  if (name == "adpsgd") return Strategy::adpsgd;
  if (name == "hybrid") return Strategy::hybrid;
  throw InvalidArgument("unknown strategy '" + std::string(name) +
                        "' (expected single, ssgd, ps-asgd, adpsgd or hybrid)");
}

Topology::Topology(std::size_t learners, bool bipartite) : n_(learners) {
  if (n_ < 2) throw InvalidArgument("topology needs at least 2 learners");
  if (bipartite && n_ % 2 != 0) {
    throw InvalidArgument("adpsgd requires an even number of learners (got lambda = " +
                          std::to_string(n_) + ")");
  }
}

void Topology::check_id(std::size_t id) const {
  if (id < 1 || id > n_) throw InvalidArgument("learner id " + std::to_string(id) + " out of range");
}

Role Topology::role(std::size_t id) const {
  check_id(id);
  return id % 2 == 1 ? Role::sender : Role::receiver;
}

std::size_t Topology::left(std::size_t id) const {
  check_id(id);
  return id == 1 ? n_ : id - 1;
}

std::size_t Topology::right(std::size_t id) const {
  check_id(id);
  return id == n_ ? 1 : id + 1;
}

std::size_t Topology::partner(std::size_t sender, std::uint64_t exchange_index) const {
  if (role(sender) != Role::sender) {
    throw InvalidArgument("learner " + std::to_string(sender) + " is not a sender");
  }
  return exchange_index % 2 == 0 ? left(sender) : right(sender);
}

std::vector<std::size_t> Topology::neighbours(std::size_t id) const {
  const std::size_t l = left(id), r = right(id);
  if (l == r) return {l};
  return {l, r};
}

std::vector<std::size_t> Topology::senders() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= n_; i += 2) out.push_back(i);
  return out;
}

std::vector<std::size_t> Topology::receivers() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 2; i <= n_; i += 2) out.push_back(i);
  return out;
}

std::uint64_t weight_checksum(std::size_t origin, std::uint64_t timestamp,
                              const ParameterVector& payload) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t o = origin;
  mix(&o, sizeof o);
  mix(&timestamp, sizeof timestamp);
  mix(payload.data(), payload.byte_size());
  return h;
}

WeightMessage WeightMessage::seal(std::size_t origin, std::uint64_t timestamp,
                                  ParameterVector payload) {
  WeightMessage m{origin, timestamp, std::move(payload), 0};
  m.checksum = weight_checksum(m.origin, m.timestamp, m.payload);
  return m;
}

bool WeightMessage::verify() const noexcept {
  return checksum == weight_checksum(origin, timestamp, payload);
}

void WeightMessage::require_valid() const {
  if (!verify()) {
    throw IntegrityError("weight message from learner " + std::to_string(origin) +
                         " failed checksum validation");
  }
}

std::pair<ParameterVector, ParameterVector> adpsgd_mix(const ParameterVector& a,
                                                       const ParameterVector& b) {
  require_same_dim(a, b, "adpsgd_mix");
  ParameterVector mid(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) mid[i] = (a[i] + b[i]) / 2.0;
  return {mid, mid};
}

double StalenessRecord::mean() const noexcept {
  if (samples.empty()) return 0.0;
  const double total = std::accumulate(samples.begin(), samples.end(), 0.0);
  return total / static_cast<double>(samples.size());
}

std::uint32_t StalenessRecord::max() const noexcept {
  return samples.empty() ? 0 : *std::max_element(samples.begin(), samples.end());
}

}  // namespace dsgd::protocols
