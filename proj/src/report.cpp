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

#include "dsgd/report.hpp"

#include <array>
#include <charconv>

#include "json.hpp"

namespace dsgd::cli {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return {buf.data(), end};
}

std::string csv_row(const harness::MetricsRecord& r) {
  std::string counts;
  for (std::size_t i = 0; i < r.minibatch_counts.size(); ++i) {
    if (i) counts += '|';
    counts += std::to_string(r.minibatch_counts[i]);
  }
  return std::to_string(r.epoch) + ',' + std::string(protocols::to_string(r.strategy)) + ',' +
         std::to_string(r.learners) + ',' + format_double(r.heldout_loss) + ',' +
         format_double(r.epoch_wall_s) + ',' + format_double(r.staleness_mean) + ',' +
         std::to_string(r.staleness_max) + ',' + counts + ',' + std::to_string(r.bytes_exchanged);
}

void write_csv(std::ostream& os, const std::vector<harness::MetricsRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) os << csv_row(r) << '\n';
}

void write_json(std::ostream& os, const ConfigFile& config, const protocols::RunResult& result) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["strategy"] = std::string(protocols::to_string(config.run.strategy));
  doc["lambda"] = config.run.learners;
  doc["seed"] = config.run.seed;
  doc["aborted"] = result.aborted;
  if (result.aborted) doc["abort_reason"] = result.abort_reason;
  auto& rows = doc["epochs"] = nlohmann::ordered_json::array();
  for (const auto& r : result.metrics) {
    rows.push_back({{"epoch", r.epoch},
                    {"strategy", std::string(protocols::to_string(r.strategy))},
                    {"lambda", r.learners},
                    {"heldout_loss", r.heldout_loss},
                    {"epoch_wall_s", r.epoch_wall_s},
                    {"staleness_mean", r.staleness_mean},
                    {"staleness_max", r.staleness_max},
                    {"minibatch_counts", r.minibatch_counts},
                    {"bytes_exchanged", r.bytes_exchanged}});
  }
  os << doc.dump(2) << '\n';
}

void write_report(std::ostream& os, const ConfigFile& config, const protocols::RunResult& result) {
  if (config.format == ReportFormat::json) {
    write_json(os, config, result);
  } else {
    write_csv(os, result.metrics);
  }
}

}  // namespace dsgd::cli
