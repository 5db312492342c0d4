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

#include <ostream>
#include <string>
#include <vector>

#include "dsgd/config.hpp"
#include "dsgd/metrics.hpp"
#include "dsgd/protocols.hpp"

namespace dsgd::cli {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kCsvHeader =
    "epoch,strategy,lambda,heldout_loss,epoch_wall_s,staleness_mean,staleness_max,"
    "minibatch_counts,bytes_exchanged";

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string csv_row(const harness::MetricsRecord& r);
void write_csv(std::ostream& os, const std::vector<harness::MetricsRecord>& records);
void write_json(std::ostream& os, const ConfigFile& config, const protocols::RunResult& result);
void write_report(std::ostream& os, const ConfigFile& config, const protocols::RunResult& result);

}  // namespace dsgd::cli
