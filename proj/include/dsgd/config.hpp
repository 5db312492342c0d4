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

// YAML experiment config files.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "dsgd/error.hpp"
#include "dsgd/experiment.hpp"

namespace dsgd::cli {

enum class ReportFormat { csv, json };

std::string_view to_string(ReportFormat f) noexcept;
ReportFormat parse_report_format(std::string_view name);

struct ConfigFile {
  harness::RunConfig run;
  std::optional<std::string> output_path;  // stdout when unset
  ReportFormat format = ReportFormat::csv;

  friend bool operator==(const ConfigFile&, const ConfigFile&) = default;
};

// Invalid config. what() reads "<source>:<line>: <message>".
class ConfigError : public Error {
 public:
  ConfigError(std::string source, std::size_t line, const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message),
        source_(std::move(source)),
        line_(line),
        message_(message) {}
  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }  // 1-based
  const std::string& message() const noexcept { return message_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string message_;
};

// Parses and validates. Unknown keys, malformed values and semantic
// constraint violations all raise ConfigError at the offending line.
ConfigFile parse_config(std::string_view text, const std::string& source = "<config>");
ConfigFile load_config(const std::string& path);

// Emits every field, so parse_config(serialize_config(c)) == c.
std::string serialize_config(const ConfigFile& config);

}  // namespace dsgd::cli
