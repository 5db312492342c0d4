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

#include "dsgd/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dsgd/report.hpp"

namespace dsgd::cli {

std::string_view to_string(ReportFormat f) noexcept {
  return f == ReportFormat::json ? "json" : "csv";
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw InvalidArgument("unknown report format '" + std::string(name) + "' (csv or json)");
}

namespace {

using harness::RunConfig;

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    throw ConfigError(source_, line_of(node), msg);
  }

  static std::size_t line_of(const YAML::Node& node) {
    const auto mark = node.Mark();
    return mark.line >= 0 ? static_cast<std::size_t>(mark.line) + 1 : 1;
  }

  // Iterates a mapping, rejecting unknown and duplicate keys; records the line
  // of every key under its dotted path.
  void walk(const YAML::Node& map, const std::string& prefix,
            const std::map<std::string, std::function<void(const YAML::Node&)>>& handlers) {
    if (!map.IsMap()) fail(map, (prefix.empty() ? std::string("config") : prefix) + " must be a mapping");
    std::set<std::string> seen;
    for (const auto& kv : map) {
      const std::string key = scalar(kv.first, "key");
      const std::string path = prefix.empty() ? key : prefix + "." + key;
      if (!seen.insert(key).second) fail(kv.first, "duplicate key '" + path + "'");
      const auto it = handlers.find(key);
      if (it == handlers.end()) {
        std::string known;
        for (const auto& [k, unused] : handlers) known += (known.empty() ? "" : ", ") + k;
        fail(kv.first, "unknown key '" + path + "' (expected one of: " + known + ")");
      }
      lines_[path] = line_of(kv.first);
      it->second(kv.second);
    }
  }

  std::string scalar(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a scalar");
    return node.Scalar();
  }

  double real(const YAML::Node& node, const std::string& what) const {
    const std::string s = scalar(node, what);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
      fail(node, what + " must be a finite number, got '" + s + "'");
    }
    return v;
  }

  template <class Int>
  Int integer(const YAML::Node& node, const std::string& what) const {
    const std::string s = scalar(node, what);
    Int v{};
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      fail(node, what + " must be " +
                     (std::is_signed_v<Int> ? "an integer" : "a non-negative integer") +
                     ", got '" + s + "'");
    }
    return v;
  }

  template <class Enum, class ParseFn>
  Enum enumeration(const YAML::Node& node, const std::string& what, ParseFn parse) const {
    const std::string s = scalar(node, what);
    try {
      return parse(s);
    } catch (const InvalidArgument& e) {
      fail(node, what + ": " + e.what());
    }
  }

  std::size_t line_for_field(const std::string& field) const {
    for (std::string f = field;;) {
      if (auto it = lines_.find(f); it != lines_.end()) return it->second;
      const auto dot = f.rfind('.');
      if (dot == std::string::npos) return 1;
      f.resize(dot);
    }
  }

  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::size_t> lines_;
};

ScheduleSpec schedule_preset(const std::string& name) {
  if (name == "baseline") return baseline_schedule();
  if (name == "large_batch") return large_batch_schedule();
  throw InvalidArgument("unknown schedule preset '" + name + "' (baseline or large_batch)");
}

}  // namespace

ConfigFile parse_config(std::string_view text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(source, e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 1,
                      "YAML syntax error: " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(source, 1, "config is empty");

  Parser p(source);
  ConfigFile cfg;
  RunConfig& rc = cfg.run;
  bool have_strategy = false;

  p.walk(root, "", {
      {"strategy", [&](const YAML::Node& n) {
         rc.strategy = p.enumeration<protocols::Strategy>(n, "strategy", protocols::parse_strategy);
         have_strategy = true;
       }},
      {"learners", [&](const YAML::Node& n) { rc.learners = p.integer<std::size_t>(n, "learners"); }},
      {"epochs", [&](const YAML::Node& n) { rc.epochs = p.integer<int>(n, "epochs"); }},
      {"batch_size", [&](const YAML::Node& n) { rc.batch_size = p.integer<std::size_t>(n, "batch_size"); }},
      {"seed", [&](const YAML::Node& n) { rc.seed = p.integer<std::uint64_t>(n, "seed"); }},
      {"momentum", [&](const YAML::Node& n) { rc.momentum = p.real(n, "momentum"); }},
      {"chunk_count", [&](const YAML::Node& n) { rc.chunk_count = p.integer<std::size_t>(n, "chunk_count"); }},
      {"objective", [&](const YAML::Node& n) {
         p.walk(n, "objective", {
             {"kind", [&](const YAML::Node& v) {
                rc.objective.kind = p.enumeration<ObjectiveKind>(v, "objective.kind", parse_objective_kind);
              }},
             {"input_dim", [&](const YAML::Node& v) {
                rc.objective.input_dim = p.integer<std::size_t>(v, "objective.input_dim");
              }},
             {"hidden", [&](const YAML::Node& v) {
                rc.objective.hidden = p.integer<std::size_t>(v, "objective.hidden");
              }},
             {"regularization", [&](const YAML::Node& v) {
                rc.objective.regularization = p.real(v, "objective.regularization");
              }},
         });
       }},
      {"dataset", [&](const YAML::Node& n) {
         p.walk(n, "dataset", {
             {"samples", [&](const YAML::Node& v) {
                rc.dataset.samples = p.integer<std::size_t>(v, "dataset.samples");
              }},
             {"seed", [&](const YAML::Node& v) {
                rc.dataset.seed = p.integer<std::uint64_t>(v, "dataset.seed");
              }},
         });
       }},
      {"schedule", [&](const YAML::Node& n) {
         if (n.IsScalar()) {
           rc.schedule = p.enumeration<ScheduleSpec>(n, "schedule", schedule_preset);
           return;
         }
         p.walk(n, "schedule", {
             {"preset", [](const YAML::Node&) {}},  // resolved after the walk
             {"base_lr", [&](const YAML::Node& v) { rc.schedule.base_lr = p.real(v, "schedule.base_lr"); }},
             {"peak_lr", [&](const YAML::Node& v) { rc.schedule.peak_lr = p.real(v, "schedule.peak_lr"); }},
             {"warmup_epochs", [&](const YAML::Node& v) {
                rc.schedule.warmup_epochs = p.integer<int>(v, "schedule.warmup_epochs");
              }},
             {"anneal_factor", [&](const YAML::Node& v) {
                rc.schedule.anneal_factor = p.real(v, "schedule.anneal_factor");
              }},
             {"anneal_start_epoch", [&](const YAML::Node& v) {
                rc.schedule.anneal_start_epoch = p.integer<int>(v, "schedule.anneal_start_epoch");
              }},
             {"total_epochs", [&](const YAML::Node& v) {
                rc.schedule.total_epochs = p.integer<int>(v, "schedule.total_epochs");
              }},
         });
       }},
      {"delays", [&](const YAML::Node& n) {
         auto& d = rc.delays;
         p.walk(n, "delays", {
             {"clock", [&](const YAML::Node& v) {
                d.clock = p.enumeration<rt::ClockMode>(v, "delays.clock", rt::parse_clock_mode);
              }},
             {"base_compute_ms", [&](const YAML::Node& v) { d.base_compute_ms = p.real(v, "delays.base_compute_ms"); }},
             {"compute_jitter", [&](const YAML::Node& v) { d.compute_jitter = p.real(v, "delays.compute_jitter"); }},
             {"message_latency_ms", [&](const YAML::Node& v) {
                d.message_latency_ms = p.real(v, "delays.message_latency_ms");
              }},
             {"message_jitter_ms", [&](const YAML::Node& v) {
                d.message_jitter_ms = p.real(v, "delays.message_jitter_ms");
              }},
             {"bandwidth_bytes_per_s", [&](const YAML::Node& v) {
                d.bandwidth_bytes_per_s = p.real(v, "delays.bandwidth_bytes_per_s");
              }},
             {"seed", [&](const YAML::Node& v) { d.seed = p.integer<std::uint64_t>(v, "delays.seed"); }},
             {"stragglers", [&](const YAML::Node& v) {
                if (v.IsNull()) return;
                if (!v.IsMap()) p.fail(v, "delays.stragglers must map learner id to slowdown factor");
                for (const auto& kv : v) {
                  const auto id = p.integer<std::size_t>(kv.first, "straggler learner id");
                  if (d.stragglers.contains(id)) {
                    p.fail(kv.first, "learner " + std::to_string(id) + " listed twice in delays.stragglers");
                  }
                  d.stragglers[id] = p.real(kv.second, "slowdown factor");
                }
              }},
         });
       }},
      {"output", [&](const YAML::Node& n) {
         p.walk(n, "output", {
             {"path", [&](const YAML::Node& v) { cfg.output_path = p.scalar(v, "output.path"); }},
             {"format", [&](const YAML::Node& v) {
                cfg.format = p.enumeration<ReportFormat>(v, "output.format", parse_report_format);
              }},
         });
       }},
  });

  // A schedule preset is a base that explicit keys refine.
  if (root["schedule"] && root["schedule"].IsMap() && root["schedule"]["preset"]) {
    const YAML::Node node = root["schedule"];
    ScheduleSpec s = p.enumeration<ScheduleSpec>(node["preset"], "schedule.preset", schedule_preset);
    if (node["base_lr"]) s.base_lr = rc.schedule.base_lr;
    if (node["peak_lr"]) s.peak_lr = rc.schedule.peak_lr;
    if (node["warmup_epochs"]) s.warmup_epochs = rc.schedule.warmup_epochs;
    if (node["anneal_factor"]) s.anneal_factor = rc.schedule.anneal_factor;
    if (node["anneal_start_epoch"]) s.anneal_start_epoch = rc.schedule.anneal_start_epoch;
    if (node["total_epochs"]) s.total_epochs = rc.schedule.total_epochs;
    rc.schedule = s;
  }

  if (!have_strategy) throw ConfigError(source, 1, "missing required key 'strategy'");

  try {
    rc.validate();
  } catch (const harness::ConfigFieldError& e) {
    throw ConfigError(source, p.line_for_field(e.field()), e.field() + ": " + e.message());
  }
  return cfg;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 1, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string serialize_config(const ConfigFile& config) {
  const RunConfig& rc = config.run;
  auto num = [](double v) { return format_double(v); };

  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "strategy" << YAML::Value << std::string(to_string(rc.strategy));
  out << YAML::Key << "learners" << YAML::Value << rc.learners;
  out << YAML::Key << "epochs" << YAML::Value << rc.epochs;
  out << YAML::Key << "batch_size" << YAML::Value << rc.batch_size;
  out << YAML::Key << "seed" << YAML::Value << rc.seed;
  out << YAML::Key << "momentum" << YAML::Value << num(rc.momentum);
  out << YAML::Key << "chunk_count" << YAML::Value << rc.chunk_count;

  out << YAML::Key << "objective" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(rc.objective.kind));
  out << YAML::Key << "input_dim" << YAML::Value << rc.objective.input_dim;
  out << YAML::Key << "hidden" << YAML::Value << rc.objective.hidden;
  if (rc.objective.regularization) {
    out << YAML::Key << "regularization" << YAML::Value << num(*rc.objective.regularization);
  }
  out << YAML::EndMap;

  out << YAML::Key << "dataset" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "samples" << YAML::Value << rc.dataset.samples;
  if (rc.dataset.seed) out << YAML::Key << "seed" << YAML::Value << *rc.dataset.seed;
  out << YAML::EndMap;

  const ScheduleSpec& s = rc.schedule;
  out << YAML::Key << "schedule" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "base_lr" << YAML::Value << num(s.base_lr);
  out << YAML::Key << "peak_lr" << YAML::Value << num(s.peak_lr);
  out << YAML::Key << "warmup_epochs" << YAML::Value << s.warmup_epochs;
  out << YAML::Key << "anneal_factor" << YAML::Value << num(s.anneal_factor);
  out << YAML::Key << "anneal_start_epoch" << YAML::Value << s.anneal_start_epoch;
  out << YAML::Key << "total_epochs" << YAML::Value << s.total_epochs;
  out << YAML::EndMap;

  const harness::DelaySpec& d = rc.delays;
  out << YAML::Key << "delays" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "clock" << YAML::Value << std::string(rt::to_string(d.clock));
  out << YAML::Key << "base_compute_ms" << YAML::Value << num(d.base_compute_ms);
  out << YAML::Key << "compute_jitter" << YAML::Value << num(d.compute_jitter);
  out << YAML::Key << "message_latency_ms" << YAML::Value << num(d.message_latency_ms);
  out << YAML::Key << "message_jitter_ms" << YAML::Value << num(d.message_jitter_ms);
  out << YAML::Key << "bandwidth_bytes_per_s" << YAML::Value << num(d.bandwidth_bytes_per_s);
  out << YAML::Key << "seed" << YAML::Value << d.seed;
  out << YAML::Key << "stragglers" << YAML::Value << YAML::BeginMap;
  for (const auto& [id, factor] : d.stragglers) out << YAML::Key << id << YAML::Value << num(factor);
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  if (config.output_path) out << YAML::Key << "path" << YAML::Value << *config.output_path;
  out << YAML::Key << "format" << YAML::Value << std::string(to_string(config.format));
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace dsgd::cli
