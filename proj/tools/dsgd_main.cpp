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

// dsgd command-line driver.
//
//   dsgd run <config> [-o PATH] [--format csv|json]
//   dsgd validate <config> [--print]
//   dsgd predict bandwidth --model-bytes M --compute-s T
//   dsgd predict straggler --ssgd-t1 A --ssgd-t2 B --adpsgd-t1 C --learners N [--factors ...]
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.
// DSGD_VERBOSITY = quiet | normal (default) | verbose controls what is echoed
// to stderr; the report itself never changes.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dsgd/config.hpp"
#include "dsgd/costmodel.hpp"
#include "dsgd/experiment.hpp"
#include "dsgd/report.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kConfigError = 2;

enum class Verbosity { quiet, normal, verbose };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Verbosity verbosity_from_env() {
  const char* v = std::getenv("DSGD_VERBOSITY");
  if (!v || !*v) return Verbosity::normal;
  const std::string s(v);
  if (s == "quiet" || s == "0") return Verbosity::quiet;
  if (s == "normal" || s == "1") return Verbosity::normal;
  if (s == "verbose" || s == "2") return Verbosity::verbose;
  throw UsageError("DSGD_VERBOSITY must be quiet, normal or verbose (got '" + s + "')");
}

int cmd_run(const std::string& path, const std::optional<std::string>& out_override,
            const std::optional<std::string>& format_override) {
  const Verbosity verbosity = verbosity_from_env();
  dsgd::cli::ConfigFile cfg = dsgd::cli::load_config(path);
  if (out_override) cfg.output_path = *out_override;
  if (format_override) {
    try {
      cfg.format = dsgd::cli::parse_report_format(*format_override);
    } catch (const dsgd::InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }

  std::ofstream file;
  if (cfg.output_path) {
    file.open(*cfg.output_path);
    if (!file) {
      std::cerr << "dsgd: cannot open " << *cfg.output_path << " for writing\n";
      return kRuntimeFailure;
    }
  }
  std::ostream& os = cfg.output_path ? static_cast<std::ostream&>(file) : std::cout;

  const auto result = dsgd::harness::run_experiment(cfg.run);
  dsgd::cli::write_report(os, cfg, result);
  os.flush();
  if (!os) {
    std::cerr << "dsgd: failed writing the report\n";
    return kRuntimeFailure;
  }

  if (verbosity == Verbosity::verbose) {
    for (const auto& r : result.metrics) std::cerr << dsgd::cli::csv_row(r) << '\n';
  }
  if (result.aborted) {
    std::cerr << "dsgd: run aborted: " << result.abort_reason << '\n';
    return kRuntimeFailure;
  }
  if (verbosity != Verbosity::quiet) {
    std::cerr << "dsgd: " << dsgd::protocols::to_string(cfg.run.strategy)
              << " lambda=" << cfg.run.learners << " epochs=" << result.metrics.size();
    if (!result.metrics.empty()) {
      std::cerr << " final_heldout_loss=" << dsgd::cli::format_double(result.metrics.back().heldout_loss);
    }
    if (cfg.output_path) std::cerr << " report=" << *cfg.output_path;
    std::cerr << '\n';
  }
  return kOk;
}

int cmd_validate(const std::string& path, bool print) {
  const auto cfg = dsgd::cli::load_config(path);
  if (print) {
    std::cout << dsgd::cli::serialize_config(cfg);
  } else {
    std::cout << path << ": ok\n";
  }
  return kOk;
}

void require_positive(double v, const char* flag) {
  if (!(v > 0.0)) throw UsageError(std::string(flag) + " must be positive");
}

int cmd_predict_bandwidth(double model_bytes, double compute_s) {
  require_positive(model_bytes, "--model-bytes");
  require_positive(compute_s, "--compute-s");
  std::cout << "model_bytes,compute_time_s,breakeven_bytes_per_s\n"
            << dsgd::cli::format_double(model_bytes) << ',' << dsgd::cli::format_double(compute_s)
            << ','
            << dsgd::cli::format_double(dsgd::costmodel::min_breakeven_bandwidth(model_bytes, compute_s))
            << '\n';
  return kOk;
}

struct StragglerArgs {
  double ssgd_t1 = 0.0, ssgd_t2 = 0.0, adpsgd_t1 = 0.0;
  std::size_t learners = 0;
  std::vector<double> factors{1, 2, 10, 100};
  std::optional<double> serial;
  double hybrid_overhead = 0.0;
};

int cmd_predict_straggler(const StragglerArgs& a) {
  namespace cm = dsgd::costmodel;
  require_positive(a.ssgd_t1, "--ssgd-t1");
  require_positive(a.ssgd_t2, "--ssgd-t2");
  require_positive(a.adpsgd_t1, "--adpsgd-t1");
  if (a.learners < 2) throw UsageError("--learners must be >= 2");
  if (a.serial) require_positive(*a.serial, "--serial");
  if (a.hybrid_overhead < 0.0) throw UsageError("--hybrid-overhead must be >= 0");
  for (double s : a.factors) {
    if (!(s >= 1.0)) throw UsageError("--factors entries must be >= 1");
  }
  cm::SsgdFit fit;
  try {
    fit = cm::fit_ssgd(a.ssgd_t1, a.ssgd_t2);
  } catch (const dsgd::InvalidArgument& e) {
    throw UsageError(e.what());
  }
  using dsgd::cli::format_double;
  std::cout << "# ssgd fit c=" << format_double(fit.compute)
            << " k=" << format_double(fit.communication) << '\n';
  std::cout << "slowdown,ssgd_epoch_time,hybrid_epoch_time,adpsgd_epoch_time";
  if (a.serial) std::cout << ",ssgd_speedup,adpsgd_speedup";
  std::cout << '\n';
  for (double s : a.factors) {
    const auto slow = cm::one_straggler(a.learners, s);
    const double ssgd = cm::ssgd_epoch_time(fit, slow);
    const double hybrid = cm::hybrid_epoch_time(fit.compute, fit.communication, slow, a.hybrid_overhead);
    const double adpsgd = cm::adpsgd_epoch_time(a.adpsgd_t1, a.learners, slow);
    std::cout << format_double(s) << ',' << format_double(ssgd) << ',' << format_double(hybrid)
              << ',' << format_double(adpsgd);
    if (a.serial) {
      std::cout << ',' << format_double(cm::predict_speedup(*a.serial, ssgd)) << ','
                << format_double(cm::predict_speedup(*a.serial, adpsgd));
    }
    std::cout << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-parallel SGD simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_path, format;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "YAML config")->required();
  run->add_option("-o,--output", out_path, "Report path (overrides output.path)");
  run->add_option("--format", format, "csv or json (overrides output.format)");

  bool print = false;
  auto* validate = app.add_subcommand("validate", "Parse and check a config without running it");
  validate->add_option("config", config_path, "YAML config")->required();
  validate->add_flag("--print", print, "Print the normalized config");

  auto* predict = app.add_subcommand("predict", "Closed-form runtime predictions");
  predict->require_subcommand(1);
  double model_bytes = 0.0, compute_s = 0.0;
  auto* bandwidth = predict->add_subcommand("bandwidth", "Bandwidth at which allreduce and compute break even");
  bandwidth->add_option("--model-bytes", model_bytes, "Model size in bytes")->required();
  bandwidth->add_option("--compute-s", compute_s, "Per-minibatch compute time in seconds")->required();

  StragglerArgs sa;
  double serial = 0.0;
  auto* straggler = predict->add_subcommand("straggler", "Epoch time with learner 1 slowed down");
  straggler->add_option("--ssgd-t1", sa.ssgd_t1, "SSGD epoch time without stragglers")->required();
  straggler->add_option("--ssgd-t2", sa.ssgd_t2, "SSGD epoch time with one 2x straggler")->required();
  straggler->add_option("--adpsgd-t1", sa.adpsgd_t1, "ADPSGD epoch time without stragglers")->required();
  straggler->add_option("--learners", sa.learners, "Number of learners")->required();
  straggler->add_option("--factors", sa.factors, "Slowdown factors")->delimiter(',');
  auto* serial_opt = straggler->add_option("--serial", serial, "Single-learner epoch time for speedups");
  straggler->add_option("--hybrid-overhead", sa.hybrid_overhead, "Additive hybrid overhead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  if (serial_opt->count() > 0) sa.serial = serial;

  try {
    if (*run) return cmd_run(config_path, out_path, format);
    if (*validate) return cmd_validate(config_path, print);
    if (*bandwidth) return cmd_predict_bandwidth(model_bytes, compute_s);
    if (*straggler) return cmd_predict_straggler(sa);
  } catch (const dsgd::cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const UsageError& e) {
    std::cerr << "dsgd: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "dsgd: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kConfigError;
}
