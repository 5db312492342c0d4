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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "dsgd/collective.hpp"
#include "dsgd/config.hpp"
#include "dsgd/costmodel.hpp"
#include "dsgd/experiment.hpp"
#include "dsgd/report.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(const dsgd::ParameterVector& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.dim()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

dsgd::ParameterVector from_numpy(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-d array");
  return dsgd::ParameterVector(std::vector<double>(a.data(), a.data() + a.size()));
}

// A finished run together with the config that produced it.
struct Run {
  dsgd::cli::ConfigFile config;
  dsgd::protocols::RunResult result;

  std::string report(const std::string& format) const {
    dsgd::cli::ConfigFile c = config;
    c.format = dsgd::cli::parse_report_format(format);
    std::ostringstream os;
    dsgd::cli::write_report(os, c, result);
    return os.str();
  }
};

Run run_config(const std::string& text, const std::string& source) {
  Run run{dsgd::cli::parse_config(text, source), {}};
  py::gil_scoped_release release;
  run.result = dsgd::harness::run_experiment(run.config.run);
  return run;
}

py::dict ring_allreduce(const std::vector<Array>& inputs, std::size_t chunk_count,
                        double latency_s, double bandwidth) {
  std::vector<dsgd::ParameterVector> vs;
  for (const auto& a : inputs) vs.push_back(from_numpy(a));
  if (vs.empty()) throw py::value_error("ring_allreduce needs at least two inputs");
  dsgd::collective::RingAllreduceOptions opt;
  opt.link.latency_s = latency_s;
  opt.link.bandwidth_bytes_per_s = bandwidth;
  const auto plan = dsgd::collective::ChunkPlan::make(vs[0].dim(), vs.size(), chunk_count);
  dsgd::collective::RingAllreduceResult r;
  {
    py::gil_scoped_release release;
    r = dsgd::collective::ring_allreduce(vs, plan, opt);
  }
  py::list outputs, bytes;
  for (const auto& o : r.outputs) outputs.append(to_numpy(o));
  for (const auto& s : r.stats) bytes.append(s.bytes_sent);
  py::dict d;
  d["outputs"] = outputs;
  d["bytes_sent"] = bytes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Data-parallel SGD simulator";

  auto error = py::register_exception<dsgd::Error>(m, "Error");
  py::register_exception<dsgd::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<dsgd::cli::ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<dsgd::protocols::EngineError>(m, "EngineError", error.ptr());

  m.def("min_breakeven_bandwidth",
        py::overload_cast<double, double>(&dsgd::costmodel::min_breakeven_bandwidth),
        py::arg("model_bytes"), py::arg("compute_time_s"));
  m.def(
      "allreduce_time",
      [](double model_bytes, double bandwidth, std::size_t learners) {
        dsgd::costmodel::HardwareSpec hw;
        hw.model_bytes = model_bytes;
        hw.per_batch_compute_s = 1.0;
        hw.bandwidth_bytes_per_s = bandwidth;
        hw.learners = learners;
        return dsgd::costmodel::allreduce_time(hw);
      },
      py::arg("model_bytes"), py::arg("bandwidth_bytes_per_s"), py::arg("learners"));
  m.def(
      "fit_ssgd",
      [](double t1, double t2) {
        const auto f = dsgd::costmodel::fit_ssgd(t1, t2);
        return py::make_tuple(f.compute, f.communication);
      },
      py::arg("t1"), py::arg("t2"), "Returns (compute, communication).");
  m.def("ssgd_epoch_time",
        py::overload_cast<double, double, const std::vector<double>&>(
            &dsgd::costmodel::ssgd_epoch_time),
        py::arg("compute"), py::arg("communication"), py::arg("slowdowns"));
  m.def("adpsgd_epoch_time", &dsgd::costmodel::adpsgd_epoch_time, py::arg("t1"),
        py::arg("learners"), py::arg("slowdowns"), py::arg("exchange_overhead_s") = 0.0,
        py::arg("exchanges_per_epoch") = 0.0);
  m.def("hybrid_epoch_time", &dsgd::costmodel::hybrid_epoch_time, py::arg("compute"),
        py::arg("communication"), py::arg("slowdowns"), py::arg("overhead_s") = 0.0);
  m.def("predict_speedup", &dsgd::costmodel::predict_speedup, py::arg("serial_epoch_time"),
        py::arg("strategy_epoch_time"));
  m.def("one_straggler", &dsgd::costmodel::one_straggler, py::arg("learners"), py::arg("s"));

  m.def("ring_allreduce", &ring_allreduce, py::arg("inputs"), py::arg("chunk_count") = 0,
        py::arg("latency_s") = 0.0, py::arg("bandwidth_bytes_per_s") = 0.0,
        "Sums the inputs with a simulated ring; returns per-rank outputs and bytes sent.");

  m.def(
      "normalize_config",
      [](const std::string& text, const std::string& source) {
        return dsgd::cli::serialize_config(dsgd::cli::parse_config(text, source));
      },
      py::arg("text"), py::arg("source") = "<config>",
      "Parses and validates a YAML config and returns it with every field spelled out.");

  py::class_<dsgd::harness::MetricsRecord>(m, "EpochMetrics")
      .def_readonly("epoch", &dsgd::harness::MetricsRecord::epoch)
      .def_property_readonly("strategy",
                             [](const dsgd::harness::MetricsRecord& r) {
                               return std::string(dsgd::protocols::to_string(r.strategy));
                             })
      .def_readonly("learners", &dsgd::harness::MetricsRecord::learners)
      .def_readonly("heldout_loss", &dsgd::harness::MetricsRecord::heldout_loss)
      .def_readonly("epoch_wall_s", &dsgd::harness::MetricsRecord::epoch_wall_s)
      .def_readonly("staleness_mean", &dsgd::harness::MetricsRecord::staleness_mean)
      .def_readonly("staleness_max", &dsgd::harness::MetricsRecord::staleness_max)
      .def_readonly("minibatch_counts", &dsgd::harness::MetricsRecord::minibatch_counts)
      .def_readonly("bytes_exchanged", &dsgd::harness::MetricsRecord::bytes_exchanged)
      .def("__repr__", [](const dsgd::harness::MetricsRecord& r) {
        return "EpochMetrics(" + dsgd::cli::csv_row(r) + ")";
      });

  py::class_<Run>(m, "Run")
      .def_property_readonly("metrics", [](const Run& r) { return r.result.metrics; })
      .def_property_readonly("weights", [](const Run& r) { return to_numpy(r.result.weights); })
      .def_property_readonly("aborted", [](const Run& r) { return r.result.aborted; })
      .def_property_readonly("abort_reason", [](const Run& r) { return r.result.abort_reason; })
      .def("report", &Run::report, py::arg("format") = "csv");

  m.def("run", &run_config, py::arg("text"), py::arg("source") = "<config>",
        "Runs the experiment described by a YAML config string.");

  m.attr("CSV_HEADER") = dsgd::cli::kCsvHeader;
  m.attr("REPORT_SCHEMA_VERSION") = dsgd::cli::kReportSchemaVersion;
}
