# Copyright 2026 The dsgd Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Data-parallel SGD simulator: engines, ring allreduce and cost models."""

from ._core import (
    CSV_HEADER,
    REPORT_SCHEMA_VERSION,
    ConfigError,
    EngineError,
    EpochMetrics,
    Error,
    InvalidArgument,
    Run,
    adpsgd_epoch_time,
    allreduce_time,
    fit_ssgd,
    hybrid_epoch_time,
    min_breakeven_bandwidth,
    normalize_config,
    one_straggler,
    predict_speedup,
    ring_allreduce,
    run,
    ssgd_epoch_time,
)

__all__ = [
    "CSV_HEADER",
    "REPORT_SCHEMA_VERSION",
    "ConfigError",
    "EngineError",
    "EpochMetrics",
    "Error",
    "InvalidArgument",
    "Run",
    "adpsgd_epoch_time",
    "allreduce_time",
    "fit_ssgd",
    "hybrid_epoch_time",
    "min_breakeven_bandwidth",
    "normalize_config",
    "one_straggler",
    "predict_speedup",
    "ring_allreduce",
    "run",
    "ssgd_epoch_time",
]
