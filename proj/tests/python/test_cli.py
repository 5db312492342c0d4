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
"""Black-box tests of the dsgd command-line tool."""

import csv
import io
import json
import os
import pathlib
import subprocess

import pytest

CLI = os.environ.get("DSGD_CLI", "dsgd")
CONFIGS = pathlib.Path(os.environ.get("DSGD_CONFIGS", pathlib.Path(__file__).parents[2] / "configs"))

HEADER = ("epoch,strategy,lambda,heldout_loss,epoch_wall_s,staleness_mean,staleness_max,"
          "minibatch_counts,bytes_exchanged")


def dsgd(*args, env=None):
    full_env = dict(os.environ)
    full_env.update(env or {})
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=full_env,
                          timeout=300)


def write(tmp_path, text, name="c.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


@pytest.mark.parametrize("name", sorted(p.name for p in CONFIGS.glob("*.yaml")))
def test_shipped_configs_run(name, tmp_path):
    out = tmp_path / "report"
    r = dsgd("run", CONFIGS / name, "-o", out)
    assert r.returncode == 0, r.stderr
    assert out.stat().st_size > 0


def test_csv_report_schema(tmp_path):
    r = dsgd("run", CONFIGS / "ssgd.yaml", "--format", "csv")
    assert r.returncode == 0, r.stderr
    lines = r.stdout.splitlines()
    assert lines[0] == HEADER
    rows = list(csv.DictReader(io.StringIO(r.stdout)))
    assert [int(row["epoch"]) for row in rows] == list(range(1, 17))
    for row in rows:
        assert row["strategy"] == "ssgd"
        assert row["lambda"] == "8"
        assert float(row["staleness_max"]) == 0
        counts = [int(c) for c in row["minibatch_counts"].split("|")]
        assert len(counts) == 8
        assert int(row["bytes_exchanged"]) > 0


def test_json_report(tmp_path):
    out = tmp_path / "r.json"
    r = dsgd("run", CONFIGS / "hybrid.yaml", "-o", out)
    assert r.returncode == 0, r.stderr
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == 1
    assert doc["strategy"] == "hybrid"
    assert len(doc["epochs"]) == 16
    assert doc["epochs"][-1]["staleness_max"] == 1


def test_virtual_runs_are_byte_identical():
    a = dsgd("run", CONFIGS / "ps_asgd.yaml")
    b = dsgd("run", CONFIGS / "ps_asgd.yaml")
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_odd_adpsgd_learners_is_a_config_error(tmp_path):
    p = write(tmp_path, "strategy: adpsgd\nepochs: 2\nlearners: 5\n")
    r = dsgd("run", p)
    assert r.returncode == 2
    assert f"{p}:3:" in r.stderr
    assert "even number" in r.stderr


@pytest.mark.parametrize("text,line", [
    ("strategy: ssgd\nlearners: 2\nbogus: 1\n", 3),
    ("strategy: ssgd\nlearners: 2\nmomentum: fast\n", 3),
    ("strategy: warp\n", 1),
    ("learners: 2\n", 1),
])
def test_config_errors_are_line_anchored(tmp_path, text, line):
    p = write(tmp_path, text)
    r = dsgd("validate", p)
    assert r.returncode == 2
    assert r.stderr.startswith(f"{p}:{line}:")


def test_missing_config_file_is_a_config_error(tmp_path):
    assert dsgd("run", tmp_path / "nope.yaml").returncode == 2


def test_unwritable_output_is_a_runtime_failure(tmp_path):
    r = dsgd("run", CONFIGS / "single.yaml", "-o", tmp_path / "missing" / "dir" / "out.csv")
    assert r.returncode == 1


def test_diverging_run_is_a_runtime_failure(tmp_path):
    p = write(tmp_path, "strategy: ssgd\nlearners: 2\nepochs: 2\nobjective:\n  kind: quadratic\n"
                        "schedule:\n  preset: baseline\n  base_lr: 1e300\n  peak_lr: 1e300\n")
    r = dsgd("run", p)
    assert r.returncode == 1
    assert "epoch" in r.stderr


def test_validate_print_round_trips(tmp_path):
    r = dsgd("validate", CONFIGS / "adpsgd_straggler.yaml", "--print")
    assert r.returncode == 0
    p = write(tmp_path, r.stdout)
    again = dsgd("validate", p, "--print")
    assert again.returncode == 0
    assert again.stdout == r.stdout


def test_verbosity_controls_stderr_only():
    quiet = dsgd("run", CONFIGS / "single.yaml", env={"DSGD_VERBOSITY": "quiet"})
    verbose = dsgd("run", CONFIGS / "single.yaml", env={"DSGD_VERBOSITY": "verbose"})
    assert quiet.returncode == verbose.returncode == 0
    assert quiet.stderr == ""
    assert len(verbose.stderr.splitlines()) > 16
    assert quiet.stdout == verbose.stdout
    assert dsgd("run", CONFIGS / "single.yaml", env={"DSGD_VERBOSITY": "loud"}).returncode == 2


def test_predict_bandwidth():
    r = dsgd("predict", "bandwidth", "--model-bytes", 19.7e6, "--compute-s", 0.008)
    assert r.returncode == 0
    row = r.stdout.splitlines()[1].split(",")
    assert float(row[2]) == pytest.approx(4.925e9)
    assert dsgd("predict", "bandwidth", "--model-bytes", 1, "--compute-s", 0).returncode == 2


def test_predict_straggler():
    r = dsgd("predict", "straggler", "--ssgd-t1", 1.09, "--ssgd-t2", 1.67, "--adpsgd-t1", 0.89,
             "--learners", 16)
    assert r.returncode == 0, r.stderr
    rows = list(csv.reader(r.stdout.splitlines()[1:]))
    assert rows[0][0] == "slowdown"
    by_s = {float(row[0]): [float(x) for x in row[1:]] for row in rows[1:]}
    assert by_s[10.0][0] == pytest.approx(0.58 * 10 + 0.51)
    assert by_s[1.0][2] == pytest.approx(0.89)
    assert dsgd("predict", "straggler", "--ssgd-t1", 2, "--ssgd-t2", 1, "--adpsgd-t1", 1,
                "--learners", 4).returncode == 2


def test_usage_errors_exit_2():
    assert dsgd().returncode == 2
    assert dsgd("frobnicate").returncode == 2
