# Copyright 2026 The SlsBench Authors
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


"""Serverless benchmark harness: platform limits, packaging, simulation and reports."""

import json as _json
import os as _os
from pathlib import Path as _Path

from . import _core
from ._core import Error

__all__ = [
    "Error",
    "builtin_sweeps",
    "build_package",
    "cli_path",
    "cpu_share",
    "percentile",
    "profiles",
    "reference_sim_model",
    "run_plan",
    "snap_memory",
    "summarize",
    "summary_csv",
    "validate",
]


def _text(value):
    if value is None:
        return ""
    if isinstance(value, (str, bytes)):
        return value
    return _json.dumps(value)


def profiles(overlay=None):
    """Platform profile documents, optionally merged with an overlay."""
    return _json.loads(_core.profiles(_text(overlay)))


def validate(platform, spec, overlay=None):
    """Checks a deployment spec against a platform; returns violations and warnings."""
    return _json.loads(_core.validate(platform, _text(spec), _text(overlay)))


def snap_memory(platform, requested_mb, overlay=None):
    """Smallest selectable memory size >= requested_mb, and whether it is fixed."""
    return _core.snap_memory(platform, float(requested_mb), _text(overlay))


def cpu_share(platform, memory_mb, overlay=None):
    return _core.cpu_share(platform, int(memory_mb), _text(overlay))


def percentile(values, percent):
    """Nearest-rank percentile."""
    return _core.percentile([float(v) for v in values], int(percent))


def summarize(values):
    return _json.loads(_core.summarize([float(v) for v in values]))


def build_package(workload_dir, out_dir):
    """Reproducible archive of a workload directory."""
    return _json.loads(_core.build_package(_Path(workload_dir), _Path(out_dir)))


def builtin_sweeps():
    return _json.loads(_core.builtin_sweeps())


def reference_sim_model():
    return _json.loads(_core.reference_sim_model())


def run_plan(plan, output_dir, sim_model=None, workloads_dir="workloads", seed=None, overlay=None):
    """Runs a plan on the local simulator; returns trials and report files.

    Rerunning with the same output directory resumes from its journal.
    """
    out = _core.run_plan(_text(plan), _Path(output_dir), _text(sim_model), _Path(workloads_dir), seed,
                         _text(overlay))
    return _json.loads(out)


def summary_csv(plan, trials):
    return _core.summary_csv(_text(plan), _text(trials))


def cli_path():
    """Path of the bundled command line tool, or None."""
    env = _os.environ.get("SLSBENCH_CLI")
    if env:
        return env
    bundled = _Path(__file__).parent / "bin" / "slsbench"
    return str(bundled) if bundled.exists() else None
