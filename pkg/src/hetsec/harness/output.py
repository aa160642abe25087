"""CSV/JSON writers.

``results.csv`` carries no timings so that identical configurations give
byte-identical files; wall times go to ``timings.csv``.
"""

from __future__ import annotations

import csv
import json
import os
import platform
import subprocess
from datetime import datetime, timezone

from .. import __version__
from ..solver.cones import BACKEND
from .experiments import ResultRow, aggregate

RESULT_HEADER = ("seed", "scheme", "sweep", "value", "secrecy_rate", "iterations",
                 "status", "feasible", "worst_violation")
TIMING_HEADER = ("seed", "scheme", "sweep", "value", "wall_time")


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        if v != v or v in (float("inf"), float("-inf")):
            return str(v)
        return format(v, ".12g")
    return str(v)


def write_results_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, k)) for k in RESULT_HEADER])


def read_results_csv(path) -> list[ResultRow]:
    out = []
    with open(path, newline="") as fh:
        for d in csv.DictReader(fh):
            out.append(ResultRow(int(d["seed"]), d["scheme"], d["sweep"], float(d["value"]),
                                 float(d["secrecy_rate"]), int(d["iterations"]), d["status"],
                                 d["feasible"] == "1", float(d["worst_violation"])))
    return out


def write_timings_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMING_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, k)) for k in TIMING_HEADER])


def _git_rev():
    try:
        here = os.path.dirname(os.path.abspath(__file__))
        return subprocess.run(["git", "rev-parse", "--short", "HEAD"], cwd=here, capture_output=True,
                              text=True, timeout=5).stdout.strip() or None
    except (OSError, subprocess.SubprocessError):
        return None


def run_metadata() -> dict:
    return dict(package_version=__version__, git_revision=_git_rev(), kernel_backend=BACKEND,
                python=platform.python_version(), platform=platform.platform(),
                created=datetime.now(timezone.utc).isoformat(timespec="seconds"))


def emit_outputs(rows, out_dir, ecfg, command: str, extra: dict | None = None, traces=None) -> dict:
    """Write ``results.csv``, ``timings.csv``, ``summary.json`` and optional traces."""
    os.makedirs(out_dir, exist_ok=True)
    write_results_csv(rows, os.path.join(out_dir, "results.csv"))
    write_timings_csv(rows, os.path.join(out_dir, "timings.csv"))
    summary = dict(command=command, config=ecfg.to_json(), aggregates=aggregate(rows),
                   metadata=run_metadata())
    if extra:
        summary.update(extra)
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True, default=_json_default)
        fh.write("\n")
    for (seed, scheme, value), tr in (traces or {}).items():
        name = f"trace_{seed}.json" if len({k[1:] for k in traces}) == 1 else \
            f"trace_{seed}_{scheme}_{_fmt(float(value))}.json"
        with open(os.path.join(out_dir, name), "w") as fh:
            json.dump(tr, fh, indent=1, sort_keys=True, default=_json_default)
            fh.write("\n")
    return summary


def _json_default(o):
    import numpy as np
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")
