"""Deterministic CSV and JSON emission for runs and verification reports.

Floats are written with repr (shortest round-trip form) so a fixed seed
reproduces output files byte for byte.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .destruction import DestructionTrace
from .stats import TestReport


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def write_csv(path: str | Path, header: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_json(path: str | Path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def trace_vertex_rows(trace: DestructionTrace):
    for v in range(1, trace.n + 1):
        yield (
            v,
            trace.disconnect_time[v],
            trace.cuts_to_disconnect[v],
            trace.residual_cuts[v],
            trace.isolation_cuts[v],
        )


def write_trace_vertices(path: str | Path, trace: DestructionTrace) -> None:
    write_csv(path, ["vertex", "Gamma", "Y", "Nres", "depth"], trace_vertex_rows(trace))


def trace_jump_rows(trace: DestructionTrace):
    """Step-function rows (time, X, R) at every jump of either process."""
    times = np.union1d(trace.x_times, trace.root_cut_times)
    yield (0.0, trace.n, 0)
    for t in times:
        yield (t, int(trace.x_at(t)), int(trace.r_at(t)))


def write_trace_jumps(path: str | Path, trace: DestructionTrace) -> None:
    write_csv(path, ["time", "X", "R"], trace_jump_rows(trace))


def report_rows(reports: list[TestReport]):
    for r in reports:
        yield (
            r.name,
            r.family,
            r.n,
            r.replicas,
            r.seed,
            r.statistic,
            r.value,
            "" if r.threshold is None else r.threshold,
            "" if r.passed is None else int(bool(r.passed)),
            r.sample_size,
        )


REPORT_HEADER = [
    "name", "family", "n", "replicas", "seed", "statistic",
    "value", "threshold", "passed", "sample_size",
]


def write_reports_csv(path: str | Path, reports: list[TestReport]) -> None:
    write_csv(path, REPORT_HEADER, report_rows(reports))


def write_summary_json(path: str | Path, config: dict, reports: list[TestReport]) -> bool:
    """Write the JSON summary; returns overall pass."""
    ok = all(r.passed is not False for r in reports)
    write_json(path, {
        "config": config,
        "pass": ok,
        "reports": [r.to_dict() for r in reports],
    })
    return ok
