"""JSON and CSV renderings of experiment reports, and a checking loader."""
from __future__ import annotations

import csv
import io
import json
import math

from .errors import ParseError
from .harness import ExperimentReport, Outcome, TrialStats, aggregate

SCHEMA = 1
CSV_FIELDS = ("trial", "resets", "steps", "t_per_r", "outcome", "final_candidate_size",
              "final_steps", "sample_steps", "sample_undefined", "sample_candidate")
_LISTS = ("sample_steps", "sample_undefined", "sample_candidate")


def _trial_row(t: TrialStats) -> dict:
    return {
        "trial": t.trial,
        "resets": t.resets,
        "steps": t.steps,
        "t_per_r": t.t_per_r,
        "outcome": t.outcome.value,
        "final_candidate_size": t.final_candidate_size,
        "final_steps": t.final_steps,
        "sample_steps": list(t.sample_steps),
        "sample_undefined": list(t.sample_undefined),
        "sample_candidate": list(t.sample_candidate),
    }


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ";".join(map(str, value))
    return str(value)


def emit_report(report: ExperimentReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        doc = {
            "schema": SCHEMA,
            "config": report.config,
            "oracle": {"p_phi": report.p_phi, "params": report.params},
            "bounds": report.bounds,
            "degenerate": report.degenerate,
            "aggregates": report.aggregates,
            "trials": [_trial_row(t) for t in report.trials],
        }
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for t in report.trials:
            row = _trial_row(t)
            w.writerow([_cell(row[k]) for k in CSV_FIELDS])
        if report.trials:
            for key, value in report.aggregates.items():
                w.writerow(["#aggregate", key, _cell(value)])
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def _stats_from_row(row: dict) -> TrialStats:
    return TrialStats(int(row["trial"]), int(row["resets"]), int(row["steps"]),
                      list(row["sample_steps"]), list(row["sample_undefined"]),
                      list(row["sample_candidate"]), Outcome(row["outcome"]),
                      int(row["final_candidate_size"]), int(row["final_steps"]))


def _same(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return math.isclose(float(a), float(b), rel_tol=1e-12, abs_tol=1e-12)


def _check(trials: list[TrialStats], stored: dict):
    fresh = aggregate(trials)
    for key, value in fresh.items():
        if key not in stored:
            raise ParseError("R_AGGREGATE", f"aggregate {key!r} missing")
        if not _same(value, stored[key]):
            raise ParseError("R_AGGREGATE", f"aggregate {key!r} is {stored[key]!r}, rows give {value!r}")
    for t in trials:
        if t.steps != sum(t.sample_steps) or any(
                a + b != c for a, b, c in zip(t.sample_undefined, t.sample_candidate, t.sample_steps)):
            raise ParseError("R_AGGREGATE", f"trial {t.trial}: per-sample steps do not add up")


def load_report(data: bytes, fmt: str = "json") -> tuple[list[TrialStats], dict]:
    """Parse an emitted report and verify its aggregates against its rows.

    Returns the trial rows and the aggregates (for CSV without trials, an
    empty dict).  For JSON the whole document is also available via
    ``json.loads``.
    """
    text = data.decode("utf-8")
    if fmt == "json":
        doc = json.loads(text)
        if doc.get("schema") != SCHEMA:
            raise ParseError("R_SCHEMA", f"unsupported report schema {doc.get('schema')!r}")
        trials = [_stats_from_row(r) for r in doc["trials"]]
        _check(trials, doc["aggregates"])
        return trials, doc["aggregates"]
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if tuple(header or ()) != CSV_FIELDS:
            raise ParseError("R_SCHEMA", "unexpected CSV header", 1, 1)
        trials, stored = [], {}
        for lineno, row in enumerate(reader, start=2):
            if row and row[0] == "#aggregate":
                key, value = row[1], row[2]
                stored[key] = None if value == "-" else float(value)
                continue
            rec = dict(zip(CSV_FIELDS, row))
            for k in _LISTS:
                rec[k] = [int(x) for x in rec[k].split(";")] if rec[k] else []
            trials.append(_stats_from_row(rec))
        if trials:
            _check(trials, stored)
        return trials, stored
    raise ValueError(f"unknown report format {fmt!r}")
