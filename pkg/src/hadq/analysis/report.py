"""Experiment reports: JSON for the verdicts, CSV for raw samples."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .stats import TestResult


@dataclass(frozen=True)
class Verdict:
    """A pass/fail decision: `value` compared with `threshold` by `op`."""

    criterion: str
    value: float
    threshold: float
    op: str = ">="

    @property
    def passed(self) -> bool:
        v = self.value
        if v is None or not np.isfinite(v):
            return False
        return {
            ">=": v >= self.threshold,
            "<=": v <= self.threshold,
            "<": v < self.threshold,
            ">": v > self.threshold,
        }[self.op]

    def to_dict(self) -> dict:
        v = None if self.value is None or not np.isfinite(self.value) else float(self.value)
        return {
            "criterion": self.criterion,
            "value": v,
            "threshold": float(self.threshold),
            "op": self.op,
            "passed": self.passed,
        }


@dataclass
class ExperimentReport:
    experiment: str
    params: dict
    seed: int
    tests: list[TestResult] = field(default_factory=list)
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    samples: dict[str, list] = field(default_factory=dict)
    runtime_s: float | None = None

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    def to_dict(self, *, timing: bool = False) -> dict:
        doc = {
            "experiment": self.experiment,
            "params": _plain(self.params),
            "seed": int(self.seed),
            "tests": [t.to_dict() for t in self.tests],
            "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()},
            "summary": _plain(self.summary),
            "passed": self.passed,
        }
        if timing:
            doc["runtime_s"] = self.runtime_s
        return doc

    def to_json(self, *, timing: bool = False) -> str:
        """Sorted-key JSON.  Wall-clock time is left out unless asked for, so
        reruns with the same seed are byte-identical."""
        return json.dumps(self.to_dict(timing=timing), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def samples_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sample", "index", "value"])
        for name in sorted(self.samples):
            for i, v in enumerate(self.samples[name]):
                w.writerow([name, i, repr(float(v))])
        return buf.getvalue()

    def lines(self) -> list[str]:
        """One human-readable line per verdict."""
        out = []
        for name, v in self.verdicts.items():
            mark = "PASS" if v.passed else "FAIL"
            val = f"{v.value:.4g}" if v.value is not None else "nan"
            out.append(f"{mark} {self.experiment}/{name}: {val} {v.op} {v.threshold:g} [{v.criterion}]")
        return out


def _plain(obj):
    """JSON-safe copy: numpy scalars and arrays become Python values, NaN
    and infinities become null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if np.isfinite(f) else None
    return obj
