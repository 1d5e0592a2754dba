"""Report containers and their CSV / JSON forms.

CSV output is byte-stable: floats are written with ``repr`` (shortest
round-trip form), columns follow insertion order, and run-dependent metadata
such as wall time only goes to the JSON summary.  Each CSV opens with ``#``
comment lines carrying the package version and the resolved config.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__

# metadata keys that vary between identical runs and stay out of CSV headers
VOLATILE_KEYS = ("wall_time_s",)


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def _header(metadata: dict) -> list[str]:
    stable = {k: v for k, v in metadata.items() if k not in VOLATILE_KEYS}
    return [f"# chainclt {__version__}",
            "# " + json.dumps(_jsonable(stable), sort_keys=True)]


@dataclass
class TableReport:
    """Rows of named columns; the generic report shape."""

    columns: list[str]
    rows: list[list[Any]]
    metadata: dict = field(default_factory=dict)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        for line in _header(self.metadata):
            buf.write(line + "\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_cell(x) for x in row) + "\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [row[k] for row in self.rows]

    def summary(self) -> dict:
        return _jsonable(self.metadata)

    @property
    def verdict(self) -> str | None:
        return self.metadata.get("verdict")


@dataclass
class SweepReport:
    """Named metric series over a strictly increasing axis."""

    axis_name: str
    axis: list
    metrics: dict[str, list]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        axis = [float(a) if isinstance(a, (float, np.floating)) else a for a in self.axis]
        if any(b <= a for a, b in zip(axis, axis[1:])):
            raise ValueError("sweep axis must be strictly increasing")
        for name, series in self.metrics.items():
            if len(series) != len(axis):
                raise ValueError(f"series {name!r} has {len(series)} points, axis has {len(axis)}")
        self.axis = axis
        self.metrics = {k: list(v) for k, v in self.metrics.items()}

    def series(self, name: str) -> np.ndarray:
        return np.asarray(self.metrics[name], dtype=float)

    def as_table(self) -> TableReport:
        cols = [self.axis_name] + list(self.metrics)
        rows = [[a] + [self.metrics[k][i] for k in self.metrics] for i, a in enumerate(self.axis)]
        return TableReport(cols, rows, self.metadata)

    def to_csv(self, path=None) -> str:
        return self.as_table().to_csv(path)

    def summary(self) -> dict:
        return _jsonable(self.metadata)

    @property
    def verdict(self) -> str | None:
        return self.metadata.get("verdict")


@dataclass
class CltReport:
    subset: list[int]
    ks_statistics: list[float]
    ks_critical: float
    cov_error: float
    replicates: int
    cov_tolerance: float = 0.1
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.replicates < 100:
            raise ValueError("a CLT report needs at least 100 replicates")
        if any(k < 0 for k in self.ks_statistics):
            raise ValueError("KS statistics are nonnegative")

    @property
    def passed(self) -> bool:
        return (all(k < self.ks_critical for k in self.ks_statistics)
                and self.cov_error < self.cov_tolerance)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_csv(self, path=None) -> str:
        rows = [[f, k, self.ks_critical, k < self.ks_critical]
                for f, k in zip(self.subset, self.ks_statistics)]
        meta = dict(self.metadata, cov_error=self.cov_error, verdict=self.verdict)
        return TableReport(["function", "ks_statistic", "ks_critical", "ks_pass"],
                           rows, meta).to_csv(path)

    def summary(self) -> dict:
        return _jsonable(dict(self.metadata, subset=self.subset,
                              ks_statistics=self.ks_statistics, ks_critical=self.ks_critical,
                              cov_error=self.cov_error, replicates=self.replicates,
                              verdict=self.verdict))


def write_summary(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
