"""Simulation trace container and CSV persistence.

A trace is a set of equal-length float columns in a fixed, documented order.
CSV round-trips are lossless to better than 1e-12 (floats are written with 17
significant digits).  Wall-clock diagnostic columns (solve_ms, deadline_miss,
stale) are excluded from determinism comparisons; everything else is
reproducible bit for bit from the scenario.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

QP_STATUS_CODES = {"optimal": 0.0, "max_iter": 1.0, "infeasible": 2.0, "skipped": 3.0}
NONDETERMINISTIC_COLUMNS = ("solve_ms", "deadline_miss", "stale")


class TraceError(ValueError):
    pass


def trace_columns(state_labels, input_labels) -> tuple:
    """Fixed column order for a closed-loop trace."""
    cols = ["t"]
    cols += [f"x_{lab}" for lab in state_labels]
    cols += ["u_pilot_lon", "u_ext", "cm"]
    cols += [f"u_applied_{lab}" for lab in input_labels]
    cols += [
        "y_load",
        "y_1rev_exact",
        "y_1rev_predicted",
        "y_max",
        "fcs_y_cmd",
        "fcs_int_e",
        "fcs_deriv_f",
        "qp_status",
        "qp_iters",
        "qp_kkt",
        "solve_ms",
        "deadline_miss",
        "stale",
    ]
    return tuple(cols)


@dataclass
class SimTrace:
    """Uniformly sampled closed-loop records."""

    columns: tuple
    data: dict  # column name -> float ndarray

    def __post_init__(self):
        if set(self.columns) != set(self.data):
            raise TraceError("column list and data keys differ")
        lengths = {v.shape[0] for v in self.data.values()}
        if len(lengths) > 1:
            raise TraceError("ragged trace columns")
        t = self.data.get("t")
        if t is not None and t.shape[0] > 1:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise TraceError("time must be strictly increasing")
            if np.max(np.abs(dt - dt[0])) > 1e-9:
                raise TraceError("time step must be constant")

    def __len__(self) -> int:
        return next(iter(self.data.values())).shape[0] if self.data else 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[name]

    @property
    def dt(self) -> float:
        t = self.data["t"]
        return float(t[1] - t[0]) if t.shape[0] > 1 else 0.0

    def equals(self, other: "SimTrace", deterministic_only: bool = True, atol: float = 0.0) -> bool:
        if self.columns != other.columns or len(self) != len(other):
            return False
        for name in self.columns:
            if deterministic_only and name in NONDETERMINISTIC_COLUMNS:
                continue
            a, b = self.data[name], other.data[name]
            same = np.isclose(a, b, rtol=0.0, atol=atol, equal_nan=True) if atol else (
                (a == b) | (np.isnan(a) & np.isnan(b))
            )
            if not np.all(same):
                return False
        return True

    def max_column_diff(self, other: "SimTrace", deterministic_only: bool = True) -> dict:
        out = {}
        for name in self.columns:
            if deterministic_only and name in NONDETERMINISTIC_COLUMNS:
                continue
            a, b = self.data[name], other.data[name]
            mask = ~(np.isnan(a) & np.isnan(b))
            out[name] = float(np.max(np.abs(a[mask] - b[mask]))) if mask.any() else 0.0
        return out


class TraceRecorder:
    """Row-by-row trace builder with preallocated columns."""

    def __init__(self, columns, n_rows: int):
        self.columns = tuple(columns)
        self._data = {c: np.full(n_rows, np.nan) for c in self.columns}
        self._row = 0
        self._n = n_rows

    def record(self, **values) -> None:
        if self._row >= self._n:
            raise TraceError("trace recorder is full")
        missing = set(self.columns) - set(values)
        if missing:
            raise TraceError(f"incomplete record, missing {sorted(missing)}")
        extra = set(values) - set(self.columns)
        if extra:
            raise TraceError(f"unknown trace fields {sorted(extra)}")
        for k, v in values.items():
            self._data[k][self._row] = v
        self._row += 1

    def finalize(self) -> SimTrace:
        data = {k: v[: self._row].copy() for k, v in self._data.items()}
        return SimTrace(columns=self.columns, data=data)


def export_trace(trace: SimTrace, path) -> None:
    """Write the trace as CSV with the fixed header order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trace.columns)
        cols = [trace.data[c] for c in trace.columns]
        for i in range(len(trace)):
            writer.writerow([f"{col[i]:.17g}" for col in cols])


def import_trace(path) -> SimTrace:
    """Read a CSV trace; inverse of export_trace."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TraceError(f"{path}: empty trace file") from None
        if not header or header[0] != "t":
            raise TraceError(f"{path}: malformed trace header")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise TraceError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise TraceError(f"{path}:{lineno}: {exc}") from None
    arr = np.array(rows, dtype=float) if rows else np.zeros((0, len(header)))
    data = {name: arr[:, j].copy() for j, name in enumerate(header)}
    return SimTrace(columns=tuple(header), data=data)
