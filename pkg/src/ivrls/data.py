"""Datasets and their CSV form.

A dataset is the row sequence an estimator consumes, in processing
order: time index, output, regressor, per-step noise bounds, and
optionally the realized noise, the true parameter trajectory, and
per-step drift bounds (their presence marks a time-varying truth).

CSV layout (header mandatory, one row per step):

    t, y, x_1..x_n, v_lo, v_hi [, v_true] [, theta_true_1..n]
                               [, delta_lo_1..n, delta_hi_1..n]

Floats are written with 17 significant digits, which round-trips IEEE
doubles exactly; equal datasets therefore produce byte-identical files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = ["Dataset", "write_estimates_csv"]

_FLOAT_FMT = ".17g"


def _fmt(value: float) -> str:
    return format(float(value), _FLOAT_FMT)


@dataclass(eq=False)
class Dataset:
    """Row-ordered estimation data; optional arrays are None when absent."""

    t: np.ndarray
    X: np.ndarray
    y: np.ndarray
    v_low: np.ndarray
    v_high: np.ndarray
    v: np.ndarray | None = None
    theta_true: np.ndarray | None = None
    delta_low: np.ndarray | None = None
    delta_high: np.ndarray | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=int)
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.v_low = np.asarray(self.v_low, dtype=float)
        self.v_high = np.asarray(self.v_high, dtype=float)
        N = self.t.shape[0]
        if self.X.ndim != 2 or self.X.shape[0] != N:
            raise ValueError(f"X must be ({N}, n), got {self.X.shape}")
        n = self.X.shape[1]
        for name in ("y", "v_low", "v_high"):
            arr = getattr(self, name)
            if arr.shape != (N,):
                raise ValueError(f"{name} must have shape ({N},), got {arr.shape}")
        if self.v is not None:
            self.v = np.asarray(self.v, dtype=float)
            if self.v.shape != (N,):
                raise ValueError(f"v must have shape ({N},), got {self.v.shape}")
        for name in ("theta_true", "delta_low", "delta_high"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != (N, n):
                    raise ValueError(
                        f"{name} must have shape ({N}, {n}), got {arr.shape}"
                    )
                setattr(self, name, arr)
        if (self.delta_low is None) != (self.delta_high is None):
            raise ValueError("delta_low and delta_high must be given together")

    @property
    def N(self) -> int:
        return self.t.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def is_ltv(self) -> bool:
        return self.delta_low is not None

    def validate(self) -> None:
        """Value-level checks: noise bounds ordered and honored, drift sane."""
        bad = np.flatnonzero(self.v_low > self.v_high)
        if bad.size:
            raise ValueError(f"v_lo > v_hi at rows {bad.tolist()}")
        if self.v is not None:
            bad = np.flatnonzero((self.v < self.v_low) | (self.v > self.v_high))
            if bad.size:
                raise ValueError(f"v outside its declared bounds at rows {bad.tolist()}")
        if self.is_ltv:
            if np.any(self.delta_low > self.delta_high):
                raise ValueError("delta_lo > delta_hi in some row")

    def columns(self) -> list[str]:
        n = self.n
        cols = ["t", "y"] + [f"x_{i}" for i in range(1, n + 1)] + ["v_lo", "v_hi"]
        if self.v is not None:
            cols.append("v_true")
        if self.theta_true is not None:
            cols += [f"theta_true_{i}" for i in range(1, n + 1)]
        if self.is_ltv:
            cols += [f"delta_lo_{i}" for i in range(1, n + 1)]
            cols += [f"delta_hi_{i}" for i in range(1, n + 1)]
        return cols

    def to_csv(self, path) -> None:
        n = self.n
        with open(path, "w", newline="") as fh:
            fh.write(",".join(self.columns()) + "\n")
            for i in range(self.N):
                row = [str(int(self.t[i])), _fmt(self.y[i])]
                row += [_fmt(self.X[i, j]) for j in range(n)]
                row += [_fmt(self.v_low[i]), _fmt(self.v_high[i])]
                if self.v is not None:
                    row.append(_fmt(self.v[i]))
                if self.theta_true is not None:
                    row += [_fmt(self.theta_true[i, j]) for j in range(n)]
                if self.is_ltv:
                    row += [_fmt(self.delta_low[i, j]) for j in range(n)]
                    row += [_fmt(self.delta_high[i, j]) for j in range(n)]
                fh.write(",".join(row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        with open(path, "r", newline="") as fh:
            lines = [ln.rstrip("\n").rstrip("\r") for ln in fh]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise ValueError(f"{path}: empty file")
        header = [h.strip() for h in lines[0].split(",")]
        index = {name: i for i, name in enumerate(header)}
        if len(index) != len(header):
            raise ValueError(f"{path}: duplicate column names in header")

        x_ids = sorted(
            int(m.group(1)) for h in header if (m := re.fullmatch(r"x_(\d+)", h))
        )
        if not x_ids or x_ids != list(range(1, len(x_ids) + 1)):
            raise ValueError(f"{path}: regressor columns must be x_1..x_n, got {x_ids}")
        n = len(x_ids)
        for required in ("t", "y", "v_lo", "v_hi"):
            if required not in index:
                raise ValueError(f"{path}: missing required column '{required}'")

        def group(prefix: str) -> list[str] | None:
            names = [f"{prefix}_{i}" for i in range(1, n + 1)]
            present = [nm for nm in names if nm in index]
            if not present:
                return None
            if len(present) != n:
                raise ValueError(
                    f"{path}: incomplete column group {prefix}_1..{prefix}_{n}"
                )
            return names

        theta_cols = group("theta_true")
        dlo_cols = group("delta_lo")
        dhi_cols = group("delta_hi")
        if (dlo_cols is None) != (dhi_cols is None):
            raise ValueError(f"{path}: delta_lo_* and delta_hi_* must appear together")
        has_v = "v_true" in index

        rows = lines[1:]
        N = len(rows)
        t = np.zeros(N, dtype=int)
        X = np.zeros((N, n))
        y = np.zeros(N)
        v_low = np.zeros(N)
        v_high = np.zeros(N)
        v = np.zeros(N) if has_v else None
        theta = np.zeros((N, n)) if theta_cols else None
        dlo = np.zeros((N, n)) if dlo_cols else None
        dhi = np.zeros((N, n)) if dhi_cols else None

        for i, line in enumerate(rows):
            lineno = i + 2
            parts = line.split(",")
            if len(parts) != len(header):
                raise ValueError(
                    f"{path}: line {lineno} has {len(parts)} fields, "
                    f"expected {len(header)}"
                )

            def field(col: str) -> float:
                raw = parts[index[col]]
                try:
                    return float(raw)
                except ValueError:
                    raise ValueError(
                        f"{path}: line {lineno}, column '{col}': "
                        f"cannot parse {raw!r}"
                    ) from None

            t[i] = int(field("t"))
            y[i] = field("y")
            for j in range(n):
                X[i, j] = field(f"x_{j + 1}")
            v_low[i] = field("v_lo")
            v_high[i] = field("v_hi")
            if v_low[i] > v_high[i]:
                raise ValueError(
                    f"{path}: line {lineno}: v_lo={v_low[i]:g} exceeds "
                    f"v_hi={v_high[i]:g}"
                )
            if v is not None:
                v[i] = field("v_true")
            if theta is not None:
                for j in range(n):
                    theta[i, j] = field(f"theta_true_{j + 1}")
            if dlo is not None:
                for j in range(n):
                    dlo[i, j] = field(f"delta_lo_{j + 1}")
                    dhi[i, j] = field(f"delta_hi_{j + 1}")

        ds = cls(
            t=t,
            X=X,
            y=y,
            v_low=v_low,
            v_high=v_high,
            v=v,
            theta_true=theta,
            delta_low=dlo,
            delta_high=dhi,
        )
        ds.validate()
        return ds


def write_estimates_csv(
    path,
    t,
    point,
    center,
    radius,
    lower,
    upper,
    mono_lower=None,
    mono_upper=None,
    inconsistent=None,
    comments=None,
) -> None:
    """Estimate trajectory CSV: one row per step.

        t, theta_hat_1..n, c_1..n, r_1..n, lo_1..n, hi_1..n
        [, mono_lo_1..n, mono_hi_1..n], inconsistent

    For a single run `inconsistent` is 0/1; averaged outputs put the
    across-run count there.  Trailing '#' comment lines carry optional
    audit summaries; readers that skip comments see plain CSV.
    """
    t = np.asarray(t)
    point = np.asarray(point, dtype=float)
    N, n = point.shape
    blocks = [("theta_hat", point), ("c", center), ("r", radius),
              ("lo", lower), ("hi", upper)]
    if (mono_lower is None) != (mono_upper is None):
        raise ValueError("mono_lower and mono_upper must be given together")
    if mono_lower is not None:
        blocks += [("mono_lo", mono_lower), ("mono_hi", mono_upper)]
    blocks = [(name, np.asarray(arr, dtype=float)) for name, arr in blocks]
    for name, arr in blocks:
        if arr.shape != (N, n):
            raise ValueError(f"{name} must have shape ({N}, {n}), got {arr.shape}")
    if inconsistent is None:
        inconsistent = np.zeros(N, dtype=int)
    inconsistent = np.asarray(inconsistent, dtype=int)

    header = ["t"]
    for name, _ in blocks:
        header += [f"{name}_{i}" for i in range(1, n + 1)]
    header.append("inconsistent")

    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(N):
            row = [str(int(t[i]))]
            for _, arr in blocks:
                row += [_fmt(arr[i, j]) for j in range(n)]
            row.append(str(int(inconsistent[i])))
            fh.write(",".join(row) + "\n")
        for line in comments or ():
            fh.write(f"# {line}\n")
