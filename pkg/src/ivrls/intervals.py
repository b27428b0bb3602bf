"""Axis-aligned boxes in R^n and the operations the estimators need.

A box is stored by its bound pair (lower, upper).  The equivalent
(center, radius) view, with center = (upper + lower) / 2 and
radius = (upper - lower) / 2, is derived on demand; radius is always
nonnegative by construction.  All operations are pure and never mutate
their inputs, and the stored arrays are marked read-only so instances
can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "IntervalVector",
    "IntersectionResult",
    "from_bounds",
    "from_center_radius",
    "tightest_image",
    "intersect",
    "translate",
    "contains",
]


def _vector(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class IntervalVector:
    """Closed box {x : lower <= x <= upper}, componentwise."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = _vector(self.lower, "lower").copy()
        hi = _vector(self.upper, "upper").copy()
        if lo.shape != hi.shape:
            raise ValueError(
                f"dimension mismatch: lower has {lo.shape[0]} components, "
                f"upper has {hi.shape[0]}"
            )
        bad = np.flatnonzero(~(lo <= hi))
        if bad.size:
            raise ValueError(
                f"bound inversion (lower > upper, or non-finite bound) at "
                f"components {bad.tolist()}"
            )
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.upper + self.lower)

    @property
    def radius(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, point, slack: float = 0.0) -> bool:
        return contains(self, point, slack)

    def translate(self, offset) -> "IntervalVector":
        return translate(self, offset)

    def __repr__(self) -> str:
        pairs = ", ".join(
            f"[{lo:g}, {hi:g}]" for lo, hi in zip(self.lower, self.upper)
        )
        return f"IntervalVector({pairs})"


def from_bounds(lower, upper) -> IntervalVector:
    """Box from its bound pair; rejects lower > upper in any component."""
    return IntervalVector(lower, upper)


def from_center_radius(center, radius) -> IntervalVector:
    """Box from its center/radius view; a negative radius entry is a bound inversion."""
    c = _vector(center, "center")
    r = _vector(radius, "radius")
    if c.shape != r.shape:
        raise ValueError(
            f"dimension mismatch: center has {c.shape[0]} components, "
            f"radius has {r.shape[0]}"
        )
    return IntervalVector(c - r, c + r)


def tightest_image(M, box: IntervalVector) -> IntervalVector:
    """Smallest box containing {M z : z in box}.

    For a fixed matrix the image of a box under z -> M z has the exact
    componentwise hull with center M c and radius |M| r, where (c, r) is
    the center/radius view of the input and |M| is the entrywise absolute
    value.  Every bound is attained at some vertex of the input box.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"M must be a matrix, got shape {M.shape}")
    if M.shape[1] != box.dim:
        raise ValueError(
            f"dimension mismatch: M has {M.shape[1]} columns, box has "
            f"{box.dim} components"
        )
    center = M @ box.center
    radius = np.abs(M) @ box.radius
    return IntervalVector(center - radius, center + radius)


@dataclass(frozen=True, eq=False)
class IntersectionResult:
    """Componentwise intersection with emptiness reported, not raised."""

    lower: np.ndarray
    upper: np.ndarray
    empty_components: np.ndarray

    @property
    def is_empty(self) -> bool:
        return self.empty_components.size > 0

    def box(self) -> IntervalVector:
        if self.is_empty:
            raise ValueError(
                f"intersection is empty in components "
                f"{self.empty_components.tolist()}"
            )
        return IntervalVector(self.lower, self.upper)


def intersect(a: IntervalVector, b: IntervalVector) -> IntersectionResult:
    """Componentwise intersection of two boxes of equal dimension."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    lo = np.maximum(a.lower, b.lower)
    hi = np.minimum(a.upper, b.upper)
    return IntersectionResult(lo, hi, np.flatnonzero(lo > hi))


def translate(box: IntervalVector, offset) -> IntervalVector:
    """Shift a box by a fixed vector; radius is unchanged."""
    d = _vector(offset, "offset")
    if d.shape[0] != box.dim:
        raise ValueError(
            f"dimension mismatch: offset has {d.shape[0]} components, box has "
            f"{box.dim}"
        )
    return IntervalVector(box.lower + d, box.upper + d)


def contains(box: IntervalVector, point, slack: float = 0.0) -> bool:
    """Membership test with optional nonnegative slack on both bounds."""
    p = _vector(point, "point")
    if p.shape[0] != box.dim:
        raise ValueError(
            f"dimension mismatch: point has {p.shape[0]} components, box has "
            f"{box.dim}"
        )
    if slack < 0:
        raise ValueError(f"slack must be nonnegative, got {slack}")
    return bool(np.all(box.lower - slack <= p) and np.all(p <= box.upper + slack))
