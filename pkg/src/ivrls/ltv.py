"""Interval-valued estimation under bounded parameter drift.

A slowly varying parameter theta(t) = theta(t-1) + delta(t), with each
increment delta(t) confined to a known box, turns the estimation-error
recursion into

    err(t) = A(t) err(t-1) + B(t) w(t),
    B(t) = [q(t), -A(t)]  (n x (n+1)),   w(t) = (v(t), delta(t)),

because this step's target is theta(t-1) + delta(t): the increment
shifts the previous error by -delta(t) before the measurement update,
and A(t) acts on that shift.  Everything else from the
constant-parameter machinery carries over with the scalar noise term
q(t) v(t) replaced by the (n+1)-column block B(t) w(t): same center
recursion plus a drift-center feedthrough A(t) c_delta(t), same exact
and windowed radius formulas with |Phi(t,k) B(k)| acting on the stacked
radii (r_v(k), r_delta(k)).

The monotonic post-processor cannot intersect boxes across time
directly (the parameter moves), so the running bounds are first
translated by the admissible drift before intersecting:

    p_lo(t) = max(p_lo(t-1) + delta_lo(t), raw_lo(t))
    p_hi(t) = min(p_hi(t-1) + delta_hi(t), raw_hi(t))

with the same freeze-and-flag policy on empty intersections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .intervals import IntervalVector, _vector
from .lti import (
    EstimatorConfig,
    IntervalEstimate,
    _RadiusRecursion,
    _box_hull_of_image,
    _replay_transitions,
    _transition_products,
    _ORACLE_MAX_VERTEX_DIM,
)
from .rls import RlsConfig, RlsState, rls_init, rls_step

__all__ = ["DriftBounds", "LtvIntervalEstimator", "ltv_vertex_oracle"]


@dataclass(frozen=True, eq=False)
class DriftBounds:
    """Per-step box for the parameter increment delta(t)."""

    center: np.ndarray
    radius: np.ndarray

    def __post_init__(self):
        c = _vector(self.center, "center").copy()
        r = _vector(self.radius, "radius").copy()
        if c.shape != r.shape:
            raise ValueError(
                f"dimension mismatch: center has {c.shape[0]} components, "
                f"radius has {r.shape[0]}"
            )
        if np.any(r < 0) or not np.all(np.isfinite(c)) or not np.all(np.isfinite(r)):
            raise ValueError("drift radius must be finite and nonnegative")
        c.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.radius

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.radius

    @classmethod
    def symmetric(cls, radius) -> "DriftBounds":
        r = _vector(radius, "radius")
        return cls(np.zeros_like(r), r)


class LtvIntervalEstimator:
    """Streaming interval estimator for a parameter vector with bounded drift.

    Identical machinery to the constant-parameter estimator except that
    each propagated per-step term is the n x (n+1) block B(k) = [q, -A]
    carrying both the noise and the drift box, and the monotonic bounds
    are drift-translated before intersection.
    """

    def __init__(self, config: EstimatorConfig):
        self.config = config
        n = config.rls.n
        self._rls_state = rls_init(config.rls)
        self._center = config.theta_prior.center
        self._engine = _RadiusRecursion(
            n,
            config.theta_prior.radius,
            config.m,
            n + 1,
            config.max_exact_horizon,
        )
        self._mono_lower = config.theta_prior.lower.copy()
        self._mono_upper = config.theta_prior.upper.copy()
        self._inconsistent = False

    @property
    def t(self) -> int:
        return self._rls_state.t

    @property
    def rls_state(self) -> RlsState:
        return self._rls_state

    @property
    def inconsistent(self) -> bool:
        return self._inconsistent

    def step(self, x, y, v_low, v_high, drift: DriftBounds) -> IntervalEstimate:
        """Process one sample; drift bounds the increment theta(t) - theta(t-1)."""
        v_low = float(v_low)
        v_high = float(v_high)
        if not (np.isfinite(v_low) and np.isfinite(v_high)):
            raise ValueError(f"noise bounds must be finite, got [{v_low}, {v_high}]")
        if v_low > v_high:
            raise ValueError(f"noise bound inversion: [{v_low}, {v_high}]")
        if drift.dim != self.config.rls.n:
            raise ValueError(
                f"drift has {drift.dim} components, expected {self.config.rls.n}"
            )
        c_v = 0.5 * (v_low + v_high)
        r_v = 0.5 * (v_high - v_low)
        state = rls_step(self._rls_state, x, y)
        self._rls_state = state
        A = state.last_A
        q = state.last_q
        self._center = A @ self._center + q * (float(y) - c_v) + A @ drift.center
        term = np.concatenate([q[:, None], -A], axis=1)
        term_radius = np.concatenate([[r_v], drift.radius])
        radius = self._engine.step(A, term, term_radius)
        raw = IntervalVector(self._center - radius, self._center + radius)
        refined = self._refine(raw, drift) if self.config.monotonic else None
        return IntervalEstimate(
            t=state.t,
            point=state.theta.copy(),
            raw=raw,
            refined=refined,
            inconsistent=self._inconsistent,
        )

    def _refine(self, raw: IntervalVector, drift: DriftBounds) -> IntervalVector:
        if not self._inconsistent:
            lo = np.maximum(self._mono_lower + drift.lower, raw.lower)
            hi = np.minimum(self._mono_upper + drift.upper, raw.upper)
            if np.any(lo > hi):
                self._inconsistent = True
            else:
                self._mono_lower, self._mono_upper = lo, hi
        return IntervalVector(self._mono_lower, self._mono_upper)


def ltv_vertex_oracle(
    X,
    y,
    v_bounds,
    drifts,
    theta_prior: IntervalVector,
    rls_config: RlsConfig,
    method: str = "auto",
) -> IntervalVector:
    """Reference for the exact drift-aware interval estimate at t = len(X).

    Assembles the affine error map with blocks Phi(t,k) B(k),
    B(k) = [q(k), -A(k)], acting on z = (err(0), v(1), delta(1), ...,
    v(t), delta(t)), with transition products computed directly.

    method: "enumerate" hulls the image of every vertex (dimension
    n + t(1+n) capped at 20); "rowsign" evaluates the exact hull of the
    assembled affine map componentwise (center M c, radius |M| r), which
    agrees with enumeration for this map class at any size; "auto" picks
    enumeration when the vertex count is small.
    """
    n = rls_config.n
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.size == 0:
        X = X.reshape(0, n)
    if X.shape[1] != n:
        raise ValueError(f"X must have {n} columns, got {X.shape[1]}")
    t = X.shape[0]
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape[0] != t:
        raise ValueError(f"y must have {t} entries, got {y.shape[0]}")
    vb = np.asarray(v_bounds, dtype=float).reshape(t, 2) if t else np.zeros((0, 2))
    if np.any(vb[:, 0] > vb[:, 1]):
        raise ValueError("noise bound inversion in v_bounds")
    drifts = list(drifts)
    if len(drifts) != t:
        raise ValueError(f"need {t} drift boxes, got {len(drifts)}")
    if theta_prior.dim != n:
        raise ValueError(
            f"theta_prior has {theta_prior.dim} components, expected {n}"
        )
    dim = n + t * (1 + n)
    if method == "auto":
        method = "enumerate" if dim <= 16 else "rowsign"
    if method not in ("enumerate", "rowsign"):
        raise ValueError(f"unknown method {method!r}")
    if method == "enumerate" and dim > _ORACLE_MAX_VERTEX_DIM:
        raise ValueError(
            f"vertex enumeration over {dim} dimensions refused "
            f"(cap {_ORACLE_MAX_VERTEX_DIM})"
        )

    theta_t, As, qs = _replay_transitions(rls_config, X, y)
    phis = _transition_products(As, n)
    columns = [phis[0]]
    z_center = [rls_config.theta0 - theta_prior.center]
    z_radius = [theta_prior.radius]
    for k in range(1, t + 1):
        B = np.concatenate([qs[k - 1][:, None], -As[k - 1]], axis=1)
        columns.append(phis[k] @ B)
        d = drifts[k - 1]
        z_center.append(np.concatenate([[0.5 * (vb[k - 1, 0] + vb[k - 1, 1])], d.center]))
        z_radius.append(np.concatenate([[0.5 * (vb[k - 1, 1] - vb[k - 1, 0])], d.radius]))
    M = np.concatenate(columns, axis=1)
    center = np.concatenate(z_center)
    radius = np.concatenate(z_radius)

    if method == "enumerate":
        err_lo, err_hi = _box_hull_of_image(M, center, radius)
    else:
        mid = M @ center
        rad = np.abs(M) @ radius
        err_lo, err_hi = mid - rad, mid + rad
    return IntervalVector(theta_t - err_hi, theta_t - err_lo)
