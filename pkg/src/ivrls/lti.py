"""Interval-valued estimation around the RLS identifier, constant parameters.

For y(t) = x(t)' theta + v(t) with v(t) in a known interval, the RLS
estimation error err(t) = theta(t) - theta obeys

    err(t) = A(t) err(t-1) + q(t) v(t),      A(t) = I - q(t) x(t)',

so unrolling from the prior gives

    err(t) = Phi(t,0) err(0) + sum_{k=1}^{t} Phi(t,k) q(k) v(k),

with state-transition products Phi(t,k) = A(t) ... A(k+1).  Pushing the
prior box and the noise intervals through this affine map componentwise
yields the exact hull: center from the recursion

    c(t) = A(t) c(t-1) + q(t) (y(t) - c_v(t)),

radius r(t) = |Phi(t,0)| r(0) + sum_k |Phi(t,k) q(k)| r_v(k).  Absolute
values are taken on fully formed products only; |A||B| >= |AB|
entrywise, so taking them earlier would only widen the box.  Seeding the
center recursion at the prior center makes c(t) = theta(t) minus the
center of the error box, so [c(t) - r(t), c(t) + r(t)] is itself the
guaranteed parameter box.

Exact mode keeps every propagated term, so its per-step cost grows
linearly with t.  Windowed mode (truncation horizon m) restarts the
convolution every step from the stored radius m steps back:

    r_m(t) = |Phi(t,t-m)| r_m(t-m) + sum_{k=t-m+1}^{t} |Phi(t,k) q(k)| r_v(k)

for t > m (exact formula below that).  The windowed radius dominates the
exact one componentwise, so soundness is preserved at bounded cost; the
excitation diagnostics certify boundedness of the recursion itself once
m exceeds their threshold.

An optional monotonic post-processor intersects each instantaneous box
with the running one (valid because a constant parameter lies in all of
them), giving componentwise nonincreasing widths.  If an intersection
comes up empty the declared noise bounds were violated; the refined box
freezes at the last consistent value and every subsequent estimate
carries an inconsistency flag, while the raw pipeline keeps running.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .intervals import IntervalVector, _vector
from .rls import RlsConfig, RlsState, rls_init, rls_step

__all__ = [
    "EstimatorConfig",
    "IntervalEstimate",
    "LtiIntervalEstimator",
    "monotonic_update",
    "vertex_oracle",
]

_ORACLE_MAX_VERTEX_DIM = 20
_ORACLE_CHUNK = 1 << 14


@dataclass(frozen=True, eq=False)
class EstimatorConfig:
    """Identifier settings, prior parameter box, and estimator options.

    m is the truncation horizon of the radius recursion; None keeps the
    full convolution (exact mode).  Any m >= 1 is accepted, but very
    short windows (m = 1 in particular) carry no boundedness guarantee:
    see asymptotic_radius_bound for the certified threshold.
    max_exact_horizon caps how long an exact-mode run may get before the
    linearly growing state is refused.
    """

    rls: RlsConfig
    theta_prior: IntervalVector
    m: int | None = None
    monotonic: bool = False
    max_exact_horizon: int = 100_000

    def __post_init__(self):
        if self.theta_prior.dim != self.rls.n:
            raise ValueError(
                f"theta_prior has {self.theta_prior.dim} components but the "
                f"identifier has {self.rls.n} parameters"
            )
        if self.m is not None:
            m = int(self.m)
            if m < 1:
                raise ValueError(f"m must be >= 1, got {self.m}")
            object.__setattr__(self, "m", m)
        if int(self.max_exact_horizon) < 1:
            raise ValueError(
                f"max_exact_horizon must be >= 1, got {self.max_exact_horizon}"
            )


@dataclass(frozen=True, eq=False)
class IntervalEstimate:
    """One time step of estimator output.

    raw is the propagated box; refined is the monotonic intersection
    (None when disabled).  Once inconsistent is set, refined is frozen at
    the last consistent box and stays flagged.
    """

    t: int
    point: np.ndarray
    raw: IntervalVector
    refined: IntervalVector | None
    inconsistent: bool


def monotonic_update(bounds, instantaneous: IntervalVector):
    """One application of the running-intersection recursion.

    bounds is the (lower, upper) pair carried so far.  Returns
    (lower, upper, inverted) with the componentwise max of lowers and min
    of uppers, and the indices where the result is empty (lower > upper).
    The caller decides what to do on inversion; this function never
    raises for it.
    """
    lo_prev, hi_prev = bounds
    lo = np.maximum(lo_prev, instantaneous.lower)
    hi = np.minimum(hi_prev, instantaneous.upper)
    return lo, hi, np.flatnonzero(lo > hi)


class _RadiusRecursion:
    """Propagates the convolution terms of the radius formula.

    Exact mode (window=None) carries Phi(t,0) and every term
    Phi(t,k) C(k): at time t that is one n x n matrix plus t stored
    term blocks of width `term_width`.  Windowed mode keeps ring buffers
    of the last `window` term blocks, the staggered products
    Phi(t, t-j) for j = 1..window, and the last `window` radius vectors,
    anchoring each step at |Phi(t, t-window)| r(t-window).
    """

    def __init__(self, n, prior_radius, window, term_width, max_exact_horizon):
        self.n = n
        self.window = window
        self.term_width = term_width
        self.max_exact_horizon = max_exact_horizon
        self.t = 0
        self.prior_radius = np.asarray(prior_radius, dtype=float).copy()
        self.phi_t0 = np.eye(n)
        self.terms = np.zeros((n, 0))
        self.term_radii = np.zeros(0)
        if window is not None:
            # stagger[j-1] = Phi(t, t-j); radius_ring[0] = r(t-window) once full
            self.stagger = np.zeros((0, n, n))
            self.radius_ring = deque(maxlen=window)
        self.last_radius = self.prior_radius.copy()

    @property
    def stored_terms(self) -> int:
        return self.terms.shape[1] // self.term_width

    def step(self, A, term, term_radius) -> np.ndarray:
        m = self.window
        w = self.term_width
        self.t += 1
        if m is None and self.t > self.max_exact_horizon:
            raise RuntimeError(
                f"exact-mode horizon cap {self.max_exact_horizon} exceeded; "
                "use a truncation window for long runs"
            )
        if m is not None:
            keep = self.stagger if len(self.stagger) < m else self.stagger[:-1]
            self.stagger = np.concatenate([A[None], np.matmul(A, keep)])
        propagated = A @ self.terms
        if m is None or self.t <= m:
            self.phi_t0 = A @ self.phi_t0
            self.terms = np.concatenate([propagated, term], axis=1)
            self.term_radii = np.concatenate([self.term_radii, term_radius])
            radius = np.abs(self.phi_t0) @ self.prior_radius
        else:
            self.terms = np.concatenate([propagated[:, w:], term], axis=1)
            self.term_radii = np.concatenate([self.term_radii[w:], term_radius])
            radius = np.abs(self.stagger[-1]) @ self.radius_ring[0]
        radius = radius + np.abs(self.terms) @ self.term_radii
        if m is not None:
            self.radius_ring.append(radius)
        self.last_radius = radius
        return radius


class LtiIntervalEstimator:
    """Streaming interval estimator for a constant parameter vector."""

    def __init__(self, config: EstimatorConfig):
        self.config = config
        n = config.rls.n
        self._rls_state = rls_init(config.rls)
        self._center = config.theta_prior.center
        self._engine = _RadiusRecursion(
            n,
            config.theta_prior.radius,
            config.m,
            1,
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

    def _noise_interval(self, v_low, v_high):
        v_low = float(v_low)
        v_high = float(v_high)
        if not (np.isfinite(v_low) and np.isfinite(v_high)):
            raise ValueError(f"noise bounds must be finite, got [{v_low}, {v_high}]")
        if v_low > v_high:
            raise ValueError(f"noise bound inversion: [{v_low}, {v_high}]")
        return 0.5 * (v_low + v_high), 0.5 * (v_high - v_low)

    def step(self, x, y, v_low, v_high) -> IntervalEstimate:
        """Process one sample; the noise at this step lies in [v_low, v_high]."""
        c_v, r_v = self._noise_interval(v_low, v_high)
        state = rls_step(self._rls_state, x, y)
        self._rls_state = state
        A = state.last_A
        q = state.last_q
        self._center = A @ self._center + q * (float(y) - c_v)
        radius = self._engine.step(A, q[:, None], np.array([r_v]))
        raw = IntervalVector(self._center - radius, self._center + radius)
        refined = self._refine(raw) if self.config.monotonic else None
        return IntervalEstimate(
            t=state.t,
            point=state.theta.copy(),
            raw=raw,
            refined=refined,
            inconsistent=self._inconsistent,
        )

    def _refine(self, raw: IntervalVector) -> IntervalVector:
        if not self._inconsistent:
            lo, hi, inverted = monotonic_update(
                (self._mono_lower, self._mono_upper), raw
            )
            if inverted.size:
                self._inconsistent = True
            else:
                self._mono_lower, self._mono_upper = lo, hi
        return IntervalVector(self._mono_lower, self._mono_upper)


def _sign_patterns(dim: int, start: int, count: int) -> np.ndarray:
    idx = np.arange(start, start + count, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(dim)) & 1
    return np.where(bits == 1, 1.0, -1.0)


def _box_hull_of_image(M: np.ndarray, center: np.ndarray, radius: np.ndarray):
    """Min/max of M z over all vertices of the box (center, radius).

    Enumerates all 2^d sign patterns in chunks; d is capped by the
    caller.  Returns (lo, hi) of the image hull.
    """
    d = center.shape[0]
    lo = np.full(M.shape[0], np.inf)
    hi = np.full(M.shape[0], -np.inf)
    total = 1 << d
    for start in range(0, total, _ORACLE_CHUNK):
        count = min(_ORACLE_CHUNK, total - start)
        signs = _sign_patterns(d, start, count)
        images = (center + signs * radius) @ M.T
        lo = np.minimum(lo, images.min(axis=0))
        hi = np.maximum(hi, images.max(axis=0))
    return lo, hi


def _replay_transitions(rls_config: RlsConfig, X: np.ndarray, y: np.ndarray):
    """Run the identifier over the data, returning (theta_t, A's, q's)."""
    state = rls_init(rls_config)
    As = []
    qs = []
    for k in range(X.shape[0]):
        state = rls_step(state, X[k], y[k])
        As.append(state.last_A)
        qs.append(state.last_q)
    return state.theta, As, qs


def _transition_products(As: list[np.ndarray], n: int) -> list[np.ndarray]:
    """Phi(t, k) = A(t) ... A(k+1) for k = 0..t, built by direct right-to-left
    accumulation rather than the estimator's incremental left products."""
    t = len(As)
    phis = [np.eye(n)] * (t + 1)
    for k in range(t - 1, -1, -1):
        phis[k] = phis[k + 1] @ As[k]
    return phis


def vertex_oracle(
    X, y, v_bounds, theta_prior: IntervalVector, rls_config: RlsConfig
) -> IntervalVector:
    """Brute-force reference for the exact interval estimate at t = len(X).

    Assembles the full affine error map

        err(t) = [Phi(t,0), Phi(t,1) q(1), ..., Phi(t,t) q(t)] z,
        z = (err(0), v(1), ..., v(t)),

    with the transition products computed directly, then enumerates every
    vertex of the prior-error x noise box and hulls the images.  The
    returned box is theta(t) - hull, the guaranteed parameter box.
    Enumeration is exponential in n + t, so n + t <= 20 is enforced.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n = rls_config.n
    if X.size == 0:
        X = X.reshape(0, n)
    if X.shape[1] != n:
        raise ValueError(f"X must have {n} columns, got {X.shape[1]}")
    t = X.shape[0]
    if n + t > _ORACLE_MAX_VERTEX_DIM:
        raise ValueError(
            f"vertex enumeration over {n + t} dimensions refused "
            f"(cap {_ORACLE_MAX_VERTEX_DIM})"
        )
    y = np.atleast_1d(np.asarray(y, dtype=float))
    vb = np.asarray(v_bounds, dtype=float).reshape(t, 2) if t else np.zeros((0, 2))
    if y.shape[0] != t:
        raise ValueError(f"y must have {t} entries, got {y.shape[0]}")
    if np.any(vb[:, 0] > vb[:, 1]):
        raise ValueError("noise bound inversion in v_bounds")
    if theta_prior.dim != n:
        raise ValueError(
            f"theta_prior has {theta_prior.dim} components, expected {n}"
        )

    theta_t, As, qs = _replay_transitions(rls_config, X, y)
    phis = _transition_products(As, n)
    columns = [phis[0]] + [(phis[k] @ qs[k - 1])[:, None] for k in range(1, t + 1)]
    M = np.concatenate(columns, axis=1)

    # err(0) = theta(0) - theta ranges over theta(0) - prior, reversed.
    z_center = np.concatenate(
        [rls_config.theta0 - theta_prior.center, 0.5 * (vb[:, 0] + vb[:, 1])]
    )
    z_radius = np.concatenate([theta_prior.radius, 0.5 * (vb[:, 1] - vb[:, 0])])
    err_lo, err_hi = _box_hull_of_image(M, z_center, z_radius)
    return IntervalVector(theta_t - err_hi, theta_t - err_lo)
