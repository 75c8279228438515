"""Pointwise reaction flow ``z' = F(t, z)`` with blow-up bracketing.

The flow ``N(t, t0, u0)`` is integrated independently at each grid point
with classical RK4 on a fixed substep lattice. A substep whose result
grows by more than ``max_substep_growth`` (relative to ``max(|z|, 1)``)
is halved recursively, at most ``max_refinements`` times. A point is
declared blown up when its norm passes ``blowup_threshold``, turns
non-finite, or still grows too fast at the finest refinement level; the
reported time is the midpoint of the substep that brackets the event.

Every point's integration depends only on that point's data, so the
result is bitwise independent of how points are partitioned across
workers (see :func:`flow`).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpError, OptionsError, ReactionError
from .grid import Field, point_norms

__all__ = [
    "KINDS",
    "ReactionSpec",
    "OdeOptions",
    "FlowOutcome",
    "eval_reaction",
    "lipschitz_bound",
    "flow",
    "flow_difference_bound_check",
    "GronwallReport",
    "worker_count",
]

KINDS = ("quadratic", "logistic", "fitzhugh_nagumo", "polynomial", "modulated")
THREADS_ENV = "FRACSPLIT_THREADS"
_MIN_CHUNK = 2048


@dataclass(frozen=True)
class ReactionSpec:
    """Closed catalogue of pointwise nonlinearities.

    ``modulated`` multiplies the autonomous reaction ``inner`` by
    ``1 + alpha sin(omega t)``; its ``params`` are ``(alpha, omega)``.
    """

    kind: str
    params: tuple = ()
    inner: ReactionSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        p = self.params
        if self.kind not in KINDS:
            raise ReactionError(f"unknown reaction kind {self.kind!r}")
        if self.kind != "modulated" and self.inner is not None:
            raise ReactionError("only 'modulated' wraps an inner reaction")
        if self.kind == "quadratic":
            if p:
                raise ReactionError("quadratic takes no params")
        elif self.kind == "logistic":
            if len(p) != 2 or p[0] <= 0 or p[1] <= 0:
                raise ReactionError("logistic needs params (r > 0, K > 0)")
        elif self.kind == "fitzhugh_nagumo":
            if len(p) != 4 or p[1] <= 0:
                raise ReactionError("fitzhugh_nagumo needs params (I, eps > 0, a, b)")
        elif self.kind == "polynomial":
            if not 1 <= len(p) <= 7:
                raise ReactionError("polynomial needs 1 to 7 coefficients c_0..c_deg (deg ≤ 6)")
        elif self.kind == "modulated":
            if len(p) != 2 or not 0 <= p[0] < 1:
                raise ReactionError("modulated needs params (alpha in [0,1), omega)")
            if self.inner is None or self.inner.kind == "modulated":
                raise ReactionError("modulated needs a non-modulated inner reaction")

    @property
    def component_count(self) -> int:
        if self.kind == "fitzhugh_nagumo":
            return 2
        if self.kind == "modulated":
            return self.inner.component_count
        return 1

    def __call__(self, t: float, z: np.ndarray) -> np.ndarray:
        """Vectorised ``F(t, z)`` for ``z`` of shape ``(..., m)``."""
        p = self.params
        if self.kind == "quadratic":
            return z * z
        if self.kind == "logistic":
            r, cap = p
            return r * z * (1.0 - z / cap)
        if self.kind == "fitzhugh_nagumo":
            drive, eps, a, b = p
            v, w = z[..., 0], z[..., 1]
            out = np.empty_like(z)
            out[..., 0] = v - v * v * v / 3.0 - w + drive
            out[..., 1] = eps * (v + a - b * w)
            return out
        if self.kind == "polynomial":
            # Horner from the top coefficient
            acc = np.full_like(z, p[-1])
            for c in reversed(p[:-1]):
                acc = acc * z + c
            return acc
        alpha, omega = p
        return (1.0 + alpha * math.sin(omega * t)) * self.inner(t, z)


def eval_reaction(spec: ReactionSpec, t: float, z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.shape[0] != spec.component_count:
        raise ReactionError(
            f"state vector of length {spec.component_count} expected, got shape {z.shape}"
        )
    return spec(t, z)


def lipschitz_bound(spec: ReactionSpec, radius: float, horizon: float) -> float:
    """Certified Lipschitz constant of ``F(t, .)`` on ``{|z| <= R}`` for ``t`` in ``[0, T]``.

    Bounds the Jacobian operator norm analytically per kind. For
    FitzHugh-Nagumo the Frobenius norm is used as the operator-norm bound.
    """
    if radius <= 0 or horizon <= 0:
        raise ValueError("radius and horizon must be positive")
    R = float(radius)
    p = spec.params
    if spec.kind == "quadratic":
        return 2.0 * R
    if spec.kind == "logistic":
        r, cap = p
        return r * (1.0 + 2.0 * R / cap)
    if spec.kind == "fitzhugh_nagumo":
        _, eps, _, b = p
        d11 = max(1.0, R * R - 1.0)
        return math.sqrt(d11 * d11 + 1.0 + eps * eps * (1.0 + b * b))
    if spec.kind == "polynomial":
        return float(sum(k * abs(c) * R ** (k - 1) for k, c in enumerate(p) if k > 0))
    alpha, _ = p
    return (1.0 + alpha) * lipschitz_bound(spec.inner, radius, horizon)


@dataclass(frozen=True)
class OdeOptions:
    substeps_per_unit_time: int = 1000
    blowup_threshold: float = 1e8
    max_substep_growth: float = 10.0
    max_refinements: int = 20

    def __post_init__(self):
        if int(self.substeps_per_unit_time) != self.substeps_per_unit_time or self.substeps_per_unit_time < 1:
            raise OptionsError("substeps_per_unit_time must be an integer ≥ 1")
        if not self.blowup_threshold > 0:
            raise OptionsError("blowup_threshold must be positive")
        if not self.max_substep_growth > 1:
            raise OptionsError("max_substep_growth must exceed 1")
        if self.max_refinements < 0:
            raise OptionsError("max_refinements must be ≥ 0")


@dataclass(frozen=True, eq=False)
class FlowOutcome:
    status: str
    field: Field | None = None
    blowup_time_estimate: float = float("nan")
    peak_norm: float = 0.0
    # set by callers that integrate several coupled copies (e.g. "v", "w")
    component: str | None = None

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    def unwrap(self) -> Field:
        if not self.completed:
            raise BlowUpError(
                f"flow blew up near t = {self.blowup_time_estimate:.6g}",
                self.blowup_time_estimate,
                self.component,
            )
        return self.field


def _rk4(spec, t, dt, z):
    k1 = spec(t, z)
    k2 = spec(t + 0.5 * dt, z + (0.5 * dt) * k1)
    k3 = spec(t + 0.5 * dt, z + (0.5 * dt) * k2)
    k4 = spec(t + dt, z + dt * k3)
    return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _advance(spec, t, dt, z, opts, level):
    """One (possibly refined) substep. Returns (new z, blow-up time per point or nan)."""
    with np.errstate(over="ignore", invalid="ignore"):
        z1 = _rk4(spec, t, dt, z)
        n0 = point_norms(z)
        n1 = point_norms(z1)
    blown = np.full(z.shape[0], np.nan)
    runaway = ~np.isfinite(n1) | (n1 > opts.max_substep_growth * np.maximum(n0, 1.0))
    if runaway.any():
        if level < opts.max_refinements:
            idx = np.flatnonzero(runaway)
            half = 0.5 * dt
            za, ba = _advance(spec, t, half, z[idx], opts, level + 1)
            alive = np.isnan(ba)
            zb = za.copy()
            bb = ba.copy()
            if alive.any():
                zb[alive], bb[alive] = _advance(spec, t + half, half, za[alive], opts, level + 1)
            z1[idx] = zb
            blown[idx] = bb
            n1 = point_norms(z1)
        else:
            blown[runaway] = t + 0.5 * dt
    late = np.isnan(blown) & ~(n1 <= opts.blowup_threshold)
    blown[late] = t + 0.5 * dt
    return z1, blown


def _substep_count(duration, opts):
    n = math.ceil(duration * opts.substeps_per_unit_time - 1e-9)
    return max(1, n)


def _flow_block(spec, t, t0, z, opts):
    """Integrate a block of points; returns (z, blow-up time or nan, peak norm)."""
    duration = t - t0
    n_sub = _substep_count(duration, opts)
    dt = duration / n_sub
    peak = float(np.max(point_norms(z))) if z.size else 0.0
    for i in range(n_sub):
        z, blown = _advance(spec, t0 + i * dt, dt, z, opts, 0)
        if not np.all(np.isnan(blown)):
            return z, float(np.nanmin(blown)), peak
        peak = max(peak, float(np.max(point_norms(z))))
    return z, float("nan"), peak


def worker_count() -> int:
    """Worker cap from ``FRACSPLIT_THREADS`` (0 or unset = one per CPU)."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise OptionsError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise OptionsError(f"{THREADS_ENV} must be ≥ 0")
    return n if n > 0 else (os.cpu_count() or 1)


def flow(
    spec: ReactionSpec,
    t: float,
    t0: float,
    u0: Field,
    opts: OdeOptions | None = None,
    workers: int | None = None,
) -> FlowOutcome:
    """Solve ``z(t) = z0 + int_{t0}^t F(s, z(s)) ds`` at every grid point.

    Points are split into contiguous chunks across ``workers`` threads
    (default: :func:`worker_count`); the outcome is bitwise identical for
    any partition. On blow-up the earliest bracket midpoint over all points
    is reported.
    """
    opts = opts or OdeOptions()
    if not isinstance(opts, OdeOptions):
        raise OptionsError("opts must be OdeOptions")
    if t < t0:
        raise ValueError(f"flow needs t ≥ t0, got t={t}, t0={t0}")
    if u0.grid.components != spec.component_count:
        raise ReactionError(
            f"reaction {spec.kind!r} acts on {spec.component_count} components, field has {u0.grid.components}"
        )
    if t == t0:
        return FlowOutcome("completed", u0.at(t), peak_norm=float(np.max(point_norms(u0.values))))

    z0 = np.array(u0.values)
    n = z0.shape[0]
    workers = worker_count() if workers is None else max(1, int(workers))
    n_chunks = min(workers, max(1, n // _MIN_CHUNK))
    if n_chunks == 1:
        parts = [_flow_block(spec, t, t0, z0, opts)]
    else:
        bounds = np.linspace(0, n, n_chunks + 1).astype(int)
        with ThreadPoolExecutor(max_workers=n_chunks) as pool:
            parts = list(
                pool.map(
                    lambda ab: _flow_block(spec, t, t0, z0[ab[0] : ab[1]], opts),
                    zip(bounds[:-1], bounds[1:]),
                )
            )
    peak = max(p[2] for p in parts)
    times = [p[1] for p in parts if not math.isnan(p[1])]
    if times:
        return FlowOutcome("blew_up", blowup_time_estimate=min(times), peak_norm=peak)
    z = np.concatenate([p[0] for p in parts], axis=0)
    return FlowOutcome("completed", Field(u0.grid, z, t), peak_norm=peak)


@dataclass(frozen=True, eq=False)
class GronwallReport:
    holds: bool
    lipschitz: float
    radius: float
    lhs: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)

    @property
    def worst_margin(self) -> float:
        """Smallest ``rhs - lhs`` over the grid (negative means violated)."""
        return float(np.min(self.rhs - self.lhs))


def flow_difference_bound_check(
    spec: ReactionSpec,
    t: float,
    t0: float,
    u0: Field,
    u0_other: Field,
    opts: OdeOptions | None = None,
    slack: float = 1e-8,
) -> GronwallReport:
    """Check ``|N u0 - N u0'|(x) <= exp(L (t - t0)) |u0 - u0'|(x) + slack`` pointwise.

    ``L`` is :func:`lipschitz_bound` at the largest norm met on either
    trajectory (sampled at substep ends, inflated by 1e-6 relative).
    """
    a = flow(spec, t, t0, u0, opts)
    b = flow(spec, t, t0, u0_other, opts)
    for out in (a, b):
        out.unwrap()
    radius = max(a.peak_norm, b.peak_norm, 1e-300) * (1.0 + 1e-6)
    lip = lipschitz_bound(spec, radius, max(t, 1e-300))
    lhs = point_norms(a.field.values - b.field.values)
    rhs = math.exp(lip * (t - t0)) * point_norms(u0.values - u0_other.values) + slack
    return GronwallReport(bool(np.all(lhs <= rhs)), lip, radius, lhs, rhs)
