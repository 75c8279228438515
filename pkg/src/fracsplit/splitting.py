"""Operator splitting of diffusion ``S(h)`` and reaction flow ``N``.

Variants
--------
``lie_paper``
    ``V = S(h) U_k``, ``U_{k+1} = N(kh + h, kh + h/2, V)``: the recurrence
    taken literally, whose reaction stage covers only ``h/2`` of time.
``lie_full``
    ``V = S(h) U_k``, ``U_{k+1} = N(kh + h, kh, V)`` (default).
``strang``
    ``S(h/2)``, then ``N(kh + h, kh, .)``, then ``S(h/2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpError, OptionsError
from .grid import Field, point_norms
from .kernel import DiffusionParams, apply_semigroup
from .reaction import FlowOutcome, OdeOptions, ReactionSpec, flow

__all__ = [
    "VARIANTS",
    "SplitScheme",
    "SolveReport",
    "OrderFit",
    "stage_plan",
    "steps_for",
    "step",
    "evolve",
    "reference_solution",
    "estimate_order",
]

VARIANTS = ("lie_paper", "lie_full", "strang")


@dataclass(frozen=True)
class SplitScheme:
    variant: str = "lie_full"
    h: float = 1e-3

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise OptionsError(f"unknown splitting variant {self.variant!r}; expected one of {VARIANTS}")
        if not (np.isfinite(self.h) and self.h > 0):
            raise OptionsError(f"step size must be positive, got {self.h!r}")


def stage_plan(variant: str, t: float, h: float) -> list[tuple]:
    """Stages of one step from time ``t``.

    Each entry is ``("diffuse", dt)`` or ``("react", t_start, t_end)``.
    """
    if variant == "lie_paper":
        return [("diffuse", h), ("react", t + 0.5 * h, t + h)]
    if variant == "lie_full":
        return [("diffuse", h), ("react", t, t + h)]
    if variant == "strang":
        return [("diffuse", 0.5 * h), ("react", t, t + h), ("diffuse", 0.5 * h)]
    raise OptionsError(f"unknown splitting variant {variant!r}")


def step(
    u: Field,
    scheme: SplitScheme,
    params: DiffusionParams,
    reaction: ReactionSpec,
    opts: OdeOptions | None = None,
) -> FlowOutcome:
    """Advance ``u`` (at time ``kh``) by one step; the result is stamped ``kh + h``."""
    t, h = u.time, scheme.h
    cur = u
    peak = 0.0
    for stage in stage_plan(scheme.variant, t, h):
        if stage[0] == "diffuse":
            cur = apply_semigroup(cur, params, stage[1])
        else:
            out = flow(reaction, stage[2], stage[1], cur, opts)
            if not out.completed:
                return out
            peak = max(peak, out.peak_norm)
            cur = out.field
    return FlowOutcome("completed", cur.at(t + h), peak_norm=peak)


@dataclass(frozen=True, eq=False)
class SolveReport:
    status: str
    snapshots: list = field(repr=False)
    final: Field | None
    t_star_estimate: float
    step_count: int
    h: float

    @property
    def completed(self) -> bool:
        return self.status == "completed"


def steps_for(T: float, h: float) -> int:
    """Number of steps for horizon ``T``; ``T/h`` must be within 1% of an integer."""
    if not (T > 0 and h > 0):
        raise OptionsError("T and h must be positive")
    ratio = T / h
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 0.01:
        raise OptionsError(f"T/h = {ratio:.6g} is not within 1% of an integer")
    return int(n)


def evolve(
    u0: Field,
    T: float,
    scheme: SplitScheme,
    params: DiffusionParams,
    reaction: ReactionSpec,
    opts: OdeOptions | None = None,
    stride: int = 1,
) -> SolveReport:
    """Iterate :func:`step` from ``u0`` (taken as time 0) up to ``T``.

    The step actually used is ``T / round(T / h)``. Snapshots are the
    initial field, every ``stride``-th step and the final step. A flow
    blow-up ends the run with ``status = "blew_up"``.
    """
    if stride < 1:
        raise OptionsError("stride must be ≥ 1")
    n_steps = steps_for(T, scheme.h)
    h = T / n_steps
    used = SplitScheme(scheme.variant, h)
    cur = u0.at(0.0)
    snaps = [(0.0, cur)]
    for k in range(n_steps):
        out = step(cur.at(k * h), used, params, reaction, opts)
        if not out.completed:
            return SolveReport("blew_up", snaps, None, out.blowup_time_estimate, k, h)
        cur = out.field.at(T if k + 1 == n_steps else (k + 1) * h)
        if (k + 1) % stride == 0 or k + 1 == n_steps:
            snaps.append((cur.time, cur))
    return SolveReport("completed", snaps, cur, float("nan"), n_steps, h)


def reference_solution(
    u0: Field,
    T: float,
    params: DiffusionParams,
    reaction: ReactionSpec,
    opts: OdeOptions | None = None,
    h: float | None = None,
) -> Field:
    """Fine-step Strang solution standing in for the exact mild solution.

    Uses ``h_ref = h / 64`` (``h`` defaults to ``T / 32``).
    """
    base = T / 32 if h is None else h
    rep = evolve(u0, T, SplitScheme("strang", base / 64), params, reaction, opts, stride=10**9)
    if not rep.completed:
        raise BlowUpError("reference solution blew up", rep.t_star_estimate)
    return rep.final


@dataclass(frozen=True)
class OrderFit:
    variant: str
    h_list: tuple
    errors: tuple
    slope: float
    exact: bool

    @property
    def status(self) -> str:
        return "exact" if self.exact else "fitted"


def estimate_order(
    u0: Field,
    T: float,
    params: DiffusionParams,
    reaction: ReactionSpec,
    variant: str,
    h_list,
    opts: OdeOptions | None = None,
    exact_tol: float = 1e-13,
) -> OrderFit:
    """Fit the slope of ``log(sup error)`` against ``log h``.

    The reference is :func:`reference_solution` with ``h = min(h_list)``.
    When every error sits below ``exact_tol`` (relative to the reference
    sup norm) splitting is exact for this problem and no slope is fitted.
    """
    h_list = tuple(float(h) for h in h_list)
    if len(h_list) < 3:
        raise OptionsError("need at least 3 step sizes")
    for h in h_list:
        steps_for(T, h)
    ref = reference_solution(u0, T, params, reaction, opts, h=min(h_list))
    scale = max(1.0, float(np.max(point_norms(ref.values))))
    errors = []
    for h in h_list:
        rep = evolve(u0, T, SplitScheme(variant, h), params, reaction, opts, stride=10**9)
        if not rep.completed:
            raise BlowUpError(f"blow-up before T with h = {h}", rep.t_star_estimate)
        errors.append(float(np.max(point_norms(rep.final.values - ref.values))))
    if max(errors) <= exact_tol * scale:
        return OrderFit(variant, h_list, tuple(errors), math.nan, True)
    slope, _ = np.polyfit(np.log(h_list), np.log(np.maximum(errors, 1e-300)), 1)
    return OrderFit(variant, h_list, tuple(errors), float(slope), False)
