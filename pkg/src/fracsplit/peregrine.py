"""Periodic-plus-decaying ("Peregrine") decomposition ``u = v + w``.

``v`` is a lattice-periodic background kept on a single cell and ``w`` a
perturbation on the whole box (``box_cells`` cells), which approximates a
function vanishing at infinity. Under the split evolution, ``v`` obeys
the plain equation and ``w`` obeys the equation with nonlinearity
``F(v + w) - F(v)``.

The reaction stage is integrated in the coordinates ``(v, u = v + w)``.
Those two flows are uncoupled, so ``v`` is advanced on the cell grid by
exactly the computation the plain solver performs, ``u`` is advanced on
the box grid, and ``w`` is recovered as ``u - lift(v)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridError, OptionsError
from .grid import Field, GridSpec, point_norms, sup_norm
from .kernel import DiffusionParams, apply_semigroup
from .reaction import FlowOutcome, OdeOptions, ReactionSpec, flow
from .splitting import SplitScheme, stage_plan, steps_for

__all__ = [
    "LatticeSpec",
    "PeregrineState",
    "DecayReport",
    "CoupledReport",
    "ProjectorReport",
    "lift_periodic",
    "restrict_cell",
    "bump_center",
    "project_periodic",
    "projector_contraction_check",
    "evolve_coupled",
    "decay_report",
]


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice ``P Z`` with a box of ``box_cells`` periods, ``cell_points`` samples per period."""

    period: float
    box_cells: int
    cell_points: int
    components: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.period) and self.period > 0):
            raise GridError("period must be positive")
        if int(self.box_cells) != self.box_cells or self.box_cells < 4:
            raise GridError("box_cells must be an integer ≥ 4")
        # cell grid validation happens in GridSpec
        self.cell_grid
        self.box_grid

    @property
    def cell_grid(self) -> GridSpec:
        return GridSpec(self.cell_points, self.period, self.components)

    @property
    def box_grid(self) -> GridSpec:
        return GridSpec(self.box_cells * self.cell_points, self.box_cells * self.period, self.components)

    @property
    def box_length(self) -> float:
        return self.box_cells * self.period

    def check_cell(self, v: Field):
        if v.grid.n_points != self.cell_points or v.grid.components != self.components:
            raise GridError("field is not on this lattice's cell grid")
        if not math.isclose(v.grid.spacing, self.cell_grid.spacing, rel_tol=1e-14):
            raise GridError("cell field spacing differs from the lattice spacing")

    def check_box(self, u: Field):
        if u.grid.n_points != self.box_cells * self.cell_points or u.grid.components != self.components:
            raise GridError("field is not on this lattice's box grid")
        if not math.isclose(u.grid.spacing, self.cell_grid.spacing, rel_tol=1e-14):
            raise GridError("box field spacing differs from the lattice spacing")


@dataclass(frozen=True, eq=False)
class PeregrineState:
    v: Field
    w: Field
    time: float = 0.0

    def __post_init__(self):
        if self.v.time != self.time or self.w.time != self.time:
            raise ValueError("v, w and state must carry the same time stamp")

    def total(self, lattice: LatticeSpec) -> Field:
        """``lift(v) + w`` on the box grid."""
        return Field(self.w.grid, lift_periodic(self.v, lattice).values + self.w.values, self.time)


def lift_periodic(v: Field, lattice: LatticeSpec) -> Field:
    """Tile the cell field ``box_cells`` times (exact sample copy)."""
    lattice.check_cell(v)
    return Field(lattice.box_grid, np.tile(v.values, (lattice.box_cells, 1)), v.time)


def restrict_cell(u: Field, lattice: LatticeSpec, cell: int) -> Field:
    lattice.check_box(u)
    cp = lattice.cell_points
    c = int(cell) % lattice.box_cells
    return Field(lattice.cell_grid, u.values[c * cp : (c + 1) * cp], u.time)


def _cells(u: Field, lattice: LatticeSpec) -> np.ndarray:
    return u.values.reshape(lattice.box_cells, lattice.cell_points, lattice.components)


def bump_center(u: Field, lattice: LatticeSpec) -> float:
    """Position of the localized part of ``u``, or ``nan`` if there is none.

    The localized part is estimated as the deviation from the cell-wise
    median profile; its centre is the circular centre of mass of ``|w|``
    on the box.
    """
    cells = _cells(u, lattice)
    resid = cells - np.median(cells, axis=0)
    weights = point_norms(resid.reshape(-1, lattice.components))
    total = float(np.sum(weights))
    if total == 0.0:
        return math.nan
    L = lattice.box_length
    theta = 2.0 * np.pi * u.grid.coordinates() / L
    s = float(np.sum(weights * np.sin(theta)))
    c = float(np.sum(weights * np.cos(theta)))
    return (math.atan2(s, c) % (2.0 * np.pi)) * L / (2.0 * np.pi)


def _skipped_cells(center: float, lattice: LatticeSpec, skip: int) -> list[int]:
    if skip == 0 or math.isnan(center):
        return []
    N, P = lattice.box_cells, lattice.period
    mids = (np.arange(N) + 0.5) * P
    d = np.abs(mids - center)
    d = np.minimum(d, N * P - d)
    # lexsort: primary key distance, ties toward the lower index
    order = np.lexsort((np.arange(N), np.round(d / P, 12)))
    return sorted(int(i) for i in order[:skip])


def project_periodic(u: Field, lattice: LatticeSpec, skip_cells: int) -> Field:
    """Estimate the periodic part of ``u`` by trimmed cell averaging.

    For each in-cell offset, ``u`` is averaged over all cells except the
    ``skip_cells`` cells nearest :func:`bump_center`.
    """
    lattice.check_box(u)
    skip = int(skip_cells)
    if skip < 0 or 2 * skip >= lattice.box_cells:
        raise ValueError(f"skip_cells must satisfy 0 ≤ 2*skip < {lattice.box_cells}")
    skipped = _skipped_cells(bump_center(u, lattice), lattice, skip)
    keep = [i for i in range(lattice.box_cells) if i not in skipped]
    if not keep:
        raise ValueError("nothing left to average")
    avg = np.mean(_cells(u, lattice)[keep], axis=0)
    return Field(lattice.cell_grid, avg, u.time)


@dataclass(frozen=True)
class ProjectorReport:
    holds: bool
    projected_sup: float
    input_sup: float


def projector_contraction_check(u: Field, lattice: LatticeSpec, skip_cells: int) -> ProjectorReport:
    pu = project_periodic(u, lattice, skip_cells)
    a, b = sup_norm(pu), sup_norm(u)
    return ProjectorReport(a <= b + 1e-12, a, b)


@dataclass(frozen=True, eq=False)
class CoupledReport:
    status: str
    states: list = field(repr=False)
    t_star_estimate: float = math.nan
    component: str | None = None
    step_count: int = 0
    h: float = math.nan
    # sup norms of v and w at the last completed step; reported on blow-up
    v_sup: float = math.nan
    w_sup: float = math.nan

    @property
    def completed(self) -> bool:
        return self.status == "completed"

    @property
    def final(self) -> PeregrineState | None:
        return self.states[-1] if self.completed else None


def _coupled_step(state, lattice, scheme, params, reaction, opts):
    """One split step of ``(v, w)``; returns (new state or None, blown FlowOutcome or None)."""
    t, h = state.time, scheme.h
    v, w = state.v, state.w
    for stage in stage_plan(scheme.variant, t, h):
        if stage[0] == "diffuse":
            v = apply_semigroup(v, params, stage[1])
            w = apply_semigroup(w, params, stage[1])
            continue
        _, t_start, t_end = stage
        u = Field(w.grid, lift_periodic(v, lattice).values + w.values, w.time)
        v_out = flow(reaction, t_end, t_start, v, opts)
        if not v_out.completed:
            return None, FlowOutcome("blew_up", blowup_time_estimate=v_out.blowup_time_estimate, component="v")
        u_out = flow(reaction, t_end, t_start, u, opts)
        if not u_out.completed:
            return None, FlowOutcome("blew_up", blowup_time_estimate=u_out.blowup_time_estimate, component="w")
        v = v_out.field
        w = Field(w.grid, u_out.field.values - lift_periodic(v, lattice).values, t_end)
    t_new = t + h
    return PeregrineState(v.at(t_new), w.at(t_new), t_new), None


def evolve_coupled(
    state: PeregrineState,
    T: float,
    scheme: SplitScheme,
    params: DiffusionParams,
    reaction: ReactionSpec,
    lattice: LatticeSpec,
    opts: OdeOptions | None = None,
    stride: int = 1,
) -> CoupledReport:
    """Split evolution of the pair ``(v, w)`` with the same step rule as :func:`~fracsplit.splitting.evolve`.

    Returns every ``stride``-th state (plus initial and final). On blow-up
    the report names the diverging component: ``"v"`` if the periodic
    background diverged, ``"w"`` if only the total did.
    """
    lattice.check_cell(state.v)
    lattice.check_box(state.w)
    if stride < 1:
        raise OptionsError("stride must be ≥ 1")
    n_steps = steps_for(T, scheme.h)
    h = T / n_steps
    used = SplitScheme(scheme.variant, h)
    cur = PeregrineState(state.v.at(0.0), state.w.at(0.0), 0.0)
    states = [cur]
    for k in range(n_steps):
        tk = k * h
        at_k = PeregrineState(cur.v.at(tk), cur.w.at(tk), tk)
        nxt, blown = _coupled_step(at_k, lattice, used, params, reaction, opts)
        if blown is not None:
            return CoupledReport(
                "blew_up", states, blown.blowup_time_estimate, blown.component, k, h,
                sup_norm(cur.v), sup_norm(cur.w),
            )
        t_new = T if k + 1 == n_steps else (k + 1) * h
        cur = PeregrineState(nxt.v.at(t_new), nxt.w.at(t_new), t_new)
        if (k + 1) % stride == 0 or k + 1 == n_steps:
            states.append(cur)
    return CoupledReport("completed", states, step_count=n_steps, h=h,
                         v_sup=sup_norm(cur.v), w_sup=sup_norm(cur.w))


@dataclass(frozen=True)
class DecayReport:
    outer_fraction: float
    outer_sup: float
    inner_sup: float


def decay_report(state: PeregrineState | Field, outer_fraction: float = 0.1) -> DecayReport:
    """Sup of ``|w|`` over the two outer strips of the box versus the interior.

    Each strip holds ``floor(outer_fraction * n)`` points (at least one).
    """
    if not 0 < outer_fraction <= 0.25:
        raise ValueError("outer_fraction must lie in (0, 0.25]")
    w = state.w if isinstance(state, PeregrineState) else state
    norms = point_norms(w.values)
    k = max(1, int(math.floor(outer_fraction * w.grid.n_points)))
    outer = np.concatenate([norms[:k], norms[-k:]])
    inner = norms[k:-k]
    return DecayReport(float(outer_fraction), float(np.max(outer)), float(np.max(inner)))
