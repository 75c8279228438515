"""Deterministic initial conditions.

``random_bounded`` draws from SplitMix64 so any implementation reproduces
the same samples from the seed:

    state_i = seed + (i + 1) * 0x9E3779B97F4A7C15          (mod 2^64)
    z = (state_i ^ (state_i >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB               (mod 2^64)
    z = z ^ (z >> 31)
    U_i = (z >> 11) * 2^-53                                in [0, 1)

for ``i = 0, 1, ...`` in point-major order (all components of point 0,
then point 1, ...). Sample ``i`` is ``sup * (2 U_i - 1)``.
"""
from __future__ import annotations

import numpy as np

from .config import RunConfig
from .errors import ConfigError
from .grid import Field, GridSpec
from .peregrine import LatticeSpec, PeregrineState

__all__ = ["splitmix64", "uniform01", "build_initial", "gaussian_bump", "raised_cosine_bump", "peregrine_pair"]

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, count: int) -> np.ndarray:
    """First ``count`` outputs of SplitMix64 started from ``seed``."""
    i = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + i * _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniform01(seed: int, count: int) -> np.ndarray:
    return (splitmix64(seed, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def gaussian_bump(x, amplitude, center, width):
    return amplitude * np.exp(-((x - center) ** 2) / (2.0 * width * width))


def raised_cosine_bump(x, amplitude, center, half_width):
    r = np.abs(x - center) / half_width
    return np.where(r < 1.0, 0.5 * amplitude * (1.0 + np.cos(np.pi * np.minimum(r, 1.0))), 0.0)


def peregrine_pair(lattice: LatticeSpec, cos_amplitude: float, bump_amplitude: float,
                   bump_width: float | None = None) -> PeregrineState:
    """``v = a cos(2 pi x / P)`` on one cell, ``w`` a Gaussian bump at the box centre.

    The bump width defaults to a quarter period.
    """
    P = lattice.period
    width = 0.25 * P if bump_width is None else bump_width
    v = Field.from_function(lattice.cell_grid, lambda x: cos_amplitude * np.cos(2.0 * np.pi * x / P))
    w = Field.from_function(
        lattice.box_grid, lambda x: gaussian_bump(x, bump_amplitude, lattice.box_length / 2, width)
    )
    return PeregrineState(v, w, 0.0)


def _params(cfg, lo, hi, names):
    p = cfg.initial_params
    if not lo <= len(p) <= hi:
        raise ConfigError(f"initial.params for {cfg.initial_kind} must be ({', '.join(names)})")
    return p


def lattice_for(cfg: RunConfig, components: int = 1) -> LatticeSpec:
    if cfg.period is None:
        raise ConfigError("domain.period and domain.cells are required here")
    return LatticeSpec(cfg.period, cfg.cells, cfg.points // cfg.cells, components)


def build_initial(cfg: RunConfig):
    """Initial field for ``cfg``; returns ``(field, peregrine_state_or_None)``.

    Parameters by kind (``initial.params``):

    ``constant``            c_1[, ..., c_m]
    ``cosine``              amplitude, wavelength[, offset]
    ``gaussian_bump``       amplitude, center, width
    ``raised_cosine_bump``  amplitude, center, half_width
    ``peregrine_sum``       cos_amplitude, bump_amplitude[, bump_width]
    ``random_bounded``      sup   (uses ``initial.seed``)
    """
    m = cfg.reaction().component_count
    grid = GridSpec(cfg.points, cfg.length, m)
    x = grid.coordinates()
    kind = cfg.initial_kind
    state = None
    if kind == "constant":
        p = _params(cfg, 1, m, ["c"] * m)
        if len(p) not in (1, m):
            raise ConfigError(f"constant needs 1 or {m} values")
        field = Field.constant(grid, p)
    elif kind == "cosine":
        p = _params(cfg, 2, 3, ["amplitude", "wavelength", "offset"])
        amp, lam = p[0], p[1]
        off = p[2] if len(p) > 2 else 0.0
        if lam <= 0:
            raise ConfigError("cosine wavelength must be positive")
        vals = off + amp * np.cos(2.0 * np.pi * x / lam)
        field = Field(grid, np.repeat(vals[:, None], m, axis=1))
    elif kind == "gaussian_bump":
        amp, c, wd = _params(cfg, 3, 3, ["amplitude", "center", "width"])
        if wd <= 0:
            raise ConfigError("gaussian_bump width must be positive")
        field = Field(grid, np.repeat(gaussian_bump(x, amp, c, wd)[:, None], m, axis=1))
    elif kind == "raised_cosine_bump":
        amp, c, hw = _params(cfg, 3, 3, ["amplitude", "center", "half_width"])
        if hw <= 0:
            raise ConfigError("raised_cosine_bump half_width must be positive")
        field = Field(grid, np.repeat(raised_cosine_bump(x, amp, c, hw)[:, None], m, axis=1))
    elif kind == "peregrine_sum":
        if m != 1:
            raise ConfigError("peregrine_sum is defined for scalar reactions")
        p = _params(cfg, 2, 3, ["cos_amplitude", "bump_amplitude", "bump_width"])
        lattice = lattice_for(cfg, m)
        state = peregrine_pair(lattice, p[0], p[1], p[2] if len(p) > 2 else None)
        field = state.total(lattice)
    elif kind == "random_bounded":
        (sup,) = _params(cfg, 1, 1, ["sup"])
        if sup <= 0:
            raise ConfigError("random_bounded sup must be positive")
        u = uniform01(cfg.seed, grid.n_points * m).reshape(grid.shape)
        field = Field(grid, sup * (2.0 * u - 1.0))
    else:
        raise ConfigError(f"unknown initial kind {kind!r}")
    return field, state
