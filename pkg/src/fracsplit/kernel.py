"""Fractional diffusion semigroup ``S(t) = exp(-t sigma (-Laplacian)^beta)`` on a periodic grid.

``S(t)`` acts by the spectral multiplier ``exp(-sigma t |xi|^(2 beta))``.
Its kernel is the periodised symmetric stable density, rescaled so that
only the product ``sigma * t`` matters. Kernel samples follow the
transform convention documented in :mod:`fracsplit.grid`: the inverse
transform of the symbol is divided by the grid spacing so that
``spacing * sum(values) == symbol[0] == 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateDurationError, GridError, NonFiniteFieldError
from .grid import Field, GridSpec

__all__ = [
    "DiffusionParams",
    "SemigroupSymbol",
    "KernelSample",
    "build_symbol",
    "apply_semigroup",
    "synthesize_kernel",
    "closed_form_kernel",
    "tail_exponent",
    "convolve_direct",
]


@dataclass(frozen=True)
class DiffusionParams:
    sigma: float
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError(f"sigma must be ≥ 0, got {self.sigma!r}")
        if not (0 < self.beta <= 1):
            raise ValueError(f"beta must lie in (0,1], got {self.beta!r}")
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "beta", float(self.beta))


@dataclass(frozen=True, eq=False)
class SemigroupSymbol:
    grid: GridSpec
    params: DiffusionParams
    duration: float
    symbol: np.ndarray


@dataclass(frozen=True, eq=False)
class KernelSample:
    grid: GridSpec
    params: DiffusionParams
    duration: float
    values: np.ndarray

    @property
    def mass(self) -> float:
        return float(self.grid.spacing * np.sum(self.values))

    def centered(self) -> tuple[np.ndarray, np.ndarray]:
        """Positions in ``[-L/2, L/2)`` and matching values, ascending in x."""
        x = self.grid.coordinates()
        x = np.where(x >= self.grid.length / 2, x - self.grid.length, x)
        order = np.argsort(x, kind="stable")
        return x[order], self.values[order]


@lru_cache(maxsize=64)
def _symbol_array(n_points: int, length: float, sigma_t: float, beta: float) -> np.ndarray:
    xi = GridSpec(n_points, length).wavenumbers()
    if sigma_t == 0.0:
        sym = np.ones(n_points)
    elif beta == 1.0:
        sym = np.exp(-sigma_t * (xi * xi))
    else:
        sym = np.exp(-sigma_t * np.abs(xi) ** (2.0 * beta))
    # shared between callers, so never writable
    sym.setflags(write=False)
    return sym


def build_symbol(grid: GridSpec, params: DiffusionParams, t: float) -> SemigroupSymbol:
    """Multiplier ``exp(-sigma t |xi_j|^(2 beta))`` in FFT order.

    Entries may underflow to exactly zero at high frequency; the zero
    frequency entry is exactly one.
    """
    if not (np.isfinite(t) and t >= 0):
        raise ValueError(f"duration must be ≥ 0, got {t!r}")
    sigma_t = params.sigma * float(t)
    sym = _symbol_array(grid.n_points, grid.length, sigma_t, params.beta)
    return SemigroupSymbol(grid, params, float(t), sym)


def apply_semigroup(u: Field, params: DiffusionParams, t: float) -> Field:
    """Apply ``S(t)`` to every component of ``u``; the result is stamped ``u.time + t``."""
    if not np.all(np.isfinite(u.values)):
        raise NonFiniteFieldError("apply_semigroup needs finite input")
    sym = build_symbol(u.grid, params, t).symbol
    if params.sigma * t == 0.0:
        return u.at(u.time + t)
    n = u.grid.n_points
    spec = np.fft.rfft(u.values, axis=0)
    spec *= sym[: n // 2 + 1, None]
    out = np.fft.irfft(spec, n=n, axis=0)
    return Field(u.grid, out, u.time + t)


def synthesize_kernel(grid: GridSpec, params: DiffusionParams, t: float) -> KernelSample:
    """Samples of the L-periodised kernel ``G_{sigma,beta}(t, x_k)``, ``x_0 = 0``."""
    if params.sigma * t <= 0:
        raise DegenerateDurationError("degenerate duration: sigma * t must be > 0 for a kernel")
    sym = build_symbol(grid, params, t).symbol
    vals = np.fft.irfft(sym[: grid.n_points // 2 + 1], n=grid.n_points) / grid.spacing
    vals.setflags(write=False)
    return KernelSample(grid, params, float(t), vals)


def closed_form_kernel(beta: float, sigma_t: float, x):
    """Heat kernel on the line for the two exactly solvable orders.

    ``beta = 1`` gives the Gaussian ``exp(-x^2 / (4 s)) / (2 sqrt(pi s))`` and
    ``beta = 1/2`` the Cauchy (Poisson) kernel ``s / (pi (s^2 + x^2))``,
    with ``s = sigma * t``.
    """
    if sigma_t <= 0:
        raise DegenerateDurationError("sigma_t must be > 0")
    x = np.asarray(x, dtype=np.float64)
    if beta == 1.0:
        out = np.exp(-x * x / (4.0 * sigma_t)) / (2.0 * math.sqrt(math.pi * sigma_t))
    elif beta == 0.5:
        r = x / sigma_t
        out = 1.0 / (math.pi * sigma_t * (1.0 + r * r))
    else:
        raise ValueError(f"closed form available only for beta in {{1/2, 1}}, got {beta!r}")
    return out if out.ndim else float(out)


def tail_exponent(kernel: KernelSample, fit_window: tuple[float, float]) -> float:
    """Least-squares slope of ``log|G|`` against ``log x`` over ``fit_window``.

    Only the positive half-line ``0 < x < L/2`` is used. Samples below the
    transform's roundoff floor (``64 eps`` times the peak) carry no tail
    information and are dropped.
    """
    lo, hi = map(float, fit_window)
    half = kernel.grid.length / 2
    if not (0 < lo < hi < half):
        raise ValueError(f"fit window {fit_window} must lie inside (0, {half})")
    x = kernel.grid.coordinates()[: kernel.grid.n_points // 2]
    g = np.abs(kernel.values[: kernel.grid.n_points // 2])
    floor = 64 * np.finfo(np.float64).eps * float(np.max(np.abs(kernel.values)))
    mask = (x >= lo) & (x <= hi) & (g > floor)
    if np.count_nonzero(mask) < 8:
        raise ValueError("fit window too small: need at least 8 samples")
    slope, _ = np.polyfit(np.log(x[mask]), np.log(g[mask]), 1)
    return float(slope)


def convolve_direct(kernel: KernelSample, u: Field) -> Field:
    """Dense periodic quadrature ``spacing * sum_k G[k] u[j - k]`` (O(n^2) oracle)."""
    if kernel.grid.n_points != u.grid.n_points or kernel.grid.length != u.grid.length:
        raise GridError("kernel and field grids differ")
    n = u.grid.n_points
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    circ = kernel.values[idx]
    out = kernel.grid.spacing * (circ @ u.values)
    return Field(u.grid, out, u.time + kernel.duration)
