"""Uniform periodic 1-D grids, sampled vector fields and their transforms.

Fourier convention
------------------
The continuous transform is ``g_hat(xi) = int g(x) exp(-i xi x) dx`` with
angular frequency ``xi``. On a grid of ``n`` points and box length ``L`` the
discrete frequencies are ``xi_j = 2 pi j / L``.

:class:`SpectralField` stores *mean-normalised* coefficients

    c_j = (1/n) sum_k u_k exp(-2 pi i j k / n),

so a constant field ``c`` has coefficient ``c`` at ``xi = 0``. The Riemann
sum approximation of the continuous transform is ``L * c_j``; for a
kernel sample array with unit quadrature mass this gives exactly ``1`` at
``xi = 0``. Coefficients are kept in FFT order (``j = 0, 1, ..., n/2 - 1,
-n/2, ..., -1``); :attr:`SpectralField.wavenumbers` is aligned with it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GridError, NonFiniteFieldError

__all__ = [
    "GridSpec",
    "Field",
    "SpectralField",
    "make_grid",
    "point_norms",
    "sup_norm",
    "circular_shift",
    "spectral_transform",
    "spectral_inverse",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on ``[0, length)`` carrying ``components`` values per point."""

    n_points: int
    length: float
    components: int = 1

    def __post_init__(self):
        n = self.n_points
        if isinstance(n, bool) or int(n) != n or n < 8 or n % 2:
            raise GridError(f"n_points must be even ≥ 8, got {n!r}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise GridError(f"length must be positive, got {self.length!r}")
        if isinstance(self.components, bool) or int(self.components) != self.components or self.components < 1:
            raise GridError(f"components must be a positive integer, got {self.components!r}")
        object.__setattr__(self, "n_points", int(n))
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "components", int(self.components))

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_points, self.components)

    def coordinates(self) -> np.ndarray:
        """Sample positions ``k * spacing`` for ``k = 0..n-1``."""
        return np.arange(self.n_points) * self.spacing

    def wavenumbers(self) -> np.ndarray:
        """Angular frequencies ``2 pi j / length`` in FFT order."""
        half = self.n_points // 2
        j = np.concatenate([np.arange(half), np.arange(-half, 0)]).astype(np.float64)
        return j * (2.0 * np.pi / self.length)

    def with_components(self, components: int) -> GridSpec:
        return GridSpec(self.n_points, self.length, components)

    @classmethod
    def from_spacing(cls, n_points: int, spacing: float, components: int = 1) -> GridSpec:
        """Grid whose derived spacing is as close to ``spacing`` as floats allow.

        Exact whenever some length within a few ulps of ``n * spacing``
        divides back to ``spacing`` (always so for power-of-two ``n``).
        """
        base = spacing * n_points
        candidates = [base]
        up = down = base
        for _ in range(4):
            up, down = np.nextafter(up, np.inf), np.nextafter(down, -np.inf)
            candidates += [up, down]
        best = min(candidates, key=lambda L: abs(L / n_points - spacing))
        return cls(n_points, float(best), components)


def make_grid(n_points: int, length: float, components: int = 1) -> GridSpec:
    return GridSpec(n_points, length, components)


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of an ``R^m``-valued function on a grid, point-major.

    ``values`` has shape ``(n_points, components)`` and is stored as a
    read-only copy. Non-finite samples are rejected: they signal blow-up
    and are never stored in a valid field.
    """

    grid: GridSpec
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, order="C")
        if vals.ndim == 1 and self.grid.components == 1:
            vals = vals.reshape(-1, 1)
        if vals.shape != self.grid.shape:
            raise GridError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteFieldError("field values must be finite")
        if not np.isfinite(self.time) or self.time < 0:
            raise GridError(f"time must be finite and ≥ 0, got {self.time!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "time", float(self.time))

    def at(self, time: float) -> Field:
        """Same samples relabelled with a new time stamp."""
        return Field(self.grid, self.values, time)

    def with_values(self, values: np.ndarray, time: float | None = None) -> Field:
        return Field(self.grid, values, self.time if time is None else time)

    @classmethod
    def from_function(cls, grid: GridSpec, func, time: float = 0.0) -> Field:
        """Sample ``func(x)`` at the grid coordinates."""
        vals = np.asarray(func(grid.coordinates()), dtype=np.float64)
        return cls(grid, vals.reshape(grid.shape), time)

    @classmethod
    def constant(cls, grid: GridSpec, value, time: float = 0.0) -> Field:
        vals = np.broadcast_to(np.asarray(value, dtype=np.float64), grid.shape)
        return cls(grid, vals, time)

    def identical_to(self, other: Field) -> bool:
        """Bitwise equality of samples, time and grid."""
        return (
            self.grid == other.grid
            and self.time == other.time
            and self.values.tobytes() == other.values.tobytes()
        )


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Mean-normalised DFT coefficients, shape ``(n_points, components)``, FFT order."""

    grid: GridSpec
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.complex128)
        if c.shape != self.grid.shape:
            raise GridError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        return self.grid.wavenumbers()

    def continuum(self) -> np.ndarray:
        """Riemann-sum estimate of the continuous transform, ``length * c_j``."""
        return self.grid.length * self.coefficients


def point_norms(values: np.ndarray) -> np.ndarray:
    """Euclidean norm across components at each point.

    Components are accumulated in a fixed order so every point's norm is
    independent of array layout and chunking.
    """
    values = np.asarray(values)
    if values.shape[-1] == 1:
        return np.abs(values[..., 0])
    acc = values[..., 0] * values[..., 0]
    for c in range(1, values.shape[-1]):
        acc = acc + values[..., c] * values[..., c]
    return np.sqrt(acc)


def sup_norm(u: Field) -> float:
    return float(np.max(point_norms(u.values)))


def circular_shift(u: Field, k: int) -> Field:
    """Translate by ``k`` grid points: result ``(x) = u(x + k * spacing)``."""
    return u.with_values(np.roll(u.values, -int(k), axis=0))


def spectral_transform(u: Field) -> SpectralField:
    coeffs = np.fft.fft(u.values, axis=0) / u.grid.n_points
    return SpectralField(u.grid, coeffs)


def spectral_inverse(uh: SpectralField, time: float = 0.0, grid: GridSpec | None = None) -> Field:
    if grid is not None and grid != uh.grid:
        raise GridError("spectral field grid does not match requested grid")
    vals = np.fft.ifft(uh.coefficients * uh.grid.n_points, axis=0).real
    return Field(uh.grid, vals, time)
