import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from fracsplit.errors import GridError, NonFiniteFieldError
from fracsplit.grid import (
    Field,
    GridSpec,
    SpectralField,
    circular_shift,
    make_grid,
    spectral_inverse,
    spectral_transform,
    sup_norm,
)

from .conftest import brute_dft, random_field


@pytest.mark.parametrize("n,L,m,spacing", [(64, 32.0, 1, 0.5), (8, 8.0, 2, 1.0)])
def test_make_grid_spacing(n, L, m, spacing):
    g = make_grid(n, L, m)
    assert g.spacing == spacing
    assert g.components == m
    assert g.spacing * g.n_points == g.length


@pytest.mark.parametrize("n", [7, 6, 0, -8, 9])
def test_make_grid_rejects_bad_point_count(n):
    with pytest.raises(GridError, match="n_points must be even ≥ 8"):
        make_grid(n, 8.0, 1)


@pytest.mark.parametrize("L", [0.0, -1.0, float("nan")])
def test_make_grid_rejects_bad_length(L):
    with pytest.raises(GridError):
        make_grid(8, L, 1)


def test_field_rejects_non_finite(grid64):
    vals = np.zeros(grid64.shape)
    vals[3] = np.nan
    with pytest.raises(NonFiniteFieldError):
        Field(grid64, vals)
    vals[3] = np.inf
    with pytest.raises(NonFiniteFieldError):
        Field(grid64, vals)


def test_field_is_read_only(grid64):
    f = Field.constant(grid64, 1.0)
    with pytest.raises(ValueError):
        f.values[0, 0] = 2.0


def test_sup_norm_examples(grid64):
    assert sup_norm(Field.constant(grid64, 3.0)) == 3.0
    assert sup_norm(Field.constant(grid64, 0.0)) == 0.0
    g2 = GridSpec(8, 8.0, 2)
    vals = np.zeros(g2.shape)
    vals[5] = (3.0, 4.0)
    assert sup_norm(Field(g2, vals)) == 5.0


def test_shift_examples(grid64, rng):
    u = random_field(rng, grid64)
    assert circular_shift(u, 0).identical_to(u)
    assert circular_shift(u, grid64.n_points).identical_to(u)
    assert circular_shift(circular_shift(u, 5), -5).identical_to(u)


def test_shift_is_translation(grid64):
    u = Field.from_function(grid64, lambda x: x)
    # (T u)(x) = u(x + k * spacing)
    assert circular_shift(u, 3).values[0, 0] == 3 * grid64.spacing


@given(st.integers(-300, 300), arrays(np.float64, (16, 2), elements=st.floats(-1e6, 1e6)))
def test_shift_is_sup_isometry(k, vals):
    u = Field(GridSpec(16, 3.0, 2), vals)
    assert sup_norm(circular_shift(u, k)) == sup_norm(u)


def test_transform_of_constant(grid64):
    c = spectral_transform(Field.constant(grid64, 2.5)).coefficients[:, 0]
    assert c[0] == pytest.approx(2.5, rel=1e-15)
    assert np.max(np.abs(c[1:])) < 1e-15


def test_transform_of_single_mode(grid64):
    u = Field.from_function(grid64, lambda x: np.cos(2 * np.pi * x / grid64.length))
    c = spectral_transform(u).coefficients[:, 0]
    assert abs(c[1]) == pytest.approx(0.5, rel=1e-14)
    assert abs(c[-1]) == pytest.approx(0.5, rel=1e-14)
    mask = np.ones(grid64.n_points, bool)
    mask[[1, -1]] = False
    assert np.max(np.abs(c[mask])) < 1e-15


def test_transform_matches_defining_sum(rng):
    g = GridSpec(32, 5.0, 2)
    u = random_field(rng, g)
    np.testing.assert_allclose(spectral_transform(u).coefficients, brute_dft(u.values), atol=1e-14)


def test_wavenumbers_follow_fft_order():
    g = GridSpec(8, 4.0)
    np.testing.assert_array_equal(
        g.wavenumbers() / (2 * np.pi / 4.0), [0, 1, 2, 3, -4, -3, -2, -1]
    )


def test_round_trip(rng):
    g = GridSpec(256, 10.0, 3)
    u = random_field(rng, g)
    back = spectral_inverse(spectral_transform(u))
    rel = np.max(np.abs(back.values - u.values)) / np.max(np.abs(u.values))
    assert rel <= 1e-12


def test_inverse_rejects_grid_mismatch(grid64):
    uh = spectral_transform(Field.constant(grid64, 1.0))
    with pytest.raises(GridError):
        spectral_inverse(uh, grid=GridSpec(64, 16.0))
    with pytest.raises(GridError):
        SpectralField(grid64, np.zeros((32, 1)))


def test_continuum_scale_of_unit_mass_array(grid64):
    vals = np.zeros(grid64.n_points)
    vals[0] = 1.0 / grid64.spacing
    uh = spectral_transform(Field(grid64, vals))
    assert uh.continuum()[0, 0] == pytest.approx(1.0, rel=1e-15)


@given(arrays(np.float64, (32, 1), elements=st.floats(-10, 10)))
def test_parseval(vals):
    u = Field(GridSpec(32, 1.0), vals)
    c = spectral_transform(u).coefficients
    lhs = np.sum(vals**2)
    rhs = 32 * np.sum(np.abs(c) ** 2)
    assert abs(lhs - rhs) <= 1e-12 * max(lhs, 1e-300)


@given(st.integers(-40, 40), arrays(np.float64, (32, 1), elements=st.floats(-10, 10)))
def test_shift_twiddle(k, vals):
    u = Field(GridSpec(32, 1.0), vals)
    c = spectral_transform(u).coefficients[:, 0]
    cs = spectral_transform(circular_shift(u, k)).coefficients[:, 0]
    j = np.concatenate([np.arange(16), np.arange(-16, 0)])
    expected = c * np.exp(2j * np.pi * j * k / 32)
    scale = max(np.max(np.abs(c)), 1e-300)
    assert np.max(np.abs(cs - expected)) <= 1e-12 * scale


@pytest.mark.parametrize("s", [0.1, 1 / 3, 0.7, 2.0 * np.pi / 64])
def test_from_spacing(s):
    for n in (8, 64, 4096):
        assert GridSpec.from_spacing(n, s).spacing == s
    for n in (24, 96, 1000):
        assert abs(GridSpec.from_spacing(n, s).spacing - s) <= np.spacing(s)
