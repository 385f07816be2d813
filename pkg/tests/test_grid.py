import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinorsurf.errors import InsufficientLevels, ShapeMismatch
from spinorsurf.grid import (
    Grid,
    convergence_order,
    d_z,
    d_zbar,
    field_from_json,
    field_to_json,
    integrate_2form,
    interior_mask,
    interior_sup,
    partial_u,
)

TWO_PI = 2 * np.pi


def periodic(n=32):
    return Grid.from_extent(n, n, 0, TWO_PI, 0, TWO_PI, True, True)


def square(n):
    return Grid.from_extent(n, n, -1, 1, -1, 1)


def test_constant_has_zero_derivatives():
    for g in (periodic(), square(16)):
        f = np.full(g.shape, 3.0 - 2.0j)
        assert np.array_equal(d_z(f, g), np.zeros(g.shape))
        assert np.array_equal(d_zbar(f, g), np.zeros(g.shape))


@pytest.mark.parametrize("m,n", [(1, 0), (0, 3), (-4, 2), (8, -8)])
def test_fourier_mode_derivative(m, n):
    g = periodic(32)
    U, V = g.mesh()
    f = np.exp(1j * (m * U + n * V))
    assert np.abs(d_z(f, g) - 0.5 * (1j * m + n) * f).max() <= 1e-10
    assert np.abs(d_zbar(f, g) - 0.5 * (1j * m - n) * f).max() <= 1e-10


def test_holomorphic_polynomial_on_open_chart():
    errs, bars = [], []
    for n in (16, 32, 64):
        g = square(n)
        U, V = g.mesh()
        z = U + 1j * V
        f = z**3
        errs.append((g.h, interior_sup(d_z(f, g) - 3 * z**2, g)))
        bars.append((g.h, interior_sup(d_zbar(f, g), g)))
    # the 4th-order scheme is exact on cubics
    assert max(e for _, e in errs) < 1e-12
    assert max(e for _, e in bars) < 1e-12
    g = square(24)
    U, V = g.mesh()
    z = U + 1j * V
    assert np.abs(d_z(z**2, g) - 2 * z).max() < 1e-12


def test_dbar_of_exp_decays_at_fourth_order():
    pairs = []
    for n in (16, 32, 64):
        g = square(n)
        U, V = g.mesh()
        pairs.append((g.h, interior_sup(d_zbar(np.exp(2 * (U + 1j * V)), g), g)))
    assert convergence_order(pairs) >= 3.5


def test_boundary_closures_are_fourth_order():
    pairs = []
    for n in (16, 32, 64):
        g = square(n)
        U, _ = g.mesh()
        pairs.append((g.h, np.abs(partial_u(np.sin(3 * U), g) - 3 * np.cos(3 * U)).max()))
    assert convergence_order(pairs) >= 3.5


def test_integrate_constant_on_periodic_square():
    g = periodic(24)
    assert integrate_2form(np.ones(g.shape), g) == pytest.approx(TWO_PI**2, abs=1e-12)


def test_integral_of_dbar_vanishes_on_torus(rng):
    g = periodic(32)
    U, V = g.mesh()
    h = sum(rng.normal() * np.cos(k * U + l * V + rng.normal())
            for k in range(-3, 4) for l in range(-3, 4))
    assert abs(integrate_2form(d_zbar(h, g), g)) <= 1e-12


def test_empty_mask_integrates_to_zero():
    g = square(16)
    assert integrate_2form(np.ones(g.shape), g, mask=np.zeros(g.shape, bool)) == 0


def test_trapezoid_area_on_open_square():
    g = square(17)
    assert integrate_2form(np.ones(g.shape), g).real == pytest.approx(4.0, abs=1e-13)


def test_shape_mismatch():
    g = square(16)
    with pytest.raises(ShapeMismatch):
        d_z(np.zeros((15, 16)), g)


def test_interior_mask_respects_periodicity():
    g = Grid.from_extent(16, 12, 0, 1, 0, 1, periodic_u=True, boundary_band=2)
    m = interior_mask(g)
    assert m[:, 0].any() and not m[0].any() and not m[-2].any()
    assert m.sum() == 16 * 8


def test_order_of_synthetic_power_law():
    hs = [1 / 16, 1 / 32, 1 / 64]
    assert convergence_order([(h, 7 * h**4) for h in hs]) == pytest.approx(4.0, abs=0.05)
    assert convergence_order([(h, 0.3) for h in hs]) == pytest.approx(0.0, abs=0.05)


def test_order_ignores_levels_below_floor():
    pairs = [(1 / 16, 1e-6), (1 / 32, 1e-6 / 16), (1 / 64, 1e-14)]
    assert convergence_order(pairs) == pytest.approx(4.0, abs=0.05)
    assert convergence_order([(1, 1e-15), (0.5, 1e-16), (0.25, 0.0)]) == math.inf


def test_order_needs_three_levels():
    with pytest.raises(InsufficientLevels):
        convergence_order([(0.1, 1.0), (0.05, 0.1)])


@settings(max_examples=25)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**31))
def test_wirtinger_derivatives_are_linear(a, b, seed):
    g = periodic(16)
    r = np.random.default_rng(seed)
    f = r.normal(size=g.shape) + 1j * r.normal(size=g.shape)
    h = r.normal(size=g.shape)
    for op in (d_z, d_zbar):
        lhs = op(a * f + b * h, g)
        assert np.allclose(lhs, a * op(f, g) + b * op(h, g), atol=1e-9)


@settings(max_examples=25)
@given(st.integers(8, 20), st.integers(8, 20), st.booleans(), st.booleans())
def test_grid_dict_round_trip(nu, nv, pu, pv):
    g = Grid.from_extent(nu, nv, -0.5, 2.0, 1.0, 3.0, pu, pv)
    assert Grid.from_dict(g.to_dict()) == g
    assert g.refined(nu, nv) == g


def test_field_json_is_row_major_u_fastest():
    g = Grid.from_extent(8, 9, 0, 1, 0, 1)
    U, V = g.mesh()
    f = U + 10j * V
    d = field_to_json(f, g)
    assert (d["nu"], d["nv"]) == (8, 9)
    assert d["data"][1] == [U[0, 1], 0.0]
    assert np.array_equal(field_from_json(d), f)
