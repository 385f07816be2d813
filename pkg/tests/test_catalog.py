import numpy as np
import pytest

from conftest import pipeline
from spinorsurf.catalog import CATALOG, catalog_names, catalog_surface, default_grid, get_entry
from spinorsurf.errors import DomainViolation, UnknownSurface
from spinorsurf.geometry import mean_curvature
from spinorsurf.grid import Grid
from spinorsurf.spinor import maurer_cartan, tangents_from_chart


def test_names_and_lookup():
    assert {"nil-plane-x0", "nil-plane-z0", "nil-cylinder", "sol-plane-z0", "sol-plane-x0",
            "sol-exp-diag", "sl2-exp-flat", "sl2-exp-hyp"} == set(catalog_names())
    with pytest.raises(UnknownSurface):
        get_entry("torus")


def test_nil_plane_x0_origin_is_identity():
    e = get_entry("nil-plane-x0")
    assert np.array_equal(e.param_map(np.array(0.0), np.array(0.0)), np.eye(3))


@pytest.mark.parametrize("name", list(CATALOG))
def test_closed_form_tangents_match_chart(name):
    # the charts of periodic entries are not periodic themselves, so compare
    # on an open sub-chart
    e = get_entry(name)
    umin, umax, vmin, vmax = e.domain
    g = Grid.from_extent(64, 64, umin, umin + min(umax - umin, 2), vmin, vmin + min(vmax - vmin, 2))
    f = catalog_surface(name, grid=g)
    assert f.elements.shape == g.shape + (e.group.dim, e.group.dim)
    numeric = tangents_from_chart(f, g)
    m = (slice(None), slice(None), slice(2, -2), slice(2, -2))
    assert np.abs(numeric[m] - f.tangents[m]).max() < 1e-4


@pytest.mark.parametrize("name", list(CATALOG))
def test_conformality(name):
    e = get_entry(name)
    _, g, _, zf, _, _ = pipeline(name, 64)
    tol = 1e-8 if e.quadrature else 1e-11
    assert zf.conformality_residual(g) <= tol
    if e.conformal_factor is not None:
        U, V = g.mesh()
        assert np.allclose(zf.conform, e.conformal_factor(U, V), rtol=1e-12)


def test_sl2_flat_tangents_are_orthonormal():
    _, g, f, _, _, _ = pipeline("sl2-exp-flat", 32)
    au, av = f.tangents
    assert np.allclose(np.sum(au**2, axis=0), 1) and np.allclose(np.sum(av**2, axis=0), 1)
    assert np.allclose(np.sum(au * av, axis=0), 0, atol=1e-15)


def test_sol_plane_x0_metric():
    _, g, _, zf, _, _ = pipeline("sol-plane-x0", 32)
    _, T = g.mesh()
    assert np.allclose(zf.conform, 1 / T**2, rtol=1e-14)
    assert zf.conformality_residual(g) <= 1e-12


def test_domain_violations():
    with pytest.raises(DomainViolation):
        catalog_surface("sol-plane-x0", grid=default_grid("sol-plane-x0", 16, extent=(-1, 1, -1, 1)))
    for bad in ({"r": 0.0}, {"r": -1.0}, {"wobble": 1.0}):
        with pytest.raises(DomainViolation):
            catalog_surface("nil-cylinder", bad, default_grid("nil-cylinder", 16))
    with pytest.raises(ValueError):
        catalog_surface("nil-cylinder", {"height": 2}, default_grid("nil-cylinder", 16))


def test_constant_h_predicate():
    e = get_entry("nil-cylinder")
    assert e.has_constant_h() and not e.has_constant_h({"wobble": 0.2})
    assert not e.expected_minimal
    assert all(get_entry(n).expected_minimal for n in catalog_names() if n != "nil-cylinder")


def test_cylinder_radius_scales_mean_curvature():
    g = default_grid("nil-cylinder", 32, extent=(0, 8 * np.pi, 0, 2 * np.pi))
    f = catalog_surface("nil-cylinder", {"r": 2.0}, g)
    H = mean_curvature(maurer_cartan(f, g), f.group, g)
    assert np.allclose(H, -0.25, atol=1e-8)
