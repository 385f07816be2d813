from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from spinorsurf.errors import DegeneratePlane, JacobiViolation, NonUnitNormal
from spinorsurf.lie import (
    NIL,
    SL2,
    SOL,
    GroupElement,
    LieGroup3,
    connection_from_structure,
    curvature_tensor,
    get_group,
    group_exp,
    group_inv,
    group_mul,
    nil_element,
    sectional_curvature,
    sol_element,
    tangent_plane_curvature,
    tangent_plane_curvature_field,
)

GROUPS = [NIL, SL2, SOL]

# nabla_{e_i} e_j as {(i, j): {k: coefficient}}, 1-based, nonzero entries only
CONNECTION_TABLES = {
    "nil": {
        (1, 2): {3: F(1, 2)}, (2, 1): {3: F(-1, 2)},
        (1, 3): {2: F(-1, 2)}, (3, 1): {2: F(-1, 2)},
        (2, 3): {1: F(1, 2)}, (3, 2): {1: F(1, 2)},
    },
    "sl2": {
        (1, 2): {3: F(-1)}, (2, 1): {3: F(1)},
        (1, 3): {2: F(1)}, (3, 1): {2: F(3, 2)},
        (2, 3): {1: F(-1)}, (3, 2): {1: F(-3, 2)},
    },
    "sol": {
        (1, 3): {1: F(1)}, (2, 3): {2: F(-1)},
        (1, 1): {3: F(-1)}, (2, 2): {3: F(1)},
    },
}

SECTIONAL = {
    "nil": {(1, 2): F(-3, 4), (1, 3): F(1, 4), (2, 3): F(1, 4)},
    "sl2": {(1, 2): F(-4), (1, 3): F(1), (2, 3): F(1)},
    "sol": {(1, 2): F(1), (1, 3): F(-1), (2, 3): F(-1)},
}


def tables(g):
    conn = connection_from_structure(g)
    return conn, curvature_tensor(g, conn)


@pytest.mark.parametrize("name", ["nil", "sl2", "sol"])
def test_connection_table_matches_golden(name):
    conn, _ = tables(get_group(name))
    for i in range(3):
        for j in range(3):
            want = CONNECTION_TABLES[name].get((i + 1, j + 1), {})
            got = conn.covariant(i, j)
            for k in range(3):
                assert got[k] == want.get(k + 1, 0), (name, i + 1, j + 1, k + 1)
                assert isinstance(got[k], F)


@pytest.mark.parametrize("name", ["nil", "sl2", "sol"])
def test_curvature_table_matches_golden(name):
    _, curv = tables(get_group(name))
    for (i, j), val in SECTIONAL[name].items():
        assert curv.component(i, j, i, j) == val
    for idx in np.ndindex(3, 3, 3, 3):
        if len(set(idx)) >= 3:
            assert curv.r[idx] == 0


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.name.value)
def test_structure_identities_exact(g):
    c = g.structure
    conn, curv = tables(g)
    gam = conn.gamma
    for i, j, k in np.ndindex(3, 3, 3):
        assert c[i, j, k] == -c[j, i, k]
        assert gam[i, j, k] + gam[j, i, k] == 0
        assert gam[i, j, k] - gam[i, k, j] == c[k, j, i]
    r = curv.r
    for a, b, cc, d in np.ndindex(3, 3, 3, 3):
        assert r[a, b, cc, d] == -r[b, a, cc, d] == -r[a, b, d, cc] == r[cc, d, a, b]
        assert r[a, b, cc, d] + r[a, cc, d, b] + r[a, d, b, cc] == 0


def test_generators_realize_brackets():
    for g in GROUPS:
        e = g.basis
        for i in range(3):
            for j in range(3):
                lhs = e[i] @ e[j] - e[j] @ e[i]
                rhs = np.einsum("k,kab->ab", g.structure_float[i, j], e)
                assert np.allclose(lhs, rhs, atol=1e-14)


def test_sl2_brackets_in_orthonormal_basis():
    c = SL2.structure
    assert c[0, 1, 2] == -2 and c[0, 2, 1] == F(-1, 2) and c[1, 2, 0] == F(1, 2)
    assert SL2.basis_scale == F(1, 2)


def test_jacobi_violation_detected():
    bad = NIL.structure.copy()
    bad[0, 2, 1] = F(1)
    bad[2, 0, 1] = F(-1)
    bad[1, 2, 0] = F(1)
    bad[2, 1, 0] = F(-1)
    bad[0, 1, 2] = F(1)
    bad[1, 0, 2] = F(-1)
    bad[0, 2, 0] = F(1)
    bad[2, 0, 0] = F(-1)
    g = LieGroup3(NIL.name, bad, F(1), NIL.generators, "broken")
    with pytest.raises(JacobiViolation):
        connection_from_structure(g)


def test_sectional_curvature_examples():
    _, nil = tables(NIL)
    _, sol = tables(SOL)
    e1, e2, e3 = np.eye(3)
    assert sectional_curvature(nil, e1, e2) == pytest.approx(-0.75, abs=1e-15)
    with pytest.raises(DegeneratePlane):
        sectional_curvature(nil, e1, 2 * e1)
    assert sectional_curvature(sol, (e1 + e2) / np.sqrt(2), e3) == pytest.approx(-1.0, abs=1e-14)


def test_tangent_plane_curvature_examples():
    _, nil = tables(NIL)
    _, sl2 = tables(SL2)
    assert tangent_plane_curvature(nil, [0, 0, 1]) == pytest.approx(-0.75)
    assert tangent_plane_curvature(nil, [1, 0, 0]) == pytest.approx(0.25)
    assert tangent_plane_curvature(sl2, [0, 0, 1]) == pytest.approx(-4.0)
    with pytest.raises(NonUnitNormal):
        tangent_plane_curvature(nil, [0, 0, 2])


unit_vectors = arrays(float, 3, elements=st.floats(-1, 1)).filter(
    lambda v: np.linalg.norm(v) > 0.1).map(lambda v: v / np.linalg.norm(v))


@given(unit_vectors)
def test_nil_tangent_plane_curvature_formula(n):
    _, nil = tables(NIL)
    assert tangent_plane_curvature(nil, n) == pytest.approx(0.25 - n[2] ** 2, abs=1e-12)
    field = tangent_plane_curvature_field(nil, n.reshape(3, 1, 1))
    assert field[0, 0] == pytest.approx(0.25 - n[2] ** 2, abs=1e-12)


@given(unit_vectors, unit_vectors)
def test_sectional_matches_plane_form(x, y):
    if abs(np.dot(x, y)) > 0.95:
        return
    for g in GROUPS:
        _, curv = tables(g)
        n = np.cross(x, y)
        n /= np.linalg.norm(n)
        assert sectional_curvature(curv, x, y) == pytest.approx(
            tangent_plane_curvature(curv, n), abs=1e-10)


vectors10 = arrays(float, 3, elements=st.floats(-10, 10)).filter(lambda v: np.linalg.norm(v) <= 10)


@settings(max_examples=60)
@given(vectors10)
def test_exp_inverse_pair(v):
    for g in GROUPS:
        a = group_exp(g, v)
        b = group_exp(g, -v)
        prod = group_mul(a, b).matrix
        scale = max(1.0, np.abs(a.matrix).max() * np.abs(b.matrix).max())
        assert np.abs(prod - np.eye(g.dim)).max() <= 1e-12 * scale


@settings(max_examples=30)
@given(arrays(float, 3, elements=st.floats(-3, 3)))
def test_exp_matches_scipy(v):
    for g in GROUPS:
        want = expm(g.algebra_matrix(v.astype(g.dtype)))
        assert np.allclose(g.exp(v), want, atol=1e-11, rtol=1e-11)


def test_exp_examples():
    m = group_exp(NIL, [0.7, 0.0, -1.3])
    assert m.coords == pytest.approx((0.7, 0.0, -1.3))
    for g in GROUPS:
        assert np.array_equal(group_exp(g, [0, 0, 0]).matrix, np.eye(g.dim))
    s = group_exp(SOL, [0, 0, 0.4])
    assert np.allclose(s.matrix, sol_element(0, 0, 0.4).matrix)


@given(arrays(float, 6, elements=st.floats(-5, 5)))
def test_nil_and_sol_multiplication_rules(p):
    x1, y1, z1, x2, y2, z2 = p
    prod = group_mul(nil_element(x1, y1, z1), nil_element(x2, y2, z2))
    assert prod.coords == pytest.approx((x1 + x2, y1 + y2, z1 + z2 + x1 * y2), abs=1e-12)
    sp = group_mul(sol_element(x1, y1, z1), sol_element(x2, y2, z2))
    x, y, z = sp.coords
    assert z == pytest.approx(z1 + z2, abs=1e-12)
    assert x == pytest.approx(x1 + np.exp(-z1) * x2, rel=1e-12, abs=1e-12)
    assert y == pytest.approx(y1 + np.exp(z1) * y2, rel=1e-12, abs=1e-12)


@given(vectors10)
def test_inverse_gives_identity(v):
    for g in GROUPS:
        a = group_exp(g, v * 0.3)
        prod = group_mul(a, group_inv(a)).matrix
        assert np.abs(prod - np.eye(g.dim)).max() <= 1e-13 * max(1, np.abs(a.matrix).max() ** 2)


def test_sl2_elements_stay_on_group():
    a = group_exp(SL2, [0.3, -0.4, 2.2])
    for _ in range(200):
        a = group_mul(a, group_exp(SL2, [0.01, -0.005, -0.3]))
    m = a.matrix
    assert np.abs(m).max() < 10
    assert abs(np.linalg.det(m) - 1) <= 1e-12
    assert np.isclose(m[1, 1], np.conj(m[0, 0]))


def test_identity_element():
    for g in GROUPS:
        assert np.array_equal(GroupElement.identity(g).matrix, np.eye(g.dim))
