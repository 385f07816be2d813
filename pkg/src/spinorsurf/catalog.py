"""Analytic test surfaces with isothermal charts.

Each entry provides the chart matrices f(u, v) together with closed-form
left-trivialized tangents f^-1 f_u and f^-1 f_v, so the Maurer-Cartan data
is exact at every node and only the geometric derivatives are discretized.
Entries whose isothermal coordinate has no elementary closed form solve the
defining ODE to near machine precision instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainViolation, UnknownSurface
from .grid import Grid
from .lie import NIL, SL2, SOL, LieGroup3
from .spinor import ImmersionField

__all__ = ["CatalogEntry", "CATALOG", "catalog_names", "get_entry", "catalog_surface", "default_grid"]


@dataclass(frozen=True)
class CatalogEntry:
    """A registered test surface.

    ``param_map(u, v, **params)`` returns chart matrices of shape
    ``u.shape + (n, n)``; ``tangent_map`` returns the algebra coordinates of
    f^-1 f_u and f^-1 f_v with shape ``(2, 3) + u.shape``.
    """

    name: str
    group: LieGroup3
    param_map: Callable
    tangent_map: Callable
    domain: tuple
    periodic: tuple = (False, False)
    conformal_factor: Callable | None = None
    expected_minimal: bool = False
    constant_h: bool | Callable = False
    quadrature: bool = False
    defaults: dict = field(default_factory=dict)
    notes: str = ""

    def params(self, overrides=None) -> dict:
        p = dict(self.defaults)
        for k, v in (overrides or {}).items():
            if k not in p:
                raise ValueError(f"{self.name} has no parameter {k!r}")
            p[k] = float(v)
        return p

    def has_constant_h(self, params=None) -> bool:
        """Whether H is constant for these parameters (a predicate may decide)."""
        if callable(self.constant_h):
            return bool(self.constant_h(**self.params(params)))
        return self.constant_h

    def oracle_map(self, params=None):
        """Scalar chart map (u, v) -> matrix, used by the covariant oracle."""
        p = self.params(params)
        return lambda u, v: self.param_map(np.asarray(u, float), np.asarray(v, float), **p)


def _stack_vec(*comps, shape):
    return np.stack([np.broadcast_to(np.asarray(c, dtype=float), shape) for c in comps])


def _ode_table(rhs, y0, t, rtol=1e-13, atol=1e-15):
    """Solution of y' = rhs(t, y), y(0) = y0 at arbitrary (unsorted) times t."""
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    out = np.empty((len(y0), flat.size))
    for sign in (1.0, -1.0):
        sel = flat * sign > 0
        if not sel.any():
            continue
        ts, inv = np.unique(flat[sel], return_inverse=True)
        sol = solve_ivp(rhs, (0.0, ts[-1] if sign > 0 else ts[0]), y0, method="DOP853",
                        t_eval=ts if sign > 0 else ts[::-1], rtol=rtol, atol=atol)
        if not sol.success:
            raise RuntimeError(sol.message)
        ys = sol.y if sign > 0 else sol.y[:, ::-1]
        out[:, sel] = ys[:, inv]
    zero = flat == 0
    out[:, zero] = np.asarray(y0, dtype=float)[:, None]
    return out.reshape((len(y0),) + t.shape)


# ---------------------------------------------------------------------------
# Nil


def _nil_matrix(x, y, z):
    x, y, z = np.broadcast_arrays(x, y, z)
    m = np.zeros(x.shape + (3, 3))
    m[..., 0, 0] = m[..., 1, 1] = m[..., 2, 2] = 1.0
    m[..., 0, 1] = x
    m[..., 1, 2] = y
    m[..., 0, 2] = z
    return m


def _nil_plane_x0(u, v):
    return _nil_matrix(0.0, u, v)


def _nil_plane_x0_tan(u, v):
    s = np.shape(u)
    return np.stack([_stack_vec(0, 1, 0, shape=s), _stack_vec(0, 0, 1, shape=s)])


def _nil_plane_z0(u, v):
    return _nil_matrix(np.sinh(u), v, 0.0)


def _nil_plane_z0_tan(u, v):
    s = np.shape(u)
    return np.stack([_stack_vec(np.cosh(u), 0, 0, shape=s), _stack_vec(0, 1, -np.sinh(u), shape=s)])


def _cyl_theta(s, r, wobble):
    return s / r + 0.5 * wobble * np.sin(2.0 * s / r)


def _cyl_curve(s, r, wobble):
    """Planar unit-speed curve with tangent angle theta(s) and its lifted height."""
    if wobble == 0.0:
        th = s / r
        x, y = r * np.cos(th), r * np.sin(th)
        return x, y, r * r * (0.5 * th + 0.25 * np.sin(2.0 * th))

    def rhs(t, q):
        th = _cyl_theta(t, r, wobble)
        return [-np.sin(th), np.cos(th), q[0] * np.cos(th)]

    x, y, z = _ode_table(rhs, [r, 0.0, 0.0], s)
    return x, y, z


def _check_cyl(r, wobble):
    if not r > 0:
        raise DomainViolation(f"cylinder radius must be positive, got {r}")
    if not abs(wobble) < 1:
        raise DomainViolation(f"wobble must satisfy |wobble| < 1, got {wobble}")


def _nil_cylinder(u, v, r=1.0, wobble=0.0):
    _check_cyl(r, wobble)
    x, y, z = _cyl_curve(np.asarray(u, float), r, wobble)
    return _nil_matrix(x, y, z + v)


def _nil_cylinder_tan(u, v, r=1.0, wobble=0.0):
    _check_cyl(r, wobble)
    th = _cyl_theta(np.asarray(u, float), r, wobble)
    s = np.shape(u)
    return np.stack([_stack_vec(-np.sin(th), np.cos(th), 0, shape=s), _stack_vec(0, 0, 1, shape=s)])


# ---------------------------------------------------------------------------
# Sol


def _sol_matrix(x, y, z):
    x, y, z = np.broadcast_arrays(x, y, z)
    m = np.zeros(x.shape + (3, 3))
    m[..., 0, 0] = np.exp(-z)
    m[..., 1, 1] = np.exp(z)
    m[..., 2, 2] = 1.0
    m[..., 0, 2] = x
    m[..., 1, 2] = y
    return m


def _sol_plane_z0(u, v):
    return _sol_matrix(u, v, 0.0)


def _sol_plane_z0_tan(u, v):
    s = np.shape(u)
    return np.stack([_stack_vec(1, 0, 0, shape=s), _stack_vec(0, 1, 0, shape=s)])


def _check_t(t):
    if np.any(np.asarray(t) <= 0):
        raise DomainViolation("sol-plane-x0 needs t > 0 everywhere on the chart")


def _sol_plane_x0(u, t):
    _check_t(t)
    return _sol_matrix(0.0, u, np.log(t))


def _sol_plane_x0_tan(u, t):
    _check_t(t)
    s = np.shape(u)
    inv = 1.0 / np.asarray(t, float)
    return np.stack([_stack_vec(0, inv, 0, shape=s), _stack_vec(0, 0, inv, shape=s)])


def _isothermal_height(w, metric):
    """sigma(w) with d sigma / dw = sqrt(metric(sigma)), sigma(0) = 0."""
    return _ode_table(lambda t, q: [np.sqrt(metric(q[0]))], [0.0], w)[0]


def _sol_diag_metric(sig):
    return np.cosh(2.0 * sig)


def _sol_exp_diag(u, w):
    sig = _isothermal_height(w, _sol_diag_metric)
    a = np.asarray(u, float) / np.sqrt(2.0)
    return SOL.exp(np.stack([a, a, np.zeros_like(a)], axis=-1)) @ _sol_matrix(0.0, 0.0, sig)


def _sol_exp_diag_tan(u, w):
    sig = _isothermal_height(w, _sol_diag_metric)
    s = np.shape(u)
    c = 1.0 / np.sqrt(2.0)
    return np.stack([
        _stack_vec(c * np.exp(sig), c * np.exp(-sig), 0, shape=s),
        _stack_vec(0, 0, np.sqrt(np.cosh(2.0 * sig)), shape=s),
    ])


# ---------------------------------------------------------------------------
# SL2


def _sl2_axis(t, k):
    vec = np.zeros(np.shape(t) + (3,))
    vec[..., k] = t
    return SL2.exp(vec)


def _sl2_exp_flat(u, v):
    return _sl2_axis(np.asarray(u, float), 0) @ _sl2_axis(np.asarray(v, float), 2)


def _sl2_exp_flat_tan(u, v):
    s = np.shape(u)
    v = np.asarray(v, float)
    return np.stack([_stack_vec(np.cos(0.5 * v), -np.sin(0.5 * v), 0, shape=s),
                     _stack_vec(0, 0, 1, shape=s)])


def _sl2_hyp_metric(sig):
    return np.cosh(sig) ** 2 + 0.25 * np.sinh(sig) ** 2


def _sl2_exp_hyp(u, w):
    sig = _isothermal_height(w, _sl2_hyp_metric)
    return _sl2_axis(np.asarray(u, float), 2) @ _sl2_axis(sig, 0)


def _sl2_exp_hyp_tan(u, w):
    sig = _isothermal_height(w, _sl2_hyp_metric)
    s = np.shape(u)
    return np.stack([
        _stack_vec(0, 0.5 * np.sinh(sig), np.cosh(sig), shape=s),
        _stack_vec(np.sqrt(_sl2_hyp_metric(sig)), 0, 0, shape=s),
    ])


# ---------------------------------------------------------------------------

_FOUR_PI = 4.0 * np.pi

CATALOG = {
    e.name: e
    for e in [
        CatalogEntry(
            "nil-plane-x0", NIL, _nil_plane_x0, _nil_plane_x0_tan, (-1.0, 1.0, -1.0, 1.0),
            conformal_factor=lambda u, v: np.ones(np.shape(u)),
            expected_minimal=True, constant_h=True,
            notes="vertical plane x = 0, f = (0, u, v); constant spinor",
        ),
        CatalogEntry(
            "nil-plane-z0", NIL, _nil_plane_z0, _nil_plane_z0_tan, (-1.0, 1.0, -1.0, 1.0),
            conformal_factor=lambda u, v: np.cosh(u) ** 2,
            expected_minimal=True, constant_h=True,
            notes="plane z = 0 in the isothermal chart (sinh u, v, 0); psi1 vanishes on u = 0",
        ),
        CatalogEntry(
            "nil-cylinder", NIL, _nil_cylinder, _nil_cylinder_tan, (0.0, _FOUR_PI, 0.0, 2 * np.pi),
            periodic=(True, True), conformal_factor=lambda u, v: np.ones(np.shape(u)),
            defaults={"r": 1.0, "wobble": 0.0},
            constant_h=lambda r, wobble: wobble == 0.0,
            notes="vertical cylinder over a closed unit-speed curve with tangent angle "
                  "u/r + wobble/2 sin(2u/r); u spans the spin double cover",
        ),
        CatalogEntry(
            "sol-plane-z0", SOL, _sol_plane_z0, _sol_plane_z0_tan, (-1.0, 1.0, -1.0, 1.0),
            conformal_factor=lambda u, v: np.ones(np.shape(u)),
            expected_minimal=True, constant_h=True,
            notes="plane z = 0; Z3 vanishes identically (fully degenerate potentials)",
        ),
        CatalogEntry(
            "sol-plane-x0", SOL, _sol_plane_x0, _sol_plane_x0_tan, (-0.5, 0.5, 1.0, 2.0),
            conformal_factor=lambda u, t: 1.0 / np.asarray(t, float) ** 2,
            expected_minimal=True, constant_h=True,
            notes="plane x = 0 in the chart (0, u, log t), metric (du^2 + dt^2) / t^2",
        ),
        CatalogEntry(
            "sol-exp-diag", SOL, _sol_exp_diag, _sol_exp_diag_tan, (-0.5, 0.5, -0.5, 0.5),
            quadrature=True, expected_minimal=True, constant_h=True,
            notes="exp(u (e1 + e2)/sqrt2) exp(sigma e3) with sigma(w) from "
                  "d sigma / dw = sqrt(cosh 2 sigma); minimal because nabla_{f_u} f_u "
                  "is vertical while the normal is horizontal",
        ),
        CatalogEntry(
            "sl2-exp-flat", SL2, _sl2_exp_flat, _sl2_exp_flat_tan, (0.0, 2 * np.pi, 0.0, 2 * _FOUR_PI),
            periodic=(True, True), conformal_factor=lambda u, v: np.ones(np.shape(u)),
            expected_minimal=True, constant_h=True,
            notes="exp(u e1) exp(v e3); v spans the spin period 8 pi; minimal since "
                  "nabla_X X = 0 for horizontal X",
        ),
        CatalogEntry(
            "sl2-exp-hyp", SL2, _sl2_exp_hyp, _sl2_exp_hyp_tan, (-0.5, 0.5, -0.5, 0.5),
            quadrature=True, expected_minimal=True, constant_h=True,
            notes="exp(u e3) exp(sigma e1) with sigma(w) from "
                  "d sigma / dw = sqrt(cosh^2 sigma + sinh^2 sigma / 4); minimal since "
                  "nabla_{f_u} f_u is a multiple of e1, a tangent direction",
        ),
    ]
}


def catalog_names():
    return list(CATALOG)


def get_entry(name) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownSurface(f"unknown surface {name!r}; known: {', '.join(CATALOG)}") from None


def default_grid(name, nu=64, nv=None, extent=None) -> Grid:
    """Grid over the entry's default (or a custom) chart extent."""
    e = get_entry(name)
    umin, umax, vmin, vmax = extent if extent is not None else e.domain
    return Grid.from_extent(nu, nv or nu, umin, umax, vmin, vmax, *e.periodic)


def catalog_surface(name, params=None, grid: Grid | None = None) -> ImmersionField:
    """Sample a catalog surface (chart matrices plus exact tangents) on a grid."""
    e = get_entry(name)
    p = e.params(params)
    grid = grid or default_grid(name)
    U, V = grid.mesh()
    elems = e.param_map(U, V, **p)
    tans = e.tangent_map(U, V, **p)
    if not np.all(np.isfinite(elems)):
        raise DomainViolation(f"{name} chart is not finite on the requested extent")
    return ImmersionField(e.group, elems, tans)
