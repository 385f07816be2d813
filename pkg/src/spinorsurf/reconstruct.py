"""Rebuild an immersion from its Maurer-Cartan data by integrating f_z = f Psi.

In real form f_u = f a_u and f_v = f a_v with a_u = Psi + Psi*, a_v =
i (Psi - Psi*).  Each grid step is an RK4 propagator computed from the
identity, with the half-step value of a_u (or a_v) interpolated by a cubic
through four neighbouring nodes.  Because f is only ever multiplied on the
right by propagators, reconstruction commutes exactly with left
translations.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ChartBlowup, ShapeMismatch
from .grid import Grid
from .lie import GroupElement, GroupName, LieGroup3
from .spinor import ImmersionField, ZField

__all__ = ["ReconstructionResult", "integrate_frame", "holonomy_residual", "round_trip_error"]

_BLOWUP = 1e150


@dataclass(eq=False)
class ReconstructionResult:
    immersion: ImmersionField
    holonomy_norm: float
    path_order: str
    winding: np.ndarray | None = None


def _midpoints(a, axis, periodic):
    """Cubic interpolation of the values halfway between consecutive nodes."""
    a = np.moveaxis(a, axis, 0)
    n = a.shape[0]
    if periodic:
        ext = np.concatenate([a[-1:], a, a[:2]])
        mid = (-ext[:-3] + 9 * ext[1:-2] + 9 * ext[2:-1] - ext[3:]) / 16.0
    else:
        mid = np.empty((n - 1,) + a.shape[1:], dtype=a.dtype)
        mid[1:n - 2] = (-a[:n - 3] + 9 * a[1:n - 2] + 9 * a[2:n - 1] - a[3:]) / 16.0
        mid[0] = (5 * a[0] + 15 * a[1] - 5 * a[2] + a[3]) / 16.0
        mid[n - 2] = (a[n - 4] - 5 * a[n - 3] + 15 * a[n - 2] + 5 * a[n - 1]) / 16.0
    return np.moveaxis(mid, 0, axis)


def _propagators(mats, h, axis, periodic, group):
    """RK4 step propagators P_k with f(t_{k+1}) = f(t_k) P_k for f' = f M(t).

    ``mats`` has shape (nv, nu, n, n); ``axis`` is 0 (v) or 1 (u).
    """
    mid = _midpoints(mats, axis, periodic)
    n = mats.shape[axis]
    sl0 = [slice(None)] * 2
    sl1 = [slice(None)] * 2
    sl0[axis] = slice(0, n - 1)
    sl1[axis] = slice(1, n)
    a0 = mats[tuple(sl0)]
    a1 = mats[tuple(sl1)] if not periodic else np.roll(mats, -1, axis=axis)[tuple(sl0)]
    am = mid[tuple(sl0)]
    eye = np.eye(mats.shape[-1], dtype=mats.dtype)
    k1 = a0
    k2 = (eye + 0.5 * h * k1) @ am
    k3 = (eye + 0.5 * h * k2) @ am
    k4 = (eye + h * k3) @ a1
    return group.normalize(eye + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))


def _algebra_fields(zf: ZField, group: LieGroup3):
    au = np.moveaxis(zf.tangent_u, 0, -1)
    av = np.moveaxis(zf.tangent_v, 0, -1)
    dt = group.dtype
    return group.algebra_matrix(au.astype(dt)), group.algebra_matrix(av.astype(dt))


def _guard(m):
    if not np.all(np.isfinite(m)) or np.max(np.abs(m)) > _BLOWUP:
        raise ChartBlowup("chart matrix entries left the representable range")


def integrate_frame(zf: ZField, group: LieGroup3, grid: Grid, origin: GroupElement | None = None,
                    path_order="rowMajor", anchor=(0, 0), compat_warn=1e-2) -> ReconstructionResult:
    """Integrate the frame equations over the grid.

    ``rowMajor`` walks the first column in v and then every row in u;
    ``columnMajor`` walks the first row in u and then every column in v.
    The result is left-translated so that the node ``anchor`` (j, i) maps to
    ``origin`` (identity by default).

    Raises:
        ChartBlowup: if a chart entry overflows.
    """
    if zf.Z.shape[-2:] != grid.shape:
        raise ShapeMismatch("Z field does not match grid")
    if path_order not in ("rowMajor", "columnMajor"):
        raise ValueError(f"unknown path order {path_order!r}")
    mu, mv = _algebra_fields(zf, group)
    pu = _propagators(mu, grid.hu, 1, grid.periodic_u, group)
    pv = _propagators(mv, grid.hv, 0, grid.periodic_v, group)
    nv, nu = grid.shape
    n = group.dim
    F = np.empty((nv, nu, n, n), dtype=group.dtype)
    F[0, 0] = group.identity()
    if path_order == "rowMajor":
        for j in range(nv - 1):
            F[j + 1, 0] = F[j, 0] @ pv[j, 0]
        for i in range(nu - 1):
            F[:, i + 1] = group.normalize(F[:, i] @ pu[:, i])
            _guard(F[:, i + 1])
    else:
        for i in range(nu - 1):
            F[0, i + 1] = F[0, i] @ pu[0, i]
        for j in range(nv - 1):
            F[j + 1] = group.normalize(F[j] @ pv[j])
            _guard(F[j + 1])
    _guard(F)
    g = group.identity() if origin is None else np.asarray(origin.matrix)
    F = group.normalize(g @ group.inv(F[anchor]) @ F)
    hol = holonomy_residual(zf, group, grid)
    if compat_warn is not None and np.max(hol, initial=0.0) > compat_warn / grid.h:
        warnings.warn(f"Z data look incompatible (max plaquette defect {np.max(hol):.2e})",
                      RuntimeWarning, stacklevel=2)
    winding = None
    if group.name is GroupName.SL2:
        w = group.winding(F)
        w[:, 0] = np.unwrap(w[:, 0])
        winding = np.unwrap(w, axis=1)
    return ReconstructionResult(ImmersionField(group, F), float(np.max(hol, initial=0.0)),
                                path_order, winding)


def holonomy_residual(zf: ZField, group: LieGroup3, grid: Grid) -> np.ndarray:
    """Per-plaquette path defect ||P_u P_v - P_v P_u|| / (hu hv), shape (nv-1, nu-1)."""
    mu, mv = _algebra_fields(zf, group)
    pu = _propagators(mu, grid.hu, 1, grid.periodic_u, group)
    pv = _propagators(mv, grid.hv, 0, grid.periodic_v, group)
    p1 = pu[:-1] @ pv[:, 1:]
    p2 = pv[:, :-1] @ pu[1:]
    return np.linalg.norm(p1 - p2, axis=(-2, -1)) / (grid.hu * grid.hv)


def round_trip_error(f0: ImmersionField, f1: ImmersionField, seed=(0, 0)) -> float:
    """max ||f0^-1 g f1 - I|| where g aligns f1 with f0 at the seed node."""
    if f0.elements.shape != f1.elements.shape or f0.group is not f1.group:
        raise ShapeMismatch("immersions differ in shape or group")
    grp = f0.group
    g = f0.elements[seed] @ grp.inv(f1.elements[seed])
    d = grp.inv(f0.elements) @ (g @ f1.elements) - grp.identity()
    return float(np.max(np.linalg.norm(d, axis=(-2, -1))))

