"""Discrete complex calculus on rectangular (optionally periodic) charts.

Fields are numpy arrays whose last two axes are ``(nv, nu)``: axis -1 runs
over u, axis -2 over v, so a C-order flatten is row-major with u fastest.
Leading axes (vector components, matrix entries) are carried along.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InsufficientLevels, ShapeMismatch

__all__ = [
    "Grid",
    "partial_u",
    "partial_v",
    "d_z",
    "d_zbar",
    "integrate_2form",
    "interior_mask",
    "interior_sup",
    "convergence_order",
    "field_to_json",
    "field_from_json",
]

# One-sided 4th-order closures for the first two nodes, applied to the
# differences f[1:5] - f[0] (times 1/12h) so constants are annihilated exactly.
# The far edge mirrors them with a sign flip.
_EDGE0 = np.array([48.0, -36.0, 16.0, -3.0])
_EDGE1 = np.array([-10.0, 18.0, -6.0, 1.0])


@dataclass(frozen=True)
class Grid:
    """Uniform rectangular chart with z = u + i v.

    On a periodic axis the nodes are ``u0 + i*hu`` for ``i < nu`` and the
    period is ``nu * hu``; otherwise the last node sits at ``u0 + (nu-1)*hu``.
    """

    nu: int
    nv: int
    u0: float
    v0: float
    hu: float
    hv: float
    periodic_u: bool = False
    periodic_v: bool = False
    boundary_band: int = 2

    def __post_init__(self):
        if self.nu < 8 or self.nv < 8:
            raise ValueError(f"grid needs at least 8 nodes per axis, got {self.nu}x{self.nv}")
        if not (self.hu > 0 and self.hv > 0):
            raise ValueError("grid spacings must be positive")
        if self.boundary_band < 0:
            raise ValueError("boundary band must be non-negative")

    @classmethod
    def from_extent(cls, nu, nv, umin, umax, vmin, vmax, periodic_u=False, periodic_v=False,
                    boundary_band=2):
        hu = (umax - umin) / (nu if periodic_u else nu - 1)
        hv = (vmax - vmin) / (nv if periodic_v else nv - 1)
        return cls(int(nu), int(nv), float(umin), float(vmin), float(hu), float(hv),
                   bool(periodic_u), bool(periodic_v), int(boundary_band))

    @property
    def shape(self):
        return (self.nv, self.nu)

    @property
    def u(self) -> np.ndarray:
        return self.u0 + self.hu * np.arange(self.nu)

    @property
    def v(self) -> np.ndarray:
        return self.v0 + self.hv * np.arange(self.nv)

    def mesh(self):
        """(U, V) coordinate arrays of shape (nv, nu)."""
        return np.meshgrid(self.u, self.v)

    @property
    def h(self) -> float:
        return max(self.hu, self.hv)

    def refined(self, nu, nv) -> "Grid":
        """Same chart extent at a different resolution."""
        umax = self.u0 + self.hu * (self.nu if self.periodic_u else self.nu - 1)
        vmax = self.v0 + self.hv * (self.nv if self.periodic_v else self.nv - 1)
        return Grid.from_extent(nu, nv, self.u0, umax, self.v0, vmax, self.periodic_u,
                                self.periodic_v, self.boundary_band)

    def to_dict(self) -> dict:
        d = asdict(self)
        return {
            "nu": d["nu"], "nv": d["nv"], "u0": d["u0"], "v0": d["v0"],
            "hu": d["hu"], "hv": d["hv"], "periodicU": d["periodic_u"],
            "periodicV": d["periodic_v"], "boundaryBand": d["boundary_band"],
        }

    @classmethod
    def from_dict(cls, d) -> "Grid":
        return cls(int(d["nu"]), int(d["nv"]), float(d["u0"]), float(d["v0"]),
                   float(d["hu"]), float(d["hv"]), bool(d.get("periodicU", False)),
                   bool(d.get("periodicV", False)), int(d.get("boundaryBand", 2)))


def _check(f, grid):
    f = np.asarray(f)
    if f.shape[-2:] != grid.shape:
        raise ShapeMismatch(f"field shape {f.shape[-2:]} does not match grid {grid.shape}")
    return f


def _spectral(f, h, axis):
    n = f.shape[axis]
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    if n % 2 == 0:
        k[n // 2] = 0.0
    shape = [1] * f.ndim
    shape[axis] = n
    f = f - np.take(f, [0], axis=axis)
    out = np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(f, axis=axis), axis=axis)
    return out.real if np.isrealobj(f) else out


def _fd4(f, h, axis):
    f = np.moveaxis(f, axis, -1)
    out = np.empty(f.shape, dtype=np.result_type(f, float))
    n = f.shape[-1]
    out[..., 2:n - 2] = (
        (f[..., 0:n - 4] - f[..., 4:n]) + 8.0 * (f[..., 3:n - 1] - f[..., 1:n - 3])
    ) / 12.0
    head = f[..., 1:5] - f[..., :1]
    tail = f[..., n - 5:n - 1][..., ::-1] - f[..., n - 1:]
    out[..., 0] = (head @ _EDGE0) / 12.0
    out[..., 1] = (head @ _EDGE1) / 12.0
    out[..., n - 1] = -(tail @ _EDGE0) / 12.0
    out[..., n - 2] = -(tail @ _EDGE1) / 12.0
    return np.moveaxis(out / h, -1, axis)


def partial_u(f, grid: Grid) -> np.ndarray:
    f = _check(f, grid)
    return _spectral(f, grid.hu, -1) if grid.periodic_u else _fd4(f, grid.hu, -1)


def partial_v(f, grid: Grid) -> np.ndarray:
    f = _check(f, grid)
    return _spectral(f, grid.hv, -2) if grid.periodic_v else _fd4(f, grid.hv, -2)


def d_z(f, grid: Grid) -> np.ndarray:
    """Wirtinger derivative 1/2 (d/du - i d/dv)."""
    return 0.5 * (partial_u(f, grid) - 1j * partial_v(f, grid))


def d_zbar(f, grid: Grid) -> np.ndarray:
    """Wirtinger derivative 1/2 (d/du + i d/dv)."""
    return 0.5 * (partial_u(f, grid) + 1j * partial_v(f, grid))


def _weights(grid):
    wu = np.full(grid.nu, grid.hu)
    wv = np.full(grid.nv, grid.hv)
    if not grid.periodic_u:
        wu[0] = wu[-1] = 0.5 * grid.hu
    if not grid.periodic_v:
        wv[0] = wv[-1] = 0.5 * grid.hv
    return wv[:, None] * wu[None, :]


def integrate_2form(f, grid: Grid, mask=None) -> complex:
    """Integral of f du dv (trapezoid on open edges, exact sum on periodic ones).

    ``mask`` selects the nodes that contribute (True = include).
    """
    f = _check(f, grid)
    w = _weights(grid)
    if mask is not None:
        mask = _check(mask, grid)
        w = np.where(mask, w, 0.0)
    return complex(np.sum(f * w))


def interior_mask(grid: Grid) -> np.ndarray:
    """Nodes at least ``boundary_band`` away from every non-periodic edge."""
    m = np.ones(grid.shape, dtype=bool)
    b = grid.boundary_band
    if b:
        if not grid.periodic_u:
            m[:, :b] = False
            m[:, grid.nu - b:] = False
        if not grid.periodic_v:
            m[:b, :] = False
            m[grid.nv - b:, :] = False
    return m


def interior_sup(f, grid: Grid, mask=None) -> float:
    """max |f| over interior nodes (further restricted by ``mask``)."""
    f = np.abs(_check(f, grid))
    m = interior_mask(grid)
    if mask is not None:
        m = m & _check(mask, grid)
    if f.ndim > 2:
        f = f.reshape((-1,) + grid.shape).max(axis=0)
    if not m.any():
        return 0.0
    return float(f[m].max())


def convergence_order(norms, floor=1e-12) -> float:
    """Observed order from (h, residual) pairs by least squares in log-log.

    Levels whose residual is at or below ``floor`` are treated as converged
    to roundoff and dropped.  If fewer than two levels remain above the floor
    the residual is resolved exactly and ``inf`` is returned.
    """
    norms = sorted(((float(h), float(r)) for h, r in norms), reverse=True)
    if len(norms) < 3:
        raise InsufficientLevels(f"need at least 3 refinement levels, got {len(norms)}")
    if any(not math.isfinite(r) or r < 0 for _, r in norms):
        raise ValueError("residuals must be finite and non-negative")
    kept = []
    for h, r in norms:
        if r <= floor:
            break
        kept.append((h, r))
    if len(kept) < 2:
        return math.inf
    x = np.log([h for h, _ in kept])
    y = np.log([r for _, r in kept])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def field_to_json(f, grid: Grid | None = None) -> dict:
    """Field dump ``{nu, nv, data: [[re, im], ...]}``, row-major u fastest."""
    f = np.asarray(f)
    if grid is not None:
        _check(f, grid)
    nv, nu = f.shape[-2:]
    flat = np.asarray(f, dtype=complex).reshape(-1)
    return {"nu": int(nu), "nv": int(nv),
            "data": [[float(z.real), float(z.imag)] for z in flat]}


def field_from_json(d) -> np.ndarray:
    data = np.asarray(d["data"], dtype=float).reshape(-1, 2)
    out = (data[:, 0] + 1j * data[:, 1]).reshape(int(d["nv"]), int(d["nu"]))
    return out
