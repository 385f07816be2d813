"""Generating spinors of conformal immersions and their Dirac equations.

For an immersion f with Maurer-Cartan form f^-1 df the complex components
Z_k = <f^-1 df/dz, e_k> form an isotropic vector, parametrized by a spinor
(psi1, psi2):

    Z1 = i/2 (conj(psi2)^2 + psi1^2)
    Z2 = 1/2 (conj(psi2)^2 - psi1^2)
    Z3 = psi1 conj(psi2)

The spinor satisfies a Dirac equation d psi2 + U psi1 = 0,
-dbar psi1 + V psi2 = 0 whose potentials depend on the group.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchInconsistency, DegenerateImmersion, NonConformal, ShapeMismatch
from .grid import Grid, d_z, d_zbar, interior_sup, partial_u, partial_v
from .lie import GroupName, LieGroup3

__all__ = [
    "ImmersionField",
    "ZField",
    "SpinorField",
    "PotentialField",
    "tangents_from_chart",
    "maurer_cartan",
    "spinor_from_Z",
    "Z_from_spinor",
    "potentials",
    "dirac_residual",
    "identity_residual",
    "minimal_equation_residual",
    "SOL_DEGENERACY_EPS",
]

SOL_DEGENERACY_EPS = 1e-9


@dataclass(eq=False)
class ImmersionField:
    """Sampled immersion f(u, v) in a group chart.

    Attributes:
        group: the ambient group.
        elements: chart matrices, shape (nv, nu, n, n).
        tangents: optional closed-form left-trivialized tangents, shape
            (2, 3, nv, nu): algebra coordinates of f^-1 f_u and f^-1 f_v.
    """

    group: LieGroup3
    elements: np.ndarray
    tangents: np.ndarray | None = None

    @property
    def shape(self):
        return self.elements.shape[:2]


@dataclass(eq=False)
class ZField:
    """Components of Psi = f^-1 df/dz in the orthonormal basis.

    ``Z`` has shape (3, nv, nu); ``conform`` is e^{2 alpha} = 2 sum |Z_k|^2.
    """

    Z: np.ndarray
    conform: np.ndarray

    @classmethod
    def from_components(cls, Z) -> "ZField":
        Z = np.asarray(Z, dtype=complex)
        return cls(Z, 2.0 * np.sum(np.abs(Z) ** 2, axis=0))

    @property
    def Z1(self):
        return self.Z[0]

    @property
    def Z2(self):
        return self.Z[1]

    @property
    def Z3(self):
        return self.Z[2]

    @property
    def alpha(self) -> np.ndarray:
        return 0.5 * np.log(self.conform)

    @property
    def isotropy(self) -> np.ndarray:
        """Pointwise relative defect |Z1^2 + Z2^2 + Z3^2| / sum |Z_k|^2."""
        return np.abs(np.sum(self.Z**2, axis=0)) / np.sum(np.abs(self.Z) ** 2, axis=0)

    def conformality_residual(self, grid: Grid) -> float:
        return interior_sup(self.isotropy, grid)

    @property
    def tangent_u(self) -> np.ndarray:
        """Real algebra coordinates of f^-1 f_u = Psi + Psi*."""
        return 2.0 * self.Z.real

    @property
    def tangent_v(self) -> np.ndarray:
        """Real algebra coordinates of f^-1 f_v = i (Psi - Psi*)."""
        return -2.0 * self.Z.imag


@dataclass(eq=False)
class SpinorField:
    psi: np.ndarray
    seed: tuple = (0, 0)

    @property
    def psi1(self):
        return self.psi[0]

    @property
    def psi2(self):
        return self.psi[1]

    @property
    def exp_alpha(self) -> np.ndarray:
        """e^alpha = |psi1|^2 + |psi2|^2."""
        return np.abs(self.psi[0]) ** 2 + np.abs(self.psi[1]) ** 2


@dataclass(eq=False)
class PotentialField:
    """Dirac potentials; ``mask`` marks nodes where they are set to zero."""

    U: np.ndarray
    V: np.ndarray
    mask: np.ndarray


# ---------------------------------------------------------------------------


def tangents_from_chart(f: ImmersionField, grid: Grid) -> np.ndarray:
    """f^-1 f_u and f^-1 f_v by differentiating the chart matrices on the grid.

    Periodic axes use spectral differentiation, which is only meaningful when
    the chart itself (not just the Maurer-Cartan data) is periodic.
    """
    m = np.moveaxis(f.elements, (0, 1), (-2, -1))
    mu = np.moveaxis(partial_u(m, grid), (-2, -1), (0, 1))
    mv = np.moveaxis(partial_v(m, grid), (-2, -1), (0, 1))
    inv = f.group.inv(f.elements)
    au = np.moveaxis(f.group.algebra_coords(inv @ mu), -1, 0)
    av = np.moveaxis(f.group.algebra_coords(inv @ mv), -1, 0)
    return np.stack([au.real, av.real])


def maurer_cartan(f: ImmersionField, grid: Grid, *, exact=True, conformal_tol=1e-3) -> ZField:
    """Z_k = <f^-1 df/dz, e_k> for a sampled immersion.

    Closed-form tangents carried by ``f`` are used when ``exact`` is true;
    otherwise the chart matrices are differentiated numerically.

    Raises:
        DegenerateImmersion: if e^{2 alpha} drops below 1e-10 somewhere.
        NonConformal: if the relative isotropy defect exceeds ``conformal_tol``.
    """
    if f.shape != grid.shape:
        raise ShapeMismatch(f"immersion shape {f.shape} does not match grid {grid.shape}")
    if exact and f.tangents is not None:
        au, av = f.tangents
    else:
        au, av = tangents_from_chart(f, grid)
    zf = ZField.from_components(0.5 * (au - 1j * av))
    if np.min(zf.conform) < 1e-10:
        raise DegenerateImmersion(f"e^(2 alpha) min {np.min(zf.conform):.3e}")
    res = zf.conformality_residual(grid)
    if res > conformal_tol:
        raise NonConformal(f"isotropy defect {res:.3e} exceeds {conformal_tol:.1e}")
    return zf


def Z_from_spinor(s: SpinorField) -> ZField:
    p1, p2c = s.psi[0], np.conj(s.psi[1])
    Z = np.stack([0.5j * (p2c**2 + p1**2), 0.5 * (p2c**2 - p1**2), p1 * p2c])
    return ZField.from_components(Z)


def _continue_lines(roots, start, start_vals):
    """Sign-continue square roots along axis 0 from row ``start``.

    Each new value is compared with a linear extrapolation of the two
    previous ones, so simple zeros of the root are crossed smoothly.
    """
    out = np.empty_like(roots)
    out[start] = start_vals
    n = roots.shape[0]
    for step in (1, -1):
        prev2, prev = None, out[start]
        k = start + step
        while 0 <= k < n:
            pred = prev if prev2 is None else 2.0 * prev - prev2
            cand = roots[k]
            val = np.where((cand * np.conj(pred)).real >= 0, cand, -cand)
            out[k] = val
            prev2, prev = prev, val
            k += step
    return out


def _fill_branch(root, seed):
    """Continuous branch of ``root``: sweep the seed row in u, then each column in v."""
    sj, si = seed
    row = _continue_lines(root[sj][:, None], si, root[sj, si])[:, 0]
    return _continue_lines(root, sj, row)


def _check_continuity(psi, grid, name, rel=0.2):
    """Adjacent nodes (including periodic seams) must not jump by a sign."""
    mag = np.abs(psi)
    big = mag > rel * mag.max() if mag.max() > 0 else np.zeros_like(mag, dtype=bool)
    pairs = []
    if grid.nu > 1:
        a, b = psi[:, :-1], psi[:, 1:]
        pairs.append(((a * np.conj(b)).real, big[:, :-1] & big[:, 1:], (0, 1), False))
        if grid.periodic_u:
            a, b = psi[:, -1:], psi[:, :1]
            pairs.append(((a * np.conj(b)).real, big[:, -1:] & big[:, :1], (0, 1), True))
    a, b = psi[:-1, :], psi[1:, :]
    pairs.append(((a * np.conj(b)).real, big[:-1, :] & big[1:, :], (1, 0), False))
    if grid.periodic_v:
        a, b = psi[-1:, :], psi[:1, :]
        pairs.append(((a * np.conj(b)).real, big[-1:, :] & big[:1, :], (1, 0), True))
    for dot, ok, (dj, di), seam in pairs:
        bad = np.argwhere((dot < 0) & ok)
        if len(bad):
            j, i = (int(x) for x in bad[0])
            if seam:
                j0 = grid.nv - 1 if dj else j
                i0 = grid.nu - 1 if di else i
                cyc = ((j0, i0), ((j0 + dj) % grid.nv, (i0 + di) % grid.nu))
            else:
                cyc = ((j, i), (j + dj, i + di))
            where = "periodic seam" if seam else "interior edge"
            raise BranchInconsistency(
                f"{name} changes sign across the {where} {cyc[0]} -> {cyc[1]}; "
                "the chart carries a nontrivial spin structure",
                cycle=cyc,
            )


def spinor_from_Z(zf: ZField, grid: Grid, seed=None) -> SpinorField:
    """Invert the spinor parametrization with continuous square-root branches.

    psi1^2 = -i Z1 - Z2 and conj(psi2)^2 = -i Z1 + Z2.  Branches are anchored
    at ``seed`` (default: the node of largest e^alpha), propagated by
    continuity, and psi2 is flipped wherever Z3 = psi1 conj(psi2) would
    otherwise fail.  The smaller component is finally recomputed from Z3.

    Raises:
        BranchInconsistency: when no continuous choice exists on the chart
            (a periodic seam with a nontrivial spin structure).
    """
    Z1, Z2, Z3 = zf.Z
    if seed is None:
        seed = tuple(int(x) for x in np.unravel_index(np.argmax(zf.conform), zf.conform.shape))
    r1 = np.sqrt(-1j * Z1 - Z2)
    r2 = np.sqrt(np.conj(-1j * Z1 + Z2))
    psi1 = _fill_branch(r1, seed)
    psi2 = _fill_branch(r2, seed)
    # both branches are continuous, so one global sign makes Z3 = psi1 conj(psi2)
    # hold; the per-node test afterwards only fires on genuinely broken data
    agree = (psi1 * np.conj(psi2) * np.conj(Z3)).real
    if agree.sum() < 0:
        psi2 = -psi2
        agree = -agree
    scale = np.sqrt(zf.conform).max()
    sig = np.abs(Z3) > 1e-8 * scale
    flip = sig & (agree < 0)
    psi2 = np.where(flip, -psi2, psi2)
    # the smaller component loses digits through its square; recover it from
    # Z3 divided by the larger one, keeping the branch sign already chosen
    big1 = np.abs(psi1) >= np.abs(psi2)
    with np.errstate(divide="ignore", invalid="ignore"):
        q2 = np.conj(Z3 / np.where(big1, psi1, 1.0))
        q1 = Z3 / np.conj(np.where(big1, 1.0, psi2))
    q2 = np.where((q2 * np.conj(psi2)).real < 0, -q2, q2)
    q1 = np.where((q1 * np.conj(psi1)).real < 0, -q1, q1)
    nz = np.abs(np.where(big1, psi1, psi2)) > 0
    psi2 = np.where(big1 & nz, q2, psi2)
    psi1 = np.where(~big1 & nz, q1, psi1)
    _check_continuity(psi1, grid, "psi1")
    _check_continuity(psi2, grid, "psi2")
    return SpinorField(np.stack([psi1, psi2]), seed)


def potentials(s: SpinorField, H, group: LieGroup3, eps_deg=SOL_DEGENERACY_EPS,
               sol_reading="derived") -> PotentialField:
    """Dirac potentials U, V of the group for mean curvature H.

    For Sol the group term of U is -1/2 conj(psi2)^2 conj(psi1)/psi1, the sign
    forced by the sum of the two spinor equations.  ``sol_reading="printed"``
    flips it to + (the other commonly quoted form), which is kept only so the
    discrepancy can be measured.
    """
    p1, p2 = s.psi
    a1, a2 = np.abs(p1) ** 2, np.abs(p2) ** 2
    base = 0.5 * np.asarray(H) * (a1 + a2)
    mask = np.zeros(p1.shape, dtype=bool)
    if group.name is GroupName.NIL:
        U = base + 0.25j * (a2 - a1)
        V = U.copy()
    elif group.name is GroupName.SL2:
        U = base + 1j * (0.5 * a1 - 0.75 * a2)
        V = base + 1j * (0.75 * a1 - 0.5 * a2)
    else:
        thresh = eps_deg * np.sqrt(a1 + a2).max()
        mask = (np.abs(p1) < thresh) | (np.abs(p2) < thresh)
        q1 = np.where(mask, 1.0, p1)
        q2 = np.where(mask, 1.0, p2)
        sign = {"derived": -0.5, "printed": 0.5}[sol_reading]
        U = base + sign * np.conj(p2) ** 2 * np.conj(q1) / q1
        V = base + 0.5 * np.conj(p1) ** 2 * np.conj(q2) / q2
        U = np.where(mask, 0.0, U)
        V = np.where(mask, 0.0, V)
    return PotentialField(np.asarray(U, dtype=complex), np.asarray(V, dtype=complex), mask)


def dirac_residual(s: SpinorField, p: PotentialField, grid: Grid):
    """Pointwise r1 = d psi2 + U psi1, r2 = -dbar psi1 + V psi2 and their sup-norm."""
    r1 = d_z(s.psi[1], grid) + p.U * s.psi[0]
    r2 = -d_zbar(s.psi[0], grid) + p.V * s.psi[1]
    return (r1, r2), interior_sup(np.stack([r1, r2]), grid)


def identity_residual(s: SpinorField, p: PotentialField, grid: Grid) -> float:
    """Defect of dbar(psi1 conj psi2) = V |psi2|^2 - conj(U) |psi1|^2."""
    p1, p2 = s.psi
    a1, a2 = np.abs(p1) ** 2, np.abs(p2) ** 2
    lhs = d_zbar(p1 * np.conj(p2), grid)
    rhs = (-p.U.real * a1 + p.V.real * a2) + 1j * (p.U.imag * a1 + p.V.imag * a2)
    return interior_sup(lhs - rhs, grid, mask=~p.mask if p.mask.any() else None)


def minimal_equation_residual(s: SpinorField, grid: Grid, group: LieGroup3, reading="dirac") -> float:
    """Residual of the H = 0 spinor equations.

    ``reading="dirac"`` evaluates the H = 0 specialization of the group's
    Dirac equation.  For Nil, ``reading="literal"`` instead uses
    dbar psi1 = i/4 (|psi2|^2 - |psi1|^2) psi1 for the first equation (the
    right-hand factor psi1 rather than psi2).
    """
    p1, p2 = s.psi
    a1, a2 = np.abs(p1) ** 2, np.abs(p2) ** 2
    if group.name is GroupName.NIL:
        w = 0.25j * (a2 - a1)
        first = w * (p1 if reading == "literal" else p2)
        e1 = d_zbar(p1, grid) - first
        e2 = d_z(p2, grid) + w * p1
    elif group.name is GroupName.SL2:
        e1 = d_zbar(p1, grid) - 1j * (0.75 * a1 - 0.5 * a2) * p2
        e2 = d_z(p2, grid) + 1j * (0.5 * a1 - 0.75 * a2) * p1
    else:
        e1 = d_zbar(p1, grid) - 0.5 * np.conj(p1) ** 2 * np.conj(p2)
        e2 = d_z(p2, grid) - 0.5 * np.conj(p1) * np.conj(p2) ** 2
    return interior_sup(np.abs(e1) + np.abs(e2), grid)
