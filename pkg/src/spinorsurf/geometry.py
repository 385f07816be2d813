"""Extrinsic geometry of conformal surfaces from spinor and Maurer-Cartan data.

Every quantity that appears on both sides of an identity is computed along
two routes where possible: the spinor route (psi and its derivatives) and
the Maurer-Cartan route (Z, the connection table, and the normal built from
Z).  Residual norms measure how well the two agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateImmersion, GroupUnsupported
from .grid import Grid, d_z, d_zbar, integrate_2form, interior_mask, interior_sup
from .lie import (
    ConnectionTable,
    CurvatureTensor,
    GroupName,
    LieGroup3,
    connection_from_structure,
    curvature_tensor,
    tangent_plane_curvature_field,
)
from .spinor import PotentialField, SpinorField, ZField

__all__ = [
    "GeometryReport",
    "AbreschResult",
    "CMCReport",
    "connection_of",
    "curvature_of",
    "normal_frame",
    "normal_from_Z",
    "mean_curvature",
    "hopf_differential",
    "hopf_covariant",
    "covariant_oracle",
    "abresch_differential",
    "codazzi_residuals",
    "weingarten_residual",
    "derivational_residuals",
    "derivational_generic",
    "energy",
    "spinor_energy_integrand",
    "energy_geometric",
    "cmc_check",
]

_CONN = {}
_CURV = {}


def connection_of(group: LieGroup3) -> ConnectionTable:
    if group.name not in _CONN:
        _CONN[group.name] = connection_from_structure(group)
    return _CONN[group.name]


def curvature_of(group: LieGroup3) -> CurvatureTensor:
    if group.name not in _CURV:
        _CURV[group.name] = curvature_tensor(group, connection_of(group))
    return _CURV[group.name]


@dataclass(eq=False)
class GeometryReport:
    """Everything measured for one analyzed surface."""

    group: str
    surface: str
    grid: Grid
    area: float
    meanH: np.ndarray
    normal: np.ndarray
    hopfA: np.ndarray
    abreschA: np.ndarray | None
    Khat: np.ndarray
    energy: complex
    energyGeo: float | None
    residualNorms: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# normals and curvature


def normal_frame(s: SpinorField) -> np.ndarray:
    """Left-translated unit normal f^-1(N) from the spinor, shape (3, ...)."""
    p1, p2 = s.psi
    ea = s.exp_alpha
    if np.min(ea) <= 0:
        raise DegenerateImmersion("e^alpha vanishes")
    q = p1 * p2
    n = np.stack([
        (1j * (q - np.conj(q))).real,
        -(q + np.conj(q)).real,
        np.abs(p2) ** 2 - np.abs(p1) ** 2,
    ])
    return n / ea


def normal_from_Z(zf: ZField) -> np.ndarray:
    """f^-1(N) = 2i e^{-2 alpha} conj(Z) x Z, independent of the spinor."""
    Z = zf.Z
    return (2j * np.cross(np.conj(Z), Z, axis=0) / zf.conform).real


def _tension(zf: ZField, conn: ConnectionTable, grid: Grid) -> np.ndarray:
    Z, Zb = zf.Z, np.conj(zf.Z)
    return d_z(Zb, grid) + d_zbar(Z, grid) + conn.nabla(Z, Zb) + conn.nabla(Zb, Z)


def mean_curvature(zf: ZField, group: LieGroup3, grid: Grid, full=False):
    """Mean curvature from the tension of the Maurer-Cartan data.

    H = e^{-2 alpha} <dbar Psi + d Psi* + nabla_Psi Psi* + nabla_Psi* Psi, f^-1(N)>.
    With ``full=True`` returns ``(H, imag, tangential)``: the imaginary part of
    the projection and the tangential part of the tension, both of which
    vanish for exact data.
    """
    conn = connection_of(group)
    tau = _tension(zf, conn, grid)
    n = normal_from_Z(zf)
    proj = np.einsum("k...,k...->...", tau, n) / zf.conform
    H = proj.real
    if not full:
        return H
    tangential = tau - zf.conform * proj * n
    return H, proj.imag, np.sqrt(np.sum(np.abs(tangential) ** 2, axis=0)) / zf.conform


def _hopf_group_term(s: SpinorField, group: LieGroup3):
    p1, p2b = s.psi[0], np.conj(s.psi[1])
    if group.name is GroupName.NIL:
        return 1j * p1**2 * p2b**2
    if group.name is GroupName.SL2:
        return -2.5j * p1**2 * p2b**2
    return 0.5 * (p2b**4 - p1**4)


def hopf_differential(s: SpinorField, group: LieGroup3, grid: Grid, group_term_sign=1.0):
    """Spinor form of the Hopf differential A = <nabla_{f_z} f_z, N>.

    ``group_term_sign`` exists only to build negative controls.
    """
    p1, p2b = s.psi[0], np.conj(s.psi[1])
    deriv = p2b * d_z(p1, grid) - p1 * d_z(p2b, grid)
    return deriv + group_term_sign * _hopf_group_term(s, group)


def hopf_covariant(zf: ZField, group: LieGroup3, grid: Grid) -> np.ndarray:
    """<d Psi + nabla_Psi Psi, f^-1(N)> with the normal built from Z."""
    conn = connection_of(group)
    acc = d_z(zf.Z, grid) + conn.nabla(zf.Z, zf.Z)
    return np.einsum("k...,k...->...", acc, normal_from_Z(zf))


def covariant_oracle(param_map, group: LieGroup3, u, v, step=1e-2):
    """Brute-force second fundamental form of a closed-form chart at (u, v).

    Differentiates ``param_map(u, v) -> chart matrix`` with 4th-order
    stencils, left-trivializes, and applies the connection table directly:
    nabla_X Y = f (f^-1 Y' - (f^-1 X')(f^-1 Y') + nabla_x y).  Nothing from
    the spinor or grid machinery is used.

    Returns:
        dict with ``a_u``, ``a_v`` (algebra tangents), ``N`` (unit normal),
        ``H`` (mean curvature), ``A`` (Hopf coefficient <nabla_{f_z} f_z, N>),
        and ``conform`` (e^{2 alpha}).
    """
    conn = connection_of(group)
    h = step
    w1 = {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12}
    w2 = {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12}

    offsets = sorted({(a, 0) for a in w2} | {(0, b) for b in w2}
                     | {(a, b) for a in w1 for b in w1})
    du = np.array([a for a, _ in offsets], dtype=float)
    dv = np.array([b for _, b in offsets], dtype=float)
    table = dict(zip(offsets, np.asarray(param_map(u + du * h, v + dv * h))))

    def F(a, b):
        return table[(a, b)]

    f0 = F(0, 0)
    fu = sum(c * F(k, 0) for k, c in w1.items()) / h
    fv = sum(c * F(0, k) for k, c in w1.items()) / h
    fuu = sum(c * F(k, 0) for k, c in w2.items()) / h**2
    fvv = sum(c * F(0, k) for k, c in w2.items()) / h**2
    fuv = sum(ca * cb * F(ka, kb) for ka, ca in w1.items() for kb, cb in w1.items()) / h**2
    inv = group.inv(f0)
    mu, mv = inv @ fu, inv @ fv
    au = group.algebra_coords(mu).real
    av = group.algebra_coords(mv).real

    def acc(first, second, dd):
        # left-trivialized covariant derivative nabla_{f_first} f_second
        x = group.algebra_coords(first).real
        y = group.algebra_coords(second).real
        return group.algebra_coords(inv @ dd - first @ second).real + conn.nabla(x, y)

    huu = acc(mu, mu, fuu)
    hvv = acc(mv, mv, fvv)
    huv = acc(mu, mv, fuv)
    n = np.cross(au, av)
    n /= np.linalg.norm(n)
    conform = 0.5 * (au @ au + av @ av)
    H = 0.5 * (huu @ n + hvv @ n) / conform
    A = 0.25 * (huu @ n - hvv @ n - 2j * (huv @ n))
    return {"a_u": au, "a_v": av, "N": n, "H": float(H), "A": complex(A), "conform": float(conform)}


# ---------------------------------------------------------------------------
# Abresch differential, Codazzi and Weingarten systems


@dataclass(eq=False)
class AbreschResult:
    tilde_a: np.ndarray
    dbar: np.ndarray
    defect: float
    holomorphy: float


def _abresch_coefficient(H, group):
    if group.name is GroupName.NIL:
        return 1.0 / (2.0 * H + 1j)
    if group.name is GroupName.SL2:
        return 5.0 / (2.0 * (H - 1j))
    raise GroupUnsupported("the Abresch differential is defined for Nil and SL2 only")


def abresch_differential(A, Z3, H, conform, group: LieGroup3, grid: Grid) -> AbreschResult:
    """A-tilde = A + c(H) Z3^2 and the defect of its dbar equation.

    ``defect`` is the sup-norm of dbar A-tilde - (1/2 H_z e^{2 alpha} +
    dbar c(H) Z3^2); ``holomorphy`` is sup |dbar A-tilde|.
    """
    coef = _abresch_coefficient(np.asarray(H), group)
    ta = A + coef * Z3**2
    dbar = d_zbar(ta, grid)
    rhs = 0.5 * d_z(H, grid) * conform + d_zbar(coef, grid) * Z3**2
    return AbreschResult(ta, dbar, interior_sup(dbar - rhs, grid), interior_sup(dbar, grid))


def codazzi_residuals(alpha, A, H, s: SpinorField, group: LieGroup3, grid: Grid):
    """Pointwise defects of the two Codazzi equations and their sup-norms.

    Returns ``(r1, r2, lhs1, (norm1, norm2))``, ``lhs1`` being the Gauss-side
    combination alpha_zzbar - e^{-2 alpha}|A|^2 + e^{2 alpha} H^2 / 4.
    """
    p1, p2 = s.psi
    a1, a2 = np.abs(p1) ** 2, np.abs(p2) ** 2
    Z3 = p1 * np.conj(p2)
    e2a = np.exp(2 * alpha)
    lhs1 = d_z(d_zbar(alpha, grid), grid).real - np.abs(A) ** 2 / e2a + 0.25 * e2a * H**2
    if group.name is GroupName.NIL:
        rhs1 = 3.0 / 16.0 * e2a - np.abs(Z3) ** 2
    elif group.name is GroupName.SL2:
        rhs1 = e2a - 5.0 * np.abs(Z3) ** 2
    else:
        rhs1 = 0.25 * (6.0 * a1 * a2 - a1**2 - a2**2)
    r1 = lhs1 - rhs1
    if group.name is GroupName.SOL:
        r2 = d_zbar(A, grid) - 0.5 * d_z(H, grid) * e2a - (a2**2 - a1**2) * Z3
    else:
        r2 = d_zbar(A, grid) - 0.5 * d_z(H, grid) * e2a
        coef = _abresch_coefficient(np.asarray(H), group)
        r2 = r2 + d_zbar(coef * Z3**2, grid) - d_zbar(coef, grid) * Z3**2
    return r1, r2, lhs1, (interior_sup(r1, grid), interior_sup(r2, grid))


def _weingarten_terms(s, group):
    p1, p2 = s.psi
    if group.name is GroupName.NIL:
        return -0.5j * p1**2 * np.conj(p2), -0.5j * np.conj(p1) * p2**2
    if group.name is GroupName.SL2:
        return 1.25j * p1**2 * np.conj(p2), 1.25j * np.conj(p1) * p2**2
    return -0.5 * np.conj(p2) ** 3, -0.5 * np.conj(p1) ** 3


def weingarten_residual(s: SpinorField, alpha, A, group: LieGroup3, grid: Grid) -> float:
    """Sup-norm defect of the d psi1 and dbar psi2 Weingarten equations."""
    p1, p2 = s.psi
    t, u = _weingarten_terms(s, group)
    ema = np.exp(-alpha)
    e1 = d_z(p1, grid) - (d_z(alpha, grid) * p1 + A * ema * p2 + t)
    e2 = d_zbar(p2, grid) - (-np.conj(A) * ema * p1 + d_zbar(alpha, grid) * p2 + u)
    return interior_sup(np.abs(e1) + np.abs(e2), grid)


# ---------------------------------------------------------------------------
# derivational equations


def _normal_cross(Z, Zb):
    return np.stack([
        Zb[1] * Z[2] - Z[1] * Zb[2],
        Zb[2] * Z[0] - Z[2] * Zb[0],
        Zb[0] * Z[1] - Z[0] * Zb[1],
    ])


def derivational_residuals(zf: ZField, H, group: LieGroup3, grid: Grid, s: SpinorField | None = None):
    """The six componentwise derivational equations, written out per group.

    Returns a dict ``{"derivational1": ..., ..., "derivational6": ...}`` of
    sup-norms.  For Nil and SL2 with a spinor supplied, the identity pair for
    d conj(Z3) -/+ dbar Z3 is added as ``derivational7``.
    """
    Z = zf.Z
    Zb = np.conj(Z)
    dZb = d_z(Zb, grid)
    dbZ = d_zbar(Z, grid)
    m = dZb - dbZ
    p = dZb + dbZ
    cr = 2j * H * _normal_cross(Z, Zb)
    Z1, Z2, Z3 = Z
    B1, B2, B3 = Zb
    if group.name is GroupName.NIL:
        eqs = [
            m[0],
            m[1],
            m[2] + (Z1 * B2 - B1 * Z2),
            p[0] + (Z2 * B3 + B2 * Z3) - cr[0],
            p[1] - (Z1 * B3 + B1 * Z3) - cr[1],
            p[2] - cr[2],
        ]
    elif group.name is GroupName.SL2:
        eqs = [
            m[0] + 0.5 * (Z2 * B3 - B2 * Z3),
            m[1] + 0.5 * (Z3 * B1 - B3 * Z1),
            m[2] - 2.0 * (Z1 * B2 - B1 * Z2),
            p[0] - 2.5 * (Z2 * B3 + B2 * Z3) - cr[0],
            p[1] + 2.5 * (Z1 * B3 + B1 * Z3) - cr[1],
            p[2] - cr[2],
        ]
    else:
        eqs = [
            m[0] + (Z1 * B3 - B1 * Z3),
            m[1] - (Z2 * B3 - B2 * Z3),
            m[2],
            p[0] + (Z1 * B3 + B1 * Z3) - cr[0],
            p[1] - (Z2 * B3 + B2 * Z3) - cr[1],
            p[2] - 2.0 * (np.abs(Z1) ** 2 - np.abs(Z2) ** 2) - cr[2],
        ]
    out = {f"derivational{k + 1}": interior_sup(e, grid) for k, e in enumerate(eqs)}
    if s is not None and group.name is not GroupName.SOL:
        quart = np.abs(s.psi[1]) ** 4 - np.abs(s.psi[0]) ** 4
        skew = -0.5j * quart if group.name is GroupName.NIL else 1j * quart
        e7 = np.abs(m[2] - skew) + np.abs(p[2] - H * quart)
        out["derivational7"] = interior_sup(e7, grid)
    return out


def derivational_generic(zf: ZField, H, group: LieGroup3, grid: Grid):
    """Both derivational vector equations from the connection table directly.

    Returns the pair of sup-norms (torsion equation, tension equation).
    """
    conn = connection_of(group)
    Z = zf.Z
    Zb = np.conj(Z)
    dZb = d_z(Zb, grid)
    dbZ = d_zbar(Z, grid)
    first = dZb - dbZ + conn.nabla(Z, Zb) - conn.nabla(Zb, Z)
    second = dZb + dbZ + conn.nabla(Z, Zb) + conn.nabla(Zb, Z) - 2j * H * _normal_cross(Z, Zb)
    return interior_sup(first, grid), interior_sup(second, grid)


# ---------------------------------------------------------------------------
# energies


def energy(p: PotentialField, grid: Grid) -> complex:
    """Integral of U V du dv over the nodes where the potentials are defined."""
    mask = ~p.mask if p.mask.any() else None
    return integrate_2form(p.U * p.V, grid, mask=mask)


def spinor_energy_integrand(s: SpinorField, H, group: LieGroup3) -> np.ndarray:
    """Real energy density (per du dv) written in spinor terms."""
    a1, a2 = np.abs(s.psi[0]) ** 2, np.abs(s.psi[1]) ** 2
    base = 0.25 * H**2 * (a1 + a2) ** 2
    if group.name is GroupName.NIL:
        return base - (a2 - a1) ** 2 / 16.0
    if group.name is GroupName.SL2:
        return base - (0.5 * a1 - 0.75 * a2) * (0.75 * a1 - 0.5 * a2)
    raise GroupUnsupported("no real spinor energy density is known for Sol")


def energy_geometric(H, Khat, conform, group: LieGroup3, grid: Grid, spinor_density=None):
    """Energy from mean and tangent-plane sectional curvature.

    Returns ``(E, diff)`` where ``diff`` is the sup of the pointwise
    difference to ``spinor_density`` relative to the largest density term
    (None when no spinor density is given).
    """
    if group.name is GroupName.NIL:
        dens = 0.25 * (H**2 + Khat / 4.0 - 1.0 / 16.0) * conform
    elif group.name is GroupName.SL2:
        dens = 0.25 * (H**2 + 5.0 / 16.0 * Khat - 0.25) * conform
    else:
        raise GroupUnsupported("no geometric energy formula for Sol")
    E = integrate_2form(dens, grid).real
    diff = None
    if spinor_density is not None:
        # relative to the size of the individual terms, so cancelling densities
        # do not turn roundoff into an O(1) relative error
        terms = 0.25 * (np.asarray(H) ** 2 + np.abs(Khat) + 1.0) * conform
        scale = max(np.max(np.abs(spinor_density)), np.max(np.abs(dens)), np.max(terms), 1e-300)
        diff = float(np.max(np.abs(dens - spinor_density)) / scale)
    return E, diff


def khat_field(normal, group: LieGroup3) -> np.ndarray:
    return tangent_plane_curvature_field(curvature_of(group), normal)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CMCReport:
    holomorphy: float
    h_spread: float
    holomorphic: bool
    constant_h: bool

    @property
    def consistent(self) -> bool:
        """False exactly when A-tilde looks holomorphic while H is not constant."""
        return not (self.holomorphic and not self.constant_h)


def cmc_check(H, holomorphy: float, grid: Grid, holo_tol=1e-6, h_tol=1e-6) -> CMCReport:
    """Compare holomorphy of A-tilde with constancy of H on Nil data."""
    m = interior_mask(grid)
    Hi = np.asarray(H)[m]
    spread = float(np.max(np.abs(Hi - Hi.mean()))) if Hi.size else 0.0
    return CMCReport(float(holomorphy), spread, holomorphy <= holo_tol, spread <= h_tol)
