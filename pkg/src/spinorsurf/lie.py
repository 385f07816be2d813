"""Model Lie groups Nil, SL2 and Sol with their left-invariant geometry.

Connection and curvature tables are built in exact rational arithmetic from
the structure constants of a fixed orthonormal basis ``e1, e2, e3``.  Group
elements live in a matrix chart:

* Nil: 3x3 unit upper-triangular real matrices.
* Sol: 3x3 real matrices ``[[e^-z, 0, x], [0, e^z, y], [0, 0, 1]]``.
* SL2: 2x2 complex matrices of SU(1,1) (the f1, f2, f3 realization, with
  ``e_j = f_j / 2``).  The universal cover is tracked only as an
  informational winding angle.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DegeneratePlane, JacobiViolation, NonUnitNormal, SingularElement

__all__ = [
    "GroupName",
    "LieGroup3",
    "ConnectionTable",
    "CurvatureTensor",
    "GroupElement",
    "NIL",
    "SL2",
    "SOL",
    "get_group",
    "connection_from_structure",
    "curvature_tensor",
    "sectional_curvature",
    "tangent_plane_curvature",
    "tangent_plane_curvature_field",
    "group_exp",
    "group_mul",
    "group_inv",
    "nil_element",
    "sol_element",
]


class GroupName(str, enum.Enum):
    NIL = "nil"
    SL2 = "sl2"
    SOL = "sol"


def _frac_array(shape):
    a = np.empty(shape, dtype=object)
    a[...] = Fraction(0)
    return a


def _structure(brackets):
    """Build c[i, j, k] = c^k_ij from ``{(i, j): {k: coeff}}`` with i < j."""
    c = _frac_array((3, 3, 3))
    for (i, j), out in brackets.items():
        for k, val in out.items():
            c[i, j, k] = Fraction(val)
            c[j, i, k] = -Fraction(val)
    return c


@dataclass(frozen=True, eq=False)
class LieGroup3:
    """A three-dimensional Lie group with a fixed orthonormal Lie algebra basis.

    Attributes:
        name: which model group.
        structure: object array ``c[i, j, k] = c^k_ij`` of Fractions, so that
            ``[e_i, e_j] = sum_k c^k_ij e_k``.
        basis_scale: factor relating the raw generators to the orthonormal
            basis (1 for Nil and Sol, 1/2 for SL2 where ``e_j = f_j / 2``).
        generators: raw chart generators (f_j for SL2), shape (3, n, n).
        chart: short description of the matrix realization.
    """

    name: GroupName
    structure: np.ndarray
    basis_scale: Fraction
    generators: np.ndarray
    chart: str

    def __repr__(self):
        return f"LieGroup3({self.name.value})"

    @property
    def dim(self) -> int:
        return self.generators.shape[-1]

    @property
    def dtype(self):
        return complex if self.name is GroupName.SL2 else float

    @cached_property
    def basis(self) -> np.ndarray:
        """Orthonormal basis matrices e_1, e_2, e_3 in the chart."""
        return self.generators * float(self.basis_scale)

    @cached_property
    def _projector(self) -> np.ndarray:
        flat = self.basis.reshape(3, -1)
        return np.linalg.pinv(flat)

    @cached_property
    def structure_float(self) -> np.ndarray:
        return self.structure.astype(float)

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=self.dtype)

    def algebra_matrix(self, coords) -> np.ndarray:
        """Map algebra coordinates (..., 3) to chart matrices (..., n, n)."""
        coords = np.asarray(coords)
        return np.einsum("...k,kab->...ab", coords, self.basis)

    def algebra_coords(self, mat) -> np.ndarray:
        """Complex-linear projection of chart matrices onto (e1, e2, e3)."""
        mat = np.asarray(mat)
        flat = mat.reshape(mat.shape[:-2] + (-1,))
        return flat @ self._projector

    def bracket(self, x, y) -> np.ndarray:
        """Lie bracket of algebra vectors in orthonormal coordinates."""
        return np.einsum("ijk,...i,...j->...k", self.structure_float, x, y)

    # chart arithmetic, vectorized over leading axes -------------------------

    def normalize(self, m) -> np.ndarray:
        """Project chart matrices back onto the group manifold."""
        m = np.array(m, dtype=self.dtype, copy=True)
        if self.name is GroupName.NIL:
            m[..., 1, 0] = m[..., 2, 0] = m[..., 2, 1] = 0.0
            m[..., 0, 0] = m[..., 1, 1] = m[..., 2, 2] = 1.0
        elif self.name is GroupName.SOL:
            zz = 0.5 * (np.log(np.abs(m[..., 1, 1])) - np.log(np.abs(m[..., 0, 0])))
            m[..., 0, 0] = np.exp(-zz)
            m[..., 1, 1] = np.exp(zz)
            m[..., 0, 1] = m[..., 1, 0] = 0.0
            m[..., 2, 0] = m[..., 2, 1] = 0.0
            m[..., 2, 2] = 1.0
        else:
            # SU(1,1): [[a, b], [conj(b), conj(a)]] with |a|^2 - |b|^2 = 1
            a = 0.5 * (m[..., 0, 0] + np.conj(m[..., 1, 1]))
            b = 0.5 * (m[..., 0, 1] + np.conj(m[..., 1, 0]))
            det = np.abs(a) ** 2 - np.abs(b) ** 2
            if np.any(~(det > 0)):
                raise SingularElement("SL2 chart matrix left SU(1,1)")
            s = 1.0 / np.sqrt(det)
            a, b = a * s, b * s
            m[..., 0, 0], m[..., 0, 1] = a, b
            m[..., 1, 0], m[..., 1, 1] = np.conj(b), np.conj(a)
        return m

    def exp(self, v) -> np.ndarray:
        """Closed-form matrix exponential of algebra vectors (..., 3)."""
        v = np.asarray(v)
        a, b, c = v[..., 0], v[..., 1], v[..., 2]
        shape = v.shape[:-1] + (self.dim, self.dim)
        if self.name is GroupName.NIL:
            out = np.zeros(shape, dtype=np.result_type(v, float))
            out[..., 0, 0] = out[..., 1, 1] = out[..., 2, 2] = 1.0
            out[..., 0, 1] = a
            out[..., 1, 2] = b
            out[..., 0, 2] = c + 0.5 * a * b
            return out
        if self.name is GroupName.SOL:
            out = np.zeros(shape, dtype=np.result_type(v, float))
            out[..., 0, 0] = np.exp(-c)
            out[..., 1, 1] = np.exp(c)
            out[..., 2, 2] = 1.0
            out[..., 0, 2] = a * _expm1_over(-c)
            out[..., 1, 2] = b * _expm1_over(c)
            return out
        mat = self.algebra_matrix(v.astype(complex))
        det = mat[..., 0, 0] * mat[..., 1, 1] - mat[..., 0, 1] * mat[..., 1, 0]
        s = np.sqrt(-det + 0j)
        small = np.abs(s) < 1e-6
        s_safe = np.where(small, 1.0, s)
        sinhc = np.where(small, 1.0 + s * s / 6.0 + s**4 / 120.0, np.sinh(s_safe) / s_safe)
        out = np.cosh(s)[..., None, None] * np.eye(2) + sinhc[..., None, None] * mat
        if np.isrealobj(v):
            out = self.normalize(out)
        return out

    def mul(self, a, b) -> np.ndarray:
        return a @ b

    def inv(self, m) -> np.ndarray:
        m = np.asarray(m)
        if self.name is GroupName.SL2:
            det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
            if np.any(~np.isfinite(det)) or np.any(np.abs(det) < 1e-300):
                raise SingularElement("singular SL2 chart matrix")
            out = np.empty_like(m)
            out[..., 0, 0] = m[..., 1, 1] / det
            out[..., 1, 1] = m[..., 0, 0] / det
            out[..., 0, 1] = -m[..., 0, 1] / det
            out[..., 1, 0] = -m[..., 1, 0] / det
            return out
        if not np.all(np.isfinite(m)):
            raise SingularElement("non-finite chart matrix")
        try:
            return np.linalg.inv(m)
        except np.linalg.LinAlgError as exc:
            raise SingularElement(str(exc)) from exc

    def winding(self, m) -> np.ndarray:
        """Fiber angle of SL2 elements (2 arg of the diagonal entry); 0 otherwise."""
        if self.name is not GroupName.SL2:
            return np.zeros(np.shape(m)[:-2])
        return 2.0 * np.angle(np.asarray(m)[..., 0, 0])


def _expm1_over(t):
    """(e^t - 1) / t with the removable singularity filled in."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 1e-8
    safe = np.where(small, 1.0, t)
    return np.where(small, 1.0 + 0.5 * t, np.expm1(safe) / safe)


def _nil_group():
    gens = np.zeros((3, 3, 3))
    gens[0, 0, 1] = 1.0
    gens[1, 1, 2] = 1.0
    gens[2, 0, 2] = 1.0
    c = _structure({(0, 1): {2: 1}})
    return LieGroup3(GroupName.NIL, c, Fraction(1), gens, "3x3 unit upper-triangular")


def _sl2_group():
    gens = np.array(
        [
            [[0, 1], [1, 0]],
            [[0, 1j], [-1j, 0]],
            [[0.5j, 0], [0, -0.5j]],
        ],
        dtype=complex,
    )
    # [f1,f2] = -4 f3, [f1,f3] = -f2, [f2,f3] = f1 rescaled to e_j = f_j / 2
    c = _structure({(0, 1): {2: -2}, (0, 2): {1: Fraction(-1, 2)}, (1, 2): {0: Fraction(1, 2)}})
    return LieGroup3(GroupName.SL2, c, Fraction(1, 2), gens, "2x2 complex SU(1,1)")


def _sol_group():
    gens = np.zeros((3, 3, 3))
    gens[0, 0, 2] = 1.0
    gens[1, 1, 2] = 1.0
    gens[2, 0, 0] = -1.0
    gens[2, 1, 1] = 1.0
    c = _structure({(0, 2): {0: 1}, (1, 2): {1: -1}})
    return LieGroup3(GroupName.SOL, c, Fraction(1), gens, "3x3 real diagonal-translation")


NIL = _nil_group()
SL2 = _sl2_group()
SOL = _sol_group()

_GROUPS = {GroupName.NIL: NIL, GroupName.SL2: SL2, GroupName.SOL: SOL}


def get_group(name) -> LieGroup3:
    """Look a model group up by name ('nil', 'sl2', 'sol')."""
    if isinstance(name, LieGroup3):
        return name
    return _GROUPS[GroupName(str(name).lower())]


# ---------------------------------------------------------------------------
# connection and curvature


def _check_jacobi(c):
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for n in range(3):
                    s = sum(
                        c[i, j, m] * c[m, k, n] + c[j, k, m] * c[m, i, n] + c[k, i, m] * c[m, j, n]
                        for m in range(3)
                    )
                    if s != 0:
                        raise JacobiViolation(
                            f"Jacobi identity fails for indices ({i + 1},{j + 1},{k + 1}) -> e{n + 1}"
                        )


@dataclass(frozen=True, eq=False)
class ConnectionTable:
    """Levi-Civita connection of a left-invariant metric.

    ``gamma[i, j, k]`` is Gamma^i_jk, with ``nabla_{e_k} e_j = Gamma^i_jk e_i``.
    """

    gamma: np.ndarray

    @cached_property
    def gamma_float(self) -> np.ndarray:
        return self.gamma.astype(float)

    def covariant(self, i, j) -> np.ndarray:
        """Exact coefficients of nabla_{e_i} e_j (0-based indices)."""
        return self.gamma[:, j, i].copy()

    def nabla(self, x, y) -> np.ndarray:
        """nabla_X Y for left-invariant fields with (complex) coordinates X, Y."""
        return np.einsum("ijk,k...,j...->i...", self.gamma_float, x, y)


def connection_from_structure(group: LieGroup3) -> ConnectionTable:
    """Levi-Civita connection from the structure constants, exactly."""
    c = group.structure
    _check_jacobi(c)
    g = _frac_array((3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                g[i, j, k] = (c[k, j, i] + c[i, k, j] + c[i, j, k]) / 2
    return ConnectionTable(g)


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """Riemann tensor ``r[l, k, j, i] = <R(e_i, e_j) e_k, e_l>``.

    The sign convention is R(X, Y) = nabla_Y nabla_X - nabla_X nabla_Y +
    nabla_[X,Y], so that <R(X, Y) X, Y> is the sectional curvature of an
    orthonormal pair.
    """

    r: np.ndarray

    @cached_property
    def r_float(self) -> np.ndarray:
        return self.r.astype(float)

    def component(self, i, j, k, l):
        """R_ijkl with 1-based indices, as printed in curvature tables."""
        return self.r[i - 1, j - 1, k - 1, l - 1]

    @cached_property
    def plane_form(self) -> np.ndarray:
        """Symmetric 3x3 form Q with K(plane normal to n) = n^T Q n."""
        pairs = [(1, 2), (2, 0), (0, 1)]
        q = np.zeros((3, 3))
        r = self.r_float
        for a, (pa, qa) in enumerate(pairs):
            for b, (pb, qb) in enumerate(pairs):
                # <R(X, Y) Z, W> with X=e_pa, Y=e_qa, Z=e_pb, W=e_qb
                q[a, b] = r[qb, pb, qa, pa]
        return q


def curvature_tensor(group: LieGroup3, conn: ConnectionTable) -> CurvatureTensor:
    """All 81 curvature components, exactly."""
    c = group.structure
    gam = conn.gamma

    def nab(a, vec):
        # nabla_{e_a} of the left-invariant field with constant coords vec
        out = [Fraction(0)] * 3
        for m in range(3):
            if vec[m]:
                for n in range(3):
                    out[n] += vec[m] * gam[n, m, a]
        return out

    r = _frac_array((3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                ek = [Fraction(int(t == k)) for t in range(3)]
                yk = nab(j, ek)
                xk = nab(i, ek)
                term1 = nab(i, yk)  # nabla_X nabla_Y Z
                term2 = nab(j, xk)  # nabla_Y nabla_X Z
                term3 = [Fraction(0)] * 3
                for m in range(3):
                    if c[i, j, m]:
                        t = nab(m, ek)
                        for n in range(3):
                            term3[n] += c[i, j, m] * t[n]
                for l in range(3):
                    # paper convention is minus the standard R(X,Y)Z
                    r[l, k, j, i] = -(term1[l] - term2[l] - term3[l])
    return CurvatureTensor(r)


def _riemann_form(curv, x, y, z, w):
    return np.einsum("lkji,l,k,j,i->", curv.r_float, w, z, y, x)


def sectional_curvature(curv: CurvatureTensor, x, y) -> float:
    """Sectional curvature of span{X, Y}."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xx, yy, xy = x @ x, y @ y, x @ y
    denom = xx * yy - xy * xy
    if denom <= 1e-12 * max(xx * yy, 1e-300):
        raise DegeneratePlane("X and Y are parallel")
    return float(_riemann_form(curv, x, y, x, y) / denom)


def tangent_plane_curvature(curv: CurvatureTensor, n) -> float:
    """Sectional curvature of the plane orthogonal to the unit vector n."""
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-10:
        raise NonUnitNormal(f"|n| = {np.linalg.norm(n)!r}")
    trial = np.eye(3)[int(np.argmin(np.abs(n)))]
    x = trial - (trial @ n) * n
    x /= np.linalg.norm(x)
    y = np.cross(n, x)
    return sectional_curvature(curv, x, y)


def tangent_plane_curvature_field(curv: CurvatureTensor, n) -> np.ndarray:
    """Vectorized K-hat for unit normals stored as (3, ...) arrays."""
    n = np.asarray(n, dtype=float)
    return np.einsum("a...,ab,b...->...", n, curv.plane_form, n)


# ---------------------------------------------------------------------------
# single group elements


@dataclass(frozen=True, eq=False)
class GroupElement:
    """One element of a model group in its matrix chart."""

    group: LieGroup3
    matrix: np.ndarray
    winding_angle: float = 0.0

    @property
    def coords(self):
        """(x, y, z) chart coordinates for Nil and Sol."""
        m = self.matrix
        if self.group.name is GroupName.NIL:
            return float(m[0, 1]), float(m[1, 2]), float(m[0, 2])
        if self.group.name is GroupName.SOL:
            return float(m[0, 2]), float(m[1, 2]), float(np.log(m[1, 1]))
        raise AttributeError("SL2 elements have no (x, y, z) chart")

    @classmethod
    def identity(cls, group: LieGroup3) -> "GroupElement":
        return cls(group, group.identity())


def nil_element(x, y, z) -> GroupElement:
    return GroupElement(NIL, np.array([[1.0, x, z], [0.0, 1.0, y], [0.0, 0.0, 1.0]]))


def sol_element(x, y, z) -> GroupElement:
    return GroupElement(
        SOL, np.array([[np.exp(-z), 0.0, x], [0.0, np.exp(z), y], [0.0, 0.0, 1.0]])
    )


def _unwrap_near(angle, ref):
    return angle + 2 * np.pi * np.round((ref - angle) / (2 * np.pi))


def group_exp(group: LieGroup3, v) -> GroupElement:
    """exp(v_1 e_1 + v_2 e_2 + v_3 e_3) as a group element."""
    v = np.asarray(v, dtype=float)
    m = group.exp(v)
    wind = 0.0
    if group.name is GroupName.SL2:
        # exp(t e3) winds the fiber by t / 2 per unit of t
        wind = float(_unwrap_near(group.winding(m), 0.5 * v[2]))
    return GroupElement(group, m, wind)


def _same_group(a, b):
    if a.group is not b.group:
        raise ValueError(f"elements of different groups: {a.group} vs {b.group}")


def group_mul(a: GroupElement, b: GroupElement) -> GroupElement:
    _same_group(a, b)
    m = a.group.normalize(a.matrix @ b.matrix)
    wind = 0.0
    if a.group.name is GroupName.SL2:
        wind = float(_unwrap_near(a.group.winding(m), a.winding_angle + b.winding_angle))
    return GroupElement(a.group, m, wind)


def group_inv(a: GroupElement) -> GroupElement:
    m = a.group.normalize(a.group.inv(a.matrix))
    return GroupElement(a.group, m, -a.winding_angle)
