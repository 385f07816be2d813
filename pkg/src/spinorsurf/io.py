"""JSON formats for spinor data, immersions, reports and group tables.

Complex numbers are stored as ``[re, im]`` pairs and grid fields as
``{nu, nv, data}`` dumps in row-major order with u fastest.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

from .geometry import GeometryReport, connection_of, curvature_of
from .grid import Grid, field_from_json, field_to_json
from .lie import LieGroup3, get_group
from .spinor import ImmersionField, SpinorField

__all__ = [
    "rational",
    "group_tables",
    "spinor_to_json",
    "spinor_from_json",
    "immersion_to_json",
    "immersion_from_json",
    "report_to_json",
    "write_json",
    "read_json",
]


def rational(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def _rational_array(a):
    if not isinstance(a, np.ndarray):
        return rational(a)
    return [_rational_array(x) for x in a]


def group_tables(group) -> dict:
    """Structure constants, connection and curvature of a group, exactly."""
    g = get_group(group)
    conn = connection_of(g)
    curv = curvature_of(g)
    sectional = {f"R{i}{j}{i}{j}": rational(curv.component(i, j, i, j))
                 for i, j in ((1, 2), (1, 3), (2, 3))}
    return {
        "group": g.name.value,
        "basisScale": rational(g.basis_scale),
        "chart": g.chart,
        "structure": {"convention": "c[i][j][k] = c^k_ij, [e_i, e_j] = c^k_ij e_k",
                      "c": _rational_array(g.structure)},
        "connection": {"convention": "gamma[i][j][k] = Gamma^i_jk, nabla_{e_k} e_j = Gamma^i_jk e_i",
                       "gamma": _rational_array(conn.gamma)},
        "curvature": {"convention": "r[l][k][j][i] = <R(e_i, e_j) e_k, e_l>",
                      "r": _rational_array(curv.r), "sectional": sectional},
    }


def spinor_to_json(group: LieGroup3, grid: Grid, s: SpinorField, H) -> dict:
    return {
        "group": group.name.value,
        "grid": grid.to_dict(),
        "psi1": field_to_json(s.psi[0], grid),
        "psi2": field_to_json(s.psi[1], grid),
        "H": field_to_json(np.asarray(H), grid),
        "seed": list(s.seed),
    }


def spinor_from_json(d):
    """Returns ``(group, grid, SpinorField, H)``."""
    grid = Grid.from_dict(d["grid"])
    psi = np.stack([field_from_json(d["psi1"]), field_from_json(d["psi2"])])
    if psi.shape[-2:] != grid.shape:
        raise ValueError("spinor fields do not match the grid")
    H = field_from_json(d["H"]).real if "H" in d else None
    return get_group(d["group"]), grid, SpinorField(psi, tuple(d.get("seed", (0, 0)))), H


def immersion_to_json(f: ImmersionField, grid: Grid, winding=None) -> dict:
    m = np.asarray(f.elements, dtype=complex).reshape((-1,) + f.elements.shape[-2:])
    out = {
        "group": f.group.name.value,
        "grid": grid.to_dict(),
        "matrices": [[[[float(z.real), float(z.imag)] for z in row] for row in mat] for mat in m],
    }
    if winding is not None:
        out["winding"] = [float(w) for w in np.ravel(winding)]
    return out


def immersion_from_json(d):
    """Returns ``(ImmersionField, grid)``."""
    g = get_group(d["group"])
    grid = Grid.from_dict(d["grid"])
    a = np.asarray(d["matrices"], dtype=float)
    m = (a[..., 0] + 1j * a[..., 1]).reshape(grid.shape + a.shape[1:3])
    if g.dtype is float:
        m = m.real
    return ImmersionField(g, m), grid


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return _clean(x.item())
    return x


def report_to_json(rep: GeometryReport, dump_fields=False) -> dict:
    sc = rep.scalars
    out = {
        "group": rep.group,
        "surface": rep.surface,
        "grid": rep.grid.to_dict(),
        "scalars": {
            "area": sc["area"],
            "energy": [rep.energy.real, rep.energy.imag],
            "energyGeo": rep.energyGeo,
            "meanHmean": sc["meanHmean"],
            "meanHvar": sc["meanHvar"],
            "codazziLhsMean": sc["codazziLhsMean"],
            "quarticIntegral": sc["quarticIntegral"],
            "maskedFraction": sc["maskedFraction"],
        },
        "norms": dict(rep.residualNorms),
        "flags": dict(rep.flags),
    }
    if dump_fields and rep.fields:
        out["fields"] = {k: field_to_json(v, rep.grid) for k, v in rep.fields.items()}
    return _clean(out)


def write_json(obj, path):
    text = json.dumps(_clean(obj), indent=2)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
