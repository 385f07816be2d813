"""End-to-end analysis of catalog surfaces and the refinement-study driver."""
from __future__ import annotations

import csv
import io as _io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .catalog import get_entry, catalog_surface, default_grid
from .errors import GroupUnsupported, InsufficientLevels
from .geometry import (
    GeometryReport,
    abresch_differential,
    cmc_check,
    codazzi_residuals,
    covariant_oracle,
    derivational_generic,
    derivational_residuals,
    energy,
    energy_geometric,
    hopf_covariant,
    hopf_differential,
    khat_field,
    mean_curvature,
    normal_frame,
    normal_from_Z,
    spinor_energy_integrand,
    weingarten_residual,
)
from .grid import Grid, convergence_order, integrate_2form, interior_mask, interior_sup
from .lie import GroupName, get_group
from .reconstruct import integrate_frame, round_trip_error
from .spinor import (
    SpinorField,
    ZField,
    dirac_residual,
    identity_residual,
    maurer_cartan,
    minimal_equation_residual,
    potentials,
    spinor_from_Z,
)

__all__ = ["FAULTS", "analyze", "Case", "VerifySuiteConfig", "VerifyResult", "verify", "DEFAULT_CASES"]

FAULTS = ("hopf-sign", "negate-z3", "random-psi")


def _smooth_noise(grid: Grid, rng, modes=3):
    """A smooth random complex field compatible with the grid's periodicity."""
    U, V = grid.mesh()
    lu = grid.hu * (grid.nu if grid.periodic_u else grid.nu - 1)
    lv = grid.hv * (grid.nv if grid.periodic_v else grid.nv - 1)
    out = np.zeros(grid.shape, dtype=complex)
    for k in range(-modes, modes + 1):
        for l in range(-modes, modes + 1):
            c = complex(rng.normal(), rng.normal()) / (1 + k * k + l * l)
            out += c * np.exp(2j * np.pi * (k * (U - grid.u0) / lu + l * (V - grid.v0) / lv))
    return out / np.max(np.abs(out))


def analyze(surface, group=None, grid: Grid | None = None, *, params=None, fault=None,
            oracle_nodes=10, seed=0, keep_fields=False) -> GeometryReport:
    """Run the full pipeline on one catalog surface.

    immersion -> Z -> spinor -> H -> potentials -> every residual -> energies.
    ``fault`` injects a deliberate error (one of ``FAULTS``) for negative
    controls.
    """
    entry = get_entry(surface)
    if group is not None and get_group(group) is not entry.group:
        raise GroupUnsupported(f"{surface} lives in {entry.group.name.value}, not {group}")
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS}")
    grp = entry.group
    grid = grid or default_grid(surface)
    rng = np.random.default_rng(seed)
    norms, scalars, flags, fields = {}, {}, {}, {}

    f = catalog_surface(surface, params, grid)
    zf = maurer_cartan(f, grid, conformal_tol=1e-3)
    norms["conformality"] = zf.conformality_residual(grid)
    if fault == "negate-z3":
        Z = zf.Z.copy()
        Z[2] = -Z[2]
        zf = ZField.from_components(Z)
    s = spinor_from_Z(zf, grid)
    if fault == "random-psi":
        s = SpinorField(s.psi * (1.0 + 0.5 * _smooth_noise(grid, rng)), s.seed)

    H, h_imag, tangential = mean_curvature(zf, grp, grid, full=True)
    norms["meanHImag"] = interior_sup(h_imag, grid)
    norms["tangentialTension"] = interior_sup(tangential, grid)
    if entry.expected_minimal:
        norms["meanH"] = interior_sup(H, grid)

    N = normal_frame(s)
    nz = normal_from_Z(zf)
    norms["normal"] = float(max(
        np.max(np.abs(np.sqrt(np.sum(N**2, axis=0)) - 1.0)),
        np.max(np.abs(np.einsum("k...,k...->...", N, zf.Z))) / np.sqrt(np.max(zf.conform)),
        np.max(np.abs(N - nz)),
    ))

    pot = potentials(s, H, grp)
    _, norms["dirac"] = dirac_residual(s, pot, grid)
    norms["identity"] = identity_residual(s, pot, grid)
    if entry.expected_minimal:
        norms["minimal"] = minimal_equation_residual(s, grid, grp)
        if grp.name is GroupName.NIL:
            norms["minimalLiteral"] = minimal_equation_residual(s, grid, grp, reading="literal")

    sign = -1.0 if fault == "hopf-sign" else 1.0
    A = hopf_differential(s, grp, grid, group_term_sign=sign)
    norms["hopfCovariant"] = interior_sup(A - hopf_covariant(zf, grp, grid), grid)
    if oracle_nodes:
        U, V = grid.mesh()
        idx = np.argwhere(interior_mask(grid))
        pick = idx[rng.choice(len(idx), size=min(oracle_nodes, len(idx)), replace=False)]
        pick = sorted(tuple(int(x) for x in p) for p in pick)
        omap = entry.oracle_map(params)
        worst_a = worst_h = 0.0
        for j, i in pick:
            o = covariant_oracle(omap, grp, U[j, i], V[j, i])
            worst_a = max(worst_a, abs(o["A"] - A[j, i]))
            worst_h = max(worst_h, abs(o["H"] - H[j, i]))
        norms["hopfOracle"] = float(worst_a)
        norms["meanHOracle"] = float(worst_h)

    alpha = zf.alpha
    norms["weingarten"] = weingarten_residual(s, alpha, A, grp, grid)
    _, _, lhs1, (c1, c2) = codazzi_residuals(alpha, A, H, s, grp, grid)
    norms["codazzi1"], norms["codazzi2"] = c1, c2
    m = interior_mask(grid)
    scalars["codazziLhsMean"] = float(np.mean(lhs1[m]))
    norms.update(derivational_residuals(zf, H, grp, grid, s))
    norms["derivationalGeneric"] = max(derivational_generic(zf, H, grp, grid))

    abresch = None
    if grp.name is not GroupName.SOL:
        ab = abresch_differential(A, zf.Z3, H, zf.conform, grp, grid)
        abresch = ab.tilde_a
        norms["abresch"] = ab.defect
        norms["abreschHolomorphy"] = ab.holomorphy
        if grp.name is GroupName.NIL:
            rep = cmc_check(H, ab.holomorphy, grid)
            flags["cmcConsistent"] = rep.consistent
            flags["abreschHolomorphic"] = rep.holomorphic
            flags["constantH"] = rep.constant_h

    khat = khat_field(nz, grp)
    E = energy(pot, grid)
    e_geo = None
    if grp.name is not GroupName.SOL:
        dens = spinor_energy_integrand(s, H, grp)
        e_geo, diff = energy_geometric(H, khat, zf.conform, grp, grid, spinor_density=dens)
        norms["energyEquivalence"] = diff
    a1, a2 = np.abs(s.psi[0]) ** 2, np.abs(s.psi[1]) ** 2
    area = integrate_2form(zf.conform, grid).real
    scalars["area"] = area
    scalars["energy"] = [E.real, E.imag]
    scalars["energyGeo"] = e_geo
    scalars["quarticIntegral"] = integrate_2form(a2**2 - a1**2, grid).real
    Hi = H[m]
    scalars["meanHmean"] = float(Hi.mean())
    scalars["meanHvar"] = float(Hi.var())
    scalars["maskedFraction"] = float(pot.mask.mean())

    rec = integrate_frame(zf, grp, grid, compat_warn=None)
    norms["holonomy"] = rec.holonomy_norm
    norms["roundTrip"] = round_trip_error(f, rec.immersion)

    flags["expectedMinimal"] = entry.expected_minimal
    flags["constantHExpected"] = entry.has_constant_h(params)
    flags["periodic"] = grid.periodic_u and grid.periodic_v
    if keep_fields:
        fields = {"psi1": s.psi[0], "psi2": s.psi[1], "H": H, "A": A, "Khat": khat,
                  "N1": N[0], "N2": N[1], "N3": N[2], "U": pot.U, "V": pot.V}
        if abresch is not None:
            fields["abreschA"] = abresch
    return GeometryReport(
        group=grp.name.value, surface=surface, grid=grid, area=area, meanH=H, normal=N,
        hopfA=A, abreschA=abresch, Khat=khat, energy=E, energyGeo=e_geo,
        residualNorms={k: float(v) for k, v in norms.items()}, scalars=scalars, flags=flags,
        fields=fields,
    )


# ---------------------------------------------------------------------------
# refinement study


@dataclass(frozen=True)
class Case:
    surface: str
    params: tuple = ()

    @property
    def label(self) -> str:
        if not self.params:
            return self.surface
        inner = ",".join(f"{k}={v:g}" for k, v in self.params)
        return f"{self.surface}[{inner}]"

    @property
    def param_dict(self):
        return dict(self.params) or None


DEFAULT_CASES = (
    Case("nil-plane-x0"),
    Case("nil-plane-z0"),
    Case("nil-cylinder"),
    Case("nil-cylinder", (("wobble", 0.3),)),
    Case("sol-plane-z0"),
    Case("sol-plane-x0"),
    Case("sol-exp-diag"),
    Case("sl2-exp-flat"),
    Case("sl2-exp-hyp"),
)

# minimal observed convergence order per residual
ORDER_THRESHOLDS = {
    "dirac": 3.0,
    "identity": 2.0,
    "weingarten": 2.0,
    "codazzi1": 2.0,
    "codazzi2": 2.0,
    **{f"derivational{k}": 2.0 for k in range(1, 8)},
    "abresch": 2.0,
    "abreschHolomorphy": 2.0,
    "holonomy": 2.0,
    "roundTrip": 3.0,
    "meanH": 3.0,
    "minimal": 3.0,
}

ABSOLUTE_THRESHOLDS = {
    "conformality": 1e-11,
    "conformalityQuadrature": 1e-8,
    "hopfOracle": 1e-6,
    "energyEquivalence": 1e-10,
    "normal": 1e-10,
    "exactDirac": 1e-11,
    "codazziBalance": 1e-11,
    "zeroEnergy": 1e-12,
    "energyReality": 1e-8,
}


@dataclass
class VerifySuiteConfig:
    """Refinement levels, cases, thresholds and output paths for ``verify``."""

    levels: tuple = (32, 64, 128)
    cases: tuple = DEFAULT_CASES
    fault: str | None = None
    csv_path: str | None = None
    json_path: str | None = None
    workers: int = 1
    floor: float = 1e-10
    order_thresholds: dict = field(default_factory=lambda: dict(ORDER_THRESHOLDS))
    absolute_thresholds: dict = field(default_factory=lambda: dict(ABSOLUTE_THRESHOLDS))


@dataclass
class VerifyResult:
    exit_code: int
    summary: dict
    csv_text: str


def _run_one(job):
    case, n, fault = job
    grid = default_grid(case.surface, n)
    rep = analyze(case.surface, grid=grid, params=case.param_dict, fault=fault)
    return {
        "h": grid.h,
        "norms": rep.residualNorms,
        "scalars": rep.scalars,
        "flags": rep.flags,
        "group": rep.group,
    }


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return repr(float(x))


def _case_checks(case, runs, cfg: VerifySuiteConfig):
    """Evaluate every applicable threshold for one case across the levels."""
    entry = get_entry(case.surface)
    group = runs[0]["group"]
    checks = []
    orders = {}
    tol = cfg.absolute_thresholds

    def add(name, kind, value, threshold, ok):
        checks.append({"name": name, "kind": kind, "value": value, "threshold": threshold,
                       "pass": bool(ok)})

    for res in runs[0]["norms"]:
        pairs = [(r["h"], r["norms"][res]) for r in runs]
        orders[res] = convergence_order(pairs, floor=cfg.floor)
    const_h = runs[0]["flags"]["constantHExpected"]
    for res, need in cfg.order_thresholds.items():
        if res not in orders:
            continue
        if res == "abreschHolomorphy" and not const_h:
            continue
        add(f"order:{res}", "order", orders[res], need, orders[res] >= need)

    conf_tol = tol["conformalityQuadrature"] if entry.quadrature else tol["conformality"]
    worst = lambda key: max(r["norms"][key] for r in runs)  # noqa: E731
    add("conformality", "max", worst("conformality"), conf_tol, worst("conformality") <= conf_tol)
    add("normal", "max", worst("normal"), tol["normal"], worst("normal") <= tol["normal"])
    if "hopfOracle" in runs[0]["norms"]:
        add("hopfOracle", "max", worst("hopfOracle"), tol["hopfOracle"],
            worst("hopfOracle") <= tol["hopfOracle"])
        finest = runs[-1]["norms"]["meanHOracle"]
        add("meanHOracle", "finest", finest, tol["hopfOracle"], finest <= tol["hopfOracle"])
    if "energyEquivalence" in runs[0]["norms"]:
        add("energyEquivalence", "max", worst("energyEquivalence"), tol["energyEquivalence"],
            worst("energyEquivalence") <= tol["energyEquivalence"])
    if case.surface in ("nil-plane-x0", "sol-plane-z0"):
        add("exactDirac", "max", worst("dirac"), tol["exactDirac"], worst("dirac") <= tol["exactDirac"])
        e = max(math.hypot(*r["scalars"]["energy"]) for r in runs)
        add("zeroEnergy", "max", e, tol["zeroEnergy"], e <= tol["zeroEnergy"])
    if case.surface == "nil-plane-x0":
        bal = max(abs(r["scalars"]["codazziLhsMean"] + 1.0 / 16.0) for r in runs)
        add("codazziBalance", "max", bal, tol["codazziBalance"], bal <= tol["codazziBalance"]
            and worst("codazzi1") <= tol["codazziBalance"])
    if group != "sol" and runs[0]["flags"]["periodic"]:
        im = max(abs(r["scalars"]["energy"][1]) / (1 + abs(r["scalars"]["energy"][0])) for r in runs)
        add("energyImag", "max", im, tol["energyReality"], im <= tol["energyReality"])
        q = max(abs(r["scalars"]["quarticIntegral"]) / r["scalars"]["area"] for r in runs)
        add("quarticIntegral", "max", q, tol["energyReality"], q <= tol["energyReality"])
    if group == "nil":
        ok = all(r["flags"]["cmcConsistent"] for r in runs)
        add("cmcConsistent", "flag", ok, True, ok)
    return checks, orders


def verify(config: VerifySuiteConfig | None = None) -> VerifyResult:
    """Refinement study over the catalog.

    Writes ``conv.csv`` rows ``surface,residual,h,value,order`` and a JSON
    summary when paths are configured.  Exit code 0 means every threshold
    held, 1 means at least one failed, 2 means the configuration was unusable
    (e.g. fewer than three levels).
    """
    cfg = config or VerifySuiteConfig()
    levels = tuple(sorted({int(n) for n in cfg.levels}))
    summary = {"levels": list(levels), "fault": cfg.fault, "cases": {}, "pass": False}
    if len(levels) < 3:
        err = InsufficientLevels(f"need at least 3 refinement levels, got {len(levels)}")
        summary["error"] = f"InsufficientLevels: {err}"
        summary["exitCode"] = 2
        _write(cfg, summary, "")
        return VerifyResult(2, summary, "")
    jobs = [(c, n, cfg.fault) for c in cfg.cases for n in levels]
    if cfg.workers and cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["surface", "residual", "h", "value", "order"])
    all_ok = True
    for ci, case in enumerate(cfg.cases):
        runs = results[ci * len(levels):(ci + 1) * len(levels)]
        checks, orders = _case_checks(case, runs, cfg)
        ok = all(c["pass"] for c in checks)
        all_ok &= ok
        summary["cases"][case.label] = {"pass": ok, "checks": checks,
                                        "orders": {k: _fmt(v) for k, v in orders.items()}}
        for res in runs[0]["norms"]:
            for r in runs:
                writer.writerow([case.label, res, _fmt(r["h"]), _fmt(r["norms"][res]),
                                 _fmt(orders[res])])
    summary["pass"] = all_ok
    summary["exitCode"] = 0 if all_ok else 1
    text = buf.getvalue()
    _write(cfg, summary, text)
    return VerifyResult(summary["exitCode"], summary, text)


def _write(cfg, summary, text):
    if cfg.csv_path:
        with open(cfg.csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if cfg.json_path:
        with open(cfg.json_path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, default=_json_default)


def _json_default(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(type(x))
