import csv
import io
import json

import pytest

from conftest import report, suite
from spinorsurf.analysis import DEFAULT_CASES, Case, VerifySuiteConfig, analyze, verify
from spinorsurf.errors import GroupUnsupported, UnknownSurface


def failed(res, label):
    return {c["name"] for c in res.summary["cases"][label]["checks"] if not c["pass"]}


def test_nil_plane_x0_report():
    rep = report("nil-plane-x0", 64)
    skip = {"hopfOracle", "meanHOracle"}
    assert all(v <= 1e-11 for k, v in rep.residualNorms.items() if k not in skip)
    assert abs(rep.energy) <= 1e-12
    assert rep.scalars["codazziLhsMean"] == pytest.approx(-1 / 16, abs=1e-12)
    assert rep.area == pytest.approx(4.0)


def test_sol_plane_z0_report():
    rep = report("sol-plane-z0", 64)
    assert rep.scalars["maskedFraction"] == 1.0
    assert rep.residualNorms["dirac"] <= 1e-12
    assert rep.energy == 0
    assert rep.energyGeo is None and rep.abreschA is None


def test_nil_cylinder_report():
    rep = report("nil-cylinder", 64)
    assert rep.scalars["meanHvar"] <= 1e-12
    assert rep.flags["cmcConsistent"] and rep.flags["constantH"]
    assert rep.residualNorms["hopfOracle"] <= 1e-6
    wob = report("nil-cylinder", 64, (("wobble", 0.3),))
    assert not wob.flags["constantH"] and not wob.flags["abreschHolomorphic"]
    assert wob.flags["cmcConsistent"]


def test_analyze_rejects_bad_inputs():
    with pytest.raises(GroupUnsupported):
        analyze("nil-plane-x0", group="sol")
    with pytest.raises(UnknownSurface):
        analyze("klein-bottle")
    with pytest.raises(ValueError):
        analyze("nil-plane-x0", fault="typo")


def test_default_suite_passes():
    res = suite()
    assert res.exit_code == 0, {k: failed(res, k) for k in res.summary["cases"]}
    assert res.summary["pass"]


def test_csv_layout():
    res = suite()
    rows = list(csv.reader(io.StringIO(res.csv_text)))
    assert rows[0] == ["surface", "residual", "h", "value", "order"]
    labels = {r[0] for r in rows[1:]}
    assert labels == {c.label for c in DEFAULT_CASES}
    dirac = [r for r in rows if r[0] == "nil-plane-z0" and r[1] == "dirac"]
    assert len(dirac) == 3 and float(dirac[0][4]) >= 3


def test_hopf_sign_fault_is_caught():
    res = suite("hopf-sign")
    assert res.exit_code == 1
    assert {"order:weingarten", "hopfOracle"} <= failed(res, "nil-plane-x0")


def test_negate_z3_fault_is_caught():
    res = suite("negate-z3")
    assert res.exit_code == 1
    assert "order:roundTrip" in failed(res, "nil-plane-z0")


def test_random_psi_fault_is_caught():
    res = suite("random-psi")
    assert res.exit_code == 1
    assert "order:dirac" in failed(res, "nil-plane-z0")


def test_insufficient_levels():
    res = verify(VerifySuiteConfig(levels=(32,)))
    assert res.exit_code == 2
    assert res.summary["error"].startswith("InsufficientLevels")


def test_outputs_deterministic_across_workers(tmp_path):
    cases = (Case("nil-plane-z0"), Case("sl2-exp-hyp"), Case("sol-plane-x0"))
    paths = []
    for w in (1, 3):
        p = tmp_path / f"conv{w}.csv"
        j = tmp_path / f"summary{w}.json"
        verify(VerifySuiteConfig(cases=cases, workers=w, csv_path=str(p), json_path=str(j)))
        paths.append((p.read_bytes(), json.loads(j.read_text())))
    assert paths[0][0] == paths[1][0]
    assert paths[0][1]["cases"] == paths[1][1]["cases"]
