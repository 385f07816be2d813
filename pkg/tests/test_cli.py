import json
import shutil
import subprocess

import numpy as np
import pytest

from spinorsurf.cli import main
from spinorsurf.io import immersion_from_json, spinor_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_groups_show(capsys):
    code, out, _ = run(capsys, "groups", "show", "nil")
    d = json.loads(out)
    assert code == 0 and d["group"] == "nil"
    assert d["curvature"]["sectional"]["R1212"] == {"num": -3, "den": 4}
    # nabla_{e_1} e_2 = e_3 / 2, i.e. Gamma^3_21
    assert d["connection"]["gamma"][2][1][0] == {"num": 1, "den": 2}


def test_analyze_and_reconstruct(tmp_path, capsys):
    rep, spin, imm = tmp_path / "r.json", tmp_path / "s.json", tmp_path / "f.json"
    code, _, _ = run(capsys, "analyze", "--group", "sol", "--surface", "sol-plane-x0", "--nu", "32",
                     "--dump-fields", "--spinor-out", str(spin), "--report", str(rep))
    assert code == 0
    d = json.loads(rep.read_text())
    assert d["grid"]["nu"] == 32 and "psi1" in d["fields"]
    assert d["norms"]["dirac"] < 1e-3
    group, grid, s, H = spinor_from_json(json.loads(spin.read_text()))
    assert group.name.value == "sol" and s.psi.shape == (2, 32, 32)
    code, _, err = run(capsys, "reconstruct", "--input", str(spin), "--origin", "exp:0.1,0.2,0.3",
                       "--out", str(imm))
    assert code == 0 and "holonomy" in err
    f, g2 = immersion_from_json(json.loads(imm.read_text()))
    assert f.elements.shape == (32, 32, 3, 3) and g2 == grid
    assert np.isfinite(f.elements).all()


def test_analyze_custom_extent_and_params(capsys):
    code, out, _ = run(capsys, "analyze", "--group", "nil", "--surface", "nil-cylinder", "--nu", "32",
                       "--param", "wobble=0.2")
    d = json.loads(out)
    assert code == 0 and d["flags"]["constantH"] is False
    code, out, _ = run(capsys, "analyze", "--group", "nil", "--surface", "nil-plane-z0", "--nu", "16",
                       "--umin", "0", "--umax", "0.5")
    assert code == 0 and json.loads(out)["grid"]["hu"] == pytest.approx(0.5 / 15)


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "analyze", "--group", "sl2", "--surface", "nil-plane-x0")[0] == 2
    assert run(capsys, "reconstruct", "--input", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "analyze", "--group", "nil", "--surface", "nil-cylinder", "--param", "r=-1")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["groups", "show", "e3"])
    assert info.value.code == 2


def test_verify_subset_and_levels(capsys, tmp_path):
    csv_path = tmp_path / "conv.csv"
    code, out, _ = run(capsys, "verify", "--surfaces", "nil-plane-x0,sl2-exp-flat", "--csv", str(csv_path))
    assert code == 0 and "PASS" in out
    assert csv_path.read_text().startswith("surface,residual,h,value,order\n")
    code, _, err = run(capsys, "verify", "--levels", "32")
    assert code == 2 and "InsufficientLevels" in err
    code, out, _ = run(capsys, "verify", "--surfaces", "nil-plane-x0", "--fault", "hopf-sign")
    assert code == 1 and "FAIL" in out


@pytest.mark.skipif(shutil.which("spinorsurf") is None, reason="console script not installed")
def test_console_script():
    p = subprocess.run(["spinorsurf", "groups", "show", "sl2"], capture_output=True, text=True)
    assert p.returncode == 0
    assert json.loads(p.stdout)["curvature"]["sectional"]["R1212"] == {"num": -4, "den": 1}
