import json
import math
import pathlib
import shutil
import subprocess
import sys

import numpy as np
import pytest

from fracpoin.cli import main
from fracpoin.domain import DomainFamily, DomainMask, Grid, rasterize
from fracpoin.suites import SUITES, ExperimentManifest, ManifestError

SUITES_DIR = pathlib.Path(__file__).resolve().parent.parent / "suites"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--n", "2", "--m", "1", "--s", "0.5")
    assert code == 0
    doc = json.loads(out)
    assert doc["C_ns"] == pytest.approx(1 / (2 * math.pi), rel=1e-14)
    assert doc["theta_mn"] == pytest.approx(2.0, rel=1e-14)
    assert doc["reduction_residual"] < 1e-12


@pytest.mark.parametrize("argv", [
    ["constants", "--n", "1", "--s", "1.0"],
    ["constants", "--n", "2", "--m", "2", "--s", "0.5"],
    ["poincare", "--family", "interval", "--a", "-1", "--b", "1", "--s", "0"],
    ["poincare", "--family", "interval", "--a", "0", "--b", "0.1", "--s", "0.5", "--h", "0.1"],
    ["witness", "angle", "--n", "2", "--s", "0.5", "--sigma", "1", "--m", "1"],
    ["witness", "window", "--domain", "annuli", "--s", "0.75", "--lams", "4,8"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["poincare", "--kind", "p3", "--s", "0.5"])
    assert exc.value.code == 2


def test_poincare_h_ladder(capsys):
    code, out, _ = run(capsys, "poincare", "--family", "interval", "--a", "-1", "--b", "1",
                       "--s", "0.5", "--h", "0.0625", "--h-ladder", "3")
    assert code == 0
    study = json.loads(out)["study"]
    assert [e["h"] for e in study["ladder"]] == [0.0625, 0.03125, 0.015625]
    assert all(e["accepted"] for e in study["ladder"])


def test_witness_angle_and_csv(capsys, tmp_path):
    csv = tmp_path / "angle.csv"
    code, out, _ = run(capsys, "witness", "angle", "--n", "2", "--s", "0.75", "--sigma", "1",
                       "--m", "2", "--p1-unit", "1", "--csv", str(csv))
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["family"] == "angle" and rows[0]["pass"]
    assert csv.read_text().splitlines()[0] == "family,param,quotient,terms,bound,pass"


def test_symmetrize_roundtrip(capsys, tmp_path):
    rng = np.random.default_rng(0)
    act = np.zeros((12, 10), dtype=bool)
    act[1:-1, 1:-1] = rng.random((10, 8)) < 0.5
    mask = DomainMask(Grid((0.0, -0.625), 0.125, (12, 10)), act)
    src, dst = tmp_path / "m.json", tmp_path / "sym.json"
    src.write_text(mask.to_json())
    code, out, _ = run(capsys, "symmetrize", "--mask", str(src), "--write", str(dst),
                       "--s", "0.5", "--I", "0,0.5", "--J", "0.75,1.25")
    assert code == 0
    doc = json.loads(out)
    assert doc["slices_preserved"]
    sym = DomainMask.from_json(dst.read_text())
    assert np.array_equal(sym.active.sum(axis=1), act.sum(axis=1))


def test_seminorm_matches_library(capsys):
    from fracpoin.domain import SampledFunction
    from fracpoin.seminorm import assemble_regional
    from fracpoin.specfun import FracParams
    code, out, _ = run(capsys, "seminorm", "--family", "interval", "--a", "0", "--b", "1",
                       "--s", "0.4", "--h", "0.0625", "--kind", "regional", "--function", "ones")
    assert code == 0
    doc = json.loads(out)
    m = rasterize(DomainFamily("interval_union", {"intervals": [[0, 1]]}), 0.0625)
    u = SampledFunction.from_callable(m, lambda x: np.ones_like(x))
    F = assemble_regional(m, FracParams(1, 0.4))
    assert doc["energy"] == pytest.approx(F.energy(F.gather(u.values)), rel=1e-14)
    assert doc["quotient"] == pytest.approx(doc["energy"] / doc["norm2"], rel=1e-14)


def test_verify_writes_identical_reports(capsys, tmp_path):
    manifest = tmp_path / "suites" / "m.json"
    manifest.parent.mkdir()
    shutil.copy(SUITES_DIR / "reduction_identity.json", manifest)
    code, out, _ = run(capsys, "verify", str(manifest))
    assert code == 0
    assert out.splitlines()[0].startswith("PASS")
    report = tmp_path / "reports" / "reduction_identity.json"
    first = report.read_bytes()
    run(capsys, "verify", str(manifest))
    assert report.read_bytes() == first
    assert (tmp_path / "reports" / "reduction_identity.csv").exists()
    code, _, _ = run(capsys, "verify", str(manifest), "--out-dir", str(tmp_path / "elsewhere"))
    assert code == 0 and (tmp_path / "elsewhere" / "reduction_identity.json").exists()


def test_verify_failure_exits_1(capsys, tmp_path):
    doc = json.loads((SUITES_DIR / "normalisation.json").read_text())
    doc["tolerances"] = {k: 1e-300 for k in doc.get("tolerances", {"relative": 1})}
    doc["output"] = {"json": "out.json", "csv": "out.csv"}
    path = tmp_path / "tight.json"
    path.write_text(json.dumps(doc))
    code, out, err = run(capsys, "verify", str(path))
    assert code == 1
    assert "FAIL" in out and "check failed" in err


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    json.dumps({"suite": "no_such_suite"}),
    json.dumps({"suite": "picone", "extra": 1}),
    json.dumps({"suite": "picone", "tolerances": {"transfer": -1}}),
    json.dumps({"suite": "picone", "ladders": {"s": [0.5, 0.4, 0.6]}}),
    json.dumps({"suite": "picone", "seed": "x"}),
    json.dumps({"suite": "picone", "params": []}),
])
def test_bad_manifests(text, tmp_path, capsys):
    with pytest.raises(ManifestError):
        ExperimentManifest.from_json(text)
    path = tmp_path / "bad.json"
    path.write_text(text)
    assert run(capsys, "verify", str(path))[0] == 2


def test_shipped_manifests_parse():
    names = sorted(p.stem for p in SUITES_DIR.glob("*.json"))
    assert set(SUITES) <= set(names)
    for p in SUITES_DIR.glob("*.json"):
        m = ExperimentManifest.from_json(p.read_text())
        assert m.output["json"].endswith(".json")


def test_console_script_exit_codes():
    exe = shutil.which("fracpoin")
    cmd = [exe] if exe else [sys.executable, "-m", "fracpoin.cli"]
    ok = subprocess.run(cmd + ["constants", "--n", "3", "--s", "0.25"], capture_output=True,
                        text=True)
    assert ok.returncode == 0 and json.loads(ok.stdout)["n"] == 3
    bad = subprocess.run(cmd + ["constants", "--n", "1", "--s", "1.5"], capture_output=True)
    assert bad.returncode == 2
