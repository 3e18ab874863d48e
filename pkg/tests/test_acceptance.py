"""Acceptance criteria 1-12, each driven by a manifest under suites/.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``. Each criterion prints one PASS/FAIL
line with its runtime and the checks behind the verdict.
"""

import pathlib
import sys
import time

import pytest

from fracpoin.suites import ExperimentManifest, run_suite

SUITES_DIR = pathlib.Path(__file__).resolve().parent.parent / "suites"

# criterion number -> (label, manifests, runtime budget in seconds)
CRITERIA = {
    1: ("reduction identity over 50 triples", ["reduction_identity"], 1.0),
    2: ("strip normalisation equals one", ["normalisation"], 1.0),
    3: ("discrete scaling law in 1D and 2D", ["scaling"], 30.0),
    4: ("cutoff quotients vanish at rate 1-2s", ["cutoff_vanishing"], 120.0),
    5: ("regional strip ladder matches the 1D constant", ["strip_regional"], 900.0),
    6: ("tensor split of the strip witness", ["tensor_split"], 600.0),
    7: ("restricted strip ladder, nesting and P2 >= P1", ["strip_full"], 900.0),
    8: ("discrete Picone inequality", ["picone"], 10.0),
    9: ("cylindrical symmetrisation lowers cross-slab energy", ["symmetrization"], 300.0),
    10: ("window quotients on annuli and plus shapes", ["window_annuli", "window_plus"], 600.0),
    11: ("directional angle bound", ["angle_bound"], 300.0),
    12: ("line-integral energy agrees with direct assembly", ["loss_sloane"], 300.0),
}

RESULTS = {}


def run_criterion(number):
    label, names, budget = CRITERIA[number]
    t0 = time.perf_counter()
    reports = [run_suite(ExperimentManifest.from_json((SUITES_DIR / f"{n}.json").read_text()))
               for n in names]
    elapsed = time.perf_counter() - t0
    failing = [c for r in reports for c in r.failing()]
    ok = not failing and elapsed < budget
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'} {elapsed:7.1f}s  {label}"
    for c in failing:
        line += f"\n    failed {c.name}: {c.value!r} {c.relation} {c.threshold!r}"
    if elapsed >= budget:
        line += f"\n    runtime {elapsed:.1f}s exceeds {budget:.0f}s"
    RESULTS[number] = line
    print(line, flush=True)
    return reports, elapsed, failing


@pytest.mark.acceptance
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    reports, elapsed, failing = run_criterion(number)
    assert reports and all(r.checks for r in reports)
    assert not failing, [c.record() for c in failing]
    assert elapsed < CRITERIA[number][2]


if __name__ == "__main__":
    wanted = [int(a) for a in sys.argv[1:]] or sorted(CRITERIA)
    bad = 0
    for k in wanted:
        run_criterion(k)
        bad += "FAIL" in RESULTS[k].split("\n")[0]
    sys.exit(1 if bad else 0)
