import math

import numpy as np
import pytest
from scipy import linalg
from scipy.sparse import linalg as spla

from fracpoin.domain import DomainFamily, rasterize, scale_mask
from fracpoin.eigen import (DENSE_LIMIT, IterationError, PreconditionError, RefinementStudy,
                            StudyPlan, cross_section_ground_state, estimate_p1, estimate_p2,
                            picone_lower_bound_check, richardson, smallest_eigenvalue)
from fracpoin.seminorm import assemble_regional, assemble_restricted, dense_form
from fracpoin.specfun import FracParams


def interval(a, b):
    return DomainFamily("interval_union", {"intervals": [[a, b]]})


def test_dense_tridiagonal_laplacian():
    n = 40
    A = 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    est = smallest_eigenvalue(dense_form(A, np.ones(n)))
    assert est.value == pytest.approx(2 - 2 * math.cos(math.pi / (n + 1)), rel=1e-10)
    assert est.accepted


@pytest.mark.parametrize("kind", ["regional", "restricted"])
def test_matches_generalised_eigh(kind):
    m = rasterize(interval(-1, 1), 1 / 32)
    p = FracParams(1, 0.6)
    F = assemble_restricted(m, p) if kind == "restricted" else \
        assemble_regional(m, p).admissible_form()
    ref = linalg.eigh(F.to_dense(), np.diag(F.mass), eigvals_only=True)[0]
    assert smallest_eigenvalue(F).value == pytest.approx(ref, rel=1e-9)


def test_iterative_path_matches_lanczos():
    m = rasterize(DomainFamily("box", {"lo": [-1, -1], "hi": [1, 1]}), 1 / 32)
    F = assemble_restricted(m, FracParams(2, 0.5))
    assert F.size > DENSE_LIMIT
    Minv = 1 / np.sqrt(F.mass)
    sym = spla.LinearOperator((F.size,) * 2, matvec=lambda x: Minv * F.matvec(Minv * x),
                              dtype=float)
    ref = spla.eigsh(sym, k=1, which="SA", tol=1e-10)[0][0]
    est = smallest_eigenvalue(F)
    assert est.value == pytest.approx(ref, rel=1e-7)


def test_eigenvalue_scaling_and_ordering():
    s = 0.4
    m = rasterize(interval(0, 1), 1 / 32)
    p = FracParams(1, s)
    reg = smallest_eigenvalue(assemble_regional(m, p).admissible_form()).value
    res = smallest_eigenvalue(assemble_restricted(m, p)).value
    assert res > reg > 0
    reg3 = smallest_eigenvalue(assemble_regional(scale_mask(m, 3.0), p).admissible_form()).value
    assert reg3 == pytest.approx(3 ** (-2 * s) * reg, rel=1e-9)


def test_errors():
    with pytest.raises(PreconditionError):
        smallest_eigenvalue(dense_form(np.eye(3), np.array([1.0, 0.0, 1.0])))
    m = rasterize(interval(-1, 1), 1 / 64)
    F = assemble_restricted(m, FracParams(1, 0.5))
    with pytest.raises(IterationError) as exc:
        smallest_eigenvalue(F, max_iter=1, tol=1e-14)
    assert exc.value.estimate is not None


def test_richardson_exact_on_geometric_sequence():
    vals = [2.0 + 3.0 * 2.0 ** (-k * 0.7) for k in range(4)]
    limit, fitted, used, flagged = richardson(vals, assumed_rate=None)
    assert limit == pytest.approx(2.0, rel=1e-12)
    assert fitted == pytest.approx(0.7, rel=1e-12)
    assert flagged
    limit, fitted, used, flagged = richardson([1.0, 0.5, 0.25], assumed_rate=1.0)
    assert limit == pytest.approx(0.0, abs=1e-15) and not flagged
    # oscillating ladders are flagged and not extrapolated
    assert richardson([1.0, 0.9, 1.0])[3]


def test_study_roundtrip_and_h_extrapolation():
    study = estimate_p1(interval(-1, 1), FracParams(1, 0.75), StudyPlan(h=[1 / 16, 1 / 32, 1 / 64]))
    back = RefinementStudy.from_json(study.to_json())
    assert back.to_json() == study.to_json()
    assert study.verdicts["extrapolation"] == "h"
    assert study.verdicts["all_accepted"]
    # the limit sits beyond the finest value in the direction of the trend
    v = study.values()
    assert np.sign(study.extrapolated - v[-1]) == np.sign(v[-1] - v[-2])


def test_p2_dominates_p1_on_strip():
    fam = DomainFamily("truncated_strip", {"L": 2, "half_width": 1})
    p = FracParams(2, 0.5)
    plan = StudyPlan(h=[1 / 8])
    assert estimate_p2(fam, p, plan).values()[0] >= estimate_p1(fam, p, plan).values()[0]


def test_picone_transfer_on_strip():
    h, p = 1 / 8, FracParams(2, 0.5)
    W, est = cross_section_ground_state(h, FracParams(1, 0.5))
    strip = rasterize(DomainFamily("truncated_strip", {"L": 4, "half_width": 1}), h)
    verdict = picone_lower_bound_check(W, strip, p, est.value, n_random=20)
    assert verdict.violations == 0
    assert verdict.quotient_ratio >= 0.9
    assert verdict.passed
