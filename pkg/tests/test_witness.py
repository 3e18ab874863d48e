import json
import math

import numpy as np
import pytest

from fracpoin.domain import DomainFamily, ResolutionError, Window, node_coordinates, rasterize
from fracpoin.eigen import PreconditionError, cross_section_ground_state, smallest_eigenvalue
from fracpoin.seminorm import assemble_regional, assemble_restricted
from fracpoin.specfun import DomainError, FracParams, c_ns, directional_weight, sphere_measure
from fracpoin.witness import (CutoffFamily, TensorFamily, TruncationError, WindowFamily,
                              WitnessRow, angle_bound, bump, bump_seminorm2, clamped_cutoff,
                              cutoff_rayleigh, p1_norm2, picone_pointwise, rows_to_csv,
                              rows_to_json, scaled_bump, scaled_bump_norm2, tensor_split,
                              window_rayleigh)


def interval(a, b):
    return DomainFamily("interval_union", {"intervals": [[a, b]]})


def strip(L, w=1.0):
    return DomainFamily("truncated_strip", {"L": L, "half_width": w})


# -- Picone -----------------------------------------------------------------


def test_picone_random_pairs():
    rng = np.random.default_rng(7)
    assert sum(picone_pointwise(rng.random(64) + 1e-3, rng.random(64)) for _ in range(200)) == 0


def test_picone_equality_cases():
    u = np.random.default_rng(1).random(50) + 0.1
    # v = c u turns every pair into an equality
    assert picone_pointwise(u, 3.0 * u, tol=1e-12) == 0
    du = u[:, None] - u[None, :]
    lhs = du * (9.0 * u[:, None] - 9.0 * u[None, :])
    assert np.allclose(lhs, (3.0 * du) ** 2)
    assert picone_pointwise(u, np.full(50, 2.0)) == 0
    assert picone_pointwise(u, np.zeros(50)) == 0


def test_picone_detects_violation_and_preconditions():
    # with the roles of u and v swapped the inequality can fail
    assert picone_pointwise(np.array([1.0, 2.0]), np.array([2.0, 0.0]), tol=-1.0) > 0
    with pytest.raises(PreconditionError):
        picone_pointwise(np.array([1.0, 0.0]), np.array([1.0, 1.0]))
    with pytest.raises(PreconditionError):
        picone_pointwise(np.array([1.0, 1.0]), np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        picone_pointwise(np.ones(3), np.ones(2))


# -- bump and cutoffs ---------------------------------------------------------


@pytest.mark.parametrize("ell", [0.5, 1.0, 8.0])
def test_scaled_bump_unit_norm(ell):
    assert scaled_bump_norm2(ell) == pytest.approx(1.0, rel=1e-13)


@pytest.mark.parametrize("s", [0.3, 0.75])
def test_bump_seminorm_matches_assembly(s):
    m = rasterize(interval(-1, 1), 1 / 128)
    F = assemble_restricted(m, FracParams(1, s))
    x = m.grid.origin[0] + m.h * F.nodes
    assert F.energy(bump(x)) == pytest.approx(bump_seminorm2(s), rel=1e-3)


def test_p1_norm_exact_for_linear():
    xs = np.linspace(0, 1, 9)
    assert p1_norm2(xs, 1 / 8) == pytest.approx(1 / 3, rel=1e-14)


def test_clamped_cutoff_shape():
    m = rasterize(interval(0, 1), 1 / 64)
    u = clamped_cutoff(m, 0.125)
    assert u.values.min() == 0 and u.values.max() == 1
    assert u.values[0] == u.values[-1] == 0
    assert np.count_nonzero(u.values == 1) == 64 - 2 * 8 + 1


def test_cutoff_quotients_decay_and_dominate_eigenvalue():
    m = rasterize(interval(0, 1), 1 / 256)
    p = FracParams(1, 0.25)
    r = cutoff_rayleigh(CutoffFamily(m, [0.25, 0.125, 0.0625]), p)
    assert np.all(np.diff(r.quotients) < 0)
    assert max(r.gradient_ratio) <= 1 + 1e-12
    lam = smallest_eigenvalue(assemble_regional(m, p).admissible_form()).value
    assert min(r.quotients) >= lam
    # s > 1/2: the quotients blow up instead
    up = cutoff_rayleigh(CutoffFamily(m, [0.25, 0.125, 0.0625]), FracParams(1, 0.75))
    assert np.all(np.diff(up.quotients) > 0)


def test_cutoff_argument_checks():
    m = rasterize(interval(0, 1), 1 / 64)
    with pytest.raises(ValueError):
        CutoffFamily(m, [0.1, 0.2])
    with pytest.raises(ResolutionError):
        cutoff_rayleigh(CutoffFamily(m, [0.25, 0.03]), FracParams(1, 0.25))


# -- tensor split --------------------------------------------------------------


@pytest.mark.parametrize("s", [0.3, 0.75])
def test_regional_split_sums_to_assembled_energy(s):
    h, p = 1 / 8, FracParams(2, s)
    mask = rasterize(strip(4), h)
    fam = TensorFamily([0.5, 1.0])
    r = tensor_split(fam, mask, p)
    W, _ = cross_section_ground_state(h, FracParams(1, s))
    form = assemble_regional(mask, p)
    X = node_coordinates(mask.grid)
    wn = W.mask.grid.origin[0] + h * np.arange(W.mask.grid.extents[0] + 1)
    nw = math.sqrt(p1_norm2(np.interp(np.arange(-1, 1 + h / 2, h), wn, W.values), h))
    for k, ell in enumerate(fam.ells):
        nv = math.sqrt(p1_norm2(scaled_bump(np.arange(-4, 4 + h / 2, h), ell), h))
        u = scaled_bump(X[..., 0], ell) / nv * np.interp(X[..., 1], wn, W.values) / nw
        energy = form.energy(form.gather(u))
        assert r.I1[k] + r.I2[k] + r.I3[k] == pytest.approx(energy, rel=1e-10)
    assert all(r.checks["cauchy_schwarz"])
    # truncating the strip removes kernel mass, so I1 approaches [W]^2 from below
    assert all(i1 <= r.W_seminorm2 * (1 + 1e-9) for i1 in r.I1)
    assert max(r.checks["I1_relative_gap"]) < 0.05


def test_full_split_bounds():
    r = tensor_split(TensorFamily([1.0, 2.0]), rasterize(strip(8), 1 / 8), FracParams(2, 0.5),
                     kind="full")
    assert all(r.checks["cauchy_schwarz"])
    assert r.I1[0] == r.W_seminorm2
    assert all(q < 1 for q in r.checks["I2_over_bound"])
    assert all(row.passed for row in r.rows())


def test_tensor_split_errors():
    mask = rasterize(strip(2), 1 / 8)
    with pytest.raises(TruncationError):
        tensor_split(TensorFamily([1.0]), mask, FracParams(2, 0.5))
    with pytest.raises(DomainError):
        tensor_split(TensorFamily([0.25]), mask, FracParams(1, 0.5))
    with pytest.raises(ValueError):
        TensorFamily([2.0, 1.0])


# -- windows -------------------------------------------------------------------


def test_window_quotients_on_plus_shape():
    fam = WindowFamily(DomainFamily("strip_cross", {"half_width": 1.0}), Window("box"), [4, 8])
    r = window_rayleigh(fam, FracParams(2, 0.25))
    assert r.decreasing()
    for row in r.rows():
        assert row.passed
        assert row.terms["interior"] > 0
    assert all(e <= b for e, b in zip(r.exterior, r.average_bound))


def test_window_argument_checks():
    with pytest.raises(ResolutionError):
        WindowFamily(DomainFamily("annuli_union", {}), Window("ball"), [4], h=0.25, delta=0.25)
    with pytest.raises(ValueError):
        WindowFamily(DomainFamily("annuli_union", {}), Window("ball"), [8, 4])
    fam = WindowFamily(DomainFamily("annuli_union", {}), Window("ball"), [4])
    with pytest.raises(DomainError):
        window_rayleigh(fam, FracParams(2, 0.6))


# -- angle bound ---------------------------------------------------------------


def test_angle_bound_reduces_to_interval_constant():
    p = FracParams(2, 0.75)
    p1_unit = 2.0
    # full directional weight and chord bound 1 recover the 1D constant of (0,1)
    sigma = directional_weight(2, 0.75)
    assert angle_bound(sigma, 1.0, p, p1_unit) == pytest.approx(p1_unit, rel=1e-14)
    # the bound decays as m^{-2s}
    assert angle_bound(sigma, 4.0, p, p1_unit) == pytest.approx(p1_unit * 4 ** -1.5, rel=1e-14)
    assert c_ns(p) > 0


def test_angle_bound_domain():
    p = FracParams(2, 0.5)
    with pytest.raises(DomainError):
        angle_bound(0.0, 1.0, p, 1.0)
    with pytest.raises(DomainError):
        angle_bound(sphere_measure(2) * 1.01, 1.0, p, 1.0)
    with pytest.raises(DomainError):
        angle_bound(1.0, 0.0, p, 1.0)


# -- reports -------------------------------------------------------------------


def test_rows_serialise_deterministically():
    rows = [WitnessRow("cutoff", 0.125, 1 / 3, {"energy": 0.1, "bad": math.nan}, math.inf, True)]
    text = rows_to_json(rows)
    assert text == rows_to_json(rows)
    doc = json.loads(text)
    assert doc[0]["terms"]["bad"] is None and doc[0]["bound"] is None
    assert "0.33333333333333331" in text
    csv = rows_to_csv(rows).splitlines()
    assert csv[0] == "family,param,quotient,terms,bound,pass"
    assert csv[1].startswith("cutoff,0.125,0.33333333333333331,")
