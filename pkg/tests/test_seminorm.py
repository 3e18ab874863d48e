import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from fracpoin.domain import (DomainFamily, DomainMask, Grid, SampledFunction, node_coordinates,
                             rasterize, scale_mask)
from fracpoin.seminorm import (ConfigurationError, QuadForm, assemble_regional,
                               assemble_restricted, line_energies, seminorm_loss_sloane,
                               tail_weight_1d)
from fracpoin.seminorm.pairs import pair_matrix
from fracpoin.specfun import FracParams, c_ns, gamma_fn


def interval(a, b):
    return DomainFamily("interval_union", {"intervals": [[a, b]]})


def box(lo, hi):
    return DomainFamily("box", {"lo": lo, "hi": hi})


def brute_regional(mask, s):
    """All-pairs assembly with exact pair matrices, no far-field approximation."""
    dim = mask.dim
    shape = tuple(e + 1 for e in mask.active.shape)
    A = np.zeros((int(np.prod(shape)),) * 2)
    cells = [tuple(c) for c in np.argwhere(mask.active)]
    for e, f in itertools.product(cells, cells):
        d = tuple(int(x) for x in np.subtract(f, e))
        nodes, m = pair_matrix(dim, d, s)
        idx = [np.ravel_multi_index(tuple(np.add(e, o)), shape) for o in nodes]
        A[np.ix_(idx, idx)] += m
    return A * 0.5 * c_ns(FracParams(dim, s)) * mask.h ** (dim - 2 * s)


@pytest.mark.parametrize("dim,fam", [(1, interval(-1, 1)), (2, box([-1, -0.5], [1, 0.5]))])
@pytest.mark.parametrize("s", [0.25, 0.75])
def test_regional_matches_all_pairs(dim, fam, s):
    m = rasterize(fam, 0.125)
    F = assemble_regional(m, FracParams(dim, s))
    ref = brute_regional(m, s)[np.ix_(F.nodes, F.nodes)]
    D = F.to_dense()
    assert np.abs(D - ref).max() <= 1e-3 * np.abs(ref).max()
    assert np.array_equal(D, D.T)
    # constants lie in the kernel of the regional form
    assert abs(F.energy(np.ones(F.size))) < 1e-10


def _q1(a, nodes, x):
    return sum(a[k] * np.prod([max(0, 1 - abs(x[i] - nodes[k, i])) for i in range(len(x))])
               for k in range(len(nodes)))


@pytest.mark.parametrize("dim,d", [(1, (0,)), (1, (1,)), (2, (0, 0)), (2, (1, 0)), (2, (1, 1))])
@pytest.mark.parametrize("s", [0.1, 0.5, 0.9])
def test_pair_matrix_subdivision_consistent(dim, d, s):
    # a cell pair split into 2^dim x 2^dim half-size pairs gives the same integral
    nodes, m = pair_matrix(dim, d, s)
    a = np.random.default_rng(1).normal(size=len(nodes))
    coarse = a @ m @ a
    fine = 0.0
    subs = list(itertools.product((0, 1), repeat=dim))
    for se, sf in itertools.product(subs, subs):
        E = np.array(se)
        dd = tuple(int(v) for v in 2 * np.array(d) + np.array(sf) - E)
        n2, m2 = pair_matrix(dim, dd, s)
        b = np.array([_q1(a, nodes, (E + n2[k]) / 2.0) for k in range(len(n2))])
        fine += b @ m2 @ b * 0.5 ** (dim - 2 * s)
    assert fine == pytest.approx(coarse, rel=1e-11)


def _hat(x):
    return np.maximum(0, 1 - np.abs(x))


def _hat_regional(s):
    def G(t):
        a, b = max(-1, -1 - t), min(1, 1 - t)
        pts = sorted({p for p in (0.0, -t) if a < p < b})
        return integrate.quad(lambda x: (_hat(x) - _hat(x + t)) ** 2, a, b,
                              points=pts or None, epsabs=1e-14)[0]
    val = 2 * integrate.quad(lambda t: G(t) * t ** (-1 - 2 * s), 0, 2, points=[1],
                             limit=200, epsabs=1e-13)[0]
    return 0.5 * c_ns(FracParams(1, s)) * val


@pytest.mark.parametrize("s", [0.25, 0.75])
def test_hat_function_energy(s):
    # the hat on (-1, 1) is in the discrete space: both forms are exact up to quadrature
    m = rasterize(interval(-1, 1), 1 / 64)
    p = FracParams(1, s)
    reg = _hat_regional(s)
    tail = c_ns(p) * integrate.quad(lambda x: _hat(x) ** 2 * tail_weight_1d(-1, 1, x, s),
                                    -1, 1, points=[0])[0]
    F = assemble_regional(m, p)
    G = assemble_restricted(m, p)
    x = m.grid.origin[0] + m.h * F.nodes
    xg = m.grid.origin[0] + m.h * G.nodes
    assert F.energy(_hat(x)) == pytest.approx(reg, rel=1e-5)
    assert G.energy(_hat(xg)) == pytest.approx(reg + tail, rel=1e-5)


@pytest.mark.parametrize("s", [0.25, 0.75])
def test_restricted_disk_profile_converges(s):
    # (1-|x|^2)_+^{1+s} on the unit disk has a closed-form fractional Laplacian
    n = 2
    k = 4 ** s * gamma_fn(s + 2) * gamma_fn(n / 2 + s) / gamma_fn(n / 2)
    exact = integrate.quad(lambda r: (1 - r * r) ** (1 + s) * k * (1 - (1 + 2 * s / n) * r * r)
                           * 2 * math.pi * r, 0, 1)[0]
    errs = []
    for h in (1 / 8, 1 / 16):
        g = Grid((-1 - h, -1 - h), h, (int(round(2 / h)) + 2,) * 2)
        m = DomainMask(g, np.hypot(*np.moveaxis(g.cell_centers(), -1, 0)) < 1)
        G = assemble_restricted(m, FracParams(2, s))
        X = node_coordinates(g).reshape(-1, 2)[G.nodes]
        u = np.maximum(0, 1 - (X ** 2).sum(1)) ** (1 + s)
        errs.append(abs(G.energy(u) / exact - 1))
        R = assemble_regional(m, FracParams(2, s)).admissible_form()
        assert G.energy(u) >= R.energy(u)
    assert errs[1] < 0.01
    assert errs[1] < errs[0] / 3


@settings(max_examples=4, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.2, 0.5, 0.8]))
def test_forms_are_positive_and_ordered(seed, s):
    rng = np.random.default_rng(seed)
    g = Grid((0.0, 0.0), 0.25, (9, 8))
    act = np.zeros((9, 8), dtype=bool)
    act[1:-1, 1:-1] = rng.random((7, 6)) < 0.7
    act[3:6, 3:6] = True
    m = DomainMask(g, act)
    p = FracParams(2, s)
    R = assemble_restricted(m, p)
    F = assemble_regional(m, p).admissible_form()
    assert np.array_equal(R.nodes, F.nodes)
    u = rng.normal(size=R.size)
    assert R.energy(u) >= F.energy(u) >= 0
    Dr, Df = R.to_dense(), F.to_dense()
    diff = Dr - Df
    # restricted minus regional is the kappa-weighted mass matrix: PSD
    assert np.linalg.eigvalsh(diff).min() > -1e-12 * np.abs(Dr).max()
    assert np.all(np.diag(diff) > 0)
    assert np.linalg.eigvalsh(Df).min() > -1e-10 * np.abs(Df).max()


@pytest.mark.parametrize("t", [0.5, 2.0, 10.0])
def test_scaling_law(t):
    s = 0.3
    m = rasterize(box([-1, -1], [1, 0.5]), 0.125)
    p = FracParams(2, s)
    u = np.random.default_rng(3).normal(size=assemble_regional(m, p).size)
    for assemble in (assemble_regional, assemble_restricted):
        F, Ft = assemble(m, p), assemble(scale_mask(m, t), p)
        v = u[:F.size]
        assert Ft.energy(v) == pytest.approx(t ** (2 - 2 * s) * F.energy(v), rel=1e-10)
        assert Ft.mass_norm2(v) == pytest.approx(t ** 2 * F.mass_norm2(v), rel=1e-12)


def test_matvec_matches_dense_and_bytes_roundtrip():
    m = rasterize(box([-1, -1], [1, 1]), 0.125)
    F = assemble_restricted(m, FracParams(2, 0.6))
    x = np.random.default_rng(0).normal(size=(F.size, 3))
    assert np.allclose(F.matvec(x), F.to_dense() @ x, rtol=1e-12, atol=1e-12)
    G = QuadForm.from_bytes(F.to_bytes())
    assert np.allclose(G.matvec(x), F.matvec(x), rtol=0, atol=1e-13)


def test_configuration_errors():
    g = Grid((0.0,), 0.25, (4,))
    with pytest.raises(ConfigurationError):
        assemble_regional(DomainMask(g, [True, True, False, False]), FracParams(1, 0.5))
    with pytest.raises(ConfigurationError):
        assemble_regional(DomainMask(g, [False] * 4), FracParams(1, 0.5))
    m = rasterize(interval(-1, 1), 0.125)
    with pytest.raises(ConfigurationError):
        assemble_regional(m, FracParams(2, 0.5))
    with pytest.raises(ConfigurationError):
        assemble_restricted(m, FracParams(1, 0.5), box=([-2], [2]))
    assemble_restricted(m, FracParams(1, 0.5), box=([-3], [3]))


def test_line_energies_match_1d_assembly():
    s = 0.4
    m = rasterize(interval(-1, 1), 1 / 32)
    F = assemble_regional(m, FracParams(1, s))
    x = m.grid.origin[0] + m.h * np.arange(m.grid.extents[0] + 1)
    u = np.cos(x)
    e = line_energies(u[None, :], m.active[None, :], s)[0] * m.h ** (1 - 2 * s)
    assert 0.5 * c_ns(FracParams(1, s)) * e == pytest.approx(F.energy(u[F.nodes]), rel=1e-12)


def test_directional_energy_matches_assembly():
    m = rasterize(box([-1, -1], [1, 1]), 1 / 32)
    f = lambda x, y: np.maximum(0, 1 - (x * x + y * y) / 0.64) ** 3 * (1 + 0.3 * x)
    su = SampledFunction.from_callable(m, f)
    p = FracParams(2, 0.75)
    F = assemble_regional(m, p)
    direct = F.energy(F.gather(su.values))
    assert seminorm_loss_sloane(su, p, 32) == pytest.approx(direct, rel=0.02)
