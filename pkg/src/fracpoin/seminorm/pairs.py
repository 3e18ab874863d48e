"""Element-pair integrals of the Gagliardo kernel on a uniform grid.

Cells are unit cubes in cell units; a pair is described by the integer
offset ``d`` of the second cell.  Substituting z = y - x - d turns the
double cell integral into an integral over z in [-1, 1]^dim against the
kernel |d + z|^{-dim-2s}, with the x-integration done exactly per axis
(products of hat functions are quadratic on a cell, so two Gauss points
suffice).  Quadrants touching the kernel singularity are integrated with
a Duffy split and Gauss-Jacobi in the radial variable.
"""

from __future__ import annotations

from functools import lru_cache
import itertools

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

_GL2_T, _GL2_W = roots_legendre(2)
_GL2_T = 0.5 * (_GL2_T + 1.0)
_GL2_W = 0.5 * _GL2_W


def _legendre01(order):
    t, w = roots_legendre(order)
    return 0.5 * (t + 1.0), 0.5 * w


def _jacobi01(order, beta):
    # nodes/weights on [0, 1] for the weight r**beta
    t, w = roots_jacobi(order, 0.0, beta)
    return 0.5 * (t + 1.0), w * 0.5 ** (1.0 + beta)


def hat(t):
    return np.maximum(0.0, 1.0 - np.abs(t))


@lru_cache(maxsize=None)
def offset_rule(dim: int, d: tuple, s: float, radial_order: int = 8,
                angular_order: int = 16, smooth_order: int = 10):
    """Quadrature for  int_{[-1,1]^dim} |d+z|^{-dim-2s} Q(z) dz.

    Returns points ``z`` of shape (P, dim) and weights (P,) with the kernel
    folded in.  On quadrants containing the singular point the rule is
    only valid for Q vanishing to second order there, which holds for
    every integrand built from differences u(x) - u(y) of continuous
    piecewise polynomials.
    """
    d = np.asarray(d, dtype=float)
    zstar = -d
    pts, wts = [], []
    ts, ws = _legendre01(smooth_order)
    tr, wr = _jacobi01(radial_order, 1.0 - 2.0 * s)
    tv, wv = _legendre01(angular_order)
    for corner in itertools.product((-1.0, 0.0), repeat=dim):
        corner = np.array(corner)
        touches = all(zstar[i] in (corner[i], corner[i] + 1.0) for i in range(dim))
        if not touches:
            grids = np.meshgrid(*([ts] * dim), indexing="ij")
            z = corner + np.stack([g.ravel() for g in grids], axis=1)
            w = np.prod(np.meshgrid(*([ws] * dim), indexing="ij"), axis=0).ravel()
            r = np.linalg.norm(d + z, axis=1)
            pts.append(z)
            wts.append(w * r ** (-dim - 2.0 * s))
            continue
        # orientation: unit vectors pointing from the singular corner into the quadrant
        sign = np.where(zstar == corner, 1.0, -1.0)
        if dim == 1:
            z = zstar + sign * tr[:, None]
            w = wr / tr ** 2
            pts.append(z)
            wts.append(w)
            continue
        rho, v = np.meshgrid(tr, tv, indexing="ij")
        wrho, wvv = np.meshgrid(wr, wv, indexing="ij")
        rho, v, wrho, wvv = rho.ravel(), v.ravel(), wrho.ravel(), wvv.ravel()
        ang = (1.0 + v * v) ** (-1.0 - s)
        w = wrho * wvv * ang / rho ** 2
        for a, b in ((rho, rho * v), (rho * v, rho)):
            z = zstar + sign * np.stack([a, b], axis=1)
            pts.append(z)
            wts.append(w)
    return np.concatenate(pts), np.concatenate(wts)


def _axis_tables(z, dz, positions):
    """Exact x-integrals of hat products along one axis.

    Returns XX, XY, YY of shape (P, npos, npos) where for example
    XY[p, a, b] = int hat(x - pos_a) hat(x + dz + z_p - pos_b) dx over the
    admissible x-range [max(0, -z), min(1, 1 - z)].
    """
    lo = np.maximum(0.0, -z)
    hi = np.minimum(1.0, 1.0 - z)
    length = hi - lo
    x = lo[:, None] + length[:, None] * _GL2_T[None, :]
    w = length[:, None] * _GL2_W[None, :]
    y = x + dz + z[:, None]
    pos = np.asarray(positions, dtype=float)
    X = hat(x[:, :, None] - pos)
    Y = hat(y[:, :, None] - pos)
    XX = np.einsum("pg,pga,pgb->pab", w, X, X)
    XY = np.einsum("pg,pga,pgb->pab", w, X, Y)
    YY = np.einsum("pg,pga,pgb->pab", w, Y, Y)
    return XX, XY, YY


def pair_nodes(dim: int, d: tuple):
    """Local node offsets (cell units, relative to the first cell's origin)."""
    corners = list(itertools.product((0, 1), repeat=dim))
    nodes = {tuple(c) for c in corners}
    nodes |= {tuple(int(d[i]) + c[i] for i in range(dim)) for c in corners}
    return np.array(sorted(nodes), dtype=int)


@lru_cache(maxsize=None)
def pair_matrix(dim: int, d: tuple, s: float):
    """Local matrix of  int_e int_f (phi_k(x)-phi_k(y))(phi_l(x)-phi_l(y)) |x-y|^{-dim-2s}.

    ``e`` is the unit cell at the origin and ``f = e + d``; nodes are the
    union of both cells' vertices, returned alongside the matrix.  The
    kernel carries no normalisation constant and the cells have unit size.
    """
    nodes = pair_nodes(dim, d)
    z, w = offset_rule(dim, tuple(d), s)
    per_axis = []
    for i in range(dim):
        positions = sorted(set(nodes[:, i].tolist()))
        idx = np.searchsorted(positions, nodes[:, i])
        XX, XY, YY = _axis_tables(z[:, i], float(d[i]), positions)
        per_axis.append((idx, XX, XY, YY))
    P = len(w)
    nk = len(nodes)
    xx = np.ones((P, nk, nk))
    xy = np.ones((P, nk, nk))
    yx = np.ones((P, nk, nk))
    yy = np.ones((P, nk, nk))
    for idx, XX, XY, YY in per_axis:
        xx *= XX[:, idx][:, :, idx]
        xy *= XY[:, idx][:, :, idx]
        yx *= XY[:, idx][:, :, idx].transpose(0, 2, 1)
        yy *= YY[:, idx][:, :, idx]
    Q = xx - xy - yx + yy
    mat = np.einsum("p,pkl->kl", w, Q)
    mat = 0.5 * (mat + mat.T)
    return nodes, mat


def separable_pair_integral(dim: int, d: tuple, s: float, factors):
    """Integral over a cell pair of a sum of per-axis separable integrands.

    ``factors`` is a list of terms; each term is a list (one entry per axis)
    of callables ``f(x, y) -> array`` evaluated at matching points of the
    two cells, expressed in local coordinates x in [0,1], y in [d, d+1].
    Each callable must be a polynomial of degree <= 3 in x along its axis.
    Returns the integral against |x - y|^{-dim-2s} over unit cells.
    """
    z, w = offset_rule(dim, tuple(d), s)
    total = np.zeros(len(w))
    for term in factors:
        prod = np.ones(len(w))
        for i, f in enumerate(term):
            zi = z[:, i]
            lo = np.maximum(0.0, -zi)
            hi = np.minimum(1.0, 1.0 - zi)
            length = hi - lo
            x = lo[:, None] + length[:, None] * _GL2_T[None, :]
            y = x + d[i] + zi[:, None]
            prod *= np.sum(length[:, None] * _GL2_W[None, :] * f(x, y), axis=1)
        total += prod
    return float(w @ total)
