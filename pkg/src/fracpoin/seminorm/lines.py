"""Directional (line-by-line) seminorm evaluation and slab interaction energies."""

from __future__ import annotations

import math

import numpy as np
from scipy import fft as sfft
from scipy.interpolate import RegularGridInterpolator
from scipy.spatial.distance import cdist

from ..domain import DomainMask, SampledFunction, node_coordinates
from ..specfun import DomainError, FracParams, c_ns
from .assembly import NEAR_RADIUS, FAR_ORDER, _gauss01
from .pairs import pair_matrix


class AccuracyError(ValueError):
    pass


def line_energies(u: np.ndarray, chi: np.ndarray, s: float,
                  radius: int = NEAR_RADIUS, order: int = FAR_ORDER) -> np.ndarray:
    """Regional 1D energies of many lines at once, in cell units.

    ``u`` has shape (B, N + 1) (node values), ``chi`` shape (B, N) (active
    cells).  Returns int int_{active^2} (u(x)-u(y))^2 |x-y|^{-1-2s} per line,
    using the same near/far split as the 2D assembly.
    """
    B, N = chi.shape
    pad = 2 * radius + 1
    chi = np.pad(chi.astype(float), ((0, 0), (pad, pad)))
    u = np.pad(u, ((0, 0), (pad, pad)))
    C = chi.shape[1]
    total = np.zeros(B)
    for d in range(-radius, radius + 1):
        ind = chi * np.roll(chi, -d, axis=1)
        nodes, mat = pair_matrix(1, (d,), s)
        vals = [np.roll(u, -int(o[0]), axis=1)[:, :C] for o in nodes]
        for k in range(len(nodes)):
            for l in range(len(nodes)):
                total += mat[k, l] * np.sum(ind * vals[k] * vals[l], axis=1)
    # far field
    t, w = _gauss01(order)
    U = [((1.0 - g) * u[:, :C] + g * u[:, 1:C + 1]) * chi for g in t]
    F = sfft.next_fast_len(2 * C - 1, real=True)
    rel = np.arange(F)
    rel = np.where(rel < F // 2 + 1, rel, rel - F)
    near = np.abs(rel) <= radius
    uh = [sfft.rfft(w[b] * U[b], n=F, axis=1) for b in range(order)]
    ch = [sfft.rfft(w[b] * chi, n=F, axis=1) for b in range(order)]
    for a in range(order):
        acc_u = 0.0
        acc_c = 0.0
        for b in range(order):
            with np.errstate(divide="ignore"):
                g = np.where(near, 0.0, np.abs(rel + t[a] - t[b]) ** (-1.0 - 2.0 * s))
            gh = sfft.rfft(g)
            acc_u = acc_u + gh * uh[b]
            acc_c = acc_c + gh * ch[b]
        V = sfft.irfft(acc_u, n=F, axis=1)[:, :C]
        kappa = sfft.irfft(acc_c, n=F, axis=1)[:, :C]
        total += 2.0 * w[a] * np.sum(U[a] * (kappa * U[a] - V), axis=1)
    return total


def seminorm_loss_sloane(u: SampledFunction, p: FracParams, K: int = 64,
                         max_lines: int = 4096) -> float:
    """Squared regional seminorm (with C_{n,s}/2) from 1D line integrals.

    Directions are K equispaced angles on the half circle; for each, lines
    orthogonal offsets j*h about the mask centre are sampled at spacing h.
    """
    mask = u.mask
    if mask.dim != 2 or p.n != 2:
        raise DomainError("the directional evaluation needs a 2D mask")
    if K < 8:
        raise AccuracyError(f"at least 8 directions are required, got {K}")
    g = mask.grid
    h = g.h
    axes = [g.origin[i] + h * np.arange(g.extents[i] + 1) for i in range(2)]
    interp = RegularGridInterpolator(axes, u.values, bounds_error=False, fill_value=0.0)
    idx = np.argwhere(mask.active)
    lo = np.array(g.origin) + h * idx.min(axis=0)
    hi = np.array(g.origin) + h * (idx.max(axis=0) + 1)
    center = 0.5 * (lo + hi)
    half = 0.5 * float(np.linalg.norm(hi - lo))
    J = int(math.ceil(half / h)) + 1
    tnodes = h * np.arange(-J, J + 1)
    tmid = 0.5 * (tnodes[:-1] + tnodes[1:])
    offsets = h * np.arange(-J, J + 1)
    total = 0.0
    for k in range(K):
        theta = math.pi * k / K
        wv = np.array([math.cos(theta), math.sin(theta)])
        nv = np.array([-math.sin(theta), math.cos(theta)])
        for start in range(0, offsets.size, max_lines):
            off = offsets[start:start + max_lines]
            base = center + off[:, None] * nv
            pn = base[:, None, :] + tnodes[None, :, None] * wv
            pm = base[:, None, :] + tmid[None, :, None] * wv
            vals = interp(pn.reshape(-1, 2)).reshape(pn.shape[:2])
            cell = np.floor((pm - np.array(g.origin)) / h).astype(int)
            inside = ((cell[..., 0] >= 0) & (cell[..., 0] < g.extents[0])
                      & (cell[..., 1] >= 0) & (cell[..., 1] < g.extents[1]))
            cx = np.clip(cell[..., 0], 0, g.extents[0] - 1)
            cy = np.clip(cell[..., 1], 0, g.extents[1] - 1)
            chi = inside & mask.active[cx, cy]
            keep = chi.any(axis=1)
            if not keep.any():
                continue
            e = line_energies(vals[keep], chi[keep], p.s)
            total += h * float(e.sum()) * h ** (1.0 - 2.0 * p.s)
    total *= math.pi / K
    return 0.5 * c_ns(p) * total


def _in_intervals(x, intervals):
    out = np.zeros(x.shape, dtype=bool)
    for a, b in intervals:
        out |= (x > a) & (x < b)
    return out


def _intervals_overlap(I, J):
    return any(max(a, c) < min(b, d) for a, b in I for c, d in J)


def cross_slab_energy(mask: DomainMask, I, J, p: FracParams, chunk: int = 4096) -> float:
    """Midpoint value of int_{Omega, x1 in I} int_{Omega, y1 in J} |x-y|^{-n-2s}.

    ``I`` and ``J`` are lists of disjoint (a, b) intervals of the x_1 axis.
    """
    if mask.dim != 2:
        raise DomainError("cross_slab_energy needs a 2D mask")
    I = [tuple(map(float, iv)) for iv in I]
    J = [tuple(map(float, iv)) for iv in J]
    if _intervals_overlap(I, J):
        raise DomainError("slab intervals must be disjoint")
    centers = mask.grid.cell_centers()
    act = mask.active
    xs = centers[act & _in_intervals(centers[..., 0], I)]
    ys = centers[act & _in_intervals(centers[..., 0], J)]
    if xs.size == 0 or ys.size == 0:
        return 0.0
    expo = -(2.0 + 2.0 * p.s)
    total = 0.0
    for i in range(0, len(xs), chunk):
        dist = cdist(xs[i:i + chunk], ys)
        total += float(np.sum(dist ** expo))
    return total * mask.h ** 4
