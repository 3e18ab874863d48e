"""Rasterised domains, geometric functionals and symmetrisation.

A domain is discretised on a uniform grid of square cells; a cell belongs
to the domain iff its centre lies in the open set.  Unbounded families are
always truncated by explicit parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import json
import logging
import math
import os
from typing import Callable

import numpy as np
from scipy import integrate, ndimage, special

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2 ** 22


class ResolutionError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


class EmptyDomainError(ValueError):
    pass


def cell_budget() -> int:
    env = os.environ.get("FRACPOIN_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class Grid:
    origin: tuple
    h: float
    extents: tuple

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        if len(self.origin) != len(self.extents) or len(self.extents) not in (1, 2):
            raise ValueError("grid must be 1D or 2D with matching origin/extents")
        if min(self.extents) < 1:
            raise ValueError("extents must be >= 1 per axis")
        ncell = int(np.prod(self.extents))
        if ncell > cell_budget():
            raise BudgetError(f"{ncell} cells exceed the budget {cell_budget()}")

    @property
    def dim(self) -> int:
        return len(self.extents)

    def axis_centers(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.h * (np.arange(self.extents[axis]) + 0.5)

    def cell_centers(self) -> np.ndarray:
        """Centres as an array of shape extents + (dim,)."""
        axes = [self.axis_centers(i) for i in range(self.dim)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def scaled(self, t: float) -> "Grid":
        return Grid(tuple(t * o for o in self.origin), t * self.h, self.extents)


class DomainMask:
    """Immutable boolean cell mask on a :class:`Grid`."""

    def __init__(self, grid: Grid, active):
        active = np.array(active, dtype=bool)
        if active.shape != tuple(grid.extents):
            raise ValueError(f"mask shape {active.shape} does not match grid {grid.extents}")
        active.setflags(write=False)
        self.grid = grid
        self.active = active

    @property
    def dim(self):
        return self.grid.dim

    @property
    def h(self):
        return self.grid.h

    def count(self) -> int:
        return int(self.active.sum())

    def measure(self) -> float:
        return self.count() * self.h ** self.dim

    def has_margin(self) -> bool:
        a = self.active
        for ax in range(a.ndim):
            first = np.take(a, 0, axis=ax)
            last = np.take(a, -1, axis=ax)
            if first.any() or last.any():
                return False
        return True

    def __eq__(self, other):
        return (isinstance(other, DomainMask) and self.grid == other.grid
                and np.array_equal(self.active, other.active))

    def __repr__(self):
        return f"DomainMask(dim={self.dim}, h={self.h}, extents={self.grid.extents}, active={self.count()})"

    # serialisation -------------------------------------------------------
    def to_json(self) -> str:
        flat = self.active.ravel().astype(np.int8)
        # run lengths of alternating values, starting with inactive
        change = np.flatnonzero(np.diff(flat)) + 1
        bounds = np.concatenate([[0], change, [flat.size]])
        runs = np.diff(bounds).tolist()
        if flat.size and flat[0] == 1:
            runs = [0] + runs
        doc = {
            "dim": self.dim,
            "origin": [float(o) for o in self.grid.origin],
            "h": float(self.h),
            "extents": [int(e) for e in self.grid.extents],
            "active": runs,
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "DomainMask":
        doc = json.loads(text)
        grid = Grid(tuple(doc["origin"]), doc["h"], tuple(doc["extents"]))
        if len(grid.extents) != doc["dim"]:
            raise ValueError("dim does not match extents")
        vals = np.zeros(int(np.prod(grid.extents)), dtype=bool)
        pos, on = 0, False
        for run in doc["active"]:
            vals[pos:pos + run] = on
            pos += run
            on = not on
        if pos != vals.size:
            raise ValueError("run lengths do not cover the grid")
        return cls(grid, vals.reshape(grid.extents))


@dataclass
class SampledFunction:
    """Values at grid nodes (shape extents + 1), zero outside the domain."""

    mask: DomainMask
    values: np.ndarray

    def __post_init__(self):
        shape = tuple(e + 1 for e in self.mask.grid.extents)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != shape:
            raise ValueError(f"node values need shape {shape}, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sampled values must be finite")

    @classmethod
    def from_callable(cls, mask: DomainMask, f: Callable) -> "SampledFunction":
        nodes = node_coordinates(mask.grid)
        vals = f(*np.moveaxis(nodes, -1, 0))
        return cls(mask, np.where(interior_nodes(mask), vals, 0.0))


def node_coordinates(grid: Grid) -> np.ndarray:
    axes = [grid.origin[i] + grid.h * np.arange(grid.extents[i] + 1) for i in range(grid.dim)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def adjacent_cell_count(mask: DomainMask) -> np.ndarray:
    """Number of active cells touching each node."""
    a = np.pad(mask.active.astype(np.int32), 1)
    out = np.zeros(tuple(e + 1 for e in mask.grid.extents), dtype=np.int32)
    if mask.dim == 1:
        out += a[:-1] + a[1:]
    else:
        out += a[:-1, :-1] + a[1:, :-1] + a[:-1, 1:] + a[1:, 1:]
    return out


def interior_nodes(mask: DomainMask) -> np.ndarray:
    """Nodes all of whose adjacent cells are active (the admissible set)."""
    return adjacent_cell_count(mask) == 2 ** mask.dim


# ---------------------------------------------------------------------------
# domain families


FAMILY_KINDS = ("interval_union", "box", "truncated_strip", "annuli_union",
                "graph_domain", "strip_cross")


def _profile(spec) -> Callable:
    kind = spec.get("kind", "constant")
    if kind == "constant":
        v = float(spec["value"])
        return lambda x: np.full_like(np.asarray(x, dtype=float), v)
    if kind == "power":
        c, p = float(spec.get("coef", 1.0)), float(spec["exponent"])
        return lambda x: c * np.abs(np.asarray(x, dtype=float)) ** (-p)
    if kind == "blocks":
        # height l on (l, l + l^{-2-eps}) for integer l >= 1, zero elsewhere
        eps = float(spec["eps"])

        def f(x):
            x = np.asarray(x, dtype=float)
            ell = np.floor(x)
            inside = (ell >= 1) & (x > ell) & (x < ell + ell ** (-2.0 - eps))
            return np.where(inside, ell, 0.0)
        return f
    raise ValueError(f"unknown profile kind {kind!r}")


@dataclass(frozen=True)
class DomainFamily:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")

    def __hash__(self):
        return hash((self.kind, json.dumps(self.params, sort_keys=True)))

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "params": self.params}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DomainFamily":
        doc = json.loads(text)
        return cls(doc["kind"], doc.get("params", {}))

    # geometry --------------------------------------------------------------
    @property
    def dim(self) -> int:
        if self.kind == "interval_union":
            return 1
        if self.kind == "box":
            return len(self.params["lo"])
        return 2

    def bounds(self):
        p = self.params
        if self.kind == "interval_union":
            iv = np.asarray(p["intervals"], dtype=float)
            return [iv[:, 0].min()], [iv[:, 1].max()]
        if self.kind == "box":
            return list(p["lo"]), list(p["hi"])
        if self.kind == "truncated_strip":
            L, w = p["L"], p.get("half_width", 1.0)
            return [-L, -w], [L, w]
        if self.kind == "annuli_union":
            r = math.inf if p.get("k_max") is None else 2.0 * p["k_max"]
            if p.get("radius") is not None:
                r = min(r, p["radius"])
            if not math.isfinite(r):
                raise ValueError("an infinite union of annuli needs a truncation radius")
            return [-r, -r], [r, r]
        if self.kind == "graph_domain":
            x0, x1 = p["x_range"]
            xs = np.linspace(x0, x1, 4001)
            lo = _profile(p["lower"])(xs)
            hi = _profile(p["upper"])(xs)
            return [x0, float(lo.min())], [x1, float(hi.max())]
        if self.kind == "strip_cross":
            L, w = p["L"], p.get("half_width", 1.0)
            if p.get("shape", "plus") == "plus":
                return [-L, -L], [L, L]
            return [0.0, 0.0], [L, L]
        raise AssertionError(self.kind)

    def contains(self, pts: np.ndarray) -> np.ndarray:
        """Open-set membership for points of shape (..., dim)."""
        p = self.params
        x = pts[..., 0]
        if self.kind == "interval_union":
            out = np.zeros(x.shape, dtype=bool)
            for a, b in p["intervals"]:
                out |= (x > a) & (x < b)
            return out
        if self.kind == "box":
            out = np.ones(x.shape, dtype=bool)
            for i, (a, b) in enumerate(zip(p["lo"], p["hi"])):
                out &= (pts[..., i] > a) & (pts[..., i] < b)
            return out
        y = pts[..., 1]
        if self.kind == "truncated_strip":
            L, w = p["L"], p.get("half_width", 1.0)
            return (np.abs(x) < L) & (np.abs(y) < w)
        if self.kind == "annuli_union":
            r = np.hypot(x, y)
            k = np.ceil(r / 2.0)
            out = (r > 2 * k - 1) & (r < 2 * k) & (k >= 1)
            if p.get("k_max") is not None:
                out &= k <= p["k_max"]
            if p.get("radius") is not None:
                out &= r < p["radius"]
            return out
        if self.kind == "graph_domain":
            x0, x1 = p["x_range"]
            lo = _profile(p["lower"])(x)
            hi = _profile(p["upper"])(x)
            return (x > x0) & (x < x1) & (y > lo) & (y < hi)
        if self.kind == "strip_cross":
            L, w = p["L"], p.get("half_width", 1.0)
            if p.get("shape", "plus") == "plus":
                a = (np.abs(y) < w) & (np.abs(x) < L)
                b = (np.abs(x) < w) & (np.abs(y) < L)
                return a | b
            a = (y > 0) & (y < 2 * w) & (x > 0) & (x < L)
            b = (x > 0) & (x < 2 * w) & (y > 0) & (y < L)
            return a | b
        raise AssertionError(self.kind)

    def feature_size(self) -> float:
        p = self.params
        if self.kind == "interval_union":
            return min(b - a for a, b in p["intervals"])
        if self.kind == "box":
            return min(b - a for a, b in zip(p["lo"], p["hi"]))
        if self.kind in ("truncated_strip", "strip_cross"):
            return 2.0 * p.get("half_width", 1.0)
        if self.kind == "annuli_union":
            return 1.0
        if self.kind == "graph_domain":
            x0, x1 = p["x_range"]
            xs = np.linspace(x0, x1, 4001)
            width = _profile(p["upper"])(xs) - _profile(p["lower"])(xs)
            width = width[width > 0]
            return float(width.min()) if width.size else 0.0
        raise AssertionError(self.kind)

    def slice_measure(self, R) -> np.ndarray:
        """1D measure of the section {x_1 = R} (2D families only)."""
        R = np.atleast_1d(np.asarray(R, dtype=float))
        p = self.params
        if self.kind == "graph_domain":
            x0, x1 = p["x_range"]
            w = _profile(p["upper"])(R) - _profile(p["lower"])(R)
            return np.where((R > x0) & (R < x1), np.maximum(w, 0.0), 0.0)
        if self.kind == "truncated_strip":
            return np.where(np.abs(R) < p["L"], 2.0 * p.get("half_width", 1.0), 0.0)
        # generic fallback: fine sampling of the section
        ys = np.linspace(*self._y_bounds(), 20001)
        dy = ys[1] - ys[0]
        pts = np.stack(np.broadcast_arrays(R[:, None], ys[None, :]), axis=-1)
        return self.contains(pts).sum(axis=1) * dy

    def exterior_kernel_mass(self, pts: np.ndarray, s: float) -> np.ndarray:
        """int over (untruncated set minus truncated set) of |x-y|^{-2-2s} dy.

        The untruncated set is the infinite union of annuli (annuli_union
        with k_max unset), the infinite plus / L shape, or the infinite
        strip.  Zero for bounded families.  Points must lie at distance
        >= 1 from the truncation boundary.
        """
        pts = np.asarray(pts, dtype=float)
        p = self.params
        if self.kind == "annuli_union":
            if p.get("k_max") is not None and 2.0 * p["k_max"] <= p.get("radius", math.inf):
                return np.zeros(pts.shape[:-1])
            return _annuli_exterior(np.hypot(pts[..., 0], pts[..., 1]), p["radius"],
                                    p.get("k_max"), s)
        if self.kind == "truncated_strip":
            L, w = p["L"], p.get("half_width", 1.0)
            x, y = pts[..., 0], pts[..., 1]
            return _arm_mass(L - x, y, w, s) + _arm_mass(L + x, y, w, s)
        if self.kind == "strip_cross":
            L, w = p["L"], p.get("half_width", 1.0)
            x, y = pts[..., 0], pts[..., 1]
            if p.get("shape", "plus") == "plus":
                return (_arm_mass(L - x, y, w, s) + _arm_mass(L + x, y, w, s)
                        + _arm_mass(L - y, x, w, s) + _arm_mass(L + y, x, w, s))
            # L shape: arms {x > L, 0 < y < 2w} and {y > L, 0 < x < 2w}
            return _arm_mass(L - x, y - w, w, s) + _arm_mass(L - y, x - w, w, s)
        return np.zeros(pts.shape[:-1])

    def _y_bounds(self):
        lo, hi = self.bounds()
        return lo[1], hi[1]


def _tail_1d(a, c, s):
    # int_a^inf (t^2 + c^2)^{-1-s} dt for a > 0, c >= 0
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    safe = np.maximum(c, 1e-300)
    cos2 = safe ** 2 / (a ** 2 + safe ** 2)
    half_beta = 0.5 * special.beta(s + 0.5, 0.5)
    val = safe ** (-1.0 - 2.0 * s) * half_beta * special.betainc(s + 0.5, 0.5, cos2)
    return np.where(c > 1e-12 * a, val, a ** (-1.0 - 2.0 * s) / (1.0 + 2.0 * s))


def _arm_mass(a, y, w, s, order=24):
    """Kernel mass of {t > a, |y2| < w} seen from a point at height y (a >= 1)."""
    t, wt = np.polynomial.legendre.leggauss(order)
    y2 = w * t
    a = np.asarray(a, dtype=float)[..., None]
    c = np.abs(np.asarray(y, dtype=float)[..., None] - y2)
    return np.sum(w * wt * _tail_1d(a, c, s), axis=-1)


def _ring_angular(r, rho, s):
    # int_0^{2 pi} (r^2 + rho^2 - 2 r rho cos t)^{-1-s} dt
    a = r * r + rho * rho
    b = 2.0 * r * rho
    pw = 1.0 + s
    return 2.0 * math.pi * a ** (-pw) * special.hyp2f1(pw / 2.0, (pw + 1.0) / 2.0, 1.0, (b / a) ** 2)


def _annuli_exterior(r, radius, k_max, s, n_table=257, order=8):
    """Kernel mass of the rings beyond ``radius`` at distance r from the centre."""
    r = np.asarray(r, dtype=float)
    rmax = float(np.max(r)) if r.size else 0.0
    if rmax > radius - 1.0:
        raise ValueError("points must stay at distance >= 1 from the truncation radius")
    table_r = np.linspace(0.0, max(rmax, 1e-9), n_table)
    gt, gw = np.polynomial.legendre.leggauss(order)
    k_far = max(int(20 * radius), 200)
    k_last = k_far if k_max is None else min(k_max, k_far)
    ks = np.arange(math.floor(radius / 2.0) + 1, k_last + 1)
    lo = np.maximum(2.0 * ks - 1.0, radius)
    hi = 2.0 * ks
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    rho = (0.5 * (lo + hi))[:, None] + (0.5 * (hi - lo))[:, None] * gt[None, :]
    wts = (0.5 * (hi - lo))[:, None] * gw[None, :]
    vals = np.empty_like(table_r)
    for i, ri in enumerate(table_r):
        vals[i] = np.sum(wts * rho * _ring_angular(ri, rho, s))
    if k_max is None:
        # rings beyond k_far: half the ball-exterior mass (density 1/2)
        R2 = 2.0 * k_far
        for i, ri in enumerate(table_r):
            tail, _ = integrate.quad(lambda q: q * _ring_angular(ri, q, s), R2, np.inf, limit=200)
            vals[i] += 0.5 * tail
    return np.interp(r, table_r, vals)


def rasterize(family: DomainFamily, h: float, margin: int = 1, grid: Grid | None = None) -> DomainMask:
    """Cell-centre rasterisation of a family instance."""
    feat = family.feature_size()
    if feat < 2.0 * h:
        raise ResolutionError(
            f"feature of size {feat:g} spans fewer than 2 cells at h={h:g}")
    if grid is None:
        lo, hi = family.bounds()
        origin, extents = [], []
        for a, b in zip(lo, hi):
            i0 = math.floor(a / h + 1e-9) - margin
            i1 = math.ceil(b / h - 1e-9) + margin
            origin.append(i0 * h)
            extents.append(i1 - i0)
        grid = Grid(tuple(origin), h, tuple(extents))
    active = family.contains(grid.cell_centers())
    return DomainMask(grid, active)


def scale_mask(mask: DomainMask, t: float) -> DomainMask:
    """Mask of t * Omega: identical indices on the grid rescaled by t."""
    if not t > 0:
        raise ValueError("scale factor must be positive")
    return DomainMask(mask.grid.scaled(t), mask.active)


def finite_ball_radius(mask: DomainMask) -> float:
    """Largest radius of a ball centred at a cell centre that fits in the mask."""
    if not mask.active.any():
        return 0.0
    padded = np.pad(mask.active, 1)
    dist = ndimage.distance_transform_edt(padded)
    return float(dist.max() * mask.h - 0.5 * mask.h)


# ---------------------------------------------------------------------------
# windows and the distance-average functional


@dataclass(frozen=True)
class Window:
    """Bounded window U: 'ball' (unit ball) or 'box' ((-1,1)^n), optionally shifted."""

    shape: str = "ball"
    center: tuple = (0.0, 0.0)

    def distance_to_complement(self, pts: np.ndarray, lam: float) -> np.ndarray:
        c = np.asarray(self.center[: pts.shape[-1]])
        rel = pts - lam * c
        if self.shape == "ball":
            return lam - np.linalg.norm(rel, axis=-1)
        if self.shape == "box":
            return lam - np.max(np.abs(rel), axis=-1)
        raise ValueError(f"unknown window shape {self.shape!r}")

    def family(self, lam: float, dim: int = 2) -> DomainFamily:
        if self.shape == "box":
            c = self.center[:dim]
            return DomainFamily("box", {"lo": [lam * (ci - 1) for ci in c],
                                        "hi": [lam * (ci + 1) for ci in c]})
        raise ValueError("only box windows have a family form")


def dist_to_window_complement(mask: DomainMask, window: Window, lam: float) -> np.ndarray:
    """dist(x, (lam U)^c) at active cell centres inside lam U; NaN elsewhere."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    centers = mask.grid.cell_centers()
    d = window.distance_to_complement(centers, lam)
    inside = mask.active & (d > 0)
    if not inside.any():
        raise EmptyDomainError("domain and window do not intersect")
    return np.where(inside, d, np.nan)


def distance_average(mask: DomainMask, window: Window, lam: float, s: float) -> float:
    """Midpoint rule for |Omega n lam U|^{-1} int dist(x, (lam U)^c)^{-2s} dx."""
    centers = mask.grid.cell_centers()
    d = window.distance_to_complement(centers, lam)
    in_window = mask.active & (d >= 0)
    if not in_window.any():
        raise EmptyDomainError("domain and window do not intersect")
    touching = in_window & (d == 0)
    n_excluded = int(touching.sum())
    if n_excluded:
        log.info("distance_average: excluded %d cells on the window boundary", n_excluded)
        if n_excluded > 0.01 * in_window.sum():
            log.warning("distance_average: %.1f%% of cells excluded, accuracy degraded",
                        100.0 * n_excluded / in_window.sum())
    use = in_window & (d > 0)
    return float(np.mean(d[use] ** (-2.0 * s)))


# ---------------------------------------------------------------------------
# cylindrical symmetrisation


def _axis_index(grid: Grid) -> float:
    """Position of x_2 = 0 in cell-index units (cell i has centre at i)."""
    return (0.0 - grid.origin[1]) / grid.h - 0.5


def symmetric_slice(count: int, axis_pos: float, size: int) -> np.ndarray:
    """Indices of ``count`` consecutive cells centred on ``axis_pos``.

    Ties (when exact symmetry is impossible) shift upward, so the slices of
    increasing count are nested.
    """
    if count == 0:
        return np.zeros(0, dtype=int)
    start = math.floor(axis_pos - (count - 1) / 2.0 + 0.5)
    if start < 0 or start + count > size:
        raise ValueError("symmetrised slice does not fit in the grid")
    return np.arange(start, start + count)


def symmetrize_cylindrical(mask: DomainMask) -> DomainMask:
    """Replace each column x_1 = const by a centred run of equal cell count."""
    if mask.dim != 2:
        raise ValueError("cylindrical symmetrisation needs a 2D mask")
    axis_pos = _axis_index(mask.grid)
    out = np.zeros_like(mask.active)
    counts = mask.active.sum(axis=1)
    for i, c in enumerate(counts):
        out[i, symmetric_slice(int(c), axis_pos, out.shape[1])] = True
    return DomainMask(mask.grid, out)


# ---------------------------------------------------------------------------
# decay condition in one direction


@dataclass
class DecaySpec:
    envelope: Callable
    a: float
    R: np.ndarray

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=float)
        if not self.a > 0:
            raise ValueError("a must be positive")
        if np.any(np.diff(self.R) <= 0):
            raise ValueError("R_k must be strictly increasing")


@dataclass
class DecayVerdict:
    constant: float
    monotone: bool
    decays: bool
    passed: bool
    inconclusive: bool = False
    detail: dict = field(default_factory=dict)


def check_decay_condition(spec: DecaySpec, slice_measure: Callable, sample_R=None,
                          n_eta: int = 16, decay_ratio: float = 0.1) -> DecayVerdict:
    """Check the one-direction decay condition on sampled data.

    ``slice_measure(R)`` returns the section measure of both Omega and its
    reflection (the larger of the two is used).  Admissible C is the
    smallest constant with slice <= C h on the sampled R.
    """
    if spec.R.size < 3:
        return DecayVerdict(math.nan, False, False, False, inconclusive=True)
    if sample_R is None:
        sample_R = np.linspace(1e-3, spec.R[-1] + spec.a, 4000)
    sample_R = np.asarray(sample_R, dtype=float)
    sl = np.asarray(slice_measure(sample_R), dtype=float)
    env = np.asarray(spec.envelope(sample_R), dtype=float)
    positive = sl > 0
    if np.any(positive & (env <= 0)):
        C = math.inf
    else:
        C = float(np.max(sl[positive] / env[positive])) if positive.any() else 0.0
    hk = np.asarray(spec.envelope(spec.R), dtype=float)
    eta = np.linspace(0.0, spec.a, n_eta, endpoint=False)
    shifted = np.asarray(spec.envelope(spec.R[:, None] + eta[None, :]), dtype=float)
    monotone = bool(np.all(shifted <= hk[:, None] * (1 + 1e-12) + 1e-300))
    nonincreasing = bool(np.all(np.diff(hk) <= 1e-12 * np.abs(hk[:-1]) + 1e-300))
    head = hk[0] if hk[0] > 0 else max(hk.max(), 1e-300)
    decays = nonincreasing and (hk[-1] <= decay_ratio * head)
    passed = math.isfinite(C) and monotone and decays
    return DecayVerdict(C, monotone, decays, passed,
                        detail={"h_Rk": hk.tolist(), "R_k": spec.R.tolist()})


def tube_window_terms(lower: Callable, upper: Callable, x_range, R_k: float, a: float,
                      s: float) -> dict:
    """Split of int_{Omega n lam V} dist(x,(lam V)^c)^{-2s} for V = (-1,1)^2, lam = R_k + a.

    ``Omega = {x_range[0] < x_1 < x_range[1], lower < x_2 < upper}``.  Returns
    the contributions of the regions |x_1| <= lam/2 (A), lam/2 <= |x_1| <= R_k
    (B) and R_k < |x_1| < lam (C), the window measure and the average.
    """
    lam = R_k + a
    x0, x1 = x_range

    def inner(x):
        lo = float(np.clip(lower(x), -lam, lam))
        hi = float(np.clip(upper(x), -lam, lam))
        if hi <= lo:
            return 0.0, 0.0
        dx = lam - abs(x)
        # dist = min(lam - |x1|, lam - |x2|); integrate in x2 exactly
        def piece(y0, y1):
            # contribution of x2 in (y0, y1), all with the same sign
            if y1 <= y0:
                return 0.0
            total = 0.0
            # region lam - |x2| >= dx  <=>  |x2| <= |x1|
            c = abs(x)
            lo_in, hi_in = max(y0, -c), min(y1, c)
            if hi_in > lo_in:
                total += (hi_in - lo_in) * dx ** (-2.0 * s)
            # |x2| > |x1| parts: dist = lam - |x2|
            for a0, a1 in ((y0, min(y1, -c)), (max(y0, c), y1)):
                if a1 > a0:
                    g = lambda t: (lam - abs(t)) ** (1.0 - 2.0 * s) / (1.0 - 2.0 * s)
                    if a0 >= 0:
                        total += g(a0) - g(a1)
                    else:
                        total += g(a1) - g(a0)
            return total
        return piece(lo, hi), hi - lo

    def region(xa, xb):
        xa, xb = max(xa, x0), min(xb, x1)
        if xb <= xa:
            return 0.0, 0.0
        pts = _profile_breaks(lower, upper, xa, xb)
        val = meas = 0.0
        for p0, p1 in zip(pts[:-1], pts[1:]):
            v, _ = integrate.quad(lambda t: inner(t)[0], p0, p1, limit=200)
            m, _ = integrate.quad(lambda t: inner(t)[1], p0, p1, limit=200)
            val += v
            meas += m
        return val, meas

    parts = {}
    total_meas = 0.0
    for name, (xa, xb) in {"A": (0.0, lam / 2), "B": (lam / 2, R_k), "C": (R_k, lam)}.items():
        v_pos, m_pos = region(xa, xb)
        v_neg, m_neg = region(-xb, -xa)
        parts[name] = v_pos + v_neg
        total_meas += m_pos + m_neg
    total = sum(parts.values())
    parts.update(lam=lam, measure=total_meas,
                 average=total / total_meas if total_meas > 0 else math.nan)
    return parts


def _profile_breaks(lower, upper, xa, xb):
    # breakpoints at integers help quad with piecewise (block) profiles
    ints = np.arange(math.ceil(xa), math.floor(xb) + 1, dtype=float)
    pts = np.unique(np.concatenate([[xa, xb], ints]))
    return pts[(pts >= xa) & (pts <= xb)]
