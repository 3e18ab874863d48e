"""Explicit test-function families and the inequality certificates built on them.

Families: boundary cutoffs u_delta, dilated tensor products u_l = v_l(x1) W(x2)
with the three-term energy split, window truncations u_k, plus the pointwise
Picone check and the angle lower bound.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, ndimage

from . import reporting
from .domain import (DomainFamily, DomainMask, EmptyDomainError, ResolutionError,
                     SampledFunction, Window, distance_average, interior_nodes,
                     node_coordinates, rasterize)
from .eigen import PreconditionError, cross_section_ground_state
from .seminorm.assembly import (NEAR_RADIUS, FAR_ORDER, _gauss01, assemble_regional,
                                assemble_restricted)
from .seminorm.pairs import offset_rule
from .specfun import DomainError, FracParams, c_ns, sphere_measure

log = logging.getLogger(__name__)

DEFAULT_SEED = 0x5EED
BUMP_NORM = math.sqrt(315.0 / 256.0)


class TruncationError(ValueError):
    pass


def _map(fn, items, workers: int = 1):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _loglog_slope(x, y) -> float:
    x, y = np.asarray(x, float), np.asarray(y, float)
    if x.size < 2 or np.any(y <= 0):
        return math.nan
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def node_distance(mask: DomainMask) -> np.ndarray:
    """Distance from each node to the nearest non-admissible node (0 there)."""
    inner = interior_nodes(mask)
    if not inner.any():
        return np.zeros(inner.shape)
    return ndimage.distance_transform_edt(inner, sampling=mask.h)


def clamped_cutoff(mask: DomainMask, delta: float) -> SampledFunction:
    """min(1, dist(x, complement) / delta) at the nodes of ``mask``."""
    return SampledFunction(mask, np.minimum(1.0, node_distance(mask) / delta))


def _max_gradient(u: SampledFunction) -> float:
    g = 0.0
    for ax in range(u.mask.dim):
        d = np.abs(np.diff(u.values, axis=ax)) / u.mask.h
        if d.size:
            g = max(g, float(d.max()))
    return g


# ---------------------------------------------------------------------------
# boundary cutoffs


@dataclass
class CutoffFamily:
    mask: DomainMask
    deltas: list

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float)
        if d.size == 0 or np.any(d <= 0) or np.any(np.diff(d) >= 0):
            raise ValueError("delta ladder must be positive and strictly decreasing")


@dataclass
class CutoffResult:
    deltas: list
    quotients: list
    energies: list
    norms: list
    gradient_ratio: list
    slope: float
    measure: float

    def rows(self, family: str = "cutoff") -> list:
        out = []
        for d, q, e, nrm, g in zip(self.deltas, self.quotients, self.energies, self.norms,
                                    self.gradient_ratio):
            ok = 0.0 <= g <= 2.0 + 1e-12
            out.append(WitnessRow(family, float(d), float(q),
                                  {"energy": e, "norm2": nrm, "gradient_times_delta": g},
                                  math.nan, bool(ok)))
        return out


def cutoff_rayleigh(family: CutoffFamily, p: FracParams, workers: int = 1) -> CutoffResult:
    """Regional Rayleigh quotients of u_delta along the ladder, with log-log slope.

    For s < 1/2 the slope is expected near 1 - 2s; for s > 1/2 the
    quotients stay bounded below (useful as a control).
    """
    mask = family.mask
    h = mask.h
    for d in family.deltas:
        if d < 4.0 * h - 1e-12:
            raise ResolutionError(f"delta={d:g} is below 4h={4 * h:g}")
    if p.s >= 0.5:
        log.info("cutoff family evaluated at s=%g >= 1/2: no decay expected", p.s)
    form = assemble_regional(mask, p)
    dist = node_distance(mask)

    def one(delta):
        u = SampledFunction(mask, np.minimum(1.0, dist / delta))
        x = form.gather(u.values)
        e = form.energy(x)
        nrm = form.mass_norm2(x)
        return e / nrm, e, nrm, _max_gradient(u) * delta

    res = _map(one, list(family.deltas), workers)
    q = [r[0] for r in res]
    return CutoffResult(list(map(float, family.deltas)), q, [r[1] for r in res],
                        [r[2] for r in res], [r[3] for r in res],
                        _loglog_slope(family.deltas, q), mask.measure())


# ---------------------------------------------------------------------------
# the one-dimensional bump and tensor products


def bump(x):
    """C^2 bump sqrt(315/256) (1 - x^2)^2 on (-1, 1), unit L2 norm."""
    x = np.asarray(x, dtype=float)
    return BUMP_NORM * np.maximum(0.0, 1.0 - x * x) ** 2


def scaled_bump(x, ell: float):
    """v_l(x) = l^{-1/2} v(x / l)."""
    return bump(np.asarray(x, dtype=float) / ell) / math.sqrt(ell)


def scaled_bump_norm2(ell: float, order: int = 16) -> float:
    t, w = np.polynomial.legendre.leggauss(order)
    return float(ell * np.sum(w * scaled_bump(ell * t, ell) ** 2))


def _bump_difference_integral(t: float) -> float:
    # int_R (v(x) - v(x + t))^2 dx
    if t >= 2.0:
        return 2.0
    pts = sorted({-1.0, 1.0, -1.0 - t, 1.0 - t})
    f = lambda x: (bump(x) - bump(x + t)) ** 2
    return integrate.quad(f, -1.0 - t, 1.0, points=pts[1:-1], limit=200)[0]


@lru_cache(maxsize=None)
def bump_seminorm2(s: float) -> float:
    """[v]^2 over R x R with normalisation C_{1,s}/2, by adaptive quadrature."""
    body = integrate.quad(lambda t: t ** (-1.0 - 2.0 * s) * _bump_difference_integral(t),
                          0.0, 2.0, limit=200)[0]
    tail = 2.0 * 2.0 ** (-2.0 * s) / (2.0 * s)
    return c_ns(FracParams(1, s)) * (body + tail)


def p1_norm2(values, h: float) -> float:
    """Exact L2 norm squared of a 1D piecewise-linear interpolant."""
    a, b = values[:-1], values[1:]
    return float(h * np.sum(a * a + a * b + b * b) / 3.0)


@dataclass
class TensorFamily:
    ells: list
    W: SampledFunction | None = None
    profile: str = "bump"

    def __post_init__(self):
        e = np.asarray(self.ells, dtype=float)
        if e.size == 0 or np.any(e <= 0) or np.any(np.diff(e) <= 0):
            raise ValueError("l ladder must be positive and strictly increasing")
        if self.profile != "bump":
            raise ValueError("only the polynomial bump profile is available")


@dataclass
class TensorSplit:
    kind: str
    ells: list
    I1: list
    I2: list
    I3: list
    W_seminorm2: float
    v_seminorm2: float
    i2_slope: float
    checks: dict = field(default_factory=dict)
    s: float = 0.5

    def rows(self) -> list:
        out = []
        for k, ell in enumerate(self.ells):
            bound = self.v_seminorm2 / ell ** (2.0 * self.s)
            cs = abs(self.I3[k]) <= 2.0 * math.sqrt(self.I1[k] * self.I2[k]) * (1 + 1e-8)
            out.append(WitnessRow(f"tensor_{self.kind}", float(ell),
                                  self.I1[k] + self.I2[k] + self.I3[k],
                                  {"I1": self.I1[k], "I2": self.I2[k], "I3": self.I3[k],
                                   "W_seminorm2": self.W_seminorm2},
                                  bound, bool(cs)))
        return out


def _strip_geometry(strip: DomainMask):
    if strip.dim != 2:
        raise DomainError("tensor split needs a 2D strip mask")
    idx = np.argwhere(strip.active)
    lo, hi = idx.min(axis=0), idx.max(axis=0) + 1
    box = np.zeros_like(strip.active)
    box[lo[0]:hi[0], lo[1]:hi[1]] = True
    if not np.array_equal(box, strip.active):
        raise DomainError("strip mask must be a full rectangle of cells")
    g = strip.grid
    x_lo = np.array(g.origin) + g.h * lo
    x_hi = np.array(g.origin) + g.h * hi
    return lo, hi, x_lo, x_hi


def _axis_near(g, n_cells: int, d: int, z: np.ndarray, order: int = 3) -> np.ndarray:
    """sum_i int g(i + t, i + t + d + z) dt over pairs of cells (i, i + d)."""
    i = np.arange(max(0, -d), min(n_cells, n_cells - d), dtype=float)
    tau, wt = _gauss01(order)
    lo = np.maximum(0.0, -z)
    length = np.minimum(1.0, 1.0 - z) - lo
    t = lo[:, None] + length[:, None] * tau[None, :]
    x = i[:, None, None] + t[None]
    y = x + d + z[None, :, None]
    vals = g(x, y)
    return np.einsum("ipg,pg->p", vals, length[:, None] * wt[None, :])


def _axis_far(g, n_cells: int, q: int):
    """T[d, a, b] = sum_i w_a w_b g(i + t_a, i + d + t_b), d = -(N-1)..N-1."""
    t, w = _gauss01(q)
    X = (np.arange(n_cells)[:, None] + t[None, :]).ravel()
    G = np.broadcast_to(g(X[:, None], X[None, :]), (X.size, X.size))
    G = G.reshape(n_cells, q, n_cells, q)
    ii, jj = np.meshgrid(np.arange(n_cells), np.arange(n_cells), indexing="ij")
    diag = (jj - ii + n_cells - 1).ravel()
    T = np.empty((2 * n_cells - 1, q, q))
    for a in range(q):
        for b in range(q):
            T[:, a, b] = w[a] * w[b] * np.bincount(diag, weights=G[:, a, :, b].ravel(),
                                                   minlength=2 * n_cells - 1)
    return T


def separable_strip_integral(g1, g2, n1: int, n2: int, s: float,
                             radius: int = NEAR_RADIUS, order: int = FAR_ORDER) -> float:
    """int int g1(x1, y1) g2(x2, y2) |x - y|^{-2-2s} over a rectangle of cells.

    Cell units.  ``g1`` / ``g2`` are vectorised functions of the local
    coordinates along each axis (cell i spans [i, i + 1]).  Cell pairs with
    offset |d|_inf <= radius use the singular offset rule, the rest Gauss
    points of the given order; this matches the assembled regional form.
    """
    near = 0.0
    for d1 in range(-radius, radius + 1):
        if abs(d1) >= n1:
            continue
        for d2 in range(-radius, radius + 1):
            if abs(d2) >= n2:
                continue
            z, w = offset_rule(2, (d1, d2), s)
            near += float(w @ (_axis_near(g1, n1, d1, z[:, 0]) * _axis_near(g2, n2, d2, z[:, 1])))
    t, _ = _gauss01(order)
    T1 = _axis_far(g1, n1, order)
    T2 = _axis_far(g2, n2, order)
    rel = t[None, :] - t[:, None]  # rel[a, b] = t_b - t_a
    D1 = np.arange(-(n1 - 1), n1)
    D2 = np.arange(-(n2 - 1), n2)
    Z1 = D1[:, None, None] + rel[None]
    Z2 = D2[:, None, None] + rel[None]
    with np.errstate(divide="ignore"):
        K = (Z1.reshape(-1, 1) ** 2 + Z2.reshape(1, -1) ** 2) ** (-1.0 - s)
    is_near = np.broadcast_to((np.abs(D1) <= radius)[:, None, None], Z1.shape).reshape(-1, 1) & \
        np.broadcast_to((np.abs(D2) <= radius)[:, None, None], Z2.shape).reshape(1, -1)
    K = np.where(is_near, 0.0, K)
    far = float(T1.reshape(-1) @ K @ T2.reshape(-1))
    return near + far


def _interp(values):
    nodes = np.arange(values.size, dtype=float)
    return lambda x: np.interp(x, nodes, values)


def _cross_section(family: TensorFamily, strip: DomainMask, p: FracParams, half_width: float):
    p1 = FracParams(1, p.s)
    if family.W is None:
        W, _ = cross_section_ground_state(strip.h, p1, half_width)
    else:
        W = family.W
    if W.values.sum() < 0:
        W = SampledFunction(W.mask, -W.values)
    return W


def tensor_split(family: TensorFamily, strip: DomainMask, p: FracParams,
                 kind: str = "regional") -> TensorSplit:
    """The three-term split [u_l]^2 = I1 + I2 + I3 of u_l = v_l(x1) W(x2).

    kind="regional": integrals over (strip x strip) by separable quadrature.
    kind="full": integrals over R^2 x R^2; I1 and I2 from the 1D full-space
    forms of W and v_l, I3 as the remainder of the 2D full-space energy.
    v_l is the nodal interpolant renormalised to unit L2 norm and W is
    normalised likewise.
    """
    if p.n != 2:
        raise DomainError("tensor split is implemented for n = 2 (m = 1)")
    if kind not in ("regional", "full"):
        raise ValueError(f"unknown split kind {kind!r}")
    lo, hi, x_lo, x_hi = _strip_geometry(strip)
    h = strip.h
    L = 0.5 * (x_hi[0] - x_lo[0])
    half_width = 0.5 * (x_hi[1] - x_lo[1])
    if abs(x_hi[0] + x_lo[0]) > 1e-9 or abs(x_hi[1] + x_lo[1]) > 1e-9:
        raise DomainError("strip must be centred at the origin")
    ell_max = max(family.ells)
    if L < 4.0 * ell_max - 1e-12:
        raise TruncationError(f"strip half-length {L:g} is shorter than 4 * l_max = {4 * ell_max:g}")
    W = _cross_section(family, strip, p, half_width)
    n1, n2 = int(hi[0] - lo[0]), int(hi[1] - lo[1])
    x1 = x_lo[0] + h * np.arange(n1 + 1)
    x2 = x_lo[1] + h * np.arange(n2 + 1)
    wgrid = W.mask.grid
    wnodes = wgrid.origin[0] + h * np.arange(wgrid.extents[0] + 1)
    Wv = np.interp(x2, wnodes, W.values, left=0.0, right=0.0)
    Wv = Wv / math.sqrt(p1_norm2(Wv, h))
    p1 = FracParams(1, p.s)
    C = c_ns(p)
    cross_mask = DomainMask(W.mask.grid, W.mask.active)
    Wcross = np.interp(wnodes, x2, Wv, left=0.0, right=0.0)
    assemble = assemble_restricted if kind == "full" else assemble_regional
    cross_form = assemble(cross_mask, p1)
    # reference [W]^2: over omega x omega (regional) or R x R (full)
    W_semi = cross_form.energy(cross_form.gather(Wcross))
    I1, I2, I3 = [], [], []
    checks = {"norm_drift": []}
    for ell in family.ells:
        checks["norm_drift"].append(abs(scaled_bump_norm2(ell) - 1.0))
        v = scaled_bump(x1, ell)
        v = v / math.sqrt(p1_norm2(v, h))
        if kind == "regional":
            V, Wf = _interp(v), _interp(Wv)
            scale = h ** (2.0 - 2.0 * p.s)
            i1 = 0.5 * C * scale * separable_strip_integral(
                lambda a, b: V(b) ** 2, lambda a, b: (Wf(a) - Wf(b)) ** 2, n1, n2, p.s)
            i2 = 0.5 * C * scale * separable_strip_integral(
                lambda a, b: (V(a) - V(b)) ** 2, lambda a, b: Wf(a) ** 2, n1, n2, p.s)
            i3 = C * scale * separable_strip_integral(
                lambda a, b: V(b) * (V(a) - V(b)), lambda a, b: Wf(a) * (Wf(a) - Wf(b)),
                n1, n2, p.s)
        else:
            seg = DomainFamily("interval_union", {"intervals": [[-ell, ell]]})
            vmask = rasterize(seg, h)
            vnodes = node_coordinates(vmask.grid)[..., 0]
            vform = assemble_restricted(vmask, p1)
            vvals = np.interp(vnodes, x1, v, left=0.0, right=0.0)
            i1 = W_semi
            i2 = vform.energy(vform.gather(vvals))
            box = DomainFamily("box", {"lo": [-ell, -half_width], "hi": [ell, half_width]})
            bmask = rasterize(box, h)
            bn = node_coordinates(bmask.grid)
            uvals = (np.interp(bn[..., 0], x1, v, left=0.0, right=0.0)
                     * np.interp(bn[..., 1], x2, Wv, left=0.0, right=0.0))
            bform = assemble_restricted(bmask, p)
            i3 = bform.energy(bform.gather(uvals)) - i1 - i2
        I1.append(float(i1))
        I2.append(float(i2))
        I3.append(float(i3))
    v_semi = bump_seminorm2(p.s)
    out = TensorSplit(kind, list(map(float, family.ells)), I1, I2, I3, float(W_semi), v_semi,
                      _loglog_slope(family.ells, I2), checks, p.s)
    out.checks["I1_relative_gap"] = [abs(a - W_semi) / W_semi for a in I1]
    out.checks["I2_over_bound"] = [b / (v_semi / e ** (2.0 * p.s)) for b, e in zip(I2, family.ells)]
    out.checks["cauchy_schwarz"] = [abs(c) <= 2.0 * math.sqrt(a * b) * (1.0 + 1e-8)
                                    for a, b, c in zip(I1, I2, I3)]
    return out


# ---------------------------------------------------------------------------
# discrete Picone inequality


def picone_pointwise(u, v, tol: float = 1e-12, chunk: int = 2048) -> int:
    """Number of index pairs violating (u_x - u_y)(v_x^2/u_x - v_y^2/u_y) <= (v_x - v_y)^2."""
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.shape != v.shape:
        raise ValueError("u and v need the same number of samples")
    if np.any(~(u > 0)):
        raise PreconditionError("u must be strictly positive")
    if np.any(v < 0):
        raise PreconditionError("v must be nonnegative")
    phi = v * v / u
    count = 0
    for i in range(0, u.size, chunk):
        du = u[i:i + chunk, None] - u[None, :]
        lhs = du * (phi[i:i + chunk, None] - phi[None, :])
        rhs = (v[i:i + chunk, None] - v[None, :]) ** 2
        count += int(np.count_nonzero(lhs - rhs > tol * np.maximum(1.0, rhs)))
    return count


# ---------------------------------------------------------------------------
# window truncations


@dataclass
class WindowFamily:
    domain: DomainFamily
    window: Window
    lams: list
    h: float = 0.125
    delta: float = 0.25

    def __post_init__(self):
        lam = np.asarray(self.lams, dtype=float)
        if lam.size == 0 or np.any(lam <= 0) or np.any(np.diff(lam) <= 0):
            raise ValueError("lambda ladder must be positive and strictly increasing")
        if self.delta < 2.0 * self.h - 1e-12:
            raise ResolutionError(f"delta={self.delta:g} is below 2h={2 * self.h:g}")


@dataclass
class WindowResult:
    lams: list
    quotients: list
    interior: list
    exterior: list
    exterior_bound: list
    distance_averages: list
    norm_ratio: list
    skipped: list
    average_bound: list = field(default_factory=list)

    def rows(self, family: str = "window") -> list:
        out = []
        for k, lam in enumerate(self.lams):
            ok = (self.exterior[k] <= self.exterior_bound[k] * (1 + 1e-2) + 1e-14
                  and self.norm_ratio[k] >= 0.5)
            out.append(WitnessRow(family, float(lam), self.quotients[k],
                                  {"interior": self.interior[k], "exterior": self.exterior[k],
                                   "distance_average": self.distance_averages[k],
                                   "norm_ratio": self.norm_ratio[k],
                                   "average_bound": self.average_bound[k]},
                                  self.exterior_bound[k], bool(ok)))
        return out

    def decreasing(self) -> bool:
        return bool(np.all(np.diff(self.quotients) < 0))


def _window_reach(window: Window, domain: DomainFamily) -> float:
    c = np.asarray(window.center, dtype=float)
    if window.shape == "ball":
        return 1.0 + float(np.linalg.norm(c))
    radial = domain.kind == "annuli_union"
    return (math.sqrt(2.0) if radial else 1.0) + float(np.max(np.abs(c)))


def _truncate(domain: DomainFamily, T: float) -> DomainFamily:
    p = dict(domain.params)
    if domain.kind == "annuli_union":
        p["radius"] = T
    elif domain.kind in ("strip_cross", "truncated_strip"):
        p["L"] = T
    return DomainFamily(domain.kind, p)


def window_rayleigh(family: WindowFamily, p: FracParams, workers: int = 1) -> WindowResult:
    """Regional Rayleigh quotients over Omega of the window cutoffs u_k.

    u_k = min(1, dist(x, Omega_k^c)/delta) with Omega_k = Omega n lam_k U.
    Omega is truncated at distance 1 beyond the window; the kernel mass of
    the discarded part enters exactly through the family's exterior mass.
    The quotient is split into the interior cutoff quotient over Omega_k and
    the exterior interaction, which is bounded by
    C_{n,s} c(n,s) sum u^2 dist_W^{-2s} / |u|^2 <= 2 C_{n,s} c(n,s) (window average).
    """
    if p.s >= 0.5:
        raise DomainError("window witnesses need s < 1/2")
    C = c_ns(p)
    cns = sphere_measure(p.n) / (2.0 * p.s)
    reach = _window_reach(family.window, family.domain)

    def one(lam):
        T = lam * reach + 1.0
        dom = _truncate(family.domain, T)
        try:
            mask = rasterize(dom, family.h)
        except EmptyDomainError:
            return None
        centers = mask.grid.cell_centers()
        in_window = family.window.distance_to_complement(centers, lam) > 0
        kmask = DomainMask(mask.grid, mask.active & in_window)
        if kmask.count() == 0:
            log.info("window lambda=%g: empty intersection, skipped", lam)
            return None
        u = clamped_cutoff(kmask, family.delta)
        form = assemble_regional(mask, p)
        x = form.gather(u.values)
        nrm = form.mass_norm2(x)
        if nrm == 0:
            log.info("window lambda=%g: cutoff vanishes, skipped", lam)
            return None
        nodes = node_coordinates(mask.grid).reshape(-1, mask.dim)[form.nodes]
        support = x != 0
        tau = dom.exterior_kernel_mass(nodes[support], p.s)
        far = C * float(np.sum(form.mass[support] * x[support] ** 2 * tau))
        q = (form.energy(x) + far) / nrm
        kform = assemble_regional(kmask, p)
        xk = kform.gather(u.values)
        q_int = kform.energy(xk) / kform.mass_norm2(xk)
        dW = family.window.distance_to_complement(nodes, lam)
        bound = C * cns * float(np.sum(form.mass[support] * x[support] ** 2
                                       * dW[support] ** (-2.0 * p.s))) / nrm
        davg = distance_average(mask, family.window, lam, p.s)
        return q, q_int, q - q_int, bound, davg, nrm / kmask.measure(), 2.0 * C * cns * davg

    res = _map(one, list(family.lams), workers)
    out = WindowResult([], [], [], [], [], [], [], [])
    for lam, r in zip(family.lams, res):
        if r is None:
            out.skipped.append(float(lam))
            continue
        out.lams.append(float(lam))
        for lst, val in zip((out.quotients, out.interior, out.exterior, out.exterior_bound,
                             out.distance_averages, out.norm_ratio, out.average_bound), r):
            lst.append(float(val))
    return out


def distance_average_ladder(domain: DomainFamily, window: Window, lams, s: float,
                            h: float = 0.125):
    """Window averages of dist^{-2s} along a lambda ladder, with log-log slope."""
    reach = _window_reach(window, domain)
    vals = []
    for lam in lams:
        mask = rasterize(_truncate(domain, lam * reach + 1.0), h)
        vals.append(distance_average(mask, window, lam, s))
    return vals, _loglog_slope(lams, vals)


# ---------------------------------------------------------------------------
# angle lower bound


def angle_bound(sigma: float, m: float, p: FracParams, p1_unit: float) -> float:
    """C_{n,s}/(2 C_{1,s}) * sigma * P1_{1,s}((0,1)) / m^{2s}.

    ``sigma`` is the (possibly weighted) measure of the admissible direction
    set on the unit sphere, ``m`` the bound on chord lengths along those
    directions and ``p1_unit`` an estimate of the regional constant of (0,1).
    """
    if not m > 0:
        raise DomainError("chord bound m must be positive")
    if not 0.0 < sigma <= sphere_measure(p.n) * (1.0 + 1e-12):
        raise DomainError(f"direction measure {sigma:g} outside (0, |S^{p.n - 1}|]")
    if not p1_unit >= 0:
        raise DomainError("the 1D constant must be nonnegative")
    ratio = c_ns(p) / (2.0 * c_ns(FracParams(1, p.s)))
    return ratio * sigma * p1_unit / m ** (2.0 * p.s)


# ---------------------------------------------------------------------------
# reports


@dataclass
class WitnessRow:
    family: str
    param: float
    quotient: float
    terms: dict
    bound: float
    passed: bool

    def record(self) -> dict:
        return {"family": self.family, "param": self.param, "quotient": self.quotient,
                "terms": self.terms, "bound": self.bound, "pass": self.passed}


ROW_COLUMNS = ["family", "param", "quotient", "terms", "bound", "pass"]


def rows_to_json(rows) -> str:
    return reporting.dumps([r.record() for r in rows])


def rows_to_csv(rows) -> str:
    return reporting.to_csv([r.record() for r in rows], ROW_COLUMNS)
