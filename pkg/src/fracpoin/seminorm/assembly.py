"""Global quadratic forms for the regional and restricted seminorms.

Cell pairs are split by their integer offset d.  Pairs with |d|_inf <= R
("near") use the exact local matrices of :mod:`pairs` and are stored as a
sparse matrix.  The remaining pairs use a q^dim Gauss rule per cell; their
cross term is a discrete convolution evaluated by FFT, so the far field is
applied matrix-free.  Everything is computed in cell units and scaled by
h^{n-2s} at the end, which makes the scaling law exact.

For the restricted form the kernel mass of every quadrature point over the
complement of its near window is integrated in closed form, so there is no
outer truncation box.
"""

from __future__ import annotations

import itertools
import struct
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy import sparse
from scipy.special import betainc, roots_legendre

from ..domain import BudgetError, DomainMask, adjacent_cell_count, cell_budget
from ..specfun import DomainError, FracParams, beta_fn, c_ns
from .pairs import pair_matrix

NEAR_RADIUS = 3
FAR_ORDER = 2


class ConfigurationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# closed-form tails


def tail_weight_1d(a: float, b: float, x, s: float):
    """Integral of |x-y|^{-1-2s} over y outside (a, b)."""
    x = np.asarray(x, dtype=float)
    if np.any((x <= a) | (x >= b)):
        raise DomainError("tail_weight_1d needs a < x < b")
    out = ((x - a) ** (-2.0 * s) + (b - x) ** (-2.0 * s)) / (2.0 * s)
    return float(out) if out.ndim == 0 else out


def _cos_power_integral(phi, s):
    # int_0^phi cos(t)^{2s} dt for phi in [0, pi/2]
    return 0.5 * beta_fn(0.5, s + 0.5) * betainc(0.5, s + 0.5, np.sin(phi) ** 2)


def tail_weight_box(lo, hi, x, s: float):
    """Integral of |x-y|^{-2-2s} over y outside the rectangle [lo, hi] (2D).

    ``x`` may be a single point or an array of shape (..., 2).
    """
    (x0, y0), (x1, y1) = lo, hi
    x = np.asarray(x, dtype=float)
    px, py = x[..., 0], x[..., 1]
    if np.any((px <= x0) | (px >= x1) | (py <= y0) | (py >= y1)):
        raise DomainError("point must lie inside the rectangle")
    total = 0.0
    # (normal distance, extents to the two adjacent corners) for each side
    sides = (
        (x1 - px, py - y0, y1 - py),
        (px - x0, py - y0, y1 - py),
        (y1 - py, px - x0, x1 - px),
        (py - y0, px - x0, x1 - px),
    )
    for a, left, right in sides:
        ang = _cos_power_integral(np.arctan2(left, a), s) + _cos_power_integral(np.arctan2(right, a), s)
        total = total + a ** (-2.0 * s) * ang
    out = total / (2.0 * s)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# grid operator


@lru_cache(maxsize=None)
def _gauss01(q):
    t, w = roots_legendre(q)
    return 0.5 * (t + 1.0), 0.5 * w


def _corners(dim):
    return list(itertools.product((0, 1), repeat=dim))


def _slab(offset, size):
    return tuple(slice(o, o + n) for o, n in zip(offset, size))


class _GridOperator:
    """Kernel form on a padded cell grid, in cell units and without constants."""

    def __init__(self, active: np.ndarray, s: float, kind: str,
                 radius: int = NEAR_RADIUS, order: int = FAR_ORDER):
        self.dim = active.ndim
        self.s = s
        self.kind = kind
        self.radius = radius
        pad = 2 * radius + 1
        self.pad = pad
        self.chi = np.pad(active, pad).astype(float)
        self.cshape = self.chi.shape
        self.nshape = tuple(c + 1 for c in self.cshape)
        self._build_near()
        self._build_far(order)

    # near field ------------------------------------------------------------
    def _build_near(self):
        dim, R, chi = self.dim, self.radius, self.chi
        coef = {}
        for d in itertools.product(range(-R, R + 1), repeat=dim):
            other = np.roll(chi, tuple(-x for x in d), axis=tuple(range(dim)))
            if self.kind == "regional":
                ind = chi * other
            else:
                ind = np.maximum(chi, other)
            if not ind.any():
                continue
            nodes, mat = pair_matrix(dim, d, self.s)
            placed = []
            for o in nodes:
                z = np.zeros(self.nshape)
                z[tuple(slice(0, c) for c in self.cshape)] = ind
                placed.append(np.roll(z, tuple(o), axis=tuple(range(dim))))
            for k, ok in enumerate(nodes):
                for l, ol in enumerate(nodes):
                    key = tuple(ol - ok)
                    acc = coef.get(key)
                    if acc is None:
                        coef[key] = mat[k, l] * placed[k]
                    else:
                        acc += mat[k, l] * placed[k]
        self.near_diagonals = coef

    def near_matrix(self, index: np.ndarray) -> sparse.csr_matrix:
        """Near-field matrix restricted to the flat node indices ``index``."""
        nn = int(np.prod(self.nshape))
        lookup = np.full(nn, -1, dtype=np.int64)
        lookup[index] = np.arange(index.size)
        rows, cols, vals = [], [], []
        strides = np.array([int(np.prod(self.nshape[i + 1:])) for i in range(self.dim)])
        for key in sorted(self.near_diagonals):
            arr = self.near_diagonals[key].ravel()
            r = index[arr[index] != 0.0]
            c = r + int(np.dot(strides, key))
            ok = (c >= 0) & (c < nn)
            r, c = r[ok], c[ok]
            cj = lookup[c]
            keep = cj >= 0
            rows.append(lookup[r[keep]])
            cols.append(cj[keep])
            vals.append(arr[r[keep]])
        n = index.size
        mat = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                                shape=(n, n))
        return 0.5 * (mat + mat.T)

    # far field -------------------------------------------------------------
    def _build_far(self, q):
        dim, R, s = self.dim, self.radius, self.s
        t, w = _gauss01(q)
        types = list(itertools.product(range(q), repeat=dim))
        self.points = np.array([[t[i] for i in ty] for ty in types])
        self.weights = np.array([np.prod([w[i] for i in ty]) for ty in types])
        # shape function values N_c(g_a)
        self.shape_vals = np.array([[np.prod([g[i] if c[i] else 1.0 - g[i] for i in range(dim)])
                                     for c in _corners(dim)] for g in self.points])
        self.fshape = tuple(sfft.next_fast_len(2 * c - 1, real=True) for c in self.cshape)
        rel = np.meshgrid(*[np.arange(f) for f in self.fshape], indexing="ij")
        # wrap to signed offsets
        rel = [np.where(r < f // 2 + 1, r, r - f) for r, f in zip(rel, self.fshape)]
        near = np.max(np.abs(np.stack(rel)), axis=0) <= R
        cache = {}
        self.kernel_hat = {}
        for a, ga in enumerate(self.points):
            for b, gb in enumerate(self.points):
                key = tuple(np.round(ga - gb, 14))
                if key not in cache:
                    dist2 = sum((r + k) ** 2 for r, k in zip(rel, key))
                    with np.errstate(divide="ignore"):
                        g = np.where(near, 0.0, dist2 ** (-(dim + 2.0 * s) / 2.0))
                    cache[key] = sfft.rfftn(g, s=self.fshape)
                self.kernel_hat[a, b] = cache[key]
        # Both kinds sum the active (regional) or all grid (restricted) far
        # cells with the same Gauss rule as the cross term, so locally
        # constant functions see no far-field error.
        support = self.chi if self.kind == "regional" else np.ones(self.cshape)
        self.kappa = self._convolve([self.weights[b] * support for b in range(len(types))])
        if self.kind == "restricted":
            self.kappa += self._grid_exterior()

    def _grid_exterior(self):
        """Exact kernel mass outside the padded grid for every quadrature point."""
        s = self.s
        centers = np.meshgrid(*[np.arange(c, dtype=float) for c in self.cshape], indexing="ij")
        out = []
        for g in self.points:
            pts = np.stack([c + gi for c, gi in zip(centers, g)], axis=-1)
            if self.dim == 1:
                out.append(tail_weight_1d(0.0, float(self.cshape[0]), pts[..., 0], s))
            else:
                out.append(tail_weight_box((0.0, 0.0), tuple(float(c) for c in self.cshape), pts, s))
        return np.array(out)

    def _convolve(self, xs):
        """V_a = sum_b conv(G_ab, x_b) for a list of cell arrays (leading batch allowed)."""
        axes = tuple(range(-self.dim, 0))
        xh = [sfft.rfftn(x, s=self.fshape, axes=axes) for x in xs]
        out = []
        crop = (...,) + tuple(slice(0, c) for c in self.cshape)
        for a in range(len(xs)):
            acc = sum(self.kernel_hat[a, b] * xh[b] for b in range(len(xs)))
            out.append(sfft.irfftn(acc, s=self.fshape, axes=axes)[crop])
        return np.stack(out, axis=0 if xs[0].ndim == self.dim else 1)

    def _to_points(self, u):
        # u: (..., *nshape) node values -> (types, ..., *cshape) cell point values
        out = []
        for a in range(len(self.points)):
            acc = 0.0
            for c, corner in enumerate(_corners(self.dim)):
                acc = acc + self.shape_vals[a, c] * u[(...,) + _slab(corner, self.cshape)]
            out.append(acc * self.chi)
        return out

    def _from_points(self, vals, batch_shape):
        z = np.zeros(batch_shape + self.nshape)
        for a, v in enumerate(vals):
            v = v * self.chi
            for c, corner in enumerate(_corners(self.dim)):
                z[(...,) + _slab(corner, self.cshape)] += self.shape_vals[a, c] * v
        return z

    def far_apply(self, u):
        """Far-field operator on node arrays of shape (batch, *nshape)."""
        U = self._to_points(u)
        V = self._convolve([self.weights[b] * U[b] for b in range(len(U))])
        # V has the type axis in front of the batch axis when batched
        if u.ndim > self.dim:
            V = np.moveaxis(V, 1, 0)
        vals = [2.0 * self.weights[a] * (self.kappa[a] * U[a] - V[a]) for a in range(len(U))]
        return self._from_points(vals, u.shape[:-self.dim])

    def far_diagonal(self):
        diag = np.zeros(self.nshape)
        for a in range(len(self.points)):
            d = 2.0 * self.weights[a] * self.kappa[a] * self.chi
            for c, corner in enumerate(_corners(self.dim)):
                diag[_slab(corner, self.cshape)] += self.shape_vals[a, c] ** 2 * d
        return diag


# ---------------------------------------------------------------------------
# quadratic forms


_KIND_CODE = {"regional": 0, "restricted": 1, "identity": 2}
_MAGIC = b"FPQF"


class QuadForm:
    """Stiffness form A (with the C_{n,s}/2 factor) and lumped mass M.

    A is held either as a dense matrix or matrix-free (sparse near part plus
    FFT far part).  ``nodes`` are flat indices into the mask's node grid
    (shape extents + 1); ``admissible`` flags nodes whose adjacent cells are
    all active.
    """

    def __init__(self, dim, s, kind, h, mass, dense=None, op=None, index=None,
                 nodes=None, admissible=None, mask=None):
        self.dim = int(dim)
        self.s = float(s)
        self.kind = kind
        self.h = float(h)
        self.mass = np.asarray(mass, dtype=float)
        self._dense = None if dense is None else np.asarray(dense, dtype=float)
        self._op = op
        self._index = index
        self.nodes = nodes
        self.admissible = (np.ones(self.mass.size, dtype=bool) if admissible is None
                           else np.asarray(admissible, dtype=bool))
        self.mask = mask
        self._near = None
        if op is not None:
            self._near = op.near_matrix(index)
            self.scale = 0.5 * c_ns(FracParams(self.dim, self.s)) * self.h ** (self.dim - 2.0 * self.s)

    @property
    def size(self) -> int:
        return self.mass.size

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        if self._dense is not None:
            return self._dense @ x
        single = x.ndim == 1
        X = x[:, None] if single else x
        out = self._near @ X
        op = self._op
        full = np.zeros((X.shape[1], int(np.prod(op.nshape))))
        full[:, self._index] = X.T
        far = op.far_apply(full.reshape((X.shape[1],) + op.nshape))
        out = out + far.reshape(X.shape[1], -1)[:, self._index].T
        out *= self.scale
        return out[:, 0] if single else out

    def energy(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(u @ self.matvec(u))

    def mass_norm2(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(np.dot(self.mass * u, u))

    def rayleigh(self, u) -> float:
        return self.energy(u) / self.mass_norm2(u)

    def diagonal(self) -> np.ndarray:
        if self._dense is not None:
            return np.diag(self._dense).copy()
        far = self._op.far_diagonal().ravel()[self._index]
        return self.scale * (self._near.diagonal() + far)

    def to_dense(self, block: int = 256) -> np.ndarray:
        if self._dense is not None:
            return self._dense.copy()
        n = self.size
        if n * n > 2 ** 26:
            raise BudgetError(f"dense form with {n} nodes exceeds 2^26 entries")
        out = np.empty((n, n))
        eye = np.eye(n)
        for j in range(0, n, block):
            out[:, j:j + block] = self.matvec(eye[:, j:j + block])
        return 0.5 * (out + out.T)

    def restrict(self, keep) -> "QuadForm":
        """Sub-form on the nodes where ``keep`` is true."""
        keep = np.asarray(keep, dtype=bool)
        sub = QuadForm.__new__(QuadForm)
        sub.__dict__.update(self.__dict__)
        sub.mass = self.mass[keep]
        sub.admissible = self.admissible[keep]
        sub.nodes = None if self.nodes is None else self.nodes[keep]
        if self._dense is not None:
            sub._dense = self._dense[np.ix_(keep, keep)]
        else:
            sub._index = self._index[keep]
            sub._near = self._near[keep][:, keep]
        return sub

    def admissible_form(self) -> "QuadForm":
        return self.restrict(self.admissible)

    def node_values(self, u) -> np.ndarray:
        """Scatter unknowns back to the mask's node grid (zeros elsewhere)."""
        shape = tuple(e + 1 for e in self.mask.grid.extents)
        out = np.zeros(int(np.prod(shape)))
        out[self.nodes] = u
        return out.reshape(shape)

    def gather(self, values) -> np.ndarray:
        """Unknown vector from node-grid values."""
        return np.asarray(values, dtype=float).ravel()[self.nodes]

    # serialisation ---------------------------------------------------------
    def to_bytes(self) -> bytes:
        A = self.to_dense()
        n = self.size
        head = struct.pack("<4sIIdIdI", _MAGIC, 1, self.dim, self.s, _KIND_CODE[self.kind], self.h, n)
        low = A[np.tril_indices(n)]
        return head + low.astype("<f8").tobytes() + self.mass.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "QuadForm":
        fmt = "<4sIIdIdI"
        hs = struct.calcsize(fmt)
        magic, version, dim, s, code, h, n = struct.unpack(fmt, data[:hs])
        if magic != _MAGIC or version != 1:
            raise ValueError("not a quadratic-form container")
        ntri = n * (n + 1) // 2
        if len(data) != hs + 8 * (ntri + n):
            raise ValueError("truncated quadratic-form container")
        low = np.frombuffer(data, dtype="<f8", count=ntri, offset=hs)
        mass = np.frombuffer(data, dtype="<f8", count=n, offset=hs + 8 * ntri).copy()
        A = np.zeros((n, n))
        A[np.tril_indices(n)] = low
        A = A + np.tril(A, -1).T
        kind = {v: k for k, v in _KIND_CODE.items()}[code]
        return cls(dim, s, kind, h, mass, dense=A)


def dense_form(A, M, s: float = 0.5, kind: str = "identity", dim: int = 1, h: float = 1.0) -> QuadForm:
    """Wrap explicit matrices (M must be diagonal) as a QuadForm."""
    M = np.asarray(M, dtype=float)
    mass = np.diag(M) if M.ndim == 2 else M
    return QuadForm(dim, s, kind, h, mass, dense=A)


def _check_mask(mask: DomainMask):
    if not mask.active.any():
        raise ConfigurationError("mask has no active cells")
    if not mask.has_margin():
        raise ConfigurationError("mask must keep a one-cell inactive margin inside its grid")
    if mask.count() > cell_budget():
        raise BudgetError(f"{mask.count()} active cells exceed the budget {cell_budget()}")


def _node_index(mask: DomainMask, op: _GridOperator, select: np.ndarray):
    """Flat indices into the padded node grid of selected mask nodes."""
    local = np.flatnonzero(select.ravel())
    multi = np.unravel_index(local, select.shape)
    padded = tuple(m + op.pad for m in multi)
    return local, np.ravel_multi_index(padded, op.nshape)


def assemble_regional(mask: DomainMask, p: FracParams, radius: int = NEAR_RADIUS,
                      order: int = FAR_ORDER) -> QuadForm:
    """Regional form over all nodes touching an active cell."""
    _check_mask(mask)
    if p.n != mask.dim:
        raise ConfigurationError("parameter dimension does not match the mask")
    op = _GridOperator(mask.active, p.s, "regional", radius, order)
    count = adjacent_cell_count(mask)
    support = count > 0
    nodes, index = _node_index(mask, op, support)
    mass = mask.h ** mask.dim * count.ravel()[nodes] / 2 ** mask.dim
    adm = (count == 2 ** mask.dim).ravel()[nodes]
    return QuadForm(mask.dim, p.s, "regional", mask.h, mass, op=op, index=index,
                    nodes=nodes, admissible=adm, mask=mask)


def assemble_restricted(mask: DomainMask, p: FracParams, box=None, radius: int = NEAR_RADIUS,
                        order: int = FAR_ORDER) -> QuadForm:
    """Full-space form for functions vanishing off the mask (admissible nodes only).

    The exterior is integrated exactly, so ``box`` is optional and only
    validated: it must contain the active set with a margin of at least its
    diameter.
    """
    _check_mask(mask)
    if p.n != mask.dim:
        raise ConfigurationError("parameter dimension does not match the mask")
    if box is not None:
        _validate_box(mask, box)
    op = _GridOperator(mask.active, p.s, "restricted", radius, order)
    count = adjacent_cell_count(mask)
    adm = count == 2 ** mask.dim
    if not adm.any():
        raise ConfigurationError("mask has no interior nodes")
    nodes, index = _node_index(mask, op, adm)
    mass = np.full(nodes.size, mask.h ** mask.dim)
    return QuadForm(mask.dim, p.s, "restricted", mask.h, mass, op=op, index=index,
                    nodes=nodes, admissible=np.ones(nodes.size, dtype=bool), mask=mask)


def active_bounds(mask: DomainMask):
    idx = np.argwhere(mask.active)
    g = mask.grid
    lo = np.array(g.origin) + g.h * idx.min(axis=0)
    hi = np.array(g.origin) + g.h * (idx.max(axis=0) + 1)
    return lo, hi


def _validate_box(mask, box):
    lo, hi = active_bounds(mask)
    blo, bhi = np.atleast_1d(np.asarray(box[0], float)), np.atleast_1d(np.asarray(box[1], float))
    diam = float(np.linalg.norm(hi - lo))
    if np.any(lo - blo < diam - 1e-12) or np.any(bhi - hi < diam - 1e-12):
        raise ConfigurationError(
            f"enclosing box must contain the mask with margin >= its diameter {diam:g}")
