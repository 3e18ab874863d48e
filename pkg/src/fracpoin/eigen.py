"""Smallest generalised eigenvalues of discrete seminorm forms and refinement studies."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
import json
import logging
import math

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as spla

from .domain import (BudgetError, DomainFamily, DomainMask, Grid, ResolutionError,
                     SampledFunction, interior_nodes, rasterize)
from .seminorm.assembly import QuadForm, assemble_regional, assemble_restricted
from .specfun import FracParams

log = logging.getLogger(__name__)

DENSE_LIMIT = 2500
RESIDUAL_TOL = 1e-8


class IterationError(RuntimeError):
    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class PreconditionError(ValueError):
    pass


@dataclass
class EigenEstimate:
    value: float
    residual: float
    h: float = math.nan
    L: float | None = None
    iterations: int = 0
    accepted: bool = True
    vector: np.ndarray | None = field(default=None, repr=False, compare=False)

    def record(self) -> dict:
        return {"h": self.h, "L": self.L, "value": self.value,
                "residual": self.residual, "iterations": self.iterations,
                "accepted": self.accepted}


# ---------------------------------------------------------------------------
# inner solvers


class _DenseSolver:
    def __init__(self, form: QuadForm):
        self.A = form.to_dense()
        self.M = form.mass
        self._sigma = None

    def solve(self, rhs, sigma, tol):
        if sigma != self._sigma:
            self._lu = linalg.lu_factor(self.A - sigma * np.diag(self.M))
            self._sigma = sigma
        return linalg.lu_solve(self._lu, rhs)


class _IterativeSolver:
    """CG at zero shift, MINRES at Rayleigh shifts, near-field preconditioner."""

    def __init__(self, form: QuadForm):
        self.form = form
        n = form.size
        if form._near is not None:
            P = form.scale * form._near.tocsc()
            far_diag = form.diagonal() - form.scale * form._near.diagonal()
            P = P + sparse.diags(far_diag)
            try:
                lu = spla.splu(sparse.csc_matrix(P), permc_spec="MMD_AT_PLUS_A")
                self.prec = spla.LinearOperator((n, n), matvec=lu.solve)
            except (RuntimeError, MemoryError):
                d = form.diagonal()
                self.prec = spla.LinearOperator((n, n), matvec=lambda x: x / d)
        else:
            d = form.diagonal()
            self.prec = spla.LinearOperator((n, n), matvec=lambda x: x / d)
        self.iterations = 0

    def solve(self, rhs, sigma, tol):
        n = self.form.size
        M = self.form.mass
        op = spla.LinearOperator((n, n), matvec=lambda x: self.form.matvec(x) - sigma * M * x)

        def count(_):
            self.iterations += 1
        if sigma == 0.0:
            x, info = spla.cg(op, rhs, rtol=tol, maxiter=2000, M=self.prec, callback=count)
        else:
            x, info = spla.minres(op, rhs, rtol=tol, maxiter=2000, M=self.prec, callback=count)
        return x


def smallest_eigenvalue(form: QuadForm, tol: float = RESIDUAL_TOL, max_iter: int = 200,
                        switch: float = 1e-3, h: float | None = None, L=None,
                        start=None) -> EigenEstimate:
    """Smallest eigenvalue of A u = lambda M u by shifted inverse iteration.

    Starts from the all-ones vector with shift 0 and switches to Rayleigh
    quotient shifts once the relative residual drops below ``switch``.
    """
    n = form.size
    if n == 0:
        raise PreconditionError("form has no unknowns")
    M = form.mass
    if np.any(M <= 0):
        raise PreconditionError("mass must be positive on the admissible space")
    solver = _DenseSolver(form) if n <= DENSE_LIMIT else _IterativeSolver(form)
    x = np.ones(n) if start is None else np.asarray(start, dtype=float).copy()
    x /= math.sqrt(np.dot(M * x, x))
    Ax = form.matvec(x)
    lam = float(x @ Ax)
    start_quotient = lam
    sigma = 0.0
    best = None
    for it in range(1, max_iter + 1):
        inner_tol = 1e-6 if sigma == 0.0 else 1e-10
        y = solver.solve(M * x, sigma, inner_tol)
        if not np.all(np.isfinite(y)) or not np.any(y):
            break
        x = y / math.sqrt(abs(np.dot(M * y, y)))
        if x.sum() < 0:
            x = -x
        Ax = form.matvec(x)
        lam = float(x @ Ax)
        r = Ax - lam * M * x
        res = float(np.linalg.norm(r) / np.linalg.norm(M * x))
        scale = max(1.0, abs(lam))
        best = EigenEstimate(lam, res, h if h is not None else form.h, L, it, False, x)
        if res < tol * scale:
            best.accepted = True
            break
        if res < switch * scale:
            sigma = lam
    if best is None:
        raise IterationError("inverse iteration failed to start")
    if lam > start_quotient * (1 + 1e-10) + 1e-14:
        log.warning("eigenvalue %.6g exceeds start Rayleigh quotient %.6g", lam, start_quotient)
    if not best.accepted:
        raise IterationError(f"no convergence after {max_iter} iterations "
                             f"(residual {best.residual:.3g})", best)
    if isinstance(solver, _IterativeSolver):
        best.iterations = solver.iterations
    return best


# ---------------------------------------------------------------------------
# studies


@dataclass
class StudyPlan:
    h: list
    L: list | None = None
    tol: float = RESIDUAL_TOL


@dataclass
class RefinementStudy:
    family: dict
    params: dict
    kind: str
    ladder: list
    extrapolated: float = math.nan
    slope: float = math.nan
    verdicts: dict = field(default_factory=dict)
    partial: bool = False

    def values(self) -> np.ndarray:
        return np.array([e["value"] for e in self.ladder])

    def to_json(self) -> str:
        return json.dumps({
            "family": self.family, "params": self.params, "kind": self.kind,
            "ladder": self.ladder, "extrapolated": self.extrapolated,
            "slope": self.slope, "verdicts": self.verdicts, "partial": self.partial,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RefinementStudy":
        doc = json.loads(text)
        return cls(doc["family"], doc["params"], doc["kind"], doc["ladder"],
                   doc["extrapolated"], doc["slope"], doc["verdicts"], doc.get("partial", False))


def richardson(values, assumed_rate: float | None = 1.0, ratio: float = 2.0, flag_band: float = 0.3):
    """Extrapolate the last three members of a geometric ladder.

    Returns (limit, fitted_rate, used_rate, flagged).  The assumed rate is
    used unless the fitted rate differs from it by more than ``flag_band``
    (relative), in which case the fitted rate is used and flagged.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        return float(v[-1]), math.nan, math.nan, True
    d1, d2 = v[-3] - v[-2], v[-2] - v[-1]
    if d1 == 0 or d2 == 0 or d1 * d2 < 0:
        return float(v[-1]), math.nan, math.nan, True
    fitted = math.log(d1 / d2) / math.log(ratio)
    flagged = False
    rate = assumed_rate
    if rate is None or abs(fitted - rate) > flag_band * abs(rate):
        rate = fitted
        flagged = True
    if rate <= 0:
        return float(v[-1]), fitted, rate, True
    limit = v[-1] - d2 / (ratio ** rate - 1.0)
    return float(limit), fitted, rate, flagged


def _family_at(family: DomainFamily, L):
    if L is None:
        return family
    params = dict(family.params)
    params["L"] = L
    return DomainFamily(family.kind, params)


def _run_study(family: DomainFamily, p: FracParams, plan: StudyPlan, kind: str) -> RefinementStudy:
    L_ladder = plan.L if plan.L else [None]
    ladder = []
    partial = False
    for L in L_ladder:
        for h in plan.h:
            try:
                mask = rasterize(_family_at(family, L), h)
                if kind == "p1":
                    form = assemble_regional(mask, p).admissible_form()
                else:
                    form = assemble_restricted(mask, p)
                est = smallest_eigenvalue(form, tol=plan.tol, h=h, L=L)
            except BudgetError as exc:
                log.warning("study truncated: %s", exc)
                partial = True
                break
            ladder.append(est.record())
    study = RefinementStudy(json.loads(family.to_json()), {"n": p.n, "s": p.s}, kind, ladder,
                            partial=partial)
    vals = study.values()
    if len(L_ladder) >= 3 and len(plan.h) == 1:
        limit, fitted, used, flagged = richardson(vals, assumed_rate=None)
        study.verdicts["extrapolation"] = "L"
    elif len(plan.h) >= 3 and len(L_ladder) == 1:
        limit, fitted, used, flagged = richardson(vals, assumed_rate=1.0)
        study.verdicts["extrapolation"] = "h"
    else:
        limit, fitted, used, flagged = float(vals[-1]) if vals.size else math.nan, math.nan, math.nan, True
    study.extrapolated = limit
    study.slope = fitted
    study.verdicts["rate_flagged"] = bool(flagged)
    study.verdicts["rate_used"] = used
    study.verdicts["all_accepted"] = bool(all(e["accepted"] for e in ladder))
    return study


def estimate_p1(family: DomainFamily, p: FracParams, plan: StudyPlan) -> RefinementStudy:
    """Regional constant over an (h, L) ladder."""
    return _run_study(family, p, plan, "p1")


def estimate_p2(family: DomainFamily, p: FracParams, plan: StudyPlan) -> RefinementStudy:
    """Full-space constant over an (h, L) ladder."""
    return _run_study(family, p, plan, "p2")


# ---------------------------------------------------------------------------
# cross-section ground state and the Picone lower-bound check


def cross_section_ground_state(h: float, p_1d: FracParams, half_width: float = 1.0,
                               kind: str = "restricted"):
    """Ground state W of (-w, w) (normalised in L2) and its eigenvalue."""
    mask = rasterize(DomainFamily("interval_union", {"intervals": [[-half_width, half_width]]}), h)
    form = assemble_restricted(mask, p_1d) if kind == "restricted" else \
        assemble_regional(mask, p_1d).admissible_form()
    est = smallest_eigenvalue(form, h=h)
    W = SampledFunction(mask, form.node_values(est.vector))
    return W, est


@dataclass
class PiconeVerdict:
    violations: int
    min_quotient: float
    quotient_ratio: float
    eigen_residual: float
    passed: bool
    quotients: list = field(default_factory=list)


def _tensor_lift(W: SampledFunction, strip: DomainMask) -> np.ndarray:
    """Node values of u*(x1, x2) = W(x2) on the strip's node grid."""
    gW, gS = W.mask.grid, strip.grid
    if not math.isclose(gW.h, gS.h):
        raise PreconditionError("cross-section and strip grids need equal spacing")
    shift = (gW.origin[0] - gS.origin[1]) / gS.h
    k = int(round(shift))
    if abs(shift - k) > 1e-9:
        raise PreconditionError("cross-section nodes do not align with strip nodes")
    col = np.zeros(gS.extents[1] + 1)
    vals = W.values
    for i, v in enumerate(vals):
        j = i + k
        if 0 <= j < col.size:
            col[j] = v
    lifted = np.broadcast_to(col, (gS.extents[0] + 1, col.size)).copy()
    return np.where(interior_nodes(strip), lifted, 0.0)


def picone_lower_bound_check(W: SampledFunction, strip: DomainMask, p: FracParams,
                             lam_1d: float, tol: float = 0.1, n_random: int = 100,
                             seed: int = 0x5EED, tests=None) -> PiconeVerdict:
    """Transfer of the cross-section eigenvalue to the strip, checked discretely.

    (a) the pointwise Picone inequality for u* = W(x2) against random
    admissible v; (b) the restricted Rayleigh quotient of each v on the
    strip against (1 - tol) lam_1d; (c) the tensor eigen-relation residual
    |A u* - lam_1d M u*| / |lam_1d M u*| on the central half of the strip.
    ``tests`` may supply extra node-value arrays to include in (b).
    """
    from .witness import picone_pointwise

    interior = W.values[interior_nodes(W.mask)]
    if interior.size == 0 or np.any(interior <= 0):
        raise PreconditionError("W must be strictly positive on interior nodes")
    form = assemble_restricted(strip, p)
    ustar = form.gather(_tensor_lift(W, strip))
    rng = np.random.default_rng(seed)
    violations = 0
    quotients = []
    candidates = [rng.random(form.size) for _ in range(n_random)]
    for t in tests or []:
        candidates.append(form.gather(t))
    for i, v in enumerate(candidates):
        if i < n_random:
            violations += picone_pointwise(ustar, np.abs(v))
        quotients.append(form.rayleigh(v))
    # eigen-relation residual away from the truncation ends
    x1 = strip.grid.origin[0] + strip.h * (form.nodes // (strip.grid.extents[1] + 1))
    lo, hi = strip.grid.origin[0], strip.grid.origin[0] + strip.h * strip.grid.extents[0]
    centre = np.abs(x1 - 0.5 * (lo + hi)) <= 0.25 * (hi - lo)
    r = form.matvec(ustar) - lam_1d * form.mass * ustar
    eig_res = float(np.linalg.norm(r[centre]) / np.linalg.norm(lam_1d * form.mass[centre] * ustar[centre]))
    qmin = float(min(quotients))
    ratio = qmin / lam_1d
    passed = violations == 0 and ratio >= 1.0 - tol and eig_res <= tol
    return PiconeVerdict(violations, qmin, ratio, eig_res, passed, quotients)
