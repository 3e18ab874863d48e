"""Named verification suites driven by JSON manifests.

Each suite returns a SuiteReport: a list of tolerance checks plus the raw
data behind them.  Reports are deterministic for a fixed manifest and seed.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import reporting
from .domain import (DomainFamily, DomainMask, Grid, SampledFunction, Window,
                     node_coordinates, rasterize, scale_mask, symmetrize_cylindrical)
from .eigen import (StudyPlan, cross_section_ground_state, estimate_p1, estimate_p2,
                    picone_lower_bound_check, richardson, smallest_eigenvalue)
from .seminorm.assembly import assemble_regional, assemble_restricted
from .seminorm.lines import cross_slab_energy, seminorm_loss_sloane
from .specfun import (FracParams, c_ns, directional_weight, reduction_residual,
                      strip_normalisation)
from .witness import (DEFAULT_SEED, CutoffFamily, TensorFamily, WindowFamily, angle_bound,
                      cutoff_rayleigh, distance_average_ladder, picone_pointwise,
                      scaled_bump, tensor_split, window_rayleigh)

log = logging.getLogger(__name__)


class ManifestError(ValueError):
    pass


@dataclass
class ExperimentManifest:
    suite: str
    family: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    ladders: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ManifestError(f"unknown suite {self.suite!r}; known: {sorted(SUITES)}")
        for k, v in self.tolerances.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                raise ManifestError(f"tolerance {k!r} must be a positive number")
        for k, v in self.ladders.items():
            if not isinstance(v, list) or not v:
                raise ManifestError(f"ladder {k!r} must be a non-empty list")
            d = np.diff(np.asarray(v, dtype=float))
            if d.size and not (np.all(d > 0) or np.all(d < 0)):
                raise ManifestError(f"ladder {k!r} must be strictly monotone")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ManifestError("seed must be an integer")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentManifest":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"manifest is not valid JSON: {exc}") from None
        if not isinstance(doc, dict) or "suite" not in doc:
            raise ManifestError("manifest must be an object with a 'suite' entry")
        known = {"suite", "family", "params", "ladders", "tolerances", "output", "seed"}
        extra = set(doc) - known
        if extra:
            raise ManifestError(f"unknown manifest entries: {sorted(extra)}")
        for key in ("family", "params", "ladders", "tolerances", "output"):
            if key in doc and not isinstance(doc[key], dict):
                raise ManifestError(f"manifest entry {key!r} must be an object")
        return cls(**doc)

    def param(self, key, default):
        return self.params.get(key, default)

    def ladder(self, key, default):
        return list(self.ladders.get(key, default))

    def tol(self, key, default):
        return float(self.tolerances.get(key, default))


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    relation: str = "<="

    def record(self) -> dict:
        return {"name": self.name, "value": float(self.value), "threshold": float(self.threshold),
                "relation": self.relation, "pass": bool(self.passed)}


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list:
        return [c for c in self.checks if not c.passed]

    def at_most(self, name, value, threshold):
        self.checks.append(Check(name, value, threshold, bool(value <= threshold), "<="))

    def at_least(self, name, value, threshold):
        self.checks.append(Check(name, value, threshold, bool(value >= threshold), ">="))

    def record(self) -> dict:
        return {"suite": self.suite, "pass": self.passed,
                "checks": [c.record() for c in self.checks], "data": self.data}

    def to_json(self) -> str:
        return reporting.dumps(self.record()) + "\n"

    def to_csv(self) -> str:
        rows = [dict(c.record(), suite=self.suite) for c in self.checks]
        return reporting.to_csv(rows, ["suite", "name", "value", "relation", "threshold", "pass"])


def _interval(a, b):
    return DomainFamily("interval_union", {"intervals": [[a, b]]})


def _strip(L, w=1.0):
    return DomainFamily("truncated_strip", {"L": L, "half_width": w})


# ---------------------------------------------------------------------------
# constants


def suite_reduction(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    n_max = int(m.param("n_max", 5))
    s_values = m.ladder("s", [0.1, 0.3, 0.5, 0.7, 0.9])
    triples = [(mm, n, s) for n in range(2, n_max + 1) for mm in range(1, n) for s in s_values]
    res = [reduction_residual(mm, n, s) for mm, n, s in triples]
    rep.data["triples"] = [list(t) + [r] for t, r in zip(triples, res)]
    rep.at_least("triple_count", len(triples), int(m.param("min_triples", 50)))
    rep.at_most("max_relative_residual", max(res), m.tol("relative", 1e-10))
    return rep


def suite_normalisation(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    rows = []
    for n in m.ladder("n", [2, 3, 5]):
        for s in m.ladder("s", [0.6, 0.75, 0.9]):
            rows.append([n, s, strip_normalisation(n, s)])
    rep.data["values"] = rows
    rep.at_most("max_deviation_from_one", max(abs(r[2] - 1.0) for r in rows),
                m.tol("absolute", 1e-10))
    return rep


# ---------------------------------------------------------------------------
# scaling law


def suite_scaling(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    rng = np.random.default_rng(m.seed)
    n_fun = int(m.param("functions", 10))
    factors = m.ladder("t", [0.5, 2.0, 10.0])
    worst = 0.0
    cases = [(_interval(0.0, 1.0), 1.0 / 16), (DomainFamily("box", {"lo": [0, 0], "hi": [1, 1]}), 1.0 / 8)]
    for s in m.ladder("s", [0.3, 0.75]):
        for fam, h in cases:
            mask = rasterize(fam, h)
            p = FracParams(mask.dim, s)
            base = {k: f(mask, p) for k, f in (("regional", assemble_regional),
                                                ("restricted", assemble_restricted))}
            scaled = {t: {k: f(scale_mask(mask, t), p) for k, f in (("regional", assemble_regional),
                                                                      ("restricted", assemble_restricted))}
                      for t in factors}
            for _ in range(n_fun):
                for kind, form in base.items():
                    x = rng.standard_normal(form.size)
                    e0 = form.energy(x)
                    for t in factors:
                        e1 = scaled[t][kind].energy(x)
                        target = t ** (mask.dim - 2.0 * s) * e0
                        worst = max(worst, abs(e1 - target) / abs(target))
    rep.data["max_relative_error"] = worst
    rep.at_most("scaling_relative_error", worst, m.tol("relative", 1e-10))
    return rep


# ---------------------------------------------------------------------------
# cutoff witnesses (vanishing for s < 1/2)


def suite_cutoff(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    h = float(m.param("h", 2.0 ** -10))
    deltas = m.ladder("delta", [2.0 ** -k for k in range(3, 8)])
    mask = rasterize(_interval(0.0, 1.0), h)
    band = m.tol("slope", 0.1)
    for s in m.ladder("s", [0.25, 0.4]):
        res = cutoff_rayleigh(CutoffFamily(mask, deltas), FracParams(1, s))
        rep.data[f"s={s:g}"] = {"deltas": res.deltas, "quotients": res.quotients,
                                 "norms": res.norms, "slope": res.slope}
        rep.at_most(f"slope_error_s={s:g}", abs(res.slope - (1.0 - 2.0 * s)), band)
        rep.at_most(f"norm_gap_s={s:g}", abs(res.norms[-1] - res.measure) / res.measure,
                    m.tol("norm", 0.02))
        rep.at_most(f"gradient_ratio_s={s:g}", max(res.gradient_ratio), 2.0)
    s_ctrl = float(m.param("control_s", 0.75))
    ctrl = cutoff_rayleigh(CutoffFamily(mask, deltas), FracParams(1, s_ctrl))
    rep.data["control"] = {"s": s_ctrl, "quotients": ctrl.quotients}
    rep.at_least("control_no_decay", ctrl.quotients[-1] / ctrl.quotients[0], 1.0)
    return rep


# ---------------------------------------------------------------------------
# strip constants


def _tensor_witness(form, mask, W: SampledFunction, L: float) -> float:
    """Rayleigh quotient of v_L(x1) W(x2) on an assembled strip form."""
    X = node_coordinates(mask.grid)
    wn = W.mask.grid.origin[0] + W.mask.h * np.arange(W.mask.grid.extents[0] + 1)
    u = scaled_bump(X[..., 0], L) * np.interp(X[..., 1], wn, W.values, left=0.0, right=0.0)
    return form.rayleigh(form.gather(u))


def suite_strip_regional(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    s = float(m.param("s", 0.75))
    h = float(m.param("h", 1.0 / 32))
    Ls = m.ladder("L", [4, 8, 16])
    p, p1 = FracParams(2, s), FracParams(1, s)
    ref = estimate_p1(_interval(-1.0, 1.0), p1, StudyPlan([h]))
    lam1 = float(ref.values()[0])
    study = estimate_p1(_strip(Ls[0]), p, StudyPlan([h], Ls))
    vals = study.values()
    W, _ = cross_section_ground_state(h, p1, 1.0, kind="regional")
    excess = []
    for L, val in zip(Ls, vals):
        mask = rasterize(_strip(L), h)
        form = assemble_regional(mask, p).admissible_form()
        q = _tensor_witness(form, mask, W, L)
        excess.append(q - lam1)
        rep.at_most(f"strip_L={L:g}_below_1d_plus_witness_excess", float(val), lam1 + excess[-1])
    rep.data.update(reference_1d=json.loads(ref.to_json()), strip=json.loads(study.to_json()),
                    witness_excess=excess)
    rep.at_most("extrapolation_relative_gap", abs(study.extrapolated - lam1) / lam1,
                m.tol("relative", 0.05))
    return rep


def suite_strip_full(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    s = float(m.param("s", 0.5))
    h = float(m.param("h", 1.0 / 16))
    Ls = m.ladder("L", [4, 8, 16])
    p, p1 = FracParams(2, s), FracParams(1, s)
    ref = estimate_p2(_interval(-1.0, 1.0), p1, StudyPlan([h]))
    lam1 = float(ref.values()[0])
    study = estimate_p2(_strip(Ls[0]), p, StudyPlan([h], Ls))
    rep.data.update(reference_1d=json.loads(ref.to_json()), strip=json.loads(study.to_json()))
    rep.at_most("extrapolation_relative_gap", abs(study.extrapolated - lam1) / lam1,
                m.tol("relative", 0.05))
    # P2 >= P1 on the ladder instances
    slack = m.tol("exact", 1e-12)
    gaps = []
    for L, val in zip(Ls, study.values()):
        mask = rasterize(_strip(L), h)
        lp1 = smallest_eigenvalue(assemble_regional(mask, p).admissible_form(), h=h, L=L).value
        gaps.append(val - lp1 * (1.0 - slack))
    # nested pairs on a common grid
    hn = float(m.param("nested_h", 0.125))
    Lnest = m.ladder("nested_L", [0.5 + 0.25 * j for j in range(11)])
    grid = rasterize(_strip(max(Lnest)), hn).grid
    p2n, p1n = [], []
    for L in Lnest:
        mask = rasterize(_strip(L), hn, grid=grid)
        p2n.append(smallest_eigenvalue(assemble_restricted(mask, p)).value)
        p1n.append(smallest_eigenvalue(assemble_regional(mask, p).admissible_form()).value)
        gaps.append(p2n[-1] - p1n[-1] * (1.0 - slack))
    incr = [b - a * (1.0 + slack) for a, b in zip(p2n[:-1], p2n[1:])]
    rep.data.update(nested_L=Lnest, nested_p2=p2n, nested_p1=p1n)
    rep.at_least("nested_pair_count", len(incr), 10)
    rep.at_most("nested_monotonicity_max_increase", max(incr), 0.0)
    rep.at_least("p2_minus_p1_min", min(gaps), 0.0)
    return rep


def suite_angle_bound(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    s = float(m.param("s", 0.75))
    h = float(m.param("h", 1.0 / 32))
    L = float(m.param("L", 4))
    p, p1 = FracParams(2, s), FracParams(1, s)
    unit = estimate_p1(_interval(0.0, 1.0), p1, StudyPlan([h / 2])).values()[0]
    interval = estimate_p1(_interval(-1.0, 1.0), p1, StudyPlan([h])).values()[0]
    strip = estimate_p1(_strip(L), p, StudyPlan([h])).values()[0]
    bound = angle_bound(directional_weight(2, s), 2.0, p, float(unit))
    ratio = c_ns(p) / (2.0 * c_ns(p1)) * directional_weight(2, s)
    rep.data.update(p1_unit=float(unit), p1_interval=float(interval), p1_strip=float(strip),
                    bound=bound, weight_ratio=ratio)
    rep.at_least("strip_minus_bound", float(strip) - bound, 0.0)
    rep.at_most("bound_vs_interval", abs(bound - interval),
                m.tol("eigen", 1e-8) * max(1.0, float(interval)))
    rep.at_most("weight_ratio_deviation", abs(ratio - 1.0), 1e-10)
    return rep


def suite_tensor_split(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    h = float(m.param("h", 0.125))
    ells = m.ladder("ell", [1, 2, 4, 8])
    L = float(m.param("L", 4 * max(ells)))
    strip = rasterize(_strip(L), h)
    for s in m.ladder("s", [0.3, 0.5, 0.75]):
        p = FracParams(2, s)
        reg = tensor_split(TensorFamily(ells), strip, p, "regional")
        full = tensor_split(TensorFamily(ells), strip, p, "full")
        key = f"s={s:g}"
        rep.data[key] = {k: {"I1": r.I1, "I2": r.I2, "I3": r.I3, "W_seminorm2": r.W_seminorm2,
                             "v_seminorm2": r.v_seminorm2, "I2_slope": r.i2_slope}
                         for k, r in (("regional", reg), ("full", full))}
        rep.at_most(f"I1_gap_{key}", max(reg.checks["I1_relative_gap"]), m.tol("I1", 0.02))
        rep.at_most(f"I1_spread_{key}", (max(reg.I1) - min(reg.I1)) / np.mean(reg.I1),
                    m.tol("I1_spread", 0.01))
        rep.at_most(f"I2_over_bound_{key}", max(reg.checks["I2_over_bound"]), 1.0)
        rep.at_most(f"I2_slope_error_{key}", abs(full.i2_slope + 2.0 * s), m.tol("slope", 0.15))
        for name, r in (("regional", reg), ("full", full)):
            cs = max(abs(c) / (2.0 * math.sqrt(a * b)) for a, b, c in zip(r.I1, r.I2, r.I3))
            rep.at_most(f"cauchy_schwarz_{name}_{key}", cs, 1.0 + 1e-8)
    return rep


# ---------------------------------------------------------------------------
# Picone and symmetrisation


def suite_picone(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    rng = np.random.default_rng(m.seed)
    n = int(m.param("size", 64))
    pairs = int(m.param("pairs", 1000))
    viol = 0
    for _ in range(pairs):
        u = rng.random(n) + 1e-3
        v = rng.random(n)
        viol += picone_pointwise(u, v)
    u = rng.random(n) + 0.1
    rep.at_most("random_violations", viol, 0)
    rep.at_most("equal_functions_violations", picone_pointwise(u, u), 0)
    rep.at_most("constant_v_violations", picone_pointwise(u, np.full(n, 2.0)), 0)
    s = float(m.param("s", 0.5))
    h = float(m.param("h", 0.125))
    L = float(m.param("L", 4))
    p1 = FracParams(1, s)
    W, est = cross_section_ground_state(h, p1)
    strip = rasterize(_strip(L), h)
    # the strip's own ground state is the hardest admissible test function
    form = assemble_restricted(strip, FracParams(2, s))
    ground = form.node_values(smallest_eigenvalue(form).vector)
    verdict = picone_lower_bound_check(W, strip, FracParams(2, s), est.value,
                                       tol=m.tol("transfer", 0.1), seed=m.seed, tests=[ground])
    rep.data["transfer"] = {"lambda_1d": est.value, "violations": verdict.violations,
                            "min_quotient": verdict.min_quotient,
                            "quotient_ratio": verdict.quotient_ratio,
                            "residual": verdict.eigen_residual}
    rep.at_most("transfer_violations", verdict.violations, 0)
    rep.at_least("transfer_quotient_ratio", verdict.quotient_ratio, 1.0 - m.tol("transfer", 0.1))
    rep.at_most("transfer_eigen_residual", verdict.eigen_residual, m.tol("transfer", 0.1))
    return rep


def random_mask(rng, nx: int = 20, ny: int = 16, h: float = 0.125, fill: float = 0.5) -> DomainMask:
    """Random 2D mask on a grid symmetric about x2 = 0 with an inactive margin."""
    grid = Grid((0.0, -0.5 * ny * h), h, (nx, ny))
    active = np.zeros((nx, ny), dtype=bool)
    active[1:-1, 1:-1] = rng.random((nx - 2, ny - 2)) < fill
    return DomainMask(grid, active)


def _random_intervals(rng, nx, h):
    cuts = np.sort(rng.choice(np.arange(1, nx), size=3, replace=False)) * h
    edges = [0.0, *cuts.tolist(), nx * h]
    segs = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    I = [segs[i] for i in range(0, len(segs), 2)]
    J = [segs[i] for i in range(1, len(segs), 2)]
    return I, J


def suite_symmetrization(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    rng = np.random.default_rng(m.seed)
    count = int(m.param("masks", 50))
    s_values = m.ladder("s", [0.25, 0.5, 0.75])
    worst = math.inf
    slice_errors = 0
    ratios = []
    for _ in range(count):
        mask = random_mask(rng, fill=float(rng.uniform(0.3, 0.7)))
        sym = symmetrize_cylindrical(mask)
        slice_errors += int(np.sum(mask.active.sum(axis=1) != sym.active.sum(axis=1)))
        I, J = _random_intervals(rng, mask.grid.extents[0], mask.h)
        for s in s_values:
            p = FracParams(2, s)
            e0 = cross_slab_energy(mask, I, J, p)
            e1 = cross_slab_energy(sym, I, J, p)
            ratios.append(e1 / e0 if e0 > 0 else math.inf)
            worst = min(worst, e1 - e0 * (1.0 - 1e-12))
    rep.data["energy_ratios_min"] = min(ratios)
    rep.at_least("instances", len(ratios), count * len(s_values))
    rep.at_least("min_energy_increase", worst, 0.0)
    rep.at_most("slice_measure_mismatches", slice_errors, 0)
    return rep


# ---------------------------------------------------------------------------
# windows


def _window_checks(rep, res, prefix):
    rep.data[prefix] = {"lams": res.lams, "quotients": res.quotients, "interior": res.interior,
                        "exterior": res.exterior, "exterior_bound": res.exterior_bound,
                        "average_bound": res.average_bound,
                        "distance_averages": res.distance_averages, "norm_ratio": res.norm_ratio,
                        "skipped": res.skipped}
    rep.at_most(f"{prefix}_max_quotient_step", float(np.max(np.diff(res.quotients))), 0.0)
    rep.at_most(f"{prefix}_exterior_over_bound",
                max(e / b for e, b in zip(res.exterior, res.exterior_bound)), 1.0 + 1e-2)
    rep.at_least(f"{prefix}_min_norm_ratio", min(res.norm_ratio), 0.5)


def suite_window_annuli(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    s = float(m.param("s", 0.25))
    h = float(m.param("h", 0.125))
    dom = DomainFamily("annuli_union", {"radius": 10.0})
    win = Window("ball")
    for sd in m.ladder("s_average", [0.25, 0.4]):
        vals, slope = distance_average_ladder(dom, win, m.ladder("lambda_average", [8, 16, 32, 64]),
                                              sd, h)
        rep.data[f"distance_average_s={sd:g}"] = {"values": vals, "slope": slope}
        rep.at_most(f"distance_average_slope_error_s={sd:g}", abs(slope + 2.0 * sd),
                    m.tol("slope", 0.15))
    res = window_rayleigh(WindowFamily(dom, win, m.ladder("lambda", [8, 16, 32]), h,
                                       float(m.param("delta", 0.25))), FracParams(2, s),
                          workers=int(m.param("workers", 1)))
    _window_checks(rep, res, "annuli")
    return rep


def suite_window_plus(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    s = float(m.param("s", 0.25))
    h = float(m.param("h", 0.125))
    dom = DomainFamily("strip_cross", {"L": 10.0, "half_width": 1.0, "shape": "plus"})
    win = Window("box")
    res = window_rayleigh(WindowFamily(dom, win, m.ladder("lambda", [8, 16, 32]), h,
                                       float(m.param("delta", 0.25))), FracParams(2, s),
                          workers=int(m.param("workers", 1)))
    _window_checks(rep, res, "plus")
    slope = float(np.polyfit(np.log(res.lams), np.log(res.distance_averages), 1)[0])
    rep.data["plus"]["distance_average_slope"] = slope
    rep.at_most("plus_distance_average_slope_error", abs(slope + 2.0 * s), m.tol("slope", 0.15))
    return rep


# ---------------------------------------------------------------------------
# directional evaluation


def _smooth_cases():
    box = DomainFamily("box", {"lo": [-1.0, -1.0], "hi": [1.0, 1.0]})
    wide = DomainFamily("box", {"lo": [-1.25, -1.0], "hi": [1.25, 1.0]})
    return [
        ("product_bump", box, lambda x, y: (1 - x * x) ** 2 * (1 - y * y) ** 2),
        ("radial_bump", box, lambda x, y: np.maximum(0.0, 1 - x * x - y * y) ** 3),
        ("tilted_bump", wide, lambda x, y: (1 - (x / 1.25) ** 2) ** 2 * (1 - y * y) ** 2
         * (1 + 0.5 * x + 0.3 * y)),
    ]


def suite_loss_sloane(m: ExperimentManifest) -> SuiteReport:
    rep = SuiteReport(m.suite)
    h = float(m.param("h", 1.0 / 32))
    K = int(m.param("K", 64))
    for s in m.ladder("s", [0.3, 0.75]):
        p = FracParams(2, s)
        for name, fam, f in _smooth_cases():
            mask = rasterize(fam, h)
            u = SampledFunction.from_callable(mask, f)
            form = assemble_regional(mask, p)
            direct = form.energy(form.gather(u.values))
            lines = seminorm_loss_sloane(u, p, K)
            gap = abs(lines - direct) / direct
            rep.data[f"{name}_s={s:g}"] = {"direct": direct, "directional": lines}
            rep.at_most(f"gap_{name}_s={s:g}", gap, m.tol("relative", 0.02))
    return rep


SUITES = {
    "reduction_identity": suite_reduction,
    "normalisation": suite_normalisation,
    "scaling": suite_scaling,
    "cutoff_vanishing": suite_cutoff,
    "strip_regional": suite_strip_regional,
    "tensor_split": suite_tensor_split,
    "strip_full": suite_strip_full,
    "picone": suite_picone,
    "symmetrization": suite_symmetrization,
    "window_annuli": suite_window_annuli,
    "window_plus": suite_window_plus,
    "angle_bound": suite_angle_bound,
    "loss_sloane": suite_loss_sloane,
}


def run_suite(manifest: ExperimentManifest) -> SuiteReport:
    t0 = time.perf_counter()
    rep = SUITES[manifest.suite](manifest)
    log.info("suite %s finished in %.1f s", manifest.suite, time.perf_counter() - t0)
    return rep
