"""Command-line entry point.

Exit codes: 0 success, 1 a scientific check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import reporting
from .domain import (BudgetError, DomainFamily, DomainMask, EmptyDomainError, ResolutionError,
                     SampledFunction, Window, rasterize, symmetrize_cylindrical)
from .eigen import IterationError, PreconditionError, StudyPlan, estimate_p1, estimate_p2
from .seminorm.assembly import ConfigurationError, assemble_regional, assemble_restricted
from .seminorm.lines import AccuracyError, cross_slab_energy, seminorm_loss_sloane
from .specfun import (DomainError, FracParams, ReductionParams, c_ns, directional_weight,
                      reduction_residual, sphere_measure, strip_normalisation, tail_constant,
                      theta_mn)
from .suites import ExperimentManifest, ManifestError, run_suite
from .witness import (DEFAULT_SEED, CutoffFamily, TensorFamily, TruncationError, WindowFamily,
                      angle_bound, bump, clamped_cutoff, cutoff_rayleigh, picone_pointwise,
                      WitnessRow, rows_to_csv, rows_to_json, tensor_split, window_rayleigh)

log = logging.getLogger("fracpoin")

USAGE_ERRORS = (DomainError, ResolutionError, ConfigurationError, BudgetError, EmptyDomainError,
                ManifestError, TruncationError, AccuracyError, PreconditionError, ValueError,
                KeyError, TypeError, OSError)


class UsageError(Exception):
    pass


class CheckFailure(Exception):
    pass


def _emit(obj, path=None):
    text = reporting.dumps(obj) + "\n"
    if path:
        Path(path).write_text(text)
    sys.stdout.write(text)


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _interval_pair(text):
    vals = _floats(text)
    if len(vals) % 2:
        raise argparse.ArgumentTypeError("intervals need an even number of endpoints")
    return [(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]


# ---------------------------------------------------------------------------
# shared family arguments


FAMILY_CHOICES = ("interval", "box", "strip", "annuli", "plus", "L")


def _add_family_args(p, default=None):
    p.add_argument("--family", choices=FAMILY_CHOICES, default=default)
    p.add_argument("--a", type=float, default=0.0, help="interval left end")
    p.add_argument("--b", type=float, default=1.0, help="interval right end")
    p.add_argument("--L", type=float, default=None,
                   help="strip / arm half-length (default 4, or 4 * max(ells) for tensor)")
    p.add_argument("--half-width", type=float, default=1.0)
    p.add_argument("--lo", type=_floats, default=[-1.0, -1.0], help="box lower corner")
    p.add_argument("--hi", type=_floats, default=[1.0, 1.0], help="box upper corner")
    p.add_argument("--radius", type=float, default=10.0, help="annuli truncation radius")
    p.add_argument("--k-max", type=int, default=None, help="number of annuli (default: unbounded)")


def _family(args) -> DomainFamily:
    kind = args.family
    if args.L is None:
        args.L = 4.0
    if kind == "interval":
        if not args.a < args.b:
            raise UsageError("interval needs a < b")
        return DomainFamily("interval_union", {"intervals": [[args.a, args.b]]})
    if kind == "box":
        return DomainFamily("box", {"lo": list(args.lo), "hi": list(args.hi)})
    if kind == "strip":
        return DomainFamily("truncated_strip", {"L": args.L, "half_width": args.half_width})
    if kind == "annuli":
        return DomainFamily("annuli_union", {"k_max": args.k_max, "radius": args.radius})
    if kind in ("plus", "L"):
        return DomainFamily("strip_cross", {"L": args.L, "half_width": args.half_width,
                                            "shape": kind})
    raise UsageError("a --family (or --mask) is required")


def _params(n, s) -> FracParams:
    return FracParams(int(n), float(s))


# ---------------------------------------------------------------------------
# subcommands


def cmd_constants(args):
    n, s = args.n, args.s
    p = _params(n, s)
    out = {"n": n, "s": s}
    wanted = set(args.which) if args.which else {"all"}
    show = lambda key: "all" in wanted or key in wanted
    if show("c"):
        out["C_ns"] = c_ns(p)
    if show("sphere"):
        out["sphere_measure"] = sphere_measure(n)
    if show("tail"):
        out["tail_constant"] = tail_constant(n, s)
    m = args.m if args.m is not None else (1 if n >= 2 else None)
    if m is not None:
        if not 1 <= m < n:
            raise UsageError(f"need 1 <= m < n, got m={m}, n={n}")
        out["m"] = m
        if show("theta"):
            out["theta_mn"] = theta_mn(ReductionParams(m, n, s))
        out["reduction_residual"] = reduction_residual(m, n, s)
    if n >= 2:
        if show("directional"):
            out["directional_weight"] = directional_weight(n, s)
        out["normalisation_residual"] = abs(strip_normalisation(n, s) - 1.0)
    _emit(out, args.out)


def _load_mask(path) -> DomainMask:
    return DomainMask.from_json(Path(path).read_text())


def _test_function(mask: DomainMask, name: str, values_path=None) -> SampledFunction:
    if values_path:
        return SampledFunction(mask, np.load(values_path))
    if name == "cutoff":
        return clamped_cutoff(mask, 4.0 * mask.h)
    if name == "ones":
        return SampledFunction.from_callable(mask, lambda *x: np.ones_like(x[0]))
    if name == "bump":
        idx = np.argwhere(mask.active)
        g = mask.grid
        lo = np.array(g.origin) + g.h * idx.min(axis=0)
        hi = np.array(g.origin) + g.h * (idx.max(axis=0) + 1)
        c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return SampledFunction.from_callable(
            mask, lambda *x: np.prod([bump((x[i] - c[i]) / r[i]) for i in range(len(x))], axis=0))
    raise UsageError(f"unknown test function {name!r}")


def cmd_seminorm(args):
    mask = _load_mask(args.mask) if args.mask else rasterize(_family(args), args.h)
    p = _params(mask.dim, args.s)
    u = _test_function(mask, args.function, args.values)
    out = {"kind": args.kind, "n": mask.dim, "s": args.s, "h": mask.h, "function": args.function}
    if args.kind == "directional":
        out["energy"] = seminorm_loss_sloane(u, p, args.directions)
        form = assemble_regional(mask, p)
    else:
        form = assemble_regional(mask, p) if args.kind == "regional" else assemble_restricted(mask, p)
        out["energy"] = form.energy(form.gather(u.values))
    out["norm2"] = form.mass_norm2(form.gather(u.values))
    out["quotient"] = out["energy"] / out["norm2"] if out["norm2"] > 0 else None
    if args.save_form:
        Path(args.save_form).write_bytes(form.to_bytes())
    _emit(out, args.out)


def _study_doc(study):
    return json.loads(study.to_json())


def cmd_poincare(args):
    fam = _family(args)
    p = _params(fam.dim, args.s)
    if args.h_ladder < 1:
        raise UsageError("--h-ladder must be at least 1")
    hs = [args.h / 2 ** k for k in range(args.h_ladder)]
    plan = StudyPlan(hs, args.L_ladder, args.tol)
    run = estimate_p1 if args.kind == "p1" else estimate_p2
    study = run(fam, p, plan)
    out = {"study": _study_doc(study)}
    if fam.kind in ("truncated_strip", "strip_cross"):
        w = fam.params.get("half_width", 1.0)
        ref = run(DomainFamily("interval_union", {"intervals": [[-w, w]]}), _params(1, args.s),
                  StudyPlan(hs, None, args.tol))
        lim = ref.extrapolated if len(hs) >= 3 else float(ref.values()[-1])
        out["reference_1d"] = _study_doc(ref)
        out["relative_gap"] = abs(study.extrapolated - lim) / lim
    _emit(out, args.out)


def _write_rows(rows, args):
    text = rows_to_json(rows) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    if args.csv:
        Path(args.csv).write_text(rows_to_csv(rows))
    sys.stdout.write(text)
    return all(r.passed for r in rows)


def cmd_witness(args):
    w = args.threads
    if args.h is None:
        args.h = 2.0 ** -10 if args.family_kind == "cutoff" else 0.125
    if args.family_kind == "cutoff":
        fam = _family(args) if args.family else DomainFamily("interval_union", {"intervals": [[0, 1]]})
        mask = rasterize(fam, args.h)
        res = cutoff_rayleigh(CutoffFamily(mask, args.deltas), _params(mask.dim, args.s), w)
        rows = res.rows()
        sys.stderr.write(f"log-log slope {reporting.format_float(res.slope)}\n")
    elif args.family_kind == "tensor":
        ells = args.ells
        L = args.L if args.L is not None else 4.0 * max(ells)
        strip = rasterize(DomainFamily("truncated_strip", {"L": L, "half_width": 1.0}), args.h)
        res = tensor_split(TensorFamily(ells), strip, _params(2, args.s), args.kind)
        rows = res.rows()
        sys.stderr.write(f"I2 log-log slope {reporting.format_float(res.i2_slope)}\n")
    elif args.family_kind == "window":
        if args.domain == "annuli":
            dom, win = DomainFamily("annuli_union", {"radius": 10.0}), Window("ball")
        else:
            dom = DomainFamily("strip_cross", {"L": 10.0, "half_width": 1.0, "shape": "plus"})
            win = Window("box")
        res = window_rayleigh(WindowFamily(dom, win, args.lams, args.h, args.delta),
                              _params(2, args.s), w)
        rows = res.rows(f"window_{args.domain}")
    elif args.family_kind == "picone":
        rng = np.random.default_rng(args.seed)
        viol = 0
        for _ in range(args.pairs):
            viol += picone_pointwise(rng.random(args.size) + 1e-3, rng.random(args.size))
        rows = [WitnessRow("picone", float(args.pairs), float(viol), {"size": args.size},
                           0.0, viol == 0)]
    else:  # angle
        p = _params(args.n, args.s)
        sigma = args.sigma if args.sigma is not None else directional_weight(args.n, args.s)
        val = angle_bound(sigma, args.m, p, args.p1_unit)
        rows = [WitnessRow("angle", float(args.m), val, {"sigma": sigma}, val, True)]
    if not _write_rows(rows, args):
        raise CheckFailure("witness checks failed")


def cmd_symmetrize(args):
    mask = _load_mask(args.mask)
    sym = symmetrize_cylindrical(mask)
    if args.write:
        Path(args.write).write_text(sym.to_json())
    out = {"slices_preserved": bool(np.array_equal(mask.active.sum(axis=1), sym.active.sum(axis=1))),
           "cells": mask.count()}
    if args.I and args.J:
        p = _params(2, args.s)
        out["energy_before"] = cross_slab_energy(mask, args.I, args.J, p)
        out["energy_after"] = cross_slab_energy(sym, args.I, args.J, p)
        out["increase"] = out["energy_after"] >= out["energy_before"]
    _emit(out, args.out)
    if not out["slices_preserved"] or not out.get("increase", True):
        raise CheckFailure("symmetrisation check failed")


def cmd_verify(args):
    path = Path(args.manifest)
    manifest = ExperimentManifest.from_json(path.read_text())
    if args.seed is not None:
        manifest.seed = args.seed
    if args.threads:
        manifest.params.setdefault("workers", args.threads)
    report = run_suite(manifest)
    out_json = Path(manifest.output.get("json", f"{manifest.suite}.json"))
    out_csv = Path(manifest.output.get("csv", out_json.with_suffix(".csv")))
    if args.out_dir:
        # an explicit directory keeps only the file names
        out_json, out_csv = Path(args.out_dir) / out_json.name, Path(args.out_dir) / out_csv.name
    elif "json" in manifest.output:
        # manifest paths are relative to the manifest itself
        out_json, out_csv = path.parent / out_json, path.parent / out_csv
    else:
        base = path.parent.parent / "reports"
        out_json, out_csv = base / out_json.name, base / out_csv.name
    out_json, out_csv = Path(os.path.normpath(out_json)), Path(os.path.normpath(out_csv))
    out_json.parent.mkdir(parents=True, exist_ok=True)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    out_json.write_text(report.to_json())
    out_csv.write_text(report.to_csv())
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        sys.stdout.write(f"{mark} {c.name}: {reporting.format_float(float(c.value))} "
                         f"{c.relation} {reporting.format_float(float(c.threshold))}\n")
    sys.stdout.write(f"report: {out_json}\n")
    if not report.passed:
        names = ", ".join(c.name for c in report.failing())
        raise CheckFailure(f"failing checks: {names}")


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracpoin", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=1, help="cap on worker threads")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="normalisation constants and identity residuals")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--which", action="append",
                   choices=("all", "c", "theta", "directional", "sphere", "tail"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("seminorm", help="seminorm of a test function on a domain")
    _add_family_args(p)
    p.add_argument("--mask", help="mask JSON file (overrides --family)")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--h", type=float, default=1.0 / 16)
    p.add_argument("--kind", choices=("regional", "restricted", "directional"), default="regional")
    p.add_argument("--function", choices=("bump", "cutoff", "ones"), default="bump")
    p.add_argument("--values", help=".npy file of node values")
    p.add_argument("--directions", type=int, default=64)
    p.add_argument("--save-form", help="write the assembled form in binary format")
    p.add_argument("--out")
    p.set_defaults(func=cmd_seminorm)

    p = sub.add_parser("poincare", help="regional (p1) or full-space (p2) constant study")
    _add_family_args(p, default="interval")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--kind", choices=("p1", "p2"), default="p1")
    p.add_argument("--h", type=float, default=1.0 / 8, help="coarsest grid spacing")
    p.add_argument("--h-ladder", type=int, default=1, help="number of ladder members, halving h each step")
    p.add_argument("--L-ladder", type=_floats, default=None)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_poincare)

    p = sub.add_parser("witness", help="witness families and certificates")
    p.add_argument("family_kind", choices=("cutoff", "tensor", "window", "picone", "angle"))
    _add_family_args(p)
    p.add_argument("--s", type=float, default=0.25)
    p.add_argument("--h", type=float, default=None,
                   help="grid spacing (default 2^-10 for cutoff, 1/8 otherwise)")
    p.add_argument("--deltas", type=_floats, default=[2.0 ** -k for k in range(3, 8)])
    p.add_argument("--ells", type=_floats, default=[1.0, 2.0, 4.0, 8.0])
    p.add_argument("--kind", choices=("regional", "full"), default="regional")
    p.add_argument("--domain", choices=("annuli", "plus"), default="annuli")
    p.add_argument("--lams", type=_floats, default=[8.0, 16.0, 32.0])
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--p1-unit", type=float, default=None)
    p.add_argument("--csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("symmetrize", help="cylindrical symmetrisation of a 2D mask")
    p.add_argument("--mask", required=True)
    p.add_argument("--write", help="output mask JSON")
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--I", type=_interval_pair, default=None)
    p.add_argument("--J", type=_interval_pair, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_symmetrize)

    p = sub.add_parser("verify", help="run a named suite from a JSON manifest")
    p.add_argument("manifest")
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return ap


def _limit_threads(n: int):
    if n < 1:
        raise UsageError("--threads must be at least 1")
    os.environ.setdefault("OMP_NUM_THREADS", str(n))
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return
    threadpool_limits(n)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _limit_threads(args.threads)
        if args.command == "witness" and args.family_kind == "angle" and args.p1_unit is None:
            raise UsageError("witness angle needs --p1-unit")
        args.func(args)
    except CheckFailure as exc:
        sys.stderr.write(f"check failed: {exc}\n")
        return 1
    except IterationError as exc:
        sys.stderr.write(f"solver failed: {exc}\n")
        return 1
    except (UsageError,) + USAGE_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
