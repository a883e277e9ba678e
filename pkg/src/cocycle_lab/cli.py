"""Command-line front end: ``cocycle-lab {analyze,sweep,figure,bench}``.

Exit codes: 0 success, 1 input error, 2 partial result (some quantities failed).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .circleopt import GRID_N, herman_radius, min_curve, min_modulus, uniform_threshold, zero_radius
from .cocycle import GOLDEN, N_ITERATES, N_PHASES, UnresolvedAccelerationError, acceleration, lyapunov
from .criteria import Verdict, herman_threshold, m2_boundary, subcritical_energy, subcritical_uniform
from .jacobi import (Case, JacobiModel, UnsupportedCaseError, jacobi_case, jacobi_herman_bound,
                     jacobi_lyapunov, jacobi_subcritical, mean_log_c)
from .supercritical import (CriterionInapplicableError, energy_grid, fmt, improved_herman_bound,
                            supercritical_sweep, sweep_csv)
from .trigpoly import NearSingularIntegralError, TrigPoly, gcd_frequency

EXIT_OK, EXIT_INPUT, EXIT_PARTIAL = 0, 1, 2
FIGURES = ("region-m2", "region-compare", "mcurve", "lower-bound")
SWEEP_HEADER = ["E", "epsH", "threshold", "verdict", "accel0", "bound"]
EXAMPLE_MODEL = {"a": [9.0, 0.8], "b": [0.0, 0.0]}


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    model_path: str | None = None
    alpha: float = GOLDEN
    n_iterates: int = N_ITERATES
    n_phases: int = N_PHASES
    grid_n: int = GRID_N
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: {"accel_h": 0.02, "eps1_margin": 0.05})

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise InputError("alpha must lie in (0, 1)")
        if self.n_iterates < 1 or self.n_phases < 1 or self.grid_n < 16:
            raise InputError("iterates and phases must be positive, grid at least 16")
        if any(not t > 0 for t in self.tolerances.values()):
            raise InputError("tolerances must be positive")


@dataclass
class HermanReport:
    E: float
    eps_samples: list
    m_samples: list
    eps_H: float
    threshold: float
    verdict: dict


def threads() -> int:
    try:
        return max(1, int(os.environ.get("COCYCLE_LAB_THREADS", "1")))
    except ValueError:
        return 1


def load_model(path: str | None):
    if path is None:
        return TrigPoly.from_json(EXAMPLE_MODEL)
    try:
        with open(path) as fh:
            obj = json.load(fh)
        if "c" in obj:
            return JacobiModel.from_json(obj)
        return TrigPoly.from_json(obj)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot load model {path!r}: {exc}") from exc


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _emit_csv(header, rows, path):
    fh, close = _open_out(path)
    try:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if close:
            fh.close()


# -- analyze ----------------------------------------------------------------------

def analyze_trig(v: TrigPoly, E: float, cfg: RunConfig, eps1=None, uniform=False) -> tuple[dict, list]:
    errors = []
    eps_H = herman_radius(v, E, cfg.grid_n)
    eps_grid = np.linspace(0.0, max(0.5, 1.5 * eps_H), 11)
    curve = min_curve(v, E, eps_grid, grid_n=cfg.grid_n)
    d = gcd_frequency(v)
    thr = herman_threshold(v) if d < v.M else math.nan
    verdict = subcritical_energy(v, E, cfg.grid_n)
    herman = HermanReport(E, curve.eps_grid.tolist(), curve.values.tolist(), eps_H, thr, verdict.to_dict())
    rep = {
        "model": "schrodinger",
        "E": E,
        "M": v.M,
        "d": d,
        "m0": min_modulus(v, E, 0.0, cfg.grid_n),
        "zero_radius": zero_radius(v, E),
        "herman": asdict(herman),
        "uniform": subcritical_uniform(v, cfg.grid_n).to_dict(),
    }
    try:
        raw, snapped = acceleration(v, E, cfg.alpha, 0.0, cfg.tolerances["accel_h"], cfg.n_iterates, cfg.n_phases)
        rep["accel0"] = {"raw": raw, "snapped": snapped}
    except UnresolvedAccelerationError as exc:
        rep["accel0"] = {"raw": exc.omega_raw, "snapped": None}
        errors.append(str(exc))
    try:
        lb = improved_herman_bound(v, E, eps1, uniform, cfg.tolerances["eps1_margin"], cfg.grid_n)
        rep["lower_bound"] = asdict(lb)
    except (CriterionInapplicableError, NearSingularIntegralError) as exc:
        rep["lower_bound"] = {"inapplicable": str(exc)}
    return rep, errors


def analyze_jacobi(m: JacobiModel, E: float, cfg: RunConfig) -> tuple[dict, list]:
    errors = []
    sing = mean_log_c(m)
    rep = {
        "model": "jacobi",
        "E": E,
        "case": jacobi_case(m).value,
        "singular": sing.is_singular,
        "I_c": sing.I_c_regularized,
        "herman_bound": jacobi_herman_bound(m, cfg.alpha) if not sing.is_singular else None,
    }
    try:
        rep["verdict"] = jacobi_subcritical(m, E, cfg.alpha, cfg.grid_n).to_dict()
        rep["uniform"] = jacobi_subcritical(m, E, cfg.alpha, cfg.grid_n, uniform=True).to_dict()
    except UnsupportedCaseError as exc:
        rep["verdict"] = {"unsupported": str(exc)}
    if not sing.is_singular:
        le = jacobi_lyapunov(m, E, cfg.alpha, 0.0, cfg.n_iterates, cfg.n_phases)
        rep["L0"] = {"value": le.value, "stderr": le.stderr}
    return rep, errors


def _human(rep: dict) -> str:
    lines = []
    if rep["model"] == "schrodinger":
        h = rep["herman"]
        lines.append(f"E = {rep['E']:.6g}   M = {rep['M']}   d = {rep['d']}")
        lines.append(f"m(0;E) = {rep['m0']:.6g}   zero radius = {rep['zero_radius']:.6g}")
        lines.append(f"epsH = {h['eps_H']:.6g}   threshold = {h['threshold']:.6g}")
        lines.append(f"energy verdict: {h['verdict']['status']} ({h['verdict']['witness']})")
        lines.append(f"uniform verdict: {rep['uniform']['status']} (all spectrum)")
        a = rep["accel0"]
        lines.append(f"acceleration at 0+: {a['snapped']} (raw {a['raw']:.4f})")
        lb = rep["lower_bound"]
        if "bound" in lb:
            lines.append(f"improved lower bound: {lb['bound']:.6g} (eps1 = {lb['eps1']:.6g}, gamma = {lb['gamma']:.6g}, "
                         f"classical {lb['classical_herman']:.6g})")
        else:
            lines.append(f"improved lower bound: {lb['inapplicable']}")
    else:
        lines.append(f"E = {rep['E']:.6g}   case = {rep['case']}   singular = {rep['singular']}")
        lines.append(f"I(c) = {rep['I_c']:.6g}   Herman bound = {rep['herman_bound']}")
        v = rep["verdict"]
        lines.append(f"verdict: {v.get('status', v.get('unsupported'))}")
        if "L0" in rep:
            lines.append(f"L(0;E) = {rep['L0']['value']:.6g} +- {rep['L0']['stderr']:.2g}")
    return "\n".join(lines)


def cmd_analyze(cfg: RunConfig, E: float, eps1=None, uniform=False, out=None, as_json=False) -> int:
    model = load_model(cfg.model_path)
    if isinstance(model, JacobiModel):
        rep, errors = analyze_jacobi(model, E, cfg)
    else:
        rep, errors = analyze_trig(model, E, cfg, eps1, uniform)
    rep["errors"] = errors
    text = json.dumps(rep, indent=2, sort_keys=True, default=float)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    if as_json:
        print(text)
    else:
        print(_human(rep))
        if not out:
            print(text)
    return EXIT_PARTIAL if errors else EXIT_OK


# -- sweep ------------------------------------------------------------------------

def sweep_rows(v: TrigPoly, cfg: RunConfig, E_lo, E_hi, step, eps1=None, uniform=False):
    Es = energy_grid(E_lo, E_hi, step)
    eps_unif = None
    if uniform and Es.size:
        from .circleopt import herman_radius_uniform
        eps_unif = herman_radius_uniform(v, cfg.grid_n)
    d = gcd_frequency(v)
    thr = herman_threshold(v) if d < v.M else math.nan

    def row(E):
        E = float(E)
        partial = False
        eps_H = herman_radius(v, E, cfg.grid_n)
        verdict = subcritical_energy(v, E, cfg.grid_n)
        try:
            _, acc = acceleration(v, E, cfg.alpha, 0.0, cfg.tolerances["accel_h"], cfg.n_iterates, cfg.n_phases)
            acc = str(acc)
        except UnresolvedAccelerationError:
            acc, partial = "unresolved", True
        try:
            lb = improved_herman_bound(v, E, eps1, uniform, cfg.tolerances["eps1_margin"], cfg.grid_n, eps_unif)
            bound = fmt(lb.bound)
        except (CriterionInapplicableError, NearSingularIntegralError):
            bound = "nan"
        return [fmt(E), fmt(eps_H), fmt(thr), verdict.status.value, acc, bound], partial

    n = threads()
    if n > 1 and Es.size > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=n) as ex:
            out = list(ex.map(row, Es))
    else:
        out = [row(E) for E in Es]
    return [r for r, _ in out], any(p for _, p in out)


def cmd_sweep(cfg: RunConfig, E_lo, E_hi, step, out=None, eps1=None, uniform=False) -> int:
    model = load_model(cfg.model_path)
    if isinstance(model, JacobiModel):
        raise InputError("sweep supports Schrödinger models only")
    rows, partial = sweep_rows(model, cfg, E_lo, E_hi, step, eps1, uniform)
    _emit_csv(SWEEP_HEADER, rows, out)
    return EXIT_PARTIAL if partial else EXIT_OK


# -- figures ----------------------------------------------------------------------

def figure_rows(name: str, cfg: RunConfig, step=None, E_lo=-21.6, E_hi=21.6, eps1=0.2, energy=None):
    if name == "region-m2":
        step = step or 0.001
        l2 = np.arange(0.0, 0.2154, step)
        b = m2_boundary(l2)
        keep = b >= 0
        return ["l2", "l1"], [[fmt(x), fmt(y)] for x, y in zip(l2[keep], b[keep])]
    if name == "region-compare":
        step = step or 0.001
        b2 = np.arange(0.0, 0.4143, step)
        odd = (1 - 2 * b2 - b2 ** 2) / (1 + b2)
        full = np.maximum(m2_boundary(b2), 0.0)
        keep = odd >= 0
        return ["b2", "b1_odd", "b1_all"], [[fmt(x), fmt(y), fmt(z)] for x, y, z in zip(b2[keep], odd[keep], full[keep])]
    model = load_model(cfg.model_path)
    if isinstance(model, JacobiModel):
        raise InputError(f"figure {name} needs a Schrödinger model")
    if name == "mcurve":
        step = step or 0.01
        eps = np.arange(0.0, 0.5 + 1e-12, step)
        uniform = energy is None
        c = min_curve(model, 0.0 if uniform else energy, eps, uniform=uniform, grid_n=cfg.grid_n)
        return ["eps", "m", "threshold"], [[fmt(e), fmt(m), fmt(c.threshold)] for e, m in zip(c.eps_grid, c.values)]
    if name == "lower-bound":
        step = step or 0.1
        rows = supercritical_sweep(model, E_lo, E_hi, step, True, eps1, cfg.tolerances["eps1_margin"], cfg.grid_n,
                                   threads())
        text = sweep_csv(rows)
        parsed = list(csv.reader(io.StringIO(text)))
        return parsed[0], parsed[1:]
    raise InputError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")


def cmd_figure(cfg: RunConfig, name: str, out=None, **params) -> int:
    header, rows = figure_rows(name, cfg, **params)
    _emit_csv(header, rows, out)
    return EXIT_OK


# -- bench ------------------------------------------------------------------------

def cmd_bench(cfg: RunConfig, repeats: int = 3) -> int:
    v = load_model(cfg.model_path)
    if isinstance(v, JacobiModel):
        v = v.v
    from .cocycle import phase_grid, schrodinger_coeffs
    g, u, l, K = schrodinger_coeffs(v, 0.0)
    x0 = phase_grid(cfg.n_phases)
    impls = [i for i in (_kernels.numba_impl, _kernels.numpy_impl) if i is not None]
    results = {}
    for impl in impls:
        impl.orbit_log_norms(g, u, l, K, -2.0, cfg.alpha, x0, 16)
        best = math.inf
        for _ in range(repeats):
            t = time.perf_counter()
            val = impl.orbit_log_norms(g, u, l, K, -2.0, cfg.alpha, x0, cfg.n_iterates).mean()
            best = min(best, time.perf_counter() - t)
        results[impl.name] = val
        print(f"{impl.name:6s} n={cfg.n_iterates} phases={cfg.n_phases}: {best:.4f} s  L={val:.10f}")
    if len(results) == 2:
        diff = abs(results["numba"] - results["numpy"])
        print(f"|numba - numpy| = {diff:.2e}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="JSON model file (TrigPoly or JacobiModel)")
    common.add_argument("--alpha", type=float, default=GOLDEN)
    common.add_argument("--iterates", type=int, default=N_ITERATES)
    common.add_argument("--phases", type=int, default=N_PHASES)
    common.add_argument("--grid", type=int, default=GRID_N)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--eps1", type=float, default=None, help="fix eps1 for the lower bound")
    common.add_argument("--uniform", action="store_true", help="use the uniform Herman radius in the lower bound")

    p = argparse.ArgumentParser(prog="cocycle-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    a = sub.add_parser("analyze", parents=[common], help="report for one energy")
    a.add_argument("--energy", type=float, required=True)
    a.add_argument("--json", action="store_true", help="print only the JSON report")
    s = sub.add_parser("sweep", parents=[common], help="per-energy verdict table")
    f = sub.add_parser("figure", parents=[common], help="CSV data behind a figure")
    f.add_argument("--figure", required=True, help="one of " + ", ".join(FIGURES))
    f.add_argument("--energy", type=float, default=None)
    for q in (s, f):
        q.add_argument("--emin", type=float, default=-21.6)
        q.add_argument("--emax", type=float, default=21.6)
        q.add_argument("--step", type=float, default=None)
    b = sub.add_parser("bench", parents=[common], help="time the numba and numpy kernels")
    b.add_argument("--repeats", type=int, default=3)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.model, args.alpha, args.iterates, args.phases, args.grid, args.seed)
        if args.cmd == "analyze":
            return cmd_analyze(cfg, args.energy, args.eps1, args.uniform, args.out, args.json)
        if args.cmd == "sweep":
            return cmd_sweep(cfg, args.emin, args.emax, args.step or 0.1, args.out, args.eps1, args.uniform)
        if args.cmd == "figure":
            eps1 = 0.2 if args.eps1 is None else args.eps1
            return cmd_figure(cfg, args.figure, args.out, step=args.step, E_lo=args.emin, E_hi=args.emax,
                              eps1=eps1, energy=args.energy)
        if args.cmd == "bench":
            return cmd_bench(cfg, args.repeats)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
