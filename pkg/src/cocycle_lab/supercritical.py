"""Improved Herman lower bound for L(0; E) via Jensen's formula.

Given 0 <= eps1 < eps_H with m(eps1; E) > 2, convexity of the complexified
LE between eps1 and eps_H gives

    L(0; E) >= log|lambda_M| + gamma * eps_H / (eps_H - eps1),

where gamma = sum over disk zeros a_k of f_{E,eps1} of log(1/|a_k|) - log 2.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .circleopt import GRID_N, herman_radius, herman_radius_uniform, min_modulus
from .trigpoly import TAU_CIRCLE, TWO_PI, NearSingularIntegralError, TrigPoly, circle_log_integral, roots, to_laurent

EPS1_STEP = 0.01
EPS1_MARGIN = 0.05
CSV_HEADER = ["E", "eps1", "epsH", "gamma", "bound", "status"]


class CriterionInapplicableError(ValueError):
    pass


@dataclass(frozen=True)
class LowerBoundReport:
    E: float
    eps1: float
    eps_H: float
    gamma: float
    bound: float
    classical_herman: float

    @property
    def improves(self) -> bool:
        return self.gamma >= 0


def jensen_gamma(v: TrigPoly, E: float, eps1: float, route: str = "jensen", tau: float = TAU_CIRCLE) -> float:
    """gamma from the disk zeros of f_{E,eps1} (``route="jensen"``) or from the circle integral (``"direct"``)."""
    f = to_laurent(v, float(E), float(eps1))
    if route == "direct":
        lam_M = float(v.lam_abs[-1])
        return circle_log_integral(f, tau) - math.log(2) - math.log(lam_M) - TWO_PI * v.M * eps1
    if route != "jensen":
        raise ValueError(f"unknown route {route!r}")
    a = roots(f)
    r = np.abs(a)
    near = np.abs(r - 1.0) <= tau
    if near.any():
        raise NearSingularIntegralError(a[np.argmax(near)])
    return float(-np.log(r[r < 1.0]).sum()) - math.log(2)


def find_eps1(v: TrigPoly, E: float, margin: float = EPS1_MARGIN, eps_H: float | None = None,
              step: float = EPS1_STEP, grid_n: int = GRID_N) -> float | None:
    """Smallest eps >= 0 with m(eps; E) > 2 + margin and eps < eps_H - 1e-3, or None."""
    if margin <= 0:
        raise ValueError("margin must be positive")
    if eps_H is None:
        eps_H = herman_radius(v, E, grid_n)
    limit = eps_H - 1e-3
    g = lambda e: min_modulus(v, E, e, grid_n) - (2.0 + margin)
    if limit < 0:
        return None
    if g(0.0) > 0:
        return 0.0
    prev = 0.0
    for e in np.arange(1, int(limit / step) + 2) * step:
        e = min(float(e), limit)
        if g(e) > 0:
            # first admissible grid point; pull back to the crossing
            x = brentq(g, prev, e, xtol=1e-10)
            while g(x) <= 0:
                x = min(x + 1e-10, e)
            return x if x < limit else None
        prev = e
        if e >= limit:
            break
    return None


def improved_herman_bound(v: TrigPoly, E: float, eps1: float | None = None, use_uniform_radius: bool = False,
                          margin: float = EPS1_MARGIN, grid_n: int = GRID_N,
                          eps_H: float | None = None) -> LowerBoundReport:
    E = float(E)
    if eps_H is None:
        eps_H = herman_radius_uniform(v, grid_n) if use_uniform_radius else herman_radius(v, E, grid_n)
    if eps1 is None:
        eps1 = find_eps1(v, E, margin, eps_H, grid_n=grid_n)
        if eps1 is None:
            raise CriterionInapplicableError("criterion inapplicable: no eps1 < eps_H with m(eps1; E) > 2")
    else:
        if not 0 <= eps1 < eps_H:
            raise CriterionInapplicableError(f"criterion inapplicable: need 0 <= eps1 < eps_H = {eps_H:.6g}")
        if not min_modulus(v, E, eps1, grid_n) > 2.0:
            raise CriterionInapplicableError("criterion inapplicable: m(eps1; E) <= 2")
    gamma = jensen_gamma(v, E, eps1)
    lam_M = math.log(float(v.lam_abs[-1]))
    bound = lam_M + gamma * eps_H / (eps_H - eps1)
    return LowerBoundReport(E, float(eps1), float(eps_H), gamma, bound, lam_M)


def bound_profile(report: LowerBoundReport, eps, M: int) -> np.ndarray:
    """Lower bound for L(eps; E) on 0 <= eps <= eps1."""
    eps = np.asarray(eps, dtype=float)
    r = report
    return r.classical_herman + TWO_PI * M * eps + r.gamma * (r.eps_H - eps) / (r.eps_H - r.eps1)


@dataclass(frozen=True)
class SweepRow:
    E: float
    report: LowerBoundReport | None
    status: str


def energy_grid(E_lo: float, E_hi: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("step must be positive")
    if E_hi < E_lo:
        return np.empty(0)
    k = int(math.floor((E_hi - E_lo) / step + 1e-9))
    return E_lo + step * np.arange(k + 1)


def supercritical_sweep(v: TrigPoly, E_lo: float, E_hi: float, step: float, use_uniform_radius: bool = True,
                        eps1: float | None = None, margin: float = EPS1_MARGIN, grid_n: int = GRID_N,
                        workers: int = 1) -> list[SweepRow]:
    """One lower-bound report per grid energy; failures are recorded, not raised."""
    Es = energy_grid(E_lo, E_hi, step)
    eps_unif = herman_radius_uniform(v, grid_n) if (use_uniform_radius and Es.size) else None

    def row(E):
        try:
            rep = improved_herman_bound(v, float(E), eps1, use_uniform_radius, margin, grid_n, eps_unif)
        except (CriterionInapplicableError, NearSingularIntegralError, ArithmeticError) as exc:
            return SweepRow(float(E), None, f"error: {exc}")
        return SweepRow(float(E), rep, "ok" if rep.improves else "no improvement")

    if workers > 1 and Es.size > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(row, Es))
    return [row(E) for E in Es]


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{x:.6g}"


def sweep_csv(rows: list[SweepRow], fh=None) -> str:
    buf = io.StringIO() if fh is None else fh
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        if r.report is None:
            w.writerow([fmt(r.E), "nan", "nan", "nan", "nan", r.status])
        else:
            p = r.report
            w.writerow([fmt(r.E), fmt(p.eps1), fmt(p.eps_H), fmt(p.gamma), fmt(p.bound), r.status])
    return buf.getvalue() if fh is None else ""
