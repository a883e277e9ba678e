"""Minimum moduli on horizontal lines and Herman radii.

For a potential v and energy E, m(eps; E) = min_x |E - v(x + i eps)|.  Past
the imaginary-part radius of the zeros of E - v this is strictly increasing
in eps, so the Herman radius (largest eps with m = 2) is a single bracketed
root.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .trigpoly import TWO_PI, TrigPoly, roots, to_laurent

GRID_N = 4096
X_TOL = 1e-10
EPS_TOL = 1e-10
_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


@lru_cache(maxsize=32)
def _basis(grid_n: int, M: int) -> np.ndarray:
    x = np.arange(grid_n) / grid_n
    out = np.exp(TWO_PI * 1j * np.multiply.outer(x, np.arange(1, M + 1)))
    out.flags.writeable = False
    return out


def _line_coeffs(v: TrigPoly, eps: float):
    k = np.arange(1, v.M + 1)
    lam = v.lam
    return lam * np.exp(-TWO_PI * k * eps), np.conj(lam) * np.exp(TWO_PI * k * eps)


def periodic_minimize(f: Callable[[np.ndarray], np.ndarray], grid_vals: np.ndarray,
                      x_tol: float = X_TOL) -> tuple[float, float]:
    """Minimum of a 1-periodic function sampled on a uniform grid.

    Every sampled local minimum is refined by golden section on its two
    neighbouring cells; all brackets are iterated together.
    Returns (argmin, min).
    """
    n = grid_vals.size
    h = 1.0 / n
    left = np.roll(grid_vals, 1)
    right = np.roll(grid_vals, -1)
    idx = np.flatnonzero((grid_vals <= left) & (grid_vals <= right))
    best = int(np.argmin(grid_vals))
    x_best, f_best = best * h, float(grid_vals[best])
    if idx.size == 0:
        return x_best, f_best
    a = (idx - 1) * h
    b = (idx + 1) * h
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc = f(c)
    fd = f(d)
    while (b[0] - a[0]) > x_tol:
        lower = fc < fd
        # shrink towards the smaller interior sample
        b = np.where(lower, d, b)
        a = np.where(lower, a, c)
        new_c = b - _GOLD * (b - a)
        new_d = a + _GOLD * (b - a)
        c_next = np.where(lower, new_c, d)
        d_next = np.where(lower, c, new_d)
        fc_next = np.where(lower, 0.0, fd)
        fd_next = np.where(lower, fc, 0.0)
        probe = np.where(lower, c_next, d_next)
        fp = f(probe)
        fc = np.where(lower, fp, fc_next)
        fd = np.where(lower, fd_next, fp)
        c, d = c_next, d_next
    xm = np.where(fc < fd, c, d)
    fm = np.minimum(fc, fd)
    j = int(np.argmin(fm))
    if fm[j] < f_best:
        x_best, f_best = float(xm[j] % 1.0), float(fm[j])
    return x_best, f_best


def _abs_shifted(v: TrigPoly, E: float, eps: float):
    plus, minus = _line_coeffs(v, eps)
    k = np.arange(1, v.M + 1)

    def f(x):
        ph = np.exp(TWO_PI * 1j * np.multiply.outer(x, k))
        return np.abs(E - (ph @ plus + np.conj(ph) @ minus))

    return f, plus, minus


def _min_abs(v: TrigPoly, E: float, eps: float, grid_n: int) -> float:
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    f, plus, minus = _abs_shifted(v, E, eps)
    B = _basis(grid_n, v.M)
    vals = np.abs(E - (B @ plus + np.conj(B) @ minus))
    return periodic_minimize(f, vals)[1]


def min_modulus(v: TrigPoly, E: float, eps: float, grid_n: int = GRID_N) -> float:
    """m(eps; E) = min_x |E - v(x + i eps)|."""
    return _min_abs(v, float(E), float(eps), grid_n)


def uniform_threshold(v: TrigPoly) -> float:
    return 4.0 + 2.0 * float(v.lam_abs.sum())


def min_modulus_uniform(v: TrigPoly, eps: float, grid_n: int = GRID_N) -> tuple[float, float]:
    """(min_x |v(x + i eps)|, 4 + 2 sum |lambda_n|)."""
    return _min_abs(v, 0.0, float(eps), grid_n), uniform_threshold(v)


def zero_radius(v: TrigPoly, E: float) -> float:
    """Largest |Im z| over the zeros z of E - v(z)."""
    w = roots(to_laurent(v, float(E), 0.0))
    return float(np.max(np.abs(np.log(np.abs(w)))) / TWO_PI)


def _outer_crossing(g: Callable[[float], float], r0: float) -> float:
    """Root of the increasing function g on (r0, inf), with g(r0) < 0."""
    hi = max(1.0, 2.0 * r0)
    while g(hi) <= 0.0:
        hi *= 2.0
        if hi > 1e4:
            raise RuntimeError("no crossing found below eps = 1e4")
    lo = r0
    if g(lo) >= 0.0:
        # r0 slightly overestimated by the root finder: back off a little
        lo = max(0.0, r0 - 1e-6)
        if g(lo) >= 0.0:
            return lo
    return brentq(g, lo, hi, xtol=EPS_TOL, rtol=4 * np.finfo(float).eps)


def herman_radius(v: TrigPoly, E: float, grid_n: int = GRID_N,
                  zero_if_hyperbolic: bool = False) -> float:
    """Largest eps >= 0 with m(eps; E) = 2.

    The crossing always exists past the zero radius, where m vanishes.  With
    ``zero_if_hyperbolic`` the value 0 is returned whenever m(0; E) > 2.
    """
    E = float(E)
    if zero_if_hyperbolic and min_modulus(v, E, 0.0, grid_n) > 2.0:
        return 0.0
    r0 = zero_radius(v, E)
    return _outer_crossing(lambda e: min_modulus(v, E, e, grid_n) - 2.0, r0)


def herman_radius_uniform(v: TrigPoly, grid_n: int = GRID_N) -> float:
    """Largest eps >= 0 with min_x |v(x + i eps)| = 4 + 2 sum |lambda_n|."""
    thr = uniform_threshold(v)
    r0 = zero_radius(v, 0.0)
    return _outer_crossing(lambda e: min_modulus(v, 0.0, e, grid_n) - thr, r0)


def single_term_uniform_radius(lam_abs: float, M: int) -> float:
    """Closed form of the uniform Herman radius for v = lambda_M e(Mx) + c.c."""
    s = 2.0 / lam_abs + 1.0
    return math.log(s + math.sqrt(s * s + 1.0)) / (TWO_PI * M)


@dataclass
class MinCurve:
    eps_grid: np.ndarray
    values: np.ndarray
    E: float
    zero_radius: float
    threshold: float = 2.0
    uniform: bool = False

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["eps", "value"])
        for e, m in zip(self.eps_grid, self.values):
            w.writerow([f"{e:.6g}", f"{m:.6g}"])
        return buf.getvalue() if fh is None else ""


def min_curve(v: TrigPoly, E: float, eps_grid, uniform: bool = False,
              grid_n: int = GRID_N) -> MinCurve:
    eps_grid = np.sort(np.asarray(eps_grid, dtype=float))
    target = 0.0 if uniform else float(E)
    vals = np.array([min_modulus(v, target, e, grid_n) for e in eps_grid])
    thr = uniform_threshold(v) if uniform else 2.0
    return MinCurve(eps_grid, vals, float(E), zero_radius(v, target), thr, uniform)
