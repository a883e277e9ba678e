"""Decidable subcriticality criteria and the root-bound machinery behind them.

An energy E in the spectrum is subcritical when the Herman radius sits below
-log|lambda_M| / (2 pi (M - d)), d the gcd of the active frequencies.  The
uniform version replaces eps_H by an energy-independent radius, which in turn
is bounded through the largest positive root of an explicit polynomial.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy.optimize import brentq

from .circleopt import GRID_N, herman_radius, herman_radius_uniform
from .trigpoly import TWO_PI, TrigPoly, gcd_frequency

SLACK = 1e-12


class Status(str, enum.Enum):
    SubcriticalProven = "SubcriticalProven"
    Inconclusive = "Inconclusive"
    SupercriticalProven = "SupercriticalProven"
    ZeroLEOnly = "ZeroLEOnly"


@dataclass(frozen=True)
class Verdict:
    status: Status
    lhs: float
    rhs: float
    witness: str

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _exact(*xs) -> bool:
    return all(isinstance(x, Rational) for x in xs)


def strictly_less(lhs, rhs) -> bool:
    """lhs < rhs; exact for rationals, with a relative 1e-12 safety margin otherwise."""
    if _exact(lhs, rhs):
        return Fraction(lhs) < Fraction(rhs)
    return float(lhs) < float(rhs) - SLACK * max(1.0, abs(float(rhs)))


def _single_frequency(lam_M: float, label: str) -> Verdict:
    if strictly_less(lam_M, 1.0):
        return Verdict(Status.SubcriticalProven, lam_M, 1.0, f"single frequency class, |lambda_M| < 1 ({label})")
    if strictly_less(1.0, lam_M):
        return Verdict(Status.SupercriticalProven, lam_M, 1.0, f"|lambda_M| > 1 forces L(0) >= log|lambda_M| > 0 ({label})")
    return Verdict(Status.Inconclusive, lam_M, 1.0, f"critical by the single-frequency rule ({label})")


def herman_threshold(v: TrigPoly) -> float:
    """-log|lambda_M| / (2 pi (M - d)); requires d < M."""
    d = gcd_frequency(v)
    return -math.log(v.lam_abs[-1]) / (TWO_PI * (v.M - d))


def _radius_verdict(v: TrigPoly, radius_fn, label: str) -> Verdict:
    lam_M = float(v.lam_abs[-1])
    d = gcd_frequency(v)
    if d == v.M:
        return _single_frequency(lam_M, label)
    if strictly_less(1.0, lam_M):
        return Verdict(Status.SupercriticalProven, lam_M, 1.0, f"|lambda_M| > 1 forces L(0) >= log|lambda_M| > 0 ({label})")
    eps_H = radius_fn()
    rhs = herman_threshold(v)
    if strictly_less(eps_H, rhs):
        return Verdict(Status.SubcriticalProven, eps_H, rhs, f"{label} radius below -log|lambda_M|/(2 pi (M-d)), d={d}")
    return Verdict(Status.Inconclusive, eps_H, rhs, f"{label} radius not below -log|lambda_M|/(2 pi (M-d)), d={d}")


def subcritical_energy(v: TrigPoly, E: float, grid_n: int = GRID_N) -> Verdict:
    """Energy-wise criterion; meaningful for E in the spectrum."""
    return _radius_verdict(v, lambda: herman_radius(v, E, grid_n), "Herman")


def subcritical_uniform(v: TrigPoly, grid_n: int = GRID_N) -> Verdict:
    """Criterion for all energies of the spectrum at once."""
    return _radius_verdict(v, lambda: herman_radius_uniform(v, grid_n), "uniform Herman")


# -- root bounds ------------------------------------------------------------------

def root_poly(v: TrigPoly) -> np.ndarray:
    """Descending coefficients of |l_M| y^M - |l_{M-1}| y^{M-1} - ... - |l_1| y - (4 + 3 sum |l_j|)."""
    lam = v.lam_abs
    p = np.empty(v.M + 1)
    p[0] = lam[-1]
    p[1:-1] = -lam[-2::-1]
    p[-1] = -(4.0 + 3.0 * lam.sum())
    return p


def odd_root_poly(bN: float, bM: float, N: int, M: int) -> np.ndarray:
    """|b_M| y^M - |b_N| y^N - (|b_N| + |b_M| + 2) for v = 2 (b_N sin + b_M sin)."""
    p = np.zeros(M + 1)
    p[0] = abs(bM)
    p[M - N] -= abs(bN)
    p[-1] -= abs(bN) + abs(bM) + 2.0
    return p


def _check_shape(p):
    p = np.asarray(p, dtype=float)
    if p.size < 2 or not p[0] > 0 or np.any(p[1:] > 0) or not p[-1] < 0:
        raise ValueError("polynomial must have positive leading term, non-positive others and negative constant")
    return p


def stefanescu_bound(p) -> float:
    """max_i (k b_i)^{1/m_i} over the k negative terms -b_i x^{n - m_i} of the monic form."""
    p = np.asarray(p, dtype=float)
    if not p[0] > 0:
        raise ValueError("leading coefficient must be positive")
    q = p / p[0]
    neg = [(i, -q[i]) for i in range(1, q.size) if q[i] < 0]
    if not neg:
        return 0.0
    k = len(neg)
    return max((k * b) ** (1.0 / m) for m, b in neg)


def largest_positive_root(p) -> float:
    """Unique positive root of a one-sign-change polynomial (descending coefficients).

    Bracketed on [1, B1] (or [0, B1] when p(1) >= 0), B1 the Stefanescu bound.
    """
    p = _check_shape(p)
    hi = stefanescu_bound(p)
    f = lambda y: float(np.polyval(p, y))
    if f(hi) == 0.0:
        return hi
    # a single negative term makes the bound tight; round-off can land below the root
    for _ in range(8):
        if f(hi) > 0.0:
            break
        hi *= 1.0 + 1e-12
    lo = 1.0 if f(1.0) < 0 else 0.0
    lo = min(lo, hi)
    return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)


def closed_form_rp_m2(l1: float, l2: float) -> float:
    return l1 / (2 * l2) + math.sqrt(l1 ** 2 + 16 * l2 + 12 * l1 * l2 + 12 * l2 ** 2) / (2 * l2)


def subcritical_root_bound(v: TrigPoly) -> Verdict:
    """|lambda_M|^{1/(M-d)} R_p < 1 with R_p the largest positive root of :func:`root_poly`."""
    lam_M = float(v.lam_abs[-1])
    d = gcd_frequency(v)
    if d == v.M:
        return _single_frequency(lam_M, "root bound")
    R = largest_positive_root(root_poly(v))
    lhs = lam_M ** (1.0 / (v.M - d)) * R
    if strictly_less(lhs, 1.0):
        return Verdict(Status.SubcriticalProven, lhs, 1.0, "|lambda_M|^{1/(M-d)} R_p < 1")
    return Verdict(Status.Inconclusive, lhs, 1.0, "|lambda_M|^{1/(M-d)} R_p >= 1")


def closed_form_m2(l1, l2) -> bool:
    """|l1| + 4|l2| + 3|l2|^2 + 3|l1||l2| < 1."""
    l1, l2 = abs(l1), abs(l2)
    return strictly_less(l1 + 4 * l2 + 3 * l2 * l2 + 3 * l1 * l2, 1)


def m2_boundary(l2):
    """The l1 on the boundary of :func:`closed_form_m2` for given l2."""
    return (1 - 4 * l2 - 3 * l2 * l2) / (1 + 3 * l2)


def ghm_condition(l1, lM, M: int) -> bool:
    """Root-bound criterion for 2 Re(l1 e_1 + lM e_M): 2|l1| < 1 and 8 t + 6|l1| t + 6 t^M < 1, t = |lM|^{1/(M-1)}."""
    if M < 2:
        raise ValueError("M must be at least 2")
    l1, lM = abs(float(l1)), abs(float(lM))
    if not lM > 0:
        raise ValueError("lM must be positive")
    t = lM ** (1.0 / (M - 1))
    return strictly_less(2 * l1, 1.0) and strictly_less(8 * t + 6 * l1 * t + 6 * lM * t, 1.0)


def amo_limit_params(l1: float, M: int, delta1: float, delta2: float, lM: float | None = None):
    """(mu, kappa) such that |l_M| <= mu and middle |l_j| <= kappa give uniform subcriticality."""
    if not (delta1 > 0 and delta2 > 0):
        raise ValueError("delta1 and delta2 must be positive")
    if abs(l1 - (1 - delta1 - delta2)) > 1e-12 or not (0 <= l1 < 1):
        raise ValueError("need 0 <= l1 = 1 - delta1 - delta2 < 1")
    mu = (delta1 / (4 + 3 * M)) ** (M - 1)
    if M == 2:
        return mu, None
    lM = mu if lM is None else lM
    if lM > mu:
        raise ValueError(f"lM = {lM} exceeds mu = {mu}")
    kappa = delta2 / (M - 2) * (lM / (2 * (M - 2))) ** (M - 2)
    return mu, kappa


def odd_two_term_condition(bN: float, bM: float, N: int, M: int) -> bool:
    """Stefanescu-based criterion for E = 0 and v = 2 (b_N sin(2 pi N x) + b_M sin(2 pi M x)).

    The outer exponent is 1/(M - gcd(N, M)), which is what the energy
    criterion requires when N does not divide M.
    """
    if not (1 <= N < M) or bM == 0:
        raise ValueError("need 1 <= N < M and bM != 0")
    bN, bM = abs(float(bN)), abs(float(bM))
    d = math.gcd(N, M)
    B1 = max((2 * bN / bM) ** (1.0 / (M - N)), ((4 + 2 * bN) / bM + 2) ** (1.0 / M))
    return strictly_less(bM ** (1.0 / (M - d)) * B1, 1.0)


def odd_quadratic_condition(b1, b2) -> bool:
    """Exact root condition for N, M = 1, 2: |b2|^2 + |b1||b2| + 2|b2| + |b1| < 1."""
    b1, b2 = abs(b1), abs(b2)
    return strictly_less(b2 * b2 + b1 * b2 + 2 * b2 + b1, 1)


def odd_potential(bN: float, bM: float, N: int, M: int) -> TrigPoly:
    b = np.zeros(M)
    b[N - 1] = bN
    b[M - 1] = bM
    return TrigPoly(np.zeros(M), b)
