"""Quasi-periodic Jacobi operators with trigonometric hopping c and potential v.

The phase-complexified cocycle is

    A(x) = [[E - v(x + i eps), -conj(c(x - i eps - alpha))],
            [c(x + i eps),      0                        ]]

and L(eps; E) = L(alpha, A) - I(c) with I(c) the circle mean of log|c|.
The relative degree 2M - (N2 - N1) selects one of three asymptotic regimes.
"""
from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .circleopt import GRID_N, periodic_minimize
from .cocycle import GOLDEN, N_ITERATES, N_PHASES, LEEstimate, estimate_from_samples, phase_grid
from .criteria import Status, Verdict, strictly_less
from .trigpoly import TAU_CIRCLE, TWO_PI, LaurentPoly, TrigPoly, circle_log_integral, roots

JACOBI_THRESHOLD = 4.0


class Case(str, enum.Enum):
    PotentialDominant = "PotentialDominant"
    Balanced = "Balanced"
    HoppingDominant = "HoppingDominant"


class UnsupportedCaseError(ValueError):
    pass


class SingularModelError(ValueError):
    pass


class SingularJacobiWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class JacobiModel:
    """Hopping c(x) = sum_{k=N1}^{N2} mu_k e(k x) and potential v.

    ``degenerate=True`` admits a single-coefficient c (N1 = N2), which has
    constant modulus on every horizontal line it is evaluated on at eps = 0.
    """

    c: LaurentPoly
    v: TrigPoly
    degenerate: bool = False

    def __post_init__(self):
        c = self.c.normalized()
        object.__setattr__(self, "c", c)
        if c.hi == c.lo and not self.degenerate:
            raise ValueError("need N1 < N2 (pass degenerate=True for a single-coefficient c)")

    @classmethod
    def from_json(cls, obj: dict) -> "JacobiModel":
        return cls(LaurentPoly.from_json(obj["c"]), TrigPoly.from_json(obj["v"]),
                   bool(obj.get("degenerate", False)))

    def to_json(self) -> dict:
        out = {"c": self.c.to_json(), "v": self.v.to_json()}
        if self.degenerate:
            out["degenerate"] = True
        return out

    @property
    def N1(self) -> int:
        return self.c.lo

    @property
    def N2(self) -> int:
        return self.c.hi

    @property
    def mu(self) -> np.ndarray:
        return self.c.coeffs

    @property
    def case_tag(self) -> Case:
        return jacobi_case(self)


def jacobi_case(m: JacobiModel) -> Case:
    s = 2 * m.v.M - (m.N2 - m.N1)
    if s > 0:
        return Case.PotentialDominant
    if s == 0:
        return Case.Balanced
    return Case.HoppingDominant


def eval_c(m: JacobiModel, x, eps: float = 0.0):
    """c(x + i eps)."""
    return m.c.on_circle(x, eps)


def jacobi_step(m: JacobiModel, E: float, x: float, eps: float = 0.0, alpha: float = GOLDEN) -> np.ndarray:
    a = E - complex(m.v(x, eps))
    b = -np.conj(complex(eval_c(m, x - alpha, -eps)))
    c = complex(eval_c(m, x, eps))
    return np.array([[a, b], [c, 0.0]], dtype=complex)


@dataclass(frozen=True)
class SingularityReport:
    is_singular: bool
    circle_roots: list
    I_c: float
    I_c_regularized: float


def mean_log_c(m: JacobiModel, tau: float = TAU_CIRCLE) -> SingularityReport:
    """I(c) by Jensen's formula, with zeros of c on the circle reported separately."""
    if m.c.coeffs.size == 1:
        val = math.log(abs(m.c.coeffs[0]))
        return SingularityReport(False, [], val, val)
    w = roots(m.c)
    on = np.abs(np.abs(w) - 1.0) <= tau
    reg = circle_log_integral(m.c, tau, regularize=True)
    if on.any():
        return SingularityReport(True, w[on].tolist(), math.nan, reg)
    return SingularityReport(False, [], reg, reg)


def _ratio_fn(m: JacobiModel, E: float, eps: float, alpha: float, uniform: bool):
    v, c = m.v, m.c
    R = 2.0 * (float(np.abs(c.coeffs).sum()) + float(v.lam_abs.sum()))

    def f(x):
        x = np.asarray(x, dtype=float)
        vv = v(x, eps)
        if uniform:
            num = np.maximum(np.abs(vv) - R, 0.0) ** 2
        else:
            num = np.abs(E - vv) ** 2
        den = np.abs(c.on_circle(x, eps) * c.on_circle(x - alpha, -eps))
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(den > 0, num / den, np.inf)

    return f


def jacobi_m(m: JacobiModel, E: float, eps: float, alpha: float = GOLDEN, grid_n: int = GRID_N,
             uniform: bool = False) -> float:
    """min_x |E - v(x+i eps)|^2 / |c(x+i eps) c(x-i eps-alpha)|; the uniform variant uses (|v| - R)_+^2."""
    f = _ratio_fn(m, float(E), float(eps), alpha, uniform)
    grid = np.arange(grid_n) / grid_n
    return periodic_minimize(f, f(grid))[1]


def jacobi_herman_radius(m: JacobiModel, E: float = 0.0, alpha: float = GOLDEN, grid_n: int = GRID_N,
                         uniform: bool = False, scan: int = 512, eps_max: float = 64.0) -> float:
    """Largest eps >= 0 with m(eps; E) = 4; inf when m stays <= 4 up to ``eps_max``."""
    g = lambda e: jacobi_m(m, E, e, alpha, grid_n, uniform) - JACOBI_THRESHOLD
    hi = 1.0
    while g(hi) <= 0.0:
        hi *= 2.0
        if hi > eps_max:
            return math.inf
    grid = np.linspace(hi, 0.0, scan + 1)
    prev = hi
    for e in grid[1:]:
        if g(e) <= 0.0:
            return brentq(g, e, prev, xtol=1e-10)
        prev = e
    return 0.0


def case_constant(m: JacobiModel, alpha: float = GOLDEN) -> float:
    """Log-constant of the eps -> inf asymptote of L(alpha, A_eps)."""
    case = jacobi_case(m)
    lam_M = complex(m.v.lam[-1])
    mu1, mu2 = complex(m.mu[0]), complex(m.mu[-1])
    if case is Case.PotentialDominant:
        return math.log(abs(lam_M))
    if case is Case.Balanced:
        # leading entry of E - v is -conj(lambda_M) w^M; for real lambda_M this is the textbook form
        M = m.v.M
        lc = np.conj(lam_M)
        disc = np.sqrt(lc ** 2 - 4 * np.conj(mu2) * mu1 * np.exp(TWO_PI * 1j * M * alpha))
        return math.log(max(abs((lc + disc) / 2), abs((lc - disc) / 2)))
    return 0.5 * (math.log(abs(mu1)) + math.log(abs(mu2)))


def asymptotic_slope(m: JacobiModel) -> float:
    """d/d eps of L(alpha, A_eps) for large eps."""
    if jacobi_case(m) is Case.HoppingDominant:
        return math.pi * (m.N2 - m.N1)
    return TWO_PI * m.v.M


def jacobi_herman_bound(m: JacobiModel, alpha: float = GOLDEN) -> float:
    """Lower bound for L(0; E), valid for every E."""
    rep = mean_log_c(m)
    if rep.is_singular:
        warnings.warn("singular hopping: bound uses the regularized mean of log|c|", SingularJacobiWarning)
    return case_constant(m, alpha) - rep.I_c_regularized


def balanced_gate(m: JacobiModel) -> tuple[bool, float]:
    q = abs(m.mu[0] * m.mu[-1]) / abs(m.v.lam[-1]) ** 2
    return strictly_less(q, 0.25), q


def _jacobi_verdict(m: JacobiModel, radius: float, alpha: float, label: str) -> Verdict:
    rep = mean_log_c(m)
    C = case_constant(m, alpha)
    I_c = rep.I_c_regularized
    M = m.v.M
    if M == 1:
        lhs, rhs = C, I_c
        ok = strictly_less(C, I_c)
        wit = "M = 1: least positive acceleration 1 forces subcriticality when the case constant is below I(c)"
    else:
        lhs, rhs = radius, (-C + I_c) / (TWO_PI * (M - 1))
        ok = strictly_less(lhs, rhs)
        wit = f"{label} radius vs (-C + I(c)) / (2 pi (M-1))"
    if not ok:
        return Verdict(Status.Inconclusive, lhs, rhs, wit)
    if rep.is_singular:
        return Verdict(Status.ZeroLEOnly, lhs, rhs, wit + "; singular c: zero-LE only")
    return Verdict(Status.SubcriticalProven, lhs, rhs, wit)


def jacobi_subcritical(m: JacobiModel, E: float, alpha: float = GOLDEN, grid_n: int = GRID_N,
                       uniform: bool = False) -> Verdict:
    """Energy-wise (or, with ``uniform``, whole-spectrum) subcriticality criterion."""
    case = jacobi_case(m)
    if case is Case.HoppingDominant:
        raise UnsupportedCaseError("no subcriticality criterion when N2 - N1 > 2M")
    if case is Case.Balanced:
        ok, q = balanced_gate(m)
        if not ok:
            return Verdict(Status.Inconclusive, q, 0.25, "case-2 gate failed")
    label = "uniform Herman" if uniform else "Herman"
    radius = math.nan if m.v.M == 1 else jacobi_herman_radius(m, E, alpha, grid_n, uniform)
    return _jacobi_verdict(m, radius, alpha, label)


def jacobi_coeffs(m: JacobiModel, eps: float, alpha: float):
    """Dense kernel coefficients (g, u, l, K) of A_eps over frequencies -K..K."""
    v, c = m.v, m.c
    ks = np.arange(c.lo, c.hi + 1)
    K = int(max(v.M, np.abs(ks).max()))
    g = np.zeros(2 * K + 1, dtype=complex)
    k = np.arange(1, v.M + 1)
    g[K + k] = v.lam * np.exp(-TWO_PI * k * eps)
    g[K - k] = np.conj(v.lam) * np.exp(TWO_PI * k * eps)
    mu = c.coeffs
    u = np.zeros(2 * K + 1, dtype=complex)
    lo = np.zeros(2 * K + 1, dtype=complex)
    np.add.at(u, K - ks, -np.conj(mu) * np.exp(TWO_PI * 1j * ks * alpha) * np.exp(TWO_PI * ks * eps))
    np.add.at(lo, K + ks, mu * np.exp(-TWO_PI * ks * eps))
    return g, u, lo, K


def jacobi_lyapunov(m: JacobiModel, E: float, alpha: float = GOLDEN, eps: float = 0.0,
                    n: int = N_ITERATES, phases: int = N_PHASES, subtract_mean_log: bool = True) -> LEEstimate:
    """Estimate of L(eps; E) = L(alpha, A_eps) - I(c) (or of L(alpha, A_eps) alone)."""
    g, u, lo, K = jacobi_coeffs(m, eps, alpha)
    samples = _kernels.orbit_log_norms(g, u, lo, K, float(E), alpha, phase_grid(phases), n)
    if subtract_mean_log:
        rep = mean_log_c(m)
        if rep.is_singular:
            raise SingularModelError("I(c) diverges for singular hopping")
        samples = samples - rep.I_c
    return estimate_from_samples(samples, n, alpha, eps)


def desingularize(c: LaurentPoly, eps_n: float, tau: float = TAU_CIRCLE) -> LaurentPoly:
    """t(x + i eps_n) q(x): push the circle zeros of c off T, keeping N1 and N2."""
    c = c.normalized()
    w = roots(c)
    on = np.abs(np.abs(w) - 1.0) <= tau
    shift = math.exp(TWO_PI * eps_n)
    new_roots = np.where(on, w * shift, w)
    lead = c.coeffs[-1] * shift ** (-int(on.sum()))
    return LaurentPoly.from_roots(new_roots, lead, c.lo)


def model_to_json(m: JacobiModel) -> str:
    return json.dumps(m.to_json())
