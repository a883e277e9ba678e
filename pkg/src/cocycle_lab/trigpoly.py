"""Trigonometric and Laurent polynomial algebra.

A real trigonometric potential is stored through its cosine/sine
coefficients,

    v(x) = 2 * sum_{n=1}^{M} (a_n cos(2 pi n x) + b_n sin(2 pi n x)),

and the equivalent complex form uses lambda_n = a_n - i b_n for n > 0 and
lambda_{-n} = conj(lambda_n), so that v(x) = sum_{1<=|n|<=M} lambda_n e(n x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

#: relative distance to |w| = 1 below which Jensen's formula is refused
TAU_CIRCLE = 1e-9


class RootFindingError(RuntimeError):
    """Simultaneous iteration failed to converge.

    The best iterates are kept in ``partial`` and the per-root convergence
    mask in ``converged``.
    """

    def __init__(self, message, partial, converged):
        super().__init__(message)
        self.partial = partial
        self.converged = converged


class NearSingularIntegralError(ValueError):
    """A root sits on the unit circle, so log|P| is not integrable reliably."""

    def __init__(self, root):
        super().__init__(f"near-singular integral: root {root!r} lies within tolerance of |w|=1")
        self.root = root


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Real trigonometric polynomial of degree ``M``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.a, dtype=float)).copy()
        b = np.atleast_1d(np.asarray(self.b, dtype=float)).copy()
        if a.ndim != 1 or a.shape != b.shape:
            raise ValueError("a and b must be 1-d sequences of equal length")
        if a.size == 0:
            raise ValueError("degree must be at least 1")
        if abs(a[-1]) + abs(b[-1]) <= 0.0:
            raise ValueError("leading coefficients vanish: need |a_M| + |b_M| > 0")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_lambda(cls, lam: Sequence[complex]) -> "TrigPoly":
        lam = np.asarray(lam, dtype=complex)
        return cls(lam.real, -lam.imag)

    @classmethod
    def from_json(cls, obj: dict) -> "TrigPoly":
        return cls(obj["a"], obj["b"])

    def to_json(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist()}

    @property
    def M(self) -> int:
        return int(self.a.size)

    @property
    def lam(self) -> np.ndarray:
        """Complex Fourier coefficients lambda_1, ..., lambda_M."""
        return self.a - 1j * self.b

    @property
    def lam_abs(self) -> np.ndarray:
        return np.hypot(self.a, self.b)

    @property
    def active(self) -> list[int]:
        return [n + 1 for n in range(self.M) if abs(self.a[n]) + abs(self.b[n]) > 0]

    def __call__(self, x, eps=0.0):
        return eval_complex(self, x, eps)

    def scaled(self, factor: float) -> "TrigPoly":
        return TrigPoly(self.a * factor, self.b * factor)


@dataclass(frozen=True, eq=False)
class LaurentPoly:
    """sum_{k=lo}^{hi} coeffs[k - lo] * w**k with complex coefficients."""

    lo: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d sequence")
        c.flags.writeable = False
        object.__setattr__(self, "lo", int(self.lo))
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_roots(cls, roots, lead=1.0, lo=0) -> "LaurentPoly":
        desc = np.poly(np.asarray(roots, dtype=complex)) * lead
        return cls(lo, desc[::-1])

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentPoly":
        # entries are [re, im] pairs or plain reals
        coeffs = [complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in obj["coeffs"]]
        return cls(int(obj["lo"]), coeffs)

    def to_json(self) -> dict:
        return {"lo": self.lo, "coeffs": [[c.real, c.imag] for c in self.coeffs.tolist()]}

    @property
    def hi(self) -> int:
        return self.lo + self.coeffs.size - 1

    @property
    def degree_span(self) -> int:
        return self.coeffs.size - 1

    def normalized(self) -> "LaurentPoly":
        nz = np.flatnonzero(self.coeffs)
        if nz.size == 0:
            raise ValueError("zero polynomial")
        return LaurentPoly(self.lo + int(nz[0]), self.coeffs[nz[0]: nz[-1] + 1])

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        val = np.polyval(self.coeffs[::-1], w)
        if self.lo:
            val = val * w ** self.lo
        return val

    def on_circle(self, x, eps=0.0):
        """Evaluate at w = exp(2 pi i (x + i eps))."""
        w = np.exp(TWO_PI * 1j * np.asarray(x, dtype=float)) * math.exp(-TWO_PI * eps)
        return self(w)

    def abs_coeffs_sum(self) -> float:
        return float(np.abs(self.coeffs).sum())


def eval_complex(v: TrigPoly, x, eps: float = 0.0):
    """v(x + i eps) for scalar or array ``x``."""
    x = np.asarray(x, dtype=float)
    k = np.arange(1, v.M + 1)
    lam = v.lam
    plus = lam * np.exp(-TWO_PI * k * eps)
    minus = np.conj(lam) * np.exp(TWO_PI * k * eps)
    ph = np.exp(TWO_PI * 1j * np.multiply.outer(x, k))
    out = ph @ plus + np.conj(ph) @ minus
    return out[()] if out.ndim == 0 else out


def to_laurent(v: TrigPoly, E: float, eps: float = 0.0) -> LaurentPoly:
    """Polynomial Q with Q(w) w^{-M} = E - v(x + i eps) at w = e(x).

    For eps = eps1 this is the polynomial f_{E,eps1} whose disk zeros feed
    Jensen's formula.
    """
    M = v.M
    k = np.arange(1, M + 1)
    c = np.zeros(2 * M + 1, dtype=complex)
    c[M] = E
    c[M + k] = -v.lam * np.exp(-TWO_PI * k * eps)
    c[M - k] = -np.conj(v.lam) * np.exp(TWO_PI * k * eps)
    return LaurentPoly(0, c)


def gcd_frequency(v: TrigPoly) -> int:
    return reduce(math.gcd, v.active)


# -- roots --------------------------------------------------------------------

def _initial_guesses(coeffs):
    """Starting points on circles read off the Newton polygon of |coeffs|."""
    n = coeffs.size - 1
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(coeffs))
    idx = [k for k in range(n + 1) if np.isfinite(logs[k])]
    hull = []
    for k in idx:
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # keep upper hull: drop j if it lies below segment i-k
            if (logs[j] - logs[i]) * (k - i) <= (logs[k] - logs[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    z = []
    sigma = 0.7
    for i, j in zip(hull[:-1], hull[1:]):
        cnt = j - i
        r = math.exp((logs[i] - logs[j]) / cnt)
        ang = TWO_PI * np.arange(cnt) / cnt + TWO_PI * i / n + sigma
        z.extend(r * np.exp(1j * ang))
    return np.array(z, dtype=complex)


def _poly_roots(coeffs, rtol=1e-13, max_iter=500):
    """Aberth-Ehrlich iteration on ascending ``coeffs`` (both ends non-zero)."""
    n = coeffs.size - 1
    if n == 1:
        return np.array([-coeffs[0] / coeffs[1]]), np.array([True])
    desc = coeffs[::-1]
    ddesc = np.polyder(desc)
    absdesc = np.abs(desc)
    z = _initial_guesses(coeffs)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        pz = np.polyval(desc, z)
        scale = np.polyval(absdesc, np.abs(z))
        done = np.abs(pz) <= rtol * n * scale
        if done.all():
            break
        dpz = np.polyval(ddesc, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = (1.0 / diff).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step) & ~done, step, 0.0)
        z = z - step
    return z, done


def _newton_deflation(coeffs, rtol=1e-13, max_iter=200):
    """Fallback: Newton with successive deflation, polished on the original."""
    n = coeffs.size - 1
    desc = coeffs[::-1].copy()
    full = coeffs[::-1]
    out = []
    work = desc
    for k in range(n):
        z = 0.4 + 0.9j
        d = np.polyder(work)
        for _ in range(max_iter):
            step = np.polyval(work, z) / np.polyval(d, z)
            z -= step
            if abs(step) <= 1e-15 * max(1.0, abs(z)):
                break
        for _ in range(3):
            z -= np.polyval(full, z) / np.polyval(np.polyder(full), z)
        out.append(z)
        work, _ = np.polydiv(work, np.array([1.0, -z]))
    z = np.array(out)
    done = np.abs(np.polyval(full, z)) <= rtol * n * np.polyval(np.abs(full), np.abs(z))
    return z, done


def roots(P: LaurentPoly, rtol: float = 1e-13, max_iter: int = 500) -> np.ndarray:
    """The hi - lo roots of the ordinary polynomial w^{-lo} P(w)."""
    P = P.normalized()
    c = P.coeffs
    if c.size < 2:
        raise ValueError("constant polynomial has no roots")
    z, done = _poly_roots(c, rtol, max_iter)
    if not done.all():
        z2, done2 = _newton_deflation(c, rtol)
        if done2.all():
            return z2
        raise RootFindingError(
            f"root finder did not converge for {int((~done).sum())} of {done.size} roots",
            z, done)
    return z


def circle_log_integral(P: LaurentPoly, tau: float = TAU_CIRCLE, regularize: bool = False) -> float:
    """int_0^1 log|P(e(x))| dx by Jensen's formula.

    With ``regularize`` roots on the circle are allowed and contribute 0,
    which is the value of the (convergent) improper integral.
    """
    P = P.normalized()
    if P.coeffs.size == 1:
        return math.log(abs(P.coeffs[0]))
    r = np.abs(roots(P))
    on = np.abs(r - 1.0) <= tau
    if on.any() and not regularize:
        raise NearSingularIntegralError(roots(P)[np.argmax(on)])
    outside = r[(r > 1.0) & ~on]
    return math.log(abs(P.coeffs[-1])) + float(np.log(outside).sum())
