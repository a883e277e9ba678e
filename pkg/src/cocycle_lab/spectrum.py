"""Periodic approximants, discriminants and resolvent-based checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy.linalg import eigvalsh, solve_banded

from . import _kernels
from .circleopt import GRID_N, min_modulus
from .cocycle import GOLDEN, PreconditionError
from .trigpoly import TWO_PI, TrigPoly

MAX_Q = 10_000
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


def spectral_radius_bound(v: TrigPoly) -> float:
    return 2.0 + 2.0 * float(v.lam_abs.sum())


def orbit_values(v: TrigPoly, p: int, q: int, x: float) -> np.ndarray:
    j = np.arange(q)
    t = x + (j * p % q) / q
    return np.real(v(t - np.floor(t)))


def _check_pq(p: int, q: int):
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError("need q >= 1 and gcd(p, q) = 1")
    if q > MAX_Q:
        raise ValueError(f"q = {q} exceeds the guard {MAX_Q}")


def discriminant(v: TrigPoly, p: int, q: int, x: float, E: float, dps: int | None = None) -> float:
    """Trace of the q-step transfer matrix at rotation number p/q.

    With ``dps`` the product (and the samples of v) are evaluated in mpmath
    at that many decimal digits.
    """
    _check_pq(p, q)
    if dps is not None:
        return float(_discriminant_mp(v, p, q, x, E, dps))
    val = _kernels.transfer_trace(orbit_values(v, p, q, x), E)
    if not math.isfinite(val):
        raise OverflowError("discriminant overflow: use a smaller q or rescale E")
    return val


def _v_mp(v: TrigPoly, t):
    s = mpmath.mpf(0)
    for n in range(1, v.M + 1):
        s += mpmath.mpf(float(v.a[n - 1])) * mpmath.cospi(2 * n * t) + mpmath.mpf(float(v.b[n - 1])) * mpmath.sinpi(2 * n * t)
    return 2 * s


def _discriminant_mp(v: TrigPoly, p: int, q: int, x, E, dps: int):
    with mpmath.workdps(dps):
        x = mpmath.mpf(Fraction(x).numerator) / Fraction(x).denominator if isinstance(x, Fraction) else mpmath.mpf(x)
        E = mpmath.mpf(E)
        p0, p1, p2, p3 = mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(1)
        for j in range(q):
            g = E - _v_mp(v, x + mpmath.mpf(j * p % q) / q)
            p0, p1, p2, p3 = g * p0 - p2, g * p1 - p3, p0, p1
        return p0 + p3


def _floquet_matrix(V: np.ndarray, sign: float) -> np.ndarray:
    q = V.size
    if q == 1:
        return np.array([[V[0] + 2.0 * sign]])
    H = np.diag(V) + np.diag(np.ones(q - 1), 1) + np.diag(np.ones(q - 1), -1)
    H[0, q - 1] += sign
    H[q - 1, 0] += sign
    return H


def merge_bands(intervals, tol: float = MERGE_TOL) -> list[Band]:
    out: list[list[float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1] + tol:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [Band(float(a), float(b)) for a, b in out]


def band_spectrum(v: TrigPoly, p: int, q: int, x: float) -> list[Band]:
    """sigma(p/q, x) = {E : |Delta(E)| <= 2} from periodic and antiperiodic eigenvalues."""
    _check_pq(p, q)
    V = orbit_values(v, p, q, x)
    edges = np.sort(np.concatenate([eigvalsh(_floquet_matrix(V, 1.0)), eigvalsh(_floquet_matrix(V, -1.0))]))
    return merge_bands(zip(edges[0::2], edges[1::2]))


def convergents(alpha: float, depth: int) -> list[tuple[int, int]]:
    """Continued-fraction convergents p_n/q_n, n = 0..depth."""
    out = []
    h0, h1, k0, k1 = 0, 1, 1, 0
    a = float(alpha)
    for _ in range(depth + 1):
        ai = int(math.floor(a))
        h0, h1 = h1, ai * h1 + h0
        k0, k1 = k1, ai * k1 + k0
        out.append((h1, k1))
        frac = a - ai
        if frac < 1e-15:
            break
        a = 1.0 / frac
    return out


def spectrum_approx(v: TrigPoly, alpha: float = GOLDEN, depth: int = 6, x_samples: int = 16) -> list[Band]:
    """Union over phases of the band spectrum at the depth-th convergent of alpha."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cv = [(p, q) for p, q in convergents(alpha, depth) if q <= MAX_Q]
    p, q = cv[-1]
    bands = []
    for x in np.arange(x_samples) / (x_samples * q):
        bands.extend((b.lo, b.hi) for b in band_spectrum(v, p, q, float(x)))
    return merge_bands(bands)


def odd_symmetry_check(v: TrigPoly, x0: float, p: int, q: int, E: float, dps: int = 60):
    """(Delta(E), (-1)^q Delta(-E), agreement to 1e-9 relative)."""
    if np.any(v.a != 0):
        raise ValueError("odd potential required: all cosine coefficients must vanish")
    # the orbit x0 + j/q is symmetric under x -> -x only when 2 q x0 is an integer
    if abs(2 * q * float(x0) - round(2 * q * float(x0))) > 1e-9:
        raise ValueError("x0 must be a multiple of 1/(2q) for the orbit to be symmetric")
    lhs = discriminant(v, p, q, x0, E, dps=dps)
    rhs = (-1) ** q * discriminant(v, p, q, x0, -E, dps=dps)
    return lhs, rhs, abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


# -- angle formula --------------------------------------------------------------

def _resolvent_entry(diag: np.ndarray, site: int) -> complex:
    """((H - E)^{-1})_{site,site} for a tridiagonal matrix with unit off-diagonals and given diagonal."""
    n = diag.size
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = 1.0
    ab[1] = diag
    ab[2, :-1] = 1.0
    rhs = np.zeros(n, dtype=complex)
    rhs[site] = 1.0
    y = solve_banded((1, 1), ab, rhs)
    if not np.all(np.isfinite(y)):
        raise np.linalg.LinAlgError("truncated matrix is numerically singular")
    return complex(y[site])


def angle_tolerance(trunc_N: int) -> float:
    return 1e-6 * 64.0 / trunc_N


def weyl_sections(v: TrigPoly, E: float, alpha: float, x: float, eps: float, trunc_N: int):
    """(s_minus, s_plus, G00) from Dirichlet truncations of length trunc_N.

    s_- = -m_-(z) and s_+ = -1/m_+(z - alpha), z = x + i eps; G00 uses sites -N..N.
    """
    N = int(trunc_N)

    def d(n):
        t = x + n * alpha
        return v(t - np.floor(t), eps) - E

    n_full = np.arange(-N, N + 1)
    G00 = _resolvent_entry(d(n_full), N)
    m_minus = _resolvent_entry(d(np.arange(-N, 0)), N - 1)
    # half-line n >= 1 at phase z - alpha: potentials v(z + (n-1) alpha), n = 1..N
    m_plus_shift = _resolvent_entry(d(np.arange(0, N)), 0)
    return -m_minus, -1.0 / m_plus_shift, G00


def angle_formula_check(v: TrigPoly, E: float, alpha: float, x: float, eps: float, trunc_N: int,
                        grid_n: int = GRID_N):
    """(|s_- - s_+|, 1/|G00|, ok) with ok = |lhs - rhs| <= 1e-6 * 64 / trunc_N."""
    if not min_modulus(v, E, eps, grid_n) > 2.0:
        raise PreconditionError("angle formula requires m(eps; E) > 2")
    s_minus, s_plus, G00 = weyl_sections(v, E, alpha, x, eps, trunc_N)
    lhs = abs(s_minus - s_plus)
    rhs = 1.0 / abs(G00)
    return lhs, rhs, abs(lhs - rhs) <= angle_tolerance(trunc_N)
