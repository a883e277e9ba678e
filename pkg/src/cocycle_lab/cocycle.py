"""Schrödinger cocycles over an irrational rotation.

B^E(x) = [[E - v(x), -1], [1, 0]] acts projectively by z -> 1 / (E - v(x) - z).
Lyapunov exponents are phase-averaged Birkhoff sums of renormalized
products; the hot loop lives in :mod:`cocycle_lab._kernels`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .circleopt import GRID_N, min_modulus
from .trigpoly import TWO_PI, TrigPoly, circle_log_integral, gcd_frequency, to_laurent

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
N_ITERATES = 100_000
N_PHASES = 32

Mat2C = np.ndarray


class PreconditionError(ValueError):
    pass


class UnresolvedAccelerationError(RuntimeError):
    def __init__(self, omega_raw, d):
        super().__init__(f"unresolved acceleration: raw value {omega_raw:.4f} is not near a multiple of {d}")
        self.omega_raw = omega_raw
        self.d = d


@dataclass(frozen=True)
class LEEstimate:
    value: float
    n_iterates: int
    n_phases: int
    stderr: float
    alpha: float
    eps: float


def transfer_step(v: TrigPoly, E: float, x: float, eps: float = 0.0) -> Mat2C:
    return np.array([[E - complex(v(x, eps)), -1.0], [1.0, 0.0]], dtype=complex)


def transfer_product(v: TrigPoly, E: float, alpha: float, x: float, eps: float, n: int):
    """B_n(x) = B(x + (n-1) alpha) ... B(x) as (P, s) with B_n = exp(s) P."""
    xs = x + alpha * np.arange(n)
    g = E - v(xs - np.floor(xs), eps)
    P = np.eye(2, dtype=complex)
    s = 0.0
    for gj in g:
        P = np.array([[gj * P[0, 0] - P[1, 0], gj * P[0, 1] - P[1, 1]], [P[0, 0], P[0, 1]]])
        m = np.abs(P).max()
        P /= m
        s += math.log(m)
    return P, s


def _dense(coef_by_freq: dict[int, complex], K: int) -> np.ndarray:
    out = np.zeros(2 * K + 1, dtype=complex)
    for f, c in coef_by_freq.items():
        out[f + K] += c
    return out


def schrodinger_coeffs(v: TrigPoly, eps: float):
    """Dense (g, u, l) coefficient arrays for the kernel, K = M."""
    K = v.M
    k = np.arange(1, K + 1)
    g = np.zeros(2 * K + 1, dtype=complex)
    g[K + k] = v.lam * np.exp(-TWO_PI * k * eps)
    g[K - k] = np.conj(v.lam) * np.exp(TWO_PI * k * eps)
    return g, _dense({0: -1.0}, K), _dense({0: 1.0}, K), K


def phase_grid(phases: int) -> np.ndarray:
    return np.arange(phases) / phases


def estimate_from_samples(samples: np.ndarray, n: int, alpha: float, eps: float) -> LEEstimate:
    p = samples.size
    se = float(samples.std(ddof=1) / math.sqrt(p)) if p > 1 else 0.0
    return LEEstimate(float(samples.mean()), int(n), int(p), se, float(alpha), float(eps))


def lyapunov(v: TrigPoly, E: float, alpha: float = GOLDEN, eps: float = 0.0,
             n: int = N_ITERATES, phases: int = N_PHASES) -> LEEstimate:
    """Phase-averaged estimate of L(alpha, B^E(. + i eps))."""
    if n < 1 or phases < 1:
        raise ValueError("n and phases must be positive")
    g, u, l, K = schrodinger_coeffs(v, eps)
    samples = _kernels.orbit_log_norms(g, u, l, K, float(E), alpha, phase_grid(phases), n)
    return estimate_from_samples(samples, n, alpha, eps)


def snap_acceleration(omega_raw: float, d: int) -> int:
    snapped = d * int(round(omega_raw / d))
    if abs(omega_raw - snapped) > 0.25 * d:
        raise UnresolvedAccelerationError(omega_raw, d)
    return snapped


def acceleration(v: TrigPoly, E: float, alpha: float = GOLDEN, eps: float = 0.0, h: float = 0.02,
                 n: int = N_ITERATES, phases: int = N_PHASES) -> tuple[float, int]:
    """Forward-difference (1/2pi) D+ L, snapped to the nearest multiple of d."""
    if h <= 0:
        raise ValueError("h must be positive")
    L0 = lyapunov(v, E, alpha, eps, n, phases).value
    L1 = lyapunov(v, E, alpha, eps + h, n, phases).value
    raw = (L1 - L0) / (TWO_PI * h)
    return raw, snap_acceleration(raw, gcd_frequency(v))


# -- dominated splitting --------------------------------------------------------

def sigma_bound(m: float) -> float:
    return min(1.0, (m - 1.0) / (m * (m - 2.0)))


def _fourier_shift(samples: np.ndarray, shift: float) -> np.ndarray:
    """Spectral interpolation of a periodic grid function at x + shift."""
    n = samples.size
    k = np.fft.fftfreq(n, d=1.0 / n)
    return np.fft.ifft(np.fft.fft(samples) * np.exp(TWO_PI * 1j * k * shift))


@dataclass(frozen=True)
class Section:
    """Invariant projective section z(x) = v2 / v1 sampled on x_j = j / N."""

    samples: np.ndarray
    alpha: float
    eps: float
    E: float
    residual: float
    sweeps: int

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.samples.size

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        n = self.samples.size
        c = np.fft.fft(self.samples) / n
        k = np.fft.fftfreq(n, d=1.0 / n)
        out = np.exp(TWO_PI * 1j * np.multiply.outer(x, k)) @ c
        return out if out.size > 1 else complex(out[0])


def dominating_section(v: TrigPoly, E: float, eps: float, grid_n: int = GRID_N, max_iter: int = 200,
                       alpha: float = GOLDEN, tol: float = 1e-10) -> Section:
    """Fixed point of S(x + alpha) = 1 / (E - v(x + i eps) - S(x)), started from S = 0."""
    m = min_modulus(v, E, eps, grid_n)
    if not m > 2.0:
        raise PreconditionError(f"m(eps;E) = {m:.6g} <= 2: no dominated splitting guaranteed")
    x = np.arange(grid_n) / grid_n
    g_back = E - v((x - alpha) % 1.0, eps)
    S = np.zeros(grid_n, dtype=complex)
    res = math.inf
    sweeps = 0
    for sweeps in range(1, max_iter + 1):
        S_new = 1.0 / (g_back - _fourier_shift(S, -alpha))
        res = float(np.abs(S_new - S).max())
        S = S_new
        if res < tol:
            break
    g = E - v(x, eps)
    residual = float(np.abs(_fourier_shift(S, alpha) - 1.0 / (g - S)).max())
    return Section(S, alpha, eps, E, residual, sweeps)


def xi_bounds(v: TrigPoly, E: float, eps: float, alpha: float = GOLDEN,
              n: int = N_ITERATES, phases: int = N_PHASES, grid_n: int = GRID_N):
    """(lower, upper, numeric) for Xi = L - int log|E - v(x + i eps)| dx."""
    m = min_modulus(v, E, eps, grid_n)
    if not m > 2.0:
        raise PreconditionError(f"m(eps;E) = {m:.6g} <= 2")
    s = sigma_bound(m)
    lower = 0.5 * math.log(((1 - s / m) ** 2 + 1 / m ** 2) / (1 + s ** 2))
    upper = 0.5 * math.log((1 + s / m) ** 2 + 1 / m ** 2)
    L = lyapunov(v, E, alpha, eps, n, phases).value
    numeric = L - circle_log_integral(to_laurent(v, E, eps))
    return lower, upper, numeric


# -- contraction lemma ----------------------------------------------------------

def disk_samples(r: float, n: int = 1000) -> np.ndarray:
    """Deterministic points of the closed disk |z| <= r, boundary included (z = r among them)."""
    n_b = max(8, n // 4)
    boundary = r * np.exp(TWO_PI * 1j * np.arange(n_b) / n_b)
    k = np.arange(1, n - n_b + 1)
    spiral = r * np.sqrt(k / (n - n_b + 1)) * np.exp(1j * k * math.pi * (3 - math.sqrt(5)))
    return np.concatenate([[0j], boundary, spiral])


def mobius_lipschitz(b: complex, c: complex, d: complex, z: np.ndarray) -> np.ndarray:
    """|F'(z)| for F(z) = (c + d z) / (1 + b z)."""
    return np.abs(d - b * c) / np.abs(1 + b * z) ** 2


def disk_contraction(b: complex, c: complex, d: complex, r: float, n: int = 1000,
                     a: complex = 1.0) -> tuple[bool, float]:
    """Sampled test that z -> (c + d z) / (a + b z) is a self-contraction of |z| <= r."""
    b, c, d = b / a, c / a, d / a
    z = disk_samples(r, n)
    den = 1 + b * z
    if np.any(np.abs(den) == 0):
        return False, math.inf
    lip = float(mobius_lipschitz(b, c, d, z).max())
    maps_in = bool(np.all(np.abs((c + d * z) / den) <= r * (1 + 1e-12)))
    return maps_in and lip < 1.0, lip


def contraction_check(b: complex, c: complex, d: complex, eps: float, delta: float,
                      n: int = 1000) -> tuple[bool, float]:
    """Membership in the class S_{eps,delta} and sampled sup |F'| on the disk of radius (1-delta)/(2 eps)."""
    if not (0 <= delta < 1 and eps > 0):
        raise ValueError("need 0 <= delta < 1 and eps > 0")
    in_class = abs(d) <= delta and abs(b) < eps and abs(c) * eps < (1 - delta) ** 2 / 4
    r = (1 - delta) / (2 * eps)
    lip = float(mobius_lipschitz(b, c, d, disk_samples(r, n)).max())
    return in_class, lip


def growth_bound_check(mu: float, n: int, seed=None, constant: bool = False) -> bool:
    """(1/k) log ||A_k ... A_1|| >= log(mu - 1) for random |a_j| >= mu, all k <= n."""
    if not mu > 2:
        raise ValueError("mu must exceed 2")
    if constant:
        a = np.full(n, mu, dtype=complex)
    else:
        rng = np.random.default_rng(seed)
        a = mu * (1 + rng.exponential(0.5, n)) * np.exp(TWO_PI * 1j * rng.random(n))
    rates = _kernels.growth_log_norms(a)
    return bool(np.all(rates >= math.log(mu - 1) - 1e-12))
