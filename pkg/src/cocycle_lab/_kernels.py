"""Hot inner loops: renormalized 2x2 cocycle products along rotation orbits.

Every kernel exists twice, a numba ``@njit`` version and a pure-numpy
version with identical semantics.  The numba path is used when numba is
importable and ``COCYCLE_LAB_DISABLE_JIT`` is unset (or "0"); both are always
reachable through :data:`numba_impl` / :data:`numpy_impl` for benchmarking
and cross-checking.

Cocycle entries are trigonometric polynomials in t = x0 + j*alpha, passed as
dense coefficient arrays over frequencies -K..K (index f + K):

    A(t) = [[E - g(t), u(t)],
            [l(t),     0   ]],   g, u, l = sum_f coef[f + K] * exp(2 pi i f t)
"""
from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

JIT_DISABLED = os.environ.get("COCYCLE_LAB_DISABLE_JIT", "0").lower() not in ("", "0", "false", "no")
USE_NUMBA = numba is not None and not JIT_DISABLED

TWO_PI = 2.0 * math.pi
_BLOCK = 2048


# -- numpy path -----------------------------------------------------------------

def _trig_eval(coef, K, t):
    """sum_f coef[f+K] e(f t) for an array of phases ``t``; returns complex array."""
    z = np.exp(TWO_PI * 1j * t)
    out = np.full(t.shape, coef[K], dtype=complex)
    zk = np.ones_like(z)
    zc = np.conj(z)
    zmk = np.ones_like(z)
    for f in range(1, K + 1):
        zk = zk * z
        zmk = zmk * zc
        out += coef[K + f] * zk + coef[K - f] * zmk
    return out


def orbit_log_norms_numpy(g_coef, u_coef, l_coef, K, E, alpha, x0s, n):
    """Per-phase (1/n) log ||A_n(x0)|| with max-abs renormalization every step."""
    x0s = np.asarray(x0s, dtype=float)
    P = np.zeros((4, x0s.size), dtype=complex)
    P[0] = 1.0
    P[3] = 1.0
    logsum = np.zeros(x0s.size)
    j0 = 0
    while j0 < n:
        j1 = min(n, j0 + _BLOCK)
        t = x0s[None, :] + np.arange(j0, j1)[:, None] * alpha
        t = t - np.floor(t)
        a = E - _trig_eval(g_coef, K, t)
        b = _trig_eval(u_coef, K, t)
        c = _trig_eval(l_coef, K, t)
        p0, p1, p2, p3 = P
        for i in range(j1 - j0):
            ai, bi, ci = a[i], b[i], c[i]
            q0 = ai * p0 + bi * p2
            q1 = ai * p1 + bi * p3
            p2 = ci * p0
            p3 = ci * p1
            p0, p1 = q0, q1
            s = np.maximum(np.maximum(np.abs(p0), np.abs(p1)), np.maximum(np.abs(p2), np.abs(p3)))
            logsum += np.log(s)
            p0 = p0 / s
            p1 = p1 / s
            p2 = p2 / s
            p3 = p3 / s
        P = np.array([p0, p1, p2, p3])
        j0 = j1
    return (logsum + np.log(_opnorm_np(P))) / n


def _opnorm_np(P):
    p0, p1, p2, p3 = P
    fro = np.abs(p0) ** 2 + np.abs(p1) ** 2 + np.abs(p2) ** 2 + np.abs(p3) ** 2
    det = np.abs(p0 * p3 - p1 * p2)
    disc = np.sqrt(np.maximum(fro * fro - 4.0 * det * det, 0.0))
    return np.sqrt(0.5 * (fro + disc))


def growth_log_norms_numpy(a):
    """(1/k) log ||prod_{j<k} [[a_j, -1], [1, 0]]|| for every k = 1..len(a)."""
    a = np.asarray(a, dtype=complex)
    out = np.empty(a.size)
    p0, p1, p2, p3 = 1.0 + 0j, 0j, 0j, 1.0 + 0j
    logsum = 0.0
    for k in range(a.size):
        q0 = a[k] * p0 - p2
        q1 = a[k] * p1 - p3
        p2, p3 = p0, p1
        p0, p1 = q0, q1
        s = max(abs(p0), abs(p1), abs(p2), abs(p3))
        logsum += math.log(s)
        p0, p1, p2, p3 = p0 / s, p1 / s, p2 / s, p3 / s
        out[k] = (logsum + math.log(float(_opnorm_np(np.array([p0, p1, p2, p3]))))) / (k + 1)
    return out


def transfer_trace_numpy(V, E):
    """Trace of prod_{j=q-1}^{0} [[E - V_j, -1], [1, 0]] without renormalization."""
    p0, p1, p2, p3 = 1.0, 0.0, 0.0, 1.0
    for Vj in np.asarray(V, dtype=float):
        g = E - Vj
        q0 = g * p0 - p2
        q1 = g * p1 - p3
        p2, p3 = p0, p1
        p0, p1 = q0, q1
        if not (abs(p0) < 1e300 and abs(p1) < 1e300):
            return math.inf
    return p0 + p3


numpy_impl = SimpleNamespace(
    orbit_log_norms=orbit_log_norms_numpy,
    growth_log_norms=growth_log_norms_numpy,
    transfer_trace=transfer_trace_numpy,
    name="numpy",
)


# -- numba path -----------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True, nogil=True)
    def _opnorm_nb(p0, p1, p2, p3):
        fro = abs(p0) ** 2 + abs(p1) ** 2 + abs(p2) ** 2 + abs(p3) ** 2
        det = abs(p0 * p3 - p1 * p2)
        disc = fro * fro - 4.0 * det * det
        if disc < 0.0:
            disc = 0.0
        return math.sqrt(0.5 * (fro + math.sqrt(disc)))

    @numba.njit(cache=True, nogil=True)
    def orbit_log_norms_numba(g_coef, u_coef, l_coef, K, E, alpha, x0s, n):
        out = np.empty(x0s.size)
        zp = np.empty(K + 1, dtype=np.complex128)
        for ph in range(x0s.size):
            p0 = 1.0 + 0j
            p1 = 0j
            p2 = 0j
            p3 = 1.0 + 0j
            logsum = 0.0
            x0 = x0s[ph]
            for j in range(n):
                t = x0 + j * alpha
                t -= math.floor(t)
                z = complex(math.cos(TWO_PI * t), math.sin(TWO_PI * t))
                zp[0] = 1.0
                for f in range(1, K + 1):
                    zp[f] = zp[f - 1] * z
                gv = g_coef[K] + 0j
                uv = u_coef[K] + 0j
                lv = l_coef[K] + 0j
                for f in range(1, K + 1):
                    w = zp[f]
                    wc = w.conjugate()
                    gv += g_coef[K + f] * w + g_coef[K - f] * wc
                    uv += u_coef[K + f] * w + u_coef[K - f] * wc
                    lv += l_coef[K + f] * w + l_coef[K - f] * wc
                a = E - gv
                q0 = a * p0 + uv * p2
                q1 = a * p1 + uv * p3
                p2 = lv * p0
                p3 = lv * p1
                p0 = q0
                p1 = q1
                s = max(max(abs(p0), abs(p1)), max(abs(p2), abs(p3)))
                logsum += math.log(s)
                inv = 1.0 / s
                p0 *= inv
                p1 *= inv
                p2 *= inv
                p3 *= inv
            out[ph] = (logsum + math.log(_opnorm_nb(p0, p1, p2, p3))) / n
        return out

    @numba.njit(cache=True, nogil=True)
    def growth_log_norms_numba(a):
        out = np.empty(a.size)
        p0 = 1.0 + 0j
        p1 = 0j
        p2 = 0j
        p3 = 1.0 + 0j
        logsum = 0.0
        for k in range(a.size):
            q0 = a[k] * p0 - p2
            q1 = a[k] * p1 - p3
            p2 = p0
            p3 = p1
            p0 = q0
            p1 = q1
            s = max(max(abs(p0), abs(p1)), max(abs(p2), abs(p3)))
            logsum += math.log(s)
            p0 /= s
            p1 /= s
            p2 /= s
            p3 /= s
            out[k] = (logsum + math.log(_opnorm_nb(p0, p1, p2, p3))) / (k + 1)
        return out

    @numba.njit(cache=True, nogil=True)
    def transfer_trace_numba(V, E):
        p0 = 1.0
        p1 = 0.0
        p2 = 0.0
        p3 = 1.0
        for j in range(V.size):
            g = E - V[j]
            q0 = g * p0 - p2
            q1 = g * p1 - p3
            p2 = p0
            p3 = p1
            p0 = q0
            p1 = q1
            if not (abs(p0) < 1e300 and abs(p1) < 1e300):
                return math.inf
        return p0 + p3

    numba_impl = SimpleNamespace(
        orbit_log_norms=orbit_log_norms_numba,
        growth_log_norms=growth_log_norms_numba,
        transfer_trace=transfer_trace_numba,
        name="numba",
    )
else:  # pragma: no cover
    numba_impl = None

active = numba_impl if USE_NUMBA else numpy_impl


def orbit_log_norms(g_coef, u_coef, l_coef, K, E, alpha, x0s, n):
    return active.orbit_log_norms(
        np.ascontiguousarray(g_coef, dtype=np.complex128),
        np.ascontiguousarray(u_coef, dtype=np.complex128),
        np.ascontiguousarray(l_coef, dtype=np.complex128),
        int(K), float(E), float(alpha),
        np.ascontiguousarray(x0s, dtype=np.float64), int(n))


def growth_log_norms(a):
    return active.growth_log_norms(np.ascontiguousarray(a, dtype=np.complex128))


def transfer_trace(V, E):
    return float(active.transfer_trace(np.ascontiguousarray(V, dtype=np.float64), float(E)))
