import math
import warnings

import numpy as np
import pytest

from cocycle_lab import _kernels
from cocycle_lab.cocycle import GOLDEN, lyapunov
from cocycle_lab.criteria import Status
from cocycle_lab.jacobi import (Case, JacobiModel, SingularJacobiWarning, SingularModelError, UnsupportedCaseError,
                                asymptotic_slope, balanced_gate, case_constant, desingularize, jacobi_case,
                                jacobi_coeffs, jacobi_herman_bound, jacobi_herman_radius, jacobi_lyapunov, jacobi_m,
                                jacobi_step, jacobi_subcritical, mean_log_c, model_to_json)
from cocycle_lab.trigpoly import LaurentPoly, TrigPoly, roots

N, P = 40_000, 16


def model(lo, coeffs, a, b=None, **kw):
    return JacobiModel(LaurentPoly(lo, coeffs), TrigPoly(a, b if b is not None else [0.0] * len(a)), **kw)


def richardson_le(m, E, eps, n=20_000):
    # the estimator carries an O(1/n) boundary bias; cancel it
    L1 = jacobi_lyapunov(m, E, GOLDEN, eps, n, 8, subtract_mean_log=False).value
    L4 = jacobi_lyapunov(m, E, GOLDEN, eps, 4 * n, 8, subtract_mean_log=False).value
    return (4 * L4 - L1) / 3


def slope(m, e1, e2, E=0.3):
    L1 = jacobi_lyapunov(m, E, GOLDEN, e1, 20_000, 8, subtract_mean_log=False).value
    L2 = jacobi_lyapunov(m, E, GOLDEN, e2, 20_000, 8, subtract_mean_log=False).value
    return (L2 - L1) / (e2 - e1)


def test_cases():
    assert jacobi_case(model(0, [0.3, 0.2], [1.5])) is Case.PotentialDominant
    assert jacobi_case(model(-1, [0.2, 0.6, 0.3], [1.0])) is Case.Balanced
    assert jacobi_case(model(0, [0.2, 0, 0, 0.3], [1.0])) is Case.HoppingDominant
    with pytest.raises(ValueError):
        model(0, [1.0], [1.0])
    assert model(2, [1.0], [1.0], degenerate=True).N1 == 2


def test_step_matches_kernel():
    # oracle: explicit products of the 2x2 cocycle
    m = model(-1, [0.2 + 0.1j, 0.5, 0.3], [1.0, 0.4], [0.2, 0.0])
    E, eps, n, x0 = 0.4, 0.1, 300, 0.27
    Pm = np.eye(2, dtype=complex)
    s = 0.0
    for j in range(n):
        Pm = jacobi_step(m, E, x0 + j * GOLDEN, eps, GOLDEN) @ Pm
        k = np.abs(Pm).max()
        Pm /= k
        s += math.log(k)
    g, u, l, K = jacobi_coeffs(m, eps, GOLDEN)
    val = _kernels.orbit_log_norms(g, u, l, K, E, GOLDEN, np.array([x0]), n)[0]
    assert abs(val - (s + math.log(np.linalg.norm(Pm, 2))) / n) < 1e-12


@pytest.mark.parametrize("r,phase,k", [(1.0, 0.0, 0), (0.7, 1.1, 1), (1.8, -0.4, -2)])
def test_constant_modulus_reduces_to_schrodinger(r, phase, k):
    v = TrigPoly([1.3, -0.4], [0.2, 0.1])
    E = 0.35
    m = JacobiModel(LaurentPoly(k, [r * np.exp(1j * phase)]), v, degenerate=True)
    lj = jacobi_lyapunov(m, E, GOLDEN, 0.0, N, P)
    ls = lyapunov(v.scaled(1 / r), E / r, GOLDEN, 0.0, N, P)
    assert abs(lj.value - ls.value) <= 3 * math.hypot(lj.stderr, ls.stderr) + 1e-9


def test_mean_log_c():
    rep = mean_log_c(model(0, [0.3, 0.2], [1.0]))
    assert not rep.is_singular and rep.I_c == pytest.approx(math.log(0.3))
    sing = mean_log_c(model(0, [0.5, 0.5], [1.0]))
    assert sing.is_singular and math.isnan(sing.I_c) and sing.I_c_regularized == pytest.approx(math.log(0.5))


def test_slopes_and_constants():
    m1 = model(0, [0.3, 0.2], [1.5])
    assert abs(slope(m1, 2.0, 3.0) / (2 * math.pi) - 1) < 0.02
    assert asymptotic_slope(m1) == pytest.approx(2 * math.pi)
    m3 = model(0, [0.2, 0, 0, 0.3], [1.0])
    assert abs(slope(m3, 2.0, 3.0) / (3 * math.pi) - 1) < 0.02
    assert asymptotic_slope(m3) == pytest.approx(3 * math.pi)
    eps = 3.0
    assert abs(richardson_le(m3, 0.3, eps) - (3 * math.pi * eps + case_constant(m3))) < 1e-5


@pytest.mark.parametrize("lam", [1.7, 1.2 * np.exp(0.9j)])
def test_balanced_constant(lam):
    v = TrigPoly.from_lambda([lam])
    m = JacobiModel(LaurentPoly(-1, [0.3, 0.4, 0.2 + 0.1j]), v)
    eps = 2.0
    assert abs(richardson_le(m, 0.3, eps) - (2 * math.pi * eps + case_constant(m))) < 1e-5


def test_balanced_constant_depends_on_alpha():
    # extended-Harper shape: c = l1 e(-x) + l2 + l3 e(x), v = 2 cos
    m = model(-1, [0.3, 0.5, 0.4], [1.0])
    assert case_constant(m, GOLDEN) != case_constant(m, GOLDEN + 0.5)


def test_herman_bound_is_lower_bound():
    for m, E in [(model(0, [0.3, 0.2], [1.5]), 0.5), (model(-1, [0.2, 0.6, 0.3], [2.0]), 1.0)]:
        L = jacobi_lyapunov(m, E, GOLDEN, 0.0, N, P).value
        assert jacobi_herman_bound(m) <= L + 0.01


def test_herman_radius_crossing():
    m = model(0, [1.0, 0.2], [0.05, 0.02])
    eH = jacobi_herman_radius(m, 0.0)
    assert abs(jacobi_m(m, 0.0, eH) - 4.0) < 1e-7
    assert jacobi_m(m, 0.0, eH + 0.05) > 4.0
    # the uniform ratio never exceeds the energy-wise one at E = 0
    assert jacobi_m(m, 0.0, 0.5, uniform=True) <= jacobi_m(m, 0.0, 0.5)


def test_subcritical_verdicts():
    m = model(0, [1.0, 0.2], [0.05, 0.02])
    v = jacobi_subcritical(m, 0.0)
    assert v.status is Status.SubcriticalProven and v.lhs < v.rhs
    assert jacobi_subcritical(m, 0.0, uniform=True).status in (Status.SubcriticalProven, Status.Inconclusive)
    # M = 1: subcritical iff log|lambda_1| < I(c)
    assert jacobi_subcritical(model(0, [1.0, 0.2], [0.5]), 0.0).status is Status.SubcriticalProven
    assert jacobi_subcritical(model(0, [1.0, 0.2], [1.5]), 0.0).status is Status.Inconclusive
    with pytest.raises(UnsupportedCaseError):
        jacobi_subcritical(model(0, [0.2, 0, 0, 0.3], [1.0]), 0.0)


def test_subcritical_verdict_matches_le():
    m = model(0, [1.0, 0.2], [0.05, 0.02])
    assert jacobi_subcritical(m, 0.0).status is Status.SubcriticalProven
    assert abs(jacobi_lyapunov(m, 0.0, GOLDEN, 0.0, N, P).value) < 0.01


def test_balanced_gate():
    ok, q = balanced_gate(model(-1, [0.2, 0.6, 0.3], [1.0]))
    assert ok and q == pytest.approx(0.06)
    bad = model(-1, [1.0, 0.5, 1.0], [1.0])
    assert not balanced_gate(bad)[0]
    assert jacobi_subcritical(bad, 0.0).witness == "case-2 gate failed"


def test_singular_model():
    m = model(0, [0.5, 0.5], [0.1])
    assert jacobi_subcritical(m, 0.0).status is Status.ZeroLEOnly
    with pytest.raises(SingularModelError):
        jacobi_lyapunov(m, 0.0, n=100, phases=2)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        jacobi_herman_bound(m)
    assert any(issubclass(x.category, SingularJacobiWarning) for x in w)


def test_desingularize():
    c = LaurentPoly(-1, [0.5, 0.0, 0.5])   # zeros at +-i
    out = desingularize(c, 0.01)
    assert out.lo == c.lo and out.hi == c.hi
    r = np.abs(roots(out))
    assert np.allclose(r, math.exp(2 * math.pi * 0.01))
    # leading coefficient rescaled so c is unchanged far from its zeros in the limit
    assert np.allclose(desingularize(c, 1e-9).coeffs, c.coeffs, atol=1e-7)


def test_json_roundtrip():
    m = model(-1, [0.2 + 0.1j, 0.5, 0.3], [1.0, 0.4], [0.2, 0.0])
    import json
    back = JacobiModel.from_json(json.loads(model_to_json(m)))
    assert back.N1 == -1 and np.array_equal(back.mu, m.mu) and np.array_equal(back.v.a, m.v.a)
