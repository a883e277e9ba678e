import math
from fractions import Fraction

import numpy as np
import pytest

from cocycle_lab.cocycle import PreconditionError
from cocycle_lab.spectrum import (Band, angle_formula_check, angle_tolerance, band_spectrum, convergents,
                                  discriminant, merge_bands, odd_symmetry_check, orbit_values, spectral_radius_bound,
                                  spectrum_approx, weyl_sections)
from cocycle_lab.cocycle import dominating_section
from cocycle_lab.trigpoly import TrigPoly

from conftest import random_trig


def test_discriminant_small_q():
    v = TrigPoly([1.0], [0.0])
    # q = 1: trace of [[E - v(x), -1], [1, 0]]
    assert discriminant(v, 0, 1, 0.0, 0.5) == pytest.approx(0.5 - 2.0)
    # q = 2, zero potential: E^2 - 2
    z = TrigPoly([1e-300], [0.0])
    assert discriminant(z, 1, 2, 0.0, 1.3) == pytest.approx(1.3 ** 2 - 2)


def test_discriminant_vs_matrix_product(rng):
    v = random_trig(rng, M_max=3, scale=1.0)
    P = np.eye(2)
    for V in orbit_values(v, 3, 7, 0.21):
        P = np.array([[0.4 - V, -1.0], [1.0, 0.0]]) @ P
    assert discriminant(v, 3, 7, 0.21, 0.4) == pytest.approx(np.trace(P), rel=1e-12)
    assert discriminant(v, 3, 7, 0.21, 0.4, dps=50) == pytest.approx(np.trace(P), rel=1e-12)


def test_discriminant_guards():
    v = TrigPoly([1.0], [0.0])
    with pytest.raises(ValueError):
        discriminant(v, 2, 4, 0.0, 0.0)
    with pytest.raises(ValueError):
        discriminant(v, 1, 10_001, 0.0, 0.0)
    with pytest.raises(OverflowError):
        discriminant(TrigPoly([50.0], [0.0]), 1, 3001, 0.0, 500.0)


def test_bands_q1_q2():
    z = TrigPoly([1e-300], [0.0])
    assert band_spectrum(z, 0, 1, 0.0) == [Band(-2.0, 2.0)]
    v = TrigPoly([0.5], [0.0])
    assert band_spectrum(v, 0, 1, 0.0) == [Band(-1.0, 3.0)]


def test_band_edges_are_level_crossings(rng):
    v = random_trig(rng, M_max=2, scale=1.0)
    for b in band_spectrum(v, 5, 8, 0.1):
        for E in (b.lo, b.hi):
            assert abs(abs(discriminant(v, 5, 8, 0.1, E)) - 2) < 1e-6
        assert abs(discriminant(v, 5, 8, 0.1, 0.5 * (b.lo + b.hi))) <= 2 + 1e-9


def test_merge_bands():
    assert merge_bands([(2, 3), (0, 1), (1, 2.5)]) == [Band(0.0, 3.0)]
    assert merge_bands([(0, 1), (1.5, 2)]) == [Band(0, 1), Band(1.5, 2)]


def test_convergents_golden():
    assert convergents((math.sqrt(5) - 1) / 2, 6) == [(0, 1), (1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13)]
    assert convergents(0.5, 5) == [(0, 1), (1, 2)]


def test_spectrum_approx_amo():
    v = TrigPoly([0.5], [0.0])
    bands = spectrum_approx(v, depth=8)
    assert all(abs(b.lo) <= spectral_radius_bound(v) and abs(b.hi) <= spectral_radius_bound(v) for b in bands)
    measure = sum(b.width for b in bands)
    # |Sigma| = 4 - 4 lambda for the subcritical AMO, approached from above
    assert 2.0 - 1e-6 <= measure <= 2.05
    # nested self-consistency: depth 8 bands lie inside a small dilation of depth 6 bands
    coarse = spectrum_approx(v, depth=6)
    for b in bands:
        assert any(c.lo - 0.05 <= b.lo and b.hi <= c.hi + 0.05 for c in coarse)
    with pytest.raises(ValueError):
        spectrum_approx(v, depth=0)


def test_odd_symmetry(rng):
    for _ in range(20):
        M = int(rng.integers(1, 4))
        v = TrigPoly(np.zeros(M), rng.uniform(-1, 1, M))
        q = int(rng.integers(2, 30))
        p = int(rng.integers(1, q))
        if math.gcd(p, q) != 1:
            continue
        lhs, rhs, ok = odd_symmetry_check(v, 0.0, p, q, rng.uniform(-3, 3))
        assert ok
    with pytest.raises(ValueError):
        odd_symmetry_check(TrigPoly([1.0], [0.0]), 0.0, 1, 3, 0.2)
    v = TrigPoly([0.0, 0.0], [0.7, -0.3])
    assert odd_symmetry_check(v, 3 / 14, 3, 7, 0.4)[2]
    with pytest.raises(ValueError):
        odd_symmetry_check(v, 0.05, 3, 7, 0.4)


def test_zero_in_odd_q_spectrum():
    v = TrigPoly([0.0, 0.0], [0.7, -0.4])
    assert abs(discriminant(v, 2, 5, 0.0, 0.0, dps=60)) < 1e-9
    assert any(b.lo <= 0 <= b.hi for b in band_spectrum(v, 2, 5, 0.0))


def test_section_is_weyl_section():
    v = TrigPoly([1e-3], [5e-4])
    E, x, eps, alpha = 2.5, 0.0, 0.02, (math.sqrt(5) - 1) / 2
    S = dominating_section(v, E, eps, grid_n=256, alpha=alpha)
    s_minus, _, _ = weyl_sections(v, E, alpha, x, eps, 128)
    assert abs(S(x) - s_minus) < 1e-10


def test_angle_formula():
    v = TrigPoly([8e-4, 0.0], [-3e-4, 5e-4])
    errs = []
    for N in (16, 32, 64, 128):
        lhs, rhs, ok = angle_formula_check(v, 2.01, (math.sqrt(5) - 1) / 2, 0.3, 0.02, N)
        errs.append(abs(lhs - rhs))
    assert ok and errs[-1] < 1e-6 and all(a > b for a, b in zip(errs, errs[1:]))
    assert angle_tolerance(64) == pytest.approx(1e-6)
    with pytest.raises(PreconditionError):
        angle_formula_check(v, 0.0, 0.6, 0.0, 0.0, 32)
