"""Subcritical and supercritical behaviour of quasi-periodic Schrödinger and Jacobi cocycles."""
from .trigpoly import LaurentPoly, TrigPoly, circle_log_integral, eval_complex, gcd_frequency, roots, to_laurent
from .circleopt import herman_radius, herman_radius_uniform, min_modulus, min_modulus_uniform, zero_radius
from .cocycle import GOLDEN, LEEstimate, acceleration, lyapunov
from .criteria import Status, Verdict, subcritical_energy, subcritical_uniform
from .jacobi import JacobiModel
from .supercritical import LowerBoundReport, improved_herman_bound

__all__ = [
    "LaurentPoly", "TrigPoly", "circle_log_integral", "eval_complex", "gcd_frequency", "roots", "to_laurent",
    "herman_radius", "herman_radius_uniform", "min_modulus", "min_modulus_uniform", "zero_radius",
    "GOLDEN", "LEEstimate", "acceleration", "lyapunov",
    "Status", "Verdict", "subcritical_energy", "subcritical_uniform",
    "JacobiModel", "LowerBoundReport", "improved_herman_bound",
]
