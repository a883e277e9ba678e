import numpy as np
import pytest

from cocycle_lab.trigpoly import TrigPoly


@pytest.fixture
def v71():
    """lambda_1 = 9, lambda_2 = 0.8, cosine only."""
    return TrigPoly([9.0, 0.8], [0.0, 0.0])


def random_trig(rng, M_max=4, scale=2.0, M=None):
    M = int(rng.integers(1, M_max + 1)) if M is None else M
    return TrigPoly(rng.uniform(-scale, scale, M), rng.uniform(-scale, scale, M))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
