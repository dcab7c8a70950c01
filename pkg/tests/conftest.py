import numpy as np
import pytest

from nbldpc.code import random_regular
from nbldpc.modem import build_qam


def poly_mulmod(a, b, poly, p):
    """Schoolbook carry-less multiply of two GF(2)[x] bitmasks, reduced mod ``poly``."""
    prod = 0
    for i in range(p):
        if (b >> i) & 1:
            prod ^= a << i
    for deg in range(2 * p - 2, p - 1, -1):
        if (prod >> deg) & 1:
            prod ^= poly << (deg - p)
    return prod


@pytest.fixture(scope="session")
def code_255():
    return random_regular(255, 16, 16, 16, seed=7)


@pytest.fixture(scope="session")
def qam16():
    return build_qam(16)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
