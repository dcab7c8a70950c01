import math

import numpy as np
import pytest

from nbldpc.channel import NoiseSpec, awgn, ebn0_to_n0, substream
from nbldpc.errors import ConfigurationError


def test_zero_noise_is_identity():
    x = np.array([1 + 1j, -0.5j, 0.25])
    assert np.array_equal(awgn(x, NoiseSpec(0.0, seed=1)), x)


def test_seed_determinism():
    x = np.zeros(100, complex)
    a = awgn(x, NoiseSpec(0.3, seed=5))
    b = awgn(x, NoiseSpec(0.3, seed=5))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, awgn(x, NoiseSpec(0.3, seed=6)))


def test_per_dimension_variance_and_isotropy():
    n = awgn(np.zeros(1_000_000, complex), NoiseSpec(0.5, seed=123))
    # std of the variance estimate is 0.25 * sqrt(2 / 1e6) ~ 3.5e-4, well inside 1 %
    assert abs(np.var(n.real) - 0.25) < 0.0025
    assert abs(np.var(n.imag) - 0.25) < 0.0025
    assert abs(np.corrcoef(n.real, n.imag)[0, 1]) < 1e-2
    assert abs(np.mean(n)) < 5 * math.sqrt(0.5 / 1e6)


def test_negative_n0():
    with pytest.raises(ConfigurationError):
        NoiseSpec(-1.0)


def test_ebn0_examples():
    assert ebn0_to_n0(0.0, 1.0, 2, 1.0) == pytest.approx(1.0)
    rho = (175 / 255) * math.log2(16)
    assert rho == pytest.approx(2.745, abs=1e-3)
    assert ebn0_to_n0(8.0, 175 / 255, 16) == pytest.approx(1 / (rho * 10 ** 0.8))
    assert ebn0_to_n0(8.0, 175 / 255, 16) == pytest.approx(0.05774, abs=1e-5)


def test_ebn0_monotone():
    vals = [ebn0_to_n0(e, 0.5, 16) for e in np.linspace(-5, 20, 51)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("rate", [0, -0.1, 1.5])
def test_bad_rate(rate):
    with pytest.raises(ConfigurationError):
        ebn0_to_n0(3.0, rate, 16)


def test_substreams_are_independent_of_order():
    a = substream(9, 1, 5).standard_normal(4)
    substream(9, 1, 4).standard_normal(4)
    assert np.array_equal(a, substream(9, 1, 5).standard_normal(4))
    assert not np.array_equal(a, substream(9, 1, 6).standard_normal(4))
    assert not np.array_equal(a, substream(9, 2, 5).standard_normal(4))
