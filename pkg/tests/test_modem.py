import itertools
import math

import numpy as np
import pytest

from nbldpc.errors import ConfigurationError, DomainError
from nbldpc.modem import build_qam, demap, detect, map_symbols, symbol_bits


def brute_dmin(points):
    return min(abs(a - b) for a, b in itertools.combinations(points.tolist(), 2))


def test_qpsk():
    c = build_qam(4)
    s = 1 / math.sqrt(2)
    assert sorted((p.real, p.imag) for p in c.points) == pytest.approx(
        sorted((a * s, b * s) for a in (-1, 1) for b in (-1, 1)))
    assert brute_dmin(c.points) == pytest.approx(math.sqrt(2))
    assert c.d_min == pytest.approx(math.sqrt(2))


def test_16qam_levels_energy_dmin():
    c = build_qam(16)
    levels = {round(v * math.sqrt(10), 9) for p in c.points for v in (p.real, p.imag)}
    assert levels == {-3.0, -1.0, 1.0, 3.0}
    assert sum(abs(p) ** 2 for p in c.points.tolist()) / 16 == pytest.approx(1, abs=1e-12)
    assert c.d_min == pytest.approx(2 / math.sqrt(10))
    assert brute_dmin(c.points) == pytest.approx(c.d_min)


def test_32_cross():
    c = build_qam(32)
    assert len(set(c.points.tolist())) == 32
    unit = c.points * math.sqrt(20)          # 32-cross on odd integers has Es = 20
    coords = {(round(p.real), round(p.imag)) for p in unit}
    grid = {(a, b) for a in range(-5, 6, 2) for b in range(-5, 6, 2)}
    corners = {(a, b) for a in (-5, 5) for b in (-5, 5)}
    assert coords == grid - corners
    assert c.Es == pytest.approx(1, abs=1e-12)
    assert c.d_min == pytest.approx(brute_dmin(c.points))


@pytest.mark.parametrize("q", [4, 16, 64, 256, 32])
def test_normalization_and_bijection(q):
    c = build_qam(q)
    assert abs(np.mean(np.abs(c.points) ** 2) - 1) < 1e-12
    assert np.unique(c.points).size == q
    assert c.d_min > 0


@pytest.mark.parametrize("q", [4, 16, 64, 256])
def test_square_qam_is_gray(q):
    c = build_qam(q)
    bits = symbol_bits(c)
    for a, b in itertools.combinations(range(q), 2):
        if abs(abs(c.points[a] - c.points[b]) - c.d_min) < 1e-9:
            assert np.sum(bits[a] != bits[b]) == 1


def test_unsupported_size():
    with pytest.raises(ConfigurationError):
        build_qam(8)


@pytest.mark.parametrize("q", [4, 16, 32, 64])
def test_noiseless_round_trip(q):
    c = build_qam(q)
    labels = np.arange(q)
    x_hat, z = detect(c, map_symbols(c, labels))
    assert np.array_equal(z, labels)
    assert np.array_equal(demap(c, map_symbols(c, labels)), labels)


def test_map_edge_cases():
    c = build_qam(16)
    assert np.all(map_symbols(c, np.zeros(5, int)) == c.points[0])
    assert map_symbols(c, np.zeros(0, int)).shape == (0,)


def test_detect_midpoint_tie_goes_to_smaller_label():
    c = build_qam(16)
    for a, b in itertools.combinations(range(16), 2):
        if abs(abs(c.points[a] - c.points[b]) - c.d_min) < 1e-9:
            mid = (c.points[a] + c.points[b]) / 2
            d = np.abs(mid - c.points)
            # only test exact float ties
            if d[a] == d[b] and d[a] == d.min():
                assert detect(c, mid)[1] == min(a, b)
    qpsk = build_qam(4)
    assert detect(qpsk, 0j)[1] == 0        # all four points equidistant


def test_detect_16qam_half_half():
    c = build_qam(16)
    y = 0.5 + 0.5j
    best = min(range(16), key=lambda a: (abs(y - c.points[a]), a))
    x_hat, z = detect(c, y)
    assert z == best
    assert x_hat == pytest.approx(complex(1, 1) / math.sqrt(10))


def test_argmin_certificate(rng):
    for q in (16, 32):
        c = build_qam(q)
        y = rng.normal(size=2000) + 1j * rng.normal(size=2000)
        x_hat, z = detect(c, y)
        d = np.abs(y[:, None] - c.points[None, :])
        assert np.all(np.abs(y - x_hat) <= d.min(axis=1) + 0)
        assert np.array_equal(c.points[z], x_hat)


def test_detect_rejects_non_finite():
    with pytest.raises(DomainError):
        detect(build_qam(4), np.array([np.nan + 0j]))
