"""QAM constellations, labeling, ML hard detection and demapping."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True, eq=False)
class Constellation:
    """Unit-energy 2-D signal set with a label <-> point bijection.

    ``points[a]`` is the complex point carrying field label ``a``.
    """
    points: np.ndarray = field(repr=False)
    d_min: float
    Es: float
    name: str = ""

    @property
    def q(self):
        return int(self.points.size)

    @property
    def bits_per_symbol(self):
        return int(self.q).bit_length() - 1

    def point_of_label(self, a):
        return self.points[a]

    def label_of_point(self, x):
        hits = np.flatnonzero(self.points == x)
        if hits.size != 1:
            raise DomainError(f"{x!r} is not a constellation point")
        return int(hits[0])


def _pairwise_dmin(points):
    diff = np.abs(points[:, None] - points[None, :])
    return float(diff[~np.eye(points.size, dtype=bool)].min())


def _finish(points, name):
    points = np.asarray(points, dtype=complex)
    points = points / np.sqrt(np.mean(np.abs(points) ** 2))
    points.setflags(write=False)
    return Constellation(points, _pairwise_dmin(points), float(np.mean(np.abs(points) ** 2)),
                         name)


def _gray(k):
    return k ^ (k >> 1)


def _square_qam(q):
    half = (q.bit_length() - 1) // 2
    m = 1 << half
    levels = 2 * np.arange(m) - (m - 1)
    points = np.empty(q, dtype=complex)
    for i in range(m):
        for k in range(m):
            label = (_gray(i) << half) | _gray(k)
            points[label] = levels[i] + 1j * levels[k]
    return _finish(points, f"{q}-QAM")


def _cross_32():
    # 8x4 Gray rectangle with the |I| = 7 columns folded into the |Q| = 5 rows
    points = np.empty(32, dtype=complex)
    levels_i = 2 * np.arange(8) - 7
    levels_q = 2 * np.arange(4) - 3
    for i in range(8):
        for k in range(4):
            label = (_gray(i) << 2) | _gray(k)
            re, im = levels_i[i], levels_q[k]
            if abs(re) == 7:
                re, im = np.sign(re) * (1 if abs(im) == 1 else 3), np.sign(im) * 5
            points[label] = re + 1j * im
    return _finish(points, "32-cross")


def build_qam(q):
    """Square Gray-labeled QAM for q in {4, 16, 64, 256}, cross 32-QAM for q = 32."""
    if q in (4, 16, 64, 256):
        return _square_qam(q)
    if q == 32:
        return _cross_32()
    raise ConfigurationError(f"unsupported constellation size {q}")


def map_symbols(c, v):
    return c.points[np.asarray(v, dtype=np.int64)]


def distances_sq(c, y):
    """Squared distances from each sample in ``y`` to every point: shape ``y.shape + (q,)``."""
    d = np.asarray(y)[..., None] - c.points
    return d.real ** 2 + d.imag ** 2


def detect(c, y):
    """Nearest-point detection; ties go to the smallest label.

    Returns ``(x_hat, z)`` with the same leading shape as ``y``.
    """
    y = np.asarray(y, dtype=complex)
    if not np.all(np.isfinite(y)):
        raise DomainError("received samples must be finite")
    z = np.argmin(distances_sq(c, y), axis=-1)
    return c.points[z], z


def demap(c, x):
    """Inverse of :func:`map_symbols` for exact constellation points."""
    x_hat, z = detect(c, x)
    if not np.array_equal(x_hat, np.asarray(x)):
        raise DomainError("demap expects exact constellation points")
    return z


def symbol_bits(c):
    """Table of shape ``(q, p)`` with the binary expansion (MSB first) of each label."""
    p = c.bits_per_symbol
    return (np.arange(c.q)[:, None] >> np.arange(p - 1, -1, -1)) & 1
