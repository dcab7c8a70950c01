"""Arithmetic over GF(2^p) via log/antilog tables.

Elements are plain integers in ``[0, q)`` holding the coefficient bitmask of a
polynomial over GF(2). Scalar methods are provided for clarity and tests; the
decoders use the full ``mul_table``/``inv_table`` arrays for vectorized lookups.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError

PRIMITIVE_POLYS = {
    2: 0x7,     # x^2 + x + 1
    3: 0xB,     # x^3 + x + 1
    4: 0x13,    # x^4 + x + 1
    5: 0x25,    # x^5 + x^2 + 1
    6: 0x43,    # x^6 + x + 1
    7: 0x89,    # x^7 + x^3 + 1
    8: 0x11D,   # x^8 + x^4 + x^3 + x^2 + 1
}


@dataclass(frozen=True, eq=False)
class FieldTable:
    p: int
    q: int
    primitive_poly: int
    log_table: np.ndarray = field(repr=False)
    antilog_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)

    def add(self, a, b):
        return a ^ b

    sub = add

    def neg(self, a):
        # characteristic 2: every element is its own additive inverse
        return a

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return int(self.antilog_table[(self.log_table[a] + self.log_table[b]) % (self.q - 1)])

    def inv(self, a):
        if a == 0:
            raise DomainError("zero has no multiplicative inverse")
        return int(self.antilog_table[(-self.log_table[a]) % (self.q - 1)])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n):
        if a == 0:
            return 1 if n == 0 else 0
        return int(self.antilog_table[(self.log_table[a] * n) % (self.q - 1)])

    def mul_vec(self, a, b):
        """Elementwise product of integer arrays (broadcasting)."""
        return self.mul_table[a, b]

    def __eq__(self, other):
        return isinstance(other, FieldTable) and (self.p, self.primitive_poly) == (
            other.p, other.primitive_poly)

    def __hash__(self):
        return hash((self.p, self.primitive_poly))


def build_field(p):
    """Build the log/antilog tables for GF(2^p) with the fixed primitive polynomial."""
    if not isinstance(p, (int, np.integer)) or p not in PRIMITIVE_POLYS:
        raise ConfigurationError(f"extension degree must be an integer in 2..8, got {p!r}")
    p = int(p)
    q = 1 << p
    poly = PRIMITIVE_POLYS[p]

    antilog = np.zeros(q - 1, dtype=np.int64)
    log = np.full(q, -1, dtype=np.int64)   # log(0) undefined
    x = 1
    for i in range(q - 1):
        antilog[i] = x
        log[x] = i
        x <<= 1
        if x & q:
            x ^= poly
    if x != 1:
        raise ConfigurationError(f"polynomial {poly:#x} is not primitive")

    nz = np.arange(1, q)
    mul = np.zeros((q, q), dtype=np.int64)
    mul[1:, 1:] = antilog[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
    inv = np.zeros(q, dtype=np.int64)
    inv[1:] = antilog[(-log[nz]) % (q - 1)]

    for arr in (log, antilog, mul, inv):
        arr.setflags(write=False)
    return FieldTable(p, q, poly, log, antilog, mul, inv)


def field_for_size(q):
    """Build GF(q) from its size; ``q`` must be a power of two in 4..256."""
    p = int(q).bit_length() - 1
    if q < 4 or (1 << p) != q:
        raise ConfigurationError(f"field size must be 2^p with 2 <= p <= 8, got {q}")
    return build_field(p)


def self_check(gf, samples=100_000, seed=0):
    """Check the field axioms on ``gf``; returns a list of failure descriptions.

    Fields with q <= 16 are checked over all pairs and triples; larger fields
    over ``samples`` random triples drawn with a fixed seed.
    """
    q = gf.q
    mul = gf.mul_table
    if q <= 16:
        a, b, c = (g.ravel() for g in np.meshgrid(*(np.arange(q),) * 3, indexing="ij"))
    else:
        rng = np.random.default_rng(seed)
        a, b, c = rng.integers(0, q, (3, samples))
    nz = np.arange(1, q)
    checks = {
        "add commutative": np.array_equal(a ^ b, b ^ a),
        "add associative": np.array_equal((a ^ b) ^ c, a ^ (b ^ c)),
        "add identity": np.array_equal(a ^ 0, a),
        "add self-inverse": not np.any(a ^ a),
        "neg is identity": all(gf.neg(int(x)) == x for x in range(q)),
        "mul commutative": np.array_equal(mul[a, b], mul[b, a]),
        "mul associative": np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]]),
        "distributive": np.array_equal(mul[a, b ^ c], mul[a, b] ^ mul[a, c]),
        "mul identity": np.array_equal(mul[a, 1], a),
        "mul zero": not np.any(mul[a, 0]),
        "inverse": np.all(mul[nz, gf.inv_table[nz]] == 1),
        "log/antilog round trip": np.array_equal(gf.antilog_table[gf.log_table[nz]], nz),
        "antilog is a permutation of GF(q)*": np.array_equal(np.sort(gf.antilog_table), nz),
    }
    return [f"GF({q}): {name}" for name, ok in checks.items() if not ok]
