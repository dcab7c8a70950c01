"""Complex AWGN and Eb/N0 bookkeeping."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class NoiseSpec:
    N0: float
    seed: int = 0

    def __post_init__(self):
        if not self.N0 >= 0:
            raise ConfigurationError(f"N0 must be non-negative, got {self.N0}")

    @property
    def sigma2(self):
        """Per-dimension noise variance."""
        return self.N0 / 2


def substream(seed, *key):
    """Independent generator for a (point, frame, ...) index under a master seed.

    Streams are derived with ``SeedSequence`` spawn keys, so a frame's noise is
    fixed by its index alone, whatever order frames are processed in.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def awgn(x, spec, rng=None):
    """Return ``x + n`` with n ~ CN(0, N0), i.e. variance N0/2 per dimension.

    Noise comes from ``rng`` when given, otherwise from a generator seeded with
    ``spec.seed``. Gaussian samples use numpy's ziggurat sampler; real parts
    are drawn before imaginary parts.
    """
    x = np.asarray(x, dtype=complex)
    if not np.all(np.isfinite(x)):
        raise DomainError("signal must be finite")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    if spec.N0 == 0:
        return x.copy()
    s = math.sqrt(spec.sigma2)
    re = rng.standard_normal(x.shape)
    im = rng.standard_normal(x.shape)
    return x + s * (re + 1j * im)


def spectral_efficiency(rate, q):
    return rate * math.log2(q)


def ebn0_to_n0(ebn0_db, rate, q, Es=1.0):
    """N0 such that Es/N0 = rho * Eb/N0 with rho = rate * log2(q)."""
    if not rate > 0 or rate > 1:
        raise ConfigurationError(f"code rate must lie in (0, 1], got {rate}")
    if q < 2:
        raise ConfigurationError(f"constellation size must be >= 2, got {q}")
    rho = spectral_efficiency(rate, q)
    return Es / (rho * 10 ** (ebn0_db / 10))
