"""Joint detection-decoding of nonbinary LDPC-coded QAM.

Modules: ``gf`` (GF(2^p) arithmetic), ``code`` (parity-check matrices,
alist I/O, encoding), ``modem``, ``channel``, ``ijdd`` (the hard-decision
joint detector/decoder), ``qspa`` (FFT-QSPA baseline), ``sim`` (Monte Carlo
harness), ``plots`` and ``cli``.
"""

from .channel import NoiseSpec, awgn, ebn0_to_n0
from .code import (ParityCheckMatrix, encode, load_alist, random_regular, save_alist,
                   syndrome, systematic_encoder)
from .errors import ConfigurationError, ConstructionError, DomainError, ParseError
from .gf import FieldTable, build_field
from .ijdd import DecodeResult, IjddParams, decode, decode_batch
from .modem import Constellation, build_qam, detect, map_symbols
from .qspa import channel_likelihoods, fft_qspa_decode

__version__ = "0.1.0"
