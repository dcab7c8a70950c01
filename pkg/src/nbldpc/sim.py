"""Monte Carlo error-rate simulation over an Eb/N0 sweep.

Frames are generated in fixed-size chunks. Every frame draws its source
symbols and its noise from a substream keyed by (operating point, frame
index), and chunk results are folded in frame order, so the stop rule and
every counter are identical for any number of workers.
"""

import configparser
import csv
import io
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np
from scipy.stats import binomtest

from .channel import awgn, ebn0_to_n0, NoiseSpec, substream
from .code import encode, load_alist, random_regular, syndrome, systematic_encoder
from .errors import ConfigurationError
from .ijdd import IjddParams, decode_batch
from .modem import build_qam, detect, map_symbols, symbol_bits
from .qspa import channel_log_likelihoods, fft_qspa_decode_batch

log = logging.getLogger(__name__)

DECODERS = ("ijdd", "fft-qspa", "uncoded")
SOURCES = ("random-information", "all-zero", "random-coset")
CURVE_COLUMNS = ("ebn0_db", "frames", "ser", "ber", "wer", "ser_lo", "ser_hi", "ber_lo",
                 "ber_hi", "wer_lo", "wer_hi", "avg_iters")


@dataclass(frozen=True)
class CodeSource:
    """Either an alist file or the arguments of :func:`random_regular`."""
    path: str = None
    n: int = None
    d_v: int = None
    d_c: int = None
    seed: int = None

    @classmethod
    def parse(cls, text, base_dir="."):
        parts = text.split()
        if parts and parts[0] == "random_regular":
            if len(parts) != 5:
                raise ConfigurationError("code = random_regular N d_v d_c seed")
            try:
                n, dv, dc, seed = map(int, parts[1:])
            except ValueError:
                raise ConfigurationError(f"bad random_regular arguments: {text!r}") from None
            return cls(n=n, d_v=dv, d_c=dc, seed=seed)
        if len(parts) != 1:
            raise ConfigurationError(f"bad code source: {text!r}")
        path = parts[0]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        return cls(path=path)

    def build(self, q):
        if self.path is not None:
            return load_alist(self.path)
        return random_regular(self.n, self.d_v, self.d_c, q, self.seed)

    def __str__(self):
        if self.path is not None:
            return self.path
        return f"random_regular {self.n} {self.d_v} {self.d_c} {self.seed}"


@dataclass(frozen=True)
class SimConfig:
    code: CodeSource
    q: int
    ebn0: tuple
    decoder: str = "ijdd"
    k_max: int = 50
    r_factor: float = 1.415
    T: int = 3
    min_word_errors: int = 100
    max_frames: int = 1_000_000
    seed: int = 0
    source: str = "random-information"
    rate: float = None
    batch: int = 64

    def __post_init__(self):
        if not self.ebn0:
            raise ConfigurationError("ebn0 list must be nonempty")
        if any(b <= a for a, b in zip(self.ebn0, self.ebn0[1:])):
            raise ConfigurationError("ebn0 points must be strictly increasing")
        if self.decoder not in DECODERS:
            raise ConfigurationError(f"decoder must be one of {DECODERS}, got {self.decoder!r}")
        if self.source not in SOURCES:
            raise ConfigurationError(f"source must be one of {SOURCES}, got {self.source!r}")
        if self.min_word_errors < 1:
            raise ConfigurationError("min_word_errors must be >= 1")
        if self.max_frames < 1 or self.batch < 1:
            raise ConfigurationError("max_frames and batch must be >= 1")
        if self.rate is not None and not 0 < self.rate <= 1:
            raise ConfigurationError(f"rate must lie in (0, 1], got {self.rate}")
        IjddParams(self.k_max, self.r_factor, self.T)

    @property
    def ijdd_params(self):
        return IjddParams(self.k_max, self.r_factor, self.T)


_CASTS = {"q": int, "k_max": int, "r_factor": float, "T": int, "min_word_errors": int,
          "max_frames": int, "seed": int, "rate": float, "batch": int,
          "decoder": str, "source": str}


def parse_config(text, base_dir=".", **overrides):
    """Parse the flat ``key = value`` config format (``#`` starts a comment)."""
    cp = configparser.ConfigParser(comment_prefixes=("#",), inline_comment_prefixes=("#",),
                                   delimiters=("=",))
    cp.optionxform = str
    try:
        cp.read_string("[sim]\n" + text)
    except configparser.Error as exc:
        raise ConfigurationError(f"config syntax error: {exc}") from None
    raw = dict(cp["sim"])
    known = {f.name for f in fields(SimConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in ("code", "q", "ebn0"):
        if key not in raw:
            raise ConfigurationError(f"missing required config key {key!r}")
    kw = {}
    try:
        for key, val in raw.items():
            if key == "code":
                kw[key] = CodeSource.parse(val, base_dir)
            elif key == "ebn0":
                kw[key] = tuple(float(t) for t in val.replace(",", " ").split())
            elif key == "rate" and val.lower() in ("", "auto"):
                kw[key] = None
            elif key == "rate" and "/" in val:
                num, den = val.split("/")
                kw[key] = float(num) / float(den)
            else:
                kw[key] = _CASTS[key](val)
    except ValueError as exc:
        raise ConfigurationError(f"bad value in config: {exc}") from None
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return SimConfig(**kw)


def load_config(path, **overrides):
    with open(path) as f:
        return parse_config(f.read(), os.path.dirname(os.path.abspath(path)), **overrides)


def format_config(cfg):
    lines = [f"code = {cfg.code}", f"q = {cfg.q}",
             "ebn0 = " + ", ".join(f"{e:g}" for e in cfg.ebn0)]
    for f in fields(SimConfig):
        if f.name in ("code", "q", "ebn0"):
            continue
        val = getattr(cfg, f.name)
        if val is not None:
            lines.append(f"{f.name} = {val}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def wilson(k, n, confidence=0.95):
    if n == 0:
        return 0.0, 1.0
    ci = binomtest(int(k), int(n)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass
class ErrorStats:
    N: int
    p: int
    frames: int = 0
    symbol_errors: int = 0
    bit_errors: int = 0
    word_errors: int = 0
    info_bit_errors: int = 0
    info_symbols: int = 0
    iteration_hist: Counter = field(default_factory=Counter)

    @property
    def ser(self):
        return self.symbol_errors / (self.frames * self.N) if self.frames else 0.0

    @property
    def ber(self):
        return self.bit_errors / (self.frames * self.N * self.p) if self.frames else 0.0

    @property
    def wer(self):
        return self.word_errors / self.frames if self.frames else 0.0

    @property
    def info_ber(self):
        n = self.frames * self.info_symbols * self.p
        return self.info_bit_errors / n if n else 0.0

    @property
    def avg_iters(self):
        if not self.frames:
            return 0.0
        return sum(k * c for k, c in self.iteration_hist.items()) / self.frames

    def ser_ci(self):
        return wilson(self.symbol_errors, self.frames * self.N)

    def ber_ci(self):
        return wilson(self.bit_errors, self.frames * self.N * self.p)

    def wer_ci(self):
        return wilson(self.word_errors, self.frames)

    def add_frame(self, sym, bits, info_bits, iters):
        self.frames += 1
        self.symbol_errors += int(sym)
        self.bit_errors += int(bits)
        self.word_errors += int(sym > 0)
        self.info_bit_errors += int(info_bits)
        self.iteration_hist[int(iters)] += 1


# ---------------------------------------------------------------------------
# frame generation and decoding
# ---------------------------------------------------------------------------

class Context:
    """Everything a worker needs to simulate frames for one config."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.c = build_qam(cfg.q)
        if cfg.decoder == "uncoded" and cfg.code is None:
            raise ConfigurationError("uncoded runs still take the frame length from a code")
        self.h = cfg.code.build(cfg.q)
        if self.h.q != cfg.q:
            raise ConfigurationError(f"code is over GF({self.h.q}) but q = {cfg.q}")
        self.enc = None
        if cfg.decoder != "uncoded" and cfg.source == "random-information":
            self.enc = systematic_encoder(self.h)
        self.bits = symbol_bits(self.c)

    @property
    def rate(self):
        if self.cfg.decoder == "uncoded":
            return 1.0
        if self.cfg.rate is not None:
            return self.cfg.rate
        enc = self.enc or systematic_encoder(self.h)
        if enc.K == 0:
            raise ConfigurationError("code has dimension 0; set an explicit rate for Eb/N0")
        return enc.rate

    def n0(self, ebn0_db):
        return ebn0_to_n0(ebn0_db, self.rate, self.cfg.q, self.c.Es)

    def frame(self, point_key, index, n0):
        """Transmitted word, target syndrome (or None) and received vector of one frame."""
        cfg, h = self.cfg, self.h
        rng = substream(cfg.seed, point_key, index)
        target = None
        if cfg.decoder == "uncoded" or cfg.source == "random-coset":
            v = rng.integers(0, cfg.q, h.N)
            if cfg.decoder != "uncoded":
                target = syndrome(h, v)
        elif cfg.source == "all-zero":
            v = np.zeros(h.N, dtype=np.int64)
        else:
            v = encode(self.enc, rng.integers(0, cfg.q, self.enc.K))
        y = awgn(map_symbols(self.c, v), NoiseSpec(n0), rng)
        return v, target, y

    def decode(self, y, targets, n0):
        cfg = self.cfg
        if cfg.decoder == "uncoded":
            _, z = detect(self.c, y)
            return z, np.zeros(len(y), dtype=np.int64), y
        if cfg.decoder == "ijdd":
            r = decode_batch(self.h, self.c, y, cfg.ijdd_params, targets)
            return r.codewords, r.iterations, r.final_y
        llr = channel_log_likelihoods(self.c, y, n0)
        r = fft_qspa_decode_batch(self.h, llr, cfg.k_max, targets, log_domain=True)
        return r.codewords, r.iterations, None

    def run_chunk(self, point_key, start, count, n0):
        """Per-frame error counts for frames ``start .. start + count - 1``."""
        frames = [self.frame(point_key, i, n0) for i in range(start, start + count)]
        v = np.stack([f[0] for f in frames])
        y = np.stack([f[2] for f in frames])
        targets = None
        if frames[0][1] is not None:
            targets = np.stack([f[1] for f in frames])
        z, iters, _ = self.decode(y, targets, n0)
        wrong = z != v
        diff = np.bitwise_xor(z, v)
        bit_err = self.bits[diff].sum(axis=(-1, -2))
        if self.enc is not None:
            info_bit = self.bits[diff[:, self.enc.info_cols]].sum(axis=(-1, -2))
        else:
            info_bit = np.zeros(count, dtype=np.int64)
        return np.stack((wrong.sum(axis=1), bit_err, info_bit, iters), axis=1)


def point_key(ebn0_db):
    """Non-negative substream key for an operating point (milli-dB resolution)."""
    return int(round(ebn0_db * 1000)) + 1_000_000


_WORKER_CTX = None


def _init_worker(cfg):
    global _WORKER_CTX
    _WORKER_CTX = Context(cfg)


def _worker_chunk(args):
    return _WORKER_CTX.run_chunk(*args)


def _chunks(cfg, key, n0):
    start = 0
    while start < cfg.max_frames:
        count = min(cfg.batch, cfg.max_frames - start)
        yield key, start, count, n0
        start += count


def _fold(stats, rows, cfg):
    """Add frame rows in order; return True once the stop rule fires."""
    for sym, bits, info_bits, iters in rows:
        stats.add_frame(sym, bits, info_bits, iters)
        if stats.word_errors >= cfg.min_word_errors or stats.frames >= cfg.max_frames:
            return True
    return False


def run_point(cfg, ebn0_db, workers=1, context=None, pool=None):
    """Simulate one Eb/N0 point until ``min_word_errors`` or ``max_frames``."""
    ctx = context or Context(cfg)
    n0 = ctx.n0(ebn0_db)
    key = point_key(ebn0_db)
    stats = ErrorStats(ctx.h.N, ctx.c.bits_per_symbol,
                       info_symbols=ctx.enc.K if ctx.enc is not None else 0)
    chunks = _chunks(cfg, key, n0)
    if workers <= 1 and pool is None:
        for args in chunks:
            if _fold(stats, ctx.run_chunk(*args), cfg):
                break
    else:
        own = pool is None
        if own:
            pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(cfg,))
        try:
            pending = []
            done = False
            while not done:
                while len(pending) < 2 * workers:
                    args = next(chunks, None)
                    if args is None:
                        break
                    pending.append(pool.submit(_worker_chunk, args))
                if not pending:
                    break
                done = _fold(stats, pending.pop(0).result(), cfg)
            for fut in pending:
                fut.cancel()
        finally:
            if own:
                pool.shutdown(cancel_futures=True)
    log.info("Eb/N0 %.2f dB: frames=%d SER=%.3e WER=%.3e", ebn0_db, stats.frames, stats.ser,
             stats.wer)
    return stats


def run_sweep(cfg, workers=1):
    """Run every point of ``cfg.ebn0`` in order; returns ``[(ebn0_db, ErrorStats), ...]``."""
    ctx = Context(cfg)
    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(cfg,))
    try:
        return [(e, run_point(cfg, e, workers, ctx, pool)) for e in cfg.ebn0]
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def _fmt(x):
    return f"{x:.6e}"


def curve_rows(results):
    for ebn0_db, st in results:
        yield (f"{ebn0_db:g}", str(st.frames), _fmt(st.ser), _fmt(st.ber), _fmt(st.wer),
               *map(_fmt, st.ser_ci()), *map(_fmt, st.ber_ci()), *map(_fmt, st.wer_ci()),
               f"{st.avg_iters:.4f}")


def write_curve_csv(results, out):
    """Write the curve table to a path or a text stream."""
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as f:
            return write_curve_csv(results, f)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CURVE_COLUMNS)
    w.writerows(curve_rows(results))


def curve_csv_text(results):
    buf = io.StringIO()
    write_curve_csv(results, buf)
    return buf.getvalue()


def read_curve_csv(path):
    with open(path, newline="") as f:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(f)]


# ---------------------------------------------------------------------------
# scatter export
# ---------------------------------------------------------------------------

@dataclass
class ScatterData:
    transmitted: np.ndarray
    initial_y: np.ndarray
    final_y: np.ndarray
    codewords: np.ndarray
    success: np.ndarray
    iterations: np.ndarray


def scatter_dump(cfg, ebn0_db, frames, k_max=10):
    """Decode ``frames`` frames with IJDD, keeping the received and final signal vectors."""
    cfg = replace(cfg, decoder="ijdd", k_max=k_max)
    ctx = Context(cfg)
    n0 = ctx.n0(ebn0_db)
    key = point_key(ebn0_db)
    gen = [ctx.frame(key, i, n0) for i in range(frames)]
    v = np.stack([g[0] for g in gen])
    y = np.stack([g[2] for g in gen])
    targets = None if gen[0][1] is None else np.stack([g[1] for g in gen])
    r = decode_batch(ctx.h, ctx.c, y, cfg.ijdd_params, targets)
    return ScatterData(v, y, r.final_y, r.codewords, r.success, r.iterations)


def write_scatter_csv(data, out):
    """Rows ``frame,iter,symbol_index,re,im`` for the received and final vectors."""
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as f:
            return write_scatter_csv(data, f)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("frame", "iter", "symbol_index", "re", "im"))
    for f, (y0, yk, k) in enumerate(zip(data.initial_y, data.final_y, data.iterations)):
        for it, vec in ((0, y0), (int(k), yk)):
            for j, val in enumerate(vec):
                w.writerow((f, it, j, f"{val.real:.9f}", f"{val.imag:.9f}"))


def write_trajectory_csv(trajectory, out):
    """Per-iteration snapshot stream ``iter,symbol_index,re,im`` of one decode."""
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as f:
            return write_trajectory_csv(trajectory, f)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(("iter", "symbol_index", "re", "im"))
    for k, yk in enumerate(trajectory):
        for j, val in enumerate(yk):
            w.writerow((k, j, f"{val.real:.9f}", f"{val.imag:.9f}"))


def mean_distance_to_constellation(c, y):
    d2 = np.min(np.abs(np.asarray(y)[..., None] - c.points) ** 2, axis=-1)
    return float(np.mean(np.sqrt(d2)))
