"""FFT-based q-ary sum-product decoding (FFT-QSPA) over GF(2^p).

Check nodes work in the Walsh-Hadamard domain: the additive group of GF(2^p)
is (Z_2)^p, so convolving symbol distributions under field addition becomes
a pointwise product after a length-q Hadamard transform. Messages are kept as
normalized probability vectors; variable nodes combine them in the log domain
so products over many edges neither underflow nor blow up.
"""

from functools import lru_cache

import numpy as np

from .code import ParityCheckMatrix, row_xor
from .errors import ConfigurationError, DomainError
from .ijdd import FAILURE, SUCCESS, BatchResult, DecodeResult
from .modem import distances_sq

_TINY = 1e-300


def channel_log_likelihoods(c, y, N0):
    """Log of P(a | y_j) up to a per-symbol constant, max-shifted to 0."""
    if not N0 > 0:
        raise DomainError(f"N0 must be positive, got {N0}")
    logits = -distances_sq(c, y) / N0
    return logits - logits.max(axis=-1, keepdims=True)


def channel_likelihoods(c, y, N0):
    """Normalized symbol posteriors P(a | y_j) for the AWGN channel, shape ``(..., N, q)``."""
    p = np.exp(channel_log_likelihoods(c, y, N0))
    return p / p.sum(axis=-1, keepdims=True)


def wht(x):
    """Unnormalized Walsh-Hadamard transform along the last axis (length 2^p)."""
    x = np.array(x, dtype=float)
    q = x.shape[-1]
    if q < 1 or q & (q - 1):
        raise ConfigurationError(f"transform length must be a power of two, got {q}")
    lead = x.shape[:-1]
    h = 1
    while h < q:
        x = x.reshape(lead + (q // (2 * h), 2, h))
        a, b = x[..., 0, :], x[..., 1, :]
        x = np.stack((a + b, a - b), axis=-2)
        h *= 2
    return x.reshape(lead + (q,))


@lru_cache(maxsize=None)
def hadamard(q):
    """Sylvester Hadamard matrix of order q; ``x @ hadamard(q)`` equals ``wht(x)``."""
    m = np.ones((1, 1))
    while m.shape[0] < q:
        m = np.block([[m, m], [m, -m]])
    m.setflags(write=False)
    return m


def _permute(x, flat_idx):
    """Per-edge relabeling: ``out[b, e, a] = x[b, e, perm_e[a]]`` given flattened indices."""
    b = x.shape[0]
    return x.reshape(b, -1)[:, flat_idx].reshape(x.shape)


def _normalize(p):
    p = np.maximum(p, 0.0)
    s = p.sum(axis=-1, keepdims=True)
    q = p.shape[-1]
    return np.divide(p, s, out=np.full_like(p, 1.0 / q), where=s > 0)


def _exclusive_products(x, axis):
    """Product of all other entries along ``axis`` via prefix/suffix products."""
    ones = np.ones_like(np.take(x, [0], axis=axis))
    head = np.cumprod(np.concatenate((ones, x), axis=axis), axis=axis)
    rev = np.flip(x, axis=axis)
    tail = np.flip(np.cumprod(np.concatenate((ones, rev), axis=axis), axis=axis), axis=axis)
    n = x.shape[axis]
    idx = np.arange(n)
    return np.take(head, idx, axis=axis) * np.take(tail, idx + 1, axis=axis)


def _check_messages(h, v2c, target):
    """Check-to-variable messages for every edge from variable-to-check messages.

    ``v2c`` has shape ``(B, E, q)``; ``target`` is ``(B, M)`` or None.
    """
    mul = h.gf.mul_table
    q = h.q
    base = (np.arange(h.num_edges) * q)[:, None]
    had = hadamard(q)
    # distribution of h_e * v_j: entry b holds P(v_j = h_e^{-1} b)
    spec = _permute(v2c, (base + mul[h.edge_coef_inv]).ravel()) @ had
    out = np.empty_like(spec)
    for d, idx in h.row_groups:
        out[:, idx] = _exclusive_products(spec[:, idx], axis=2)
    conv = (out @ had) / q
    # h_e v_j = t_i + (sum of the others), so P(v_j = a) = conv[h_e a + t_i]
    if target is None:
        res = _permute(conv, (base + mul[h.edge_coef]).ravel())
    else:
        perm = mul[h.edge_coef][None] ^ target[:, h.edge_row][..., None]
        res = np.take_along_axis(conv, perm, axis=-1)
    return _normalize(res)


def _variable_messages(h, log_prior, c2v):
    """Variable-to-check messages and log posteriors from check-to-variable messages."""
    log_c2v = np.log(np.maximum(c2v, _TINY))
    v2c = np.empty_like(c2v)
    post = np.empty_like(log_prior)
    for cols, idx in h.col_groups:
        incoming = log_c2v[:, idx]                        # (B, G, d, q)
        total = log_prior[:, cols] + incoming.sum(axis=2)
        post[:, cols] = total
        ext = total[:, :, None, :] - incoming
        ext = np.exp(ext - ext.max(axis=-1, keepdims=True))
        v2c[:, idx] = ext / ext.sum(axis=-1, keepdims=True)
    return v2c, post


def check_node_fft(msgs, coefs, q, target=0):
    """Outgoing messages of a single check with incoming ``msgs`` (shape ``(d, q)``).

    The check reads ``sum_k coefs[k] v_k = target``. Runs the same transform
    path as the decoder.
    """
    msgs = np.asarray(msgs, dtype=float)
    d = msgs.shape[0]
    row = ParityCheckMatrix(d, 1, q, np.zeros(d, dtype=np.int64), np.arange(d), coefs)
    t = np.array([[target]], dtype=np.int64) if target else None
    return _check_messages(row, msgs[None], t)[0]


def _log_priors(priors):
    return np.log(np.maximum(np.asarray(priors, dtype=float), _TINY))


def _hard(h, post, target):
    z = np.argmax(post, axis=-1)
    s = row_xor(h, h.gf.mul_table[h.edge_coef, z[:, h.edge_col]])
    if target is not None:
        s = s ^ target
    return z, ~s.any(axis=-1)


def fft_qspa_decode_batch(h, priors, max_iters=50, targets=None, log_domain=False):
    """Flooding FFT-QSPA on a batch of prior vectors of shape ``(B, N, q)``.

    Iteration 0 is the hard decision on the priors alone; each further
    iteration updates all check nodes, then all variable nodes. Frames stop
    individually on a zero (or target) syndrome.
    """
    q = h.q
    if q & (q - 1):
        raise ConfigurationError(f"field size must be a power of two, got {q}")
    lp = np.asarray(priors, dtype=float) if log_domain else _log_priors(priors)
    lp = np.array(lp, ndmin=3)
    if lp.shape[1:] != (h.N, q):
        raise DomainError(f"priors must have shape (B, {h.N}, {q}), got {lp.shape}")
    if max_iters < 0:
        raise ConfigurationError("max_iters must be non-negative")
    b = lp.shape[0]
    if targets is not None:
        targets = np.broadcast_to(np.asarray(targets, dtype=np.int64), (b, h.M))

    success = np.zeros(b, dtype=bool)
    codewords = np.zeros((b, h.N), dtype=np.int64)
    iterations = np.full(b, max_iters, dtype=np.int64)

    active = np.arange(b)
    z, done = _hard(h, lp, targets)
    codewords[:] = z
    success[done] = True
    iterations[done] = 0
    active = active[~done]
    lp_a = lp[active]
    prior_msgs = np.exp(lp_a - lp_a.max(axis=-1, keepdims=True))
    v2c = _normalize(prior_msgs)[:, h.edge_col]

    for it in range(1, max_iters + 1):
        if active.size == 0:
            break
        ta = None if targets is None else targets[active]
        c2v = _check_messages(h, v2c, ta)
        v2c, post = _variable_messages(h, lp_a, c2v)
        z, done = _hard(h, post, ta)
        codewords[active] = z
        fin = active[done]
        success[fin] = True
        iterations[fin] = it
        keep = ~done
        active, lp_a, v2c = active[keep], lp_a[keep], v2c[keep]
    return BatchResult(success, codewords, iterations, None)


def fft_qspa_decode(h, priors, max_iters=50, target=None):
    """Decode one frame from per-symbol priors of shape ``(N, q)``."""
    priors = np.asarray(priors, dtype=float)
    if priors.ndim != 2:
        raise DomainError("priors must have shape (N, q)")
    t = None if target is None else np.asarray(target)[None]
    r = fft_qspa_decode_batch(h, priors[None], max_iters, t)
    status = SUCCESS if r.success[0] else FAILURE
    return DecodeResult(status, r.codewords[0], int(r.iterations[0]))
