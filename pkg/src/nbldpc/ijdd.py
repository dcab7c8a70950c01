"""Iterative joint detection-decoding (IJDD) for nonbinary LDPC-coded QAM.

Each iteration detects hard symbols from the current signal vector, checks
the syndrome, collects the hard extrinsic estimate every check implies for
each of its symbols, takes a plurality vote per symbol and nudges the received
sample according to the vote. Everything here is vectorized over a leading
batch axis so the Monte Carlo harness can decode many frames at once; the
batch and single-frame paths share :func:`_step` and give identical results.
"""

from dataclasses import dataclass, field

import numpy as np

from .code import row_xor
from .errors import ConfigurationError, DomainError
from .modem import detect

SUCCESS = "success"
FAILURE = "failure"


@dataclass(frozen=True)
class IjddParams:
    k_max: int = 50
    r_factor: float = 1.415
    T: int = 3

    def __post_init__(self):
        if int(self.k_max) != self.k_max or self.k_max < 1:
            raise ConfigurationError(f"k_max must be an integer >= 1, got {self.k_max}")
        if not self.r_factor > 0:
            raise ConfigurationError(f"r_factor must be positive, got {self.r_factor}")
        if int(self.T) != self.T or self.T < 1:
            raise ConfigurationError(f"T must be an integer >= 1, got {self.T}")


@dataclass
class DecoderState:
    """Snapshot of one iteration, taken after the votes are tallied."""
    k: int
    y: np.ndarray
    x_hat: np.ndarray
    z: np.ndarray
    s: np.ndarray
    v_hat: np.ndarray = None
    delta_f: np.ndarray = None
    f_max: np.ndarray = None
    votes: np.ndarray = field(default=None, repr=False)
    y_next: np.ndarray = None


@dataclass
class DecodeResult:
    status: str
    codeword: np.ndarray
    iterations_used: int
    final_y: np.ndarray = None
    trajectory: list = None

    @property
    def success(self):
        return self.status == SUCCESS


# ---------------------------------------------------------------------------
# node updates
# ---------------------------------------------------------------------------

def check_node_update(h, z, target=None):
    """Extrinsic estimate sigma for every edge, in the row-major edge order of ``h``.

    ``sigma_e = h_e^{-1} (t_i + s_i + h_e z_j)`` where ``s_i`` is the full
    check-sum of row ``i`` and ``t_i`` the target syndrome (zero for a plain
    code); adding the own term back removes it from the sum in characteristic 2.
    """
    z = np.asarray(z, dtype=np.int64)
    if z.shape[-1] != h.N:
        raise DomainError(f"symbol vector has length {z.shape[-1]}, expected {h.N}")
    mul = h.gf.mul_table
    own = mul[h.edge_coef, z[..., h.edge_col]]
    s = row_xor(h, own)
    if target is not None:
        s = s ^ target
    return mul[h.edge_coef_inv, s[..., h.edge_row] ^ own]


def vote_counts(h, sigma):
    """Occurrence counts f_j(a), shape ``sigma.shape[:-1] + (N, q)``."""
    lead = sigma.shape[:-1]
    b = int(np.prod(lead, dtype=np.int64))
    flat = sigma.reshape(b, -1)
    idx = (np.arange(b)[:, None] * h.N + h.edge_col[None, :]) * h.q + flat
    counts = np.bincount(idx.ravel(), minlength=b * h.N * h.q)
    return counts.reshape(lead + (h.N, h.q))


def summarize_votes(counts):
    """Plurality winner, vote margin and winning count from a count table.

    Ties for the top count go to the smallest label and give a margin of 0.
    """
    v_hat = np.argmax(counts, axis=-1)
    f_max = np.take_along_axis(counts, v_hat[..., None], axis=-1)[..., 0]
    rest = counts.copy()
    np.put_along_axis(rest, v_hat[..., None], -1, axis=-1)
    return v_hat, f_max - rest.max(axis=-1), f_max


def tally_votes(sigma_col, d_v, q=None):
    """Vote on one symbol from its ``d_v`` incoming estimates.

    Returns ``(v_hat, delta_f, f_max)``.
    """
    sigma_col = np.asarray(sigma_col, dtype=np.int64)
    if sigma_col.size != d_v:
        raise DomainError(f"expected {d_v} estimates, got {sigma_col.size}")
    q = q or int(sigma_col.max(initial=0)) + 2
    counts = np.bincount(sigma_col, minlength=q)
    v_hat, delta_f, f_max = summarize_votes(counts)
    return int(v_hat), int(delta_f), int(f_max)


def correction_fraction(delta_f, f_max, d_v, T):
    return np.where(delta_f >= T, f_max, delta_f) / d_v


def correct_signal(y, x_hat, v_hat, delta_f, f_max, c, params, d_v):
    """Move each sample according to its vote; returns the updated samples.

    If the voted point lies within ``r_factor * d_min`` of the sample, the
    sample steps toward the detected point (vote agrees with the detector) or
    along the vector from the detected point to the voted point (vote
    disagrees), by the vote-derived fraction. Otherwise it stays put.
    All arguments broadcast elementwise.
    """
    y = np.asarray(y, dtype=complex)
    x_hat = np.asarray(x_hat, dtype=complex)
    voted = c.points[v_hat]
    r = params.r_factor * c.d_min
    inside = np.abs(voted - y) <= r
    agree = voted == x_hat
    xi = np.where(inside, correction_fraction(delta_f, f_max, d_v, params.T), 0.0)
    step = np.where(agree, x_hat - y, voted - x_hat)
    y_next = y + xi * step
    # a full step onto the detected point lands exactly on it
    return np.where(agree & (xi == 1.0), x_hat, y_next)


# ---------------------------------------------------------------------------
# decoding loop
# ---------------------------------------------------------------------------

def _step(h, c, y, params, target):
    x_hat, z = detect(c, y)
    prod = h.gf.mul_table[h.edge_coef, z[..., h.edge_col]]
    s = row_xor(h, prod)
    if target is not None:
        s = s ^ target
    done = ~s.any(axis=-1)
    return x_hat, z, s, prod, done


def _vote_and_correct(h, c, y, x_hat, s, prod, params):
    sigma = h.gf.mul_table[h.edge_coef_inv, s[..., h.edge_row] ^ prod]
    counts = vote_counts(h, sigma)
    v_hat, delta_f, f_max = summarize_votes(counts)
    y_next = correct_signal(y, x_hat, v_hat, delta_f, f_max, c, params, h.col_degree)
    return y_next, counts, v_hat, delta_f, f_max


def _check_inputs(h, c, y, target):
    if c.q != h.q:
        raise DomainError(f"constellation size {c.q} differs from field size {h.q}")
    if y.shape[-1] != h.N:
        raise DomainError(f"received vector has length {y.shape[-1]}, expected {h.N}")
    if np.any(h.col_degree < 1):
        raise DomainError("every column needs at least one check")
    if target is not None and np.shape(target)[-1] != h.M:
        raise DomainError(f"target syndrome has length {np.shape(target)[-1]}, expected {h.M}")


def iterate(h, c, y, params=IjddParams(), target=None):
    """Yield a :class:`DecoderState` for every iteration of a single-frame decode.

    The last state yielded has ``s`` all-zero (success) or ``k == k_max - 1``.
    """
    y = np.asarray(y, dtype=complex)
    _check_inputs(h, c, y, target)
    target = None if target is None else np.asarray(target, dtype=np.int64)
    for k in range(params.k_max):
        x_hat, z, s, prod, done = _step(h, c, y, params, target)
        state = DecoderState(k, y, x_hat, z, s)
        if done:
            yield state
            return
        y_next, counts, v_hat, delta_f, f_max = _vote_and_correct(h, c, y, x_hat, s, prod,
                                                                 params)
        state.votes, state.v_hat, state.delta_f, state.f_max = counts, v_hat, delta_f, f_max
        state.y_next = y_next
        yield state
        y = y_next


def decode(h, c, y, params=IjddParams(), target=None, record=False):
    """Decode one received vector.

    ``target`` is the syndrome a valid word must produce (all-zero when
    omitted). With ``record=True`` the result carries the list of signal
    vectors y^(0), y^(1), ... seen by the detector, ending with the final one.
    """
    traj = [] if record else None
    state = None
    for state in iterate(h, c, y, params, target):
        if record:
            traj.append(state.y.copy())
    if state.y_next is None:
        return DecodeResult(SUCCESS, state.z, state.k, state.y, traj)
    if record:
        traj.append(state.y_next.copy())
    return DecodeResult(FAILURE, state.z, params.k_max, state.y_next, traj)


@dataclass
class BatchResult:
    success: np.ndarray
    codewords: np.ndarray
    iterations: np.ndarray
    final_y: np.ndarray


def decode_batch(h, c, y, params=IjddParams(), targets=None):
    """Decode a ``(B, N)`` batch; frame ``b`` matches ``decode(h, c, y[b], ...)`` exactly."""
    y = np.array(y, dtype=complex, ndmin=2)
    _check_inputs(h, c, y, targets)
    b = y.shape[0]
    if targets is not None:
        targets = np.broadcast_to(np.asarray(targets, dtype=np.int64), (b, h.M))
    success = np.zeros(b, dtype=bool)
    codewords = np.zeros((b, h.N), dtype=np.int64)
    iterations = np.full(b, params.k_max, dtype=np.int64)
    final_y = y.copy()

    active = np.arange(b)
    ya = y
    for k in range(params.k_max):
        ta = None if targets is None else targets[active]
        x_hat, z, s, prod, done = _step(h, c, ya, params, ta)
        codewords[active] = z
        fin = active[done]
        success[fin] = True
        iterations[fin] = k
        final_y[fin] = ya[done]
        keep = ~done
        active = active[keep]
        if active.size == 0:
            break
        ya, *_ = _vote_and_correct(h, c, ya[keep], x_hat[keep], s[keep], prod[keep], params)
    if active.size:
        final_y[active] = ya
    return BatchResult(success, codewords, iterations, final_y)

