"""Sparse parity-check matrices over GF(2^p), alist I/O and systematic encoding."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, ConstructionError, DomainError, ParseError
from .gf import FieldTable, field_for_size


class ParityCheckMatrix:
    """An M x N parity-check matrix stored as row-major edge arrays.

    Edge ``e`` connects check ``edge_row[e]`` to variable ``edge_col[e]`` with
    coefficient ``edge_coef[e]``. Edges are sorted by (row, column), so the
    edges of row ``i`` occupy ``row_ptr[i]:row_ptr[i + 1]``. ``col_edges``
    lists edge indices sorted by (column, row), delimited by ``col_ptr``.
    """

    def __init__(self, n, m, gf, rows, cols, coefs):
        self.N = int(n)
        self.M = int(m)
        self.gf = gf if isinstance(gf, FieldTable) else field_for_size(gf)
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        coefs = np.asarray(coefs, dtype=np.int64)
        if not (rows.shape == cols.shape == coefs.shape and rows.ndim == 1):
            raise ConfigurationError("edge arrays must be 1-D and of equal length")
        if rows.size:
            if rows.min() < 0 or rows.max() >= self.M:
                raise ConfigurationError("row index out of range")
            if cols.min() < 0 or cols.max() >= self.N:
                raise ConfigurationError("column index out of range")
            if coefs.min() < 1 or coefs.max() >= self.gf.q:
                raise ConfigurationError("coefficients must lie in 1..q-1")

        order = np.lexsort((cols, rows))
        self.edge_row = rows[order]
        self.edge_col = cols[order]
        self.edge_coef = coefs[order]
        key = self.edge_row * self.N + self.edge_col
        if np.any(key[1:] == key[:-1]):
            raise ConfigurationError("parallel edge: duplicate (row, column) pair")

        self.row_degree = np.bincount(self.edge_row, minlength=self.M)
        self.col_degree = np.bincount(self.edge_col, minlength=self.N)
        self.row_ptr = np.concatenate(([0], np.cumsum(self.row_degree)))
        self.col_edges = np.lexsort((self.edge_row, self.edge_col))
        self.col_ptr = np.concatenate(([0], np.cumsum(self.col_degree)))
        self.edge_coef_inv = self.gf.inv_table[self.edge_coef]
        for arr in (self.edge_row, self.edge_col, self.edge_coef, self.edge_coef_inv,
                    self.row_degree, self.col_degree, self.row_ptr, self.col_edges,
                    self.col_ptr):
            arr.setflags(write=False)

    @property
    def q(self):
        return self.gf.q

    @property
    def num_edges(self):
        return int(self.edge_row.size)

    @property
    def entries(self):
        """Per row, the ordered ``(column, coefficient)`` pairs."""
        return [list(zip(self.edge_col[a:b].tolist(), self.edge_coef[a:b].tolist()))
                for a, b in zip(self.row_ptr[:-1], self.row_ptr[1:])]

    @property
    def col_adjacency(self):
        """Per column, the ordered ``(row, coefficient)`` pairs."""
        out = []
        for a, b in zip(self.col_ptr[:-1], self.col_ptr[1:]):
            e = self.col_edges[a:b]
            out.append(list(zip(self.edge_row[e].tolist(), self.edge_coef[e].tolist())))
        return out

    @cached_property
    def row_groups(self):
        """Rows grouped by degree: list of ``(degree, edge_index[n_rows, degree])``."""
        return _groups(self.row_degree, self.row_ptr, np.arange(self.num_edges))

    @cached_property
    def col_groups(self):
        """Columns grouped by degree: list of ``(columns, edge_index[n_cols, degree])``."""
        return _groups(self.col_degree, self.col_ptr, self.col_edges, with_members=True)

    def is_regular(self):
        return (np.all(self.col_degree == self.col_degree[0])
                and np.all(self.row_degree == self.row_degree[0]))

    def to_dense(self):
        h = np.zeros((self.M, self.N), dtype=np.int64)
        h[self.edge_row, self.edge_col] = self.edge_coef
        return h

    @classmethod
    def from_dense(cls, h, q):
        h = np.asarray(h, dtype=np.int64)
        rows, cols = np.nonzero(h)
        return cls(h.shape[1], h.shape[0], q, rows, cols, h[rows, cols])

    def __eq__(self, other):
        return (isinstance(other, ParityCheckMatrix)
                and (self.N, self.M, self.q) == (other.N, other.M, other.q)
                and np.array_equal(self.edge_row, other.edge_row)
                and np.array_equal(self.edge_col, other.edge_col)
                and np.array_equal(self.edge_coef, other.edge_coef))

    def __repr__(self):
        return f"ParityCheckMatrix(N={self.N}, M={self.M}, q={self.q}, edges={self.num_edges})"


def _groups(degree, ptr, order, with_members=False):
    out = []
    for d in np.unique(degree):
        if d == 0:
            continue
        members = np.flatnonzero(degree == d)
        idx = order[ptr[members][:, None] + np.arange(d)]
        out.append((members, idx) if with_members else (int(d), idx))
    return out


def syndrome(h, z):
    """Check-sums ``s_i = sum_j h_ij z_j`` over GF(q).

    ``z`` may be a single length-N vector or a batch of shape ``(B, N)``.
    """
    z = np.asarray(z, dtype=np.int64)
    if z.shape[-1] != h.N:
        raise DomainError(f"symbol vector has length {z.shape[-1]}, expected {h.N}")
    if np.any((z < 0) | (z >= h.q)):
        raise DomainError("symbol values must lie in [0, q)")
    prod = h.gf.mul_table[h.edge_coef, z[..., h.edge_col]]
    return row_xor(h, prod)


def row_xor(h, edge_values):
    """XOR-reduce per-edge values over each row (last axis indexes edges)."""
    out = np.zeros(edge_values.shape[:-1] + (h.M,), dtype=np.int64)
    if h.num_edges == 0:
        return out
    nonempty = h.row_degree > 0
    starts = h.row_ptr[:-1][nonempty]
    out[..., nonempty] = np.bitwise_xor.reduceat(edge_values, starts, axis=-1)
    return out


# ---------------------------------------------------------------------------
# alist I/O
# ---------------------------------------------------------------------------

def save_alist(h, path):
    lines = [f"{h.N} {h.M} {h.q}",
             f"{int(h.col_degree.max(initial=0))} {int(h.row_degree.max(initial=0))}",
             " ".join(map(str, h.col_degree.tolist())),
             " ".join(map(str, h.row_degree.tolist()))]
    for col in h.col_adjacency:
        lines.append(" ".join(f"{i + 1} {c}" for i, c in col))
    for row in h.entries:
        lines.append(" ".join(f"{j + 1} {c}" for j, c in row))
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def _ints(line, lineno):
    try:
        return [int(t) for t in line.split()]
    except ValueError:
        raise ParseError("non-integer token", lineno) from None


def load_alist(path):
    """Read the nonbinary alist format (1-based indices, coefficients in 1..q-1)."""
    with open(path) as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    def get(k):
        if k >= len(lines):
            raise ParseError("unexpected end of file", k + 1)
        return _ints(lines[k], k + 1)

    header = get(0)
    if len(header) != 3:
        raise ParseError("header must be 'N M q'", 1)
    n, m, q = header
    if n < 1 or m < 1:
        raise ParseError("N and M must be positive", 1)
    try:
        gf = field_for_size(q)
    except ConfigurationError as exc:
        raise ParseError(str(exc), 1) from None
    maxes = get(1)
    if len(maxes) != 2:
        raise ParseError("second line must be 'max_col_degree max_row_degree'", 2)
    col_deg = get(2)
    if len(col_deg) != n:
        raise ParseError(f"expected {n} column degrees, got {len(col_deg)}", 3)
    row_deg = get(3)
    if len(row_deg) != m:
        raise ParseError(f"expected {m} row degrees, got {len(row_deg)}", 4)
    if maxes != [max(col_deg), max(row_deg)]:
        raise ParseError("maximum degrees do not match the degree lists", 2)

    def block(k, degree, limit, what):
        lineno = k + 1
        vals = get(k)
        if len(vals) % 2:
            raise ParseError(f"{what} block must hold index/coefficient pairs", lineno)
        idx, coef = vals[0::2], vals[1::2]
        if len(idx) != degree:
            raise ParseError(f"{what} degree declared {degree} but {len(idx)} entries listed",
                             lineno)
        for i, c in zip(idx, coef):
            if not 1 <= i <= limit:
                raise ParseError(f"index {i} out of range 1..{limit}", lineno)
            if not 1 <= c < q:
                raise ParseError(f"coefficient {c} outside 1..{q - 1}", lineno)
        if len(set(idx)) != len(idx):
            raise ParseError("duplicate index within block", lineno)
        return idx, coef

    from_cols = set()
    for j in range(n):
        idx, coef = block(4 + j, col_deg[j], m, "column")
        from_cols.update((i - 1, j, c) for i, c in zip(idx, coef))
    from_rows = set()
    for i in range(m):
        idx, coef = block(4 + n + i, row_deg[i], n, "row")
        from_rows.update((i, j - 1, c) for j, c in zip(idx, coef))
    for k in range(4 + n + m, len(lines)):
        if lines[k].strip():
            raise ParseError("trailing content after row blocks", k + 1)
    if from_cols != from_rows:
        bad = min(from_cols ^ from_rows)
        raise ParseError(f"column and row blocks disagree at entry (row {bad[0] + 1}, "
                         f"column {bad[1] + 1})", 5 + n + bad[0])

    triples = sorted(from_rows)
    rows, cols, coefs = (np.array(t, dtype=np.int64).reshape(-1) for t in zip(*triples)) \
        if triples else (np.zeros(0, np.int64),) * 3
    return ParityCheckMatrix(n, m, gf, rows, cols, coefs)


# ---------------------------------------------------------------------------
# random construction
# ---------------------------------------------------------------------------

def random_regular(n, d_v, d_c, q, seed, max_retries=1000):
    """Random (d_v, d_c)-regular matrix with nonzero coefficients uniform on GF(q)*.

    Sockets are matched by a random permutation; parallel edges are then
    removed by random row swaps that keep all degrees fixed.
    """
    if d_v < 2 or d_c < 1:
        raise ConfigurationError("need d_v >= 2 and d_c >= 1")
    if (n * d_v) % d_c:
        raise ConfigurationError(f"N*d_v = {n * d_v} is not divisible by d_c = {d_c}")
    m = n * d_v // d_c
    if d_c > n or d_v > m:
        raise ConfigurationError("degrees exceed matrix dimensions")
    gf = field_for_size(q)
    rng = np.random.default_rng(seed)

    cols = np.repeat(np.arange(n), d_v)
    rows = rng.permutation(np.repeat(np.arange(m), d_c))
    e = rows.size
    for _ in range(max_retries):
        key = rows * n + cols
        _, first, counts = np.unique(key, return_index=True, return_counts=True)
        dup_mask = np.ones(e, dtype=bool)
        dup_mask[first] = False
        dups = np.flatnonzero(dup_mask)
        if dups.size == 0:
            break
        occupied = set(key.tolist())
        for a in dups:
            b = int(rng.integers(e))
            ra, rb = rows[a], rows[b]
            ka_new, kb_new = rb * n + cols[a], ra * n + cols[b]
            if ra == rb or ka_new in occupied or kb_new in occupied:
                continue
            occupied.add(ka_new)
            occupied.add(kb_new)
            rows[a], rows[b] = rb, ra
    else:
        raise ConstructionError(f"could not remove parallel edges after {max_retries} rounds")

    coefs = rng.integers(1, q, size=e)
    return ParityCheckMatrix(n, m, gf, rows, cols, coefs)


# ---------------------------------------------------------------------------
# systematic encoding
# ---------------------------------------------------------------------------

def gf_row_reduce(a, gf):
    """Reduced row echelon form of a dense matrix over GF(q).

    Returns ``(rref, pivot_cols)``; only the first ``len(pivot_cols)`` rows of
    ``rref`` are nonzero.
    """
    a = np.array(a, dtype=np.int64, copy=True)
    m, n = a.shape
    mul, inv = gf.mul_table, gf.inv_table
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = mul[inv[a[r, c]], a[r]]
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        if others.size:
            a[others] ^= mul[a[others, c][:, None], a[r][None, :]]
        pivots.append(c)
        r += 1
    return a, np.array(pivots, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Encoder:
    """Systematic encoder built from the row-reduced parity-check matrix.

    Information symbols occupy ``info_cols``; parity symbol ``parity_cols[k]``
    equals ``sum_f parity_map[k, f] * u_f``.
    """
    h: ParityCheckMatrix
    rank: int
    info_cols: np.ndarray
    parity_cols: np.ndarray
    parity_map: np.ndarray = field(repr=False)

    @property
    def N(self):
        return self.h.N

    @property
    def K(self):
        return int(self.info_cols.size)

    @property
    def rate(self):
        return self.K / self.h.N

    def extract_info(self, v):
        return np.asarray(v)[..., self.info_cols]


def systematic_encoder(h):
    """Encoder with parity on the rightmost independent columns.

    Pivots are searched from the last column backwards, so for H = [P | I]
    the information symbols come first, as in the usual systematic layout.
    """
    rref, rev_pivots = gf_row_reduce(h.to_dense()[:, ::-1], h.gf)
    rank = rev_pivots.size
    rref = rref[:rank, ::-1]
    pivots = h.N - 1 - rev_pivots
    free = np.setdiff1d(np.arange(h.N), pivots)
    # pivot row k reads v_pivot + sum_f rref[k, f] v_f = 0; negation is the identity
    parity_map = rref[:, free]
    for arr in (pivots, free, parity_map):
        arr.setflags(write=False)
    return Encoder(h, rank, free, pivots, parity_map)


def encode(enc, u):
    """Map information symbols (shape ``(K,)`` or ``(B, K)``) to codewords."""
    u = np.asarray(u, dtype=np.int64)
    if u.shape[-1] != enc.K:
        raise DomainError(f"information vector has length {u.shape[-1]}, expected {enc.K}")
    if np.any((u < 0) | (u >= enc.h.q)):
        raise DomainError("symbol values must lie in [0, q)")
    v = np.zeros(u.shape[:-1] + (enc.N,), dtype=np.int64)
    v[..., enc.info_cols] = u
    if enc.rank and enc.K:
        prod = enc.h.gf.mul_table[enc.parity_map, u[..., None, :]]
        v[..., enc.parity_cols] = np.bitwise_xor.reduce(prod, axis=-1)
    return v


def gf_rank(h):
    return int(gf_row_reduce(h.to_dense(), h.gf)[1].size)
