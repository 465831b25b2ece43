"""Linear algebra and block codes over F2.

Vectors and matrices are numpy uint8 arrays with entries in {0, 1}.
Generator matrices are kept in reduced row echelon form, so two codes
are equal iff their generators are array-equal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DecodeFailure, UnsupportedCodeError

# Exhaustive codeword enumeration is capped; 2^24 words is the most we
# are willing to walk for a distance or weight computation.
MAX_ENUM_DIMENSION = 24
_ENUM_CHUNK = 1 << 16

MAX_TABLE_LENGTH = 32
MAX_TABLE_RADIUS = 3


def bitvec(bits) -> np.ndarray:
    """Coerce a string like '0110' or any 0/1 iterable to a uint8 vector."""
    if isinstance(bits, str):
        bits = [int(c) for c in bits.strip()]
    v = np.asarray(bits, dtype=np.uint8)
    if v.ndim != 1 or np.any(v > 1):
        raise ValueError("bit vector entries must be 0 or 1")
    return v


def bitmat(rows) -> np.ndarray:
    """Coerce an iterable of rows (strings or sequences) to a uint8 matrix."""
    m = np.asarray([bitvec(r) for r in rows], dtype=np.uint8)
    if m.ndim != 2:
        raise ValueError("expected a 2-d bit matrix")
    return m


def weight(v) -> int:
    return int(np.count_nonzero(np.asarray(v)))


def rref(m: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form over F2; returns (matrix, pivot columns).

    Zero rows are dropped, so the result has full row rank.
    """
    a = np.array(m, dtype=np.uint8) % 2
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    nrows, ncols = a.shape
    pivots = []
    row = 0
    for col in range(ncols):
        sub = np.nonzero(a[row:, col])[0]
        if sub.size == 0:
            continue
        pr = row + sub[0]
        if pr != row:
            a[[row, pr]] = a[[pr, row]]
        others = np.nonzero(a[:, col])[0]
        for r in others:
            if r != row:
                a[r] ^= a[row]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    return a[:row].copy(), tuple(pivots)


def reduce_vector(v: np.ndarray, basis: np.ndarray, pivots: tuple[int, ...]) -> np.ndarray:
    """Residual of v after elimination against an RREF basis."""
    r = np.array(v, dtype=np.uint8) % 2
    for i, col in enumerate(pivots):
        if r[col]:
            r ^= basis[i]
    return r


def nullspace(m: np.ndarray) -> np.ndarray:
    """RREF basis of {x : m @ x = 0 mod 2}."""
    a, pivots = rref(m)
    ncols = m.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    rows = []
    for fc in free:
        v = np.zeros(ncols, dtype=np.uint8)
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = a[i, fc]
        rows.append(v)
    if not rows:
        return np.zeros((0, ncols), dtype=np.uint8)
    basis, _ = rref(np.array(rows, dtype=np.uint8))
    return basis


def syndrome(parity_check: np.ndarray, word: np.ndarray) -> np.ndarray:
    """parity_check @ word mod 2."""
    h = np.asarray(parity_check, dtype=np.uint8)
    y = np.asarray(word, dtype=np.uint8)
    if h.ndim != 2 or y.shape != (h.shape[1],):
        raise ValueError(f"shape mismatch: H is {h.shape}, word is {y.shape}")
    return (h @ y.astype(np.int64)) % 2


class LinearCode:
    """An [n, k] binary linear code with canonical RREF generator."""

    def __init__(self, generator: np.ndarray, parity_check: np.ndarray | None = None):
        g, _ = rref(generator)
        if g.shape[0] == 0:
            raise ValueError("code must contain a nonzero word")
        self.generator = g
        self.generator.setflags(write=False)
        if parity_check is None:
            parity_check = nullspace(g)
        self.parity_check = np.asarray(parity_check, dtype=np.uint8)
        self.parity_check.setflags(write=False)
        self._weight_stats = None
        self._classification = None

    @classmethod
    def from_generator(cls, rows) -> LinearCode:
        return cls(bitmat(rows))

    @property
    def n(self) -> int:
        return self.generator.shape[1]

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearCode):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.generator, other.generator)

    def __hash__(self):
        return hash((self.n, self.generator.tobytes()))

    def __repr__(self):
        return f"LinearCode(n={self.n}, k={self.k})"

    def contains(self, word) -> bool:
        g, pivots = self.generator, tuple(np.argmax(self.generator, axis=1))
        return not reduce_vector(bitvec(word), g, pivots).any()

    def codewords(self) -> np.ndarray:
        """All 2^k codewords as a (2^k, n) uint8 array (k <= 16 only)."""
        if self.k > 16:
            raise CapacityError(f"refusing to materialize 2^{self.k} codewords")
        msgs = np.arange(1 << self.k, dtype=np.int64)
        bits = ((msgs[:, None] >> np.arange(self.k)) & 1).astype(np.uint8)
        return (bits @ self.generator) % 2

    def _weights(self) -> tuple[int, bool]:
        """(min nonzero weight, all weights divisible by 4), by enumeration."""
        if self._weight_stats is not None:
            return self._weight_stats
        if self.k > MAX_ENUM_DIMENSION:
            raise CapacityError(
                f"k={self.k} exceeds enumeration bound {MAX_ENUM_DIMENSION}"
            )
        gen = self.generator.astype(np.int64)
        best = self.n + 1
        mod4_clean = True
        total = 1 << self.k
        for start in range(0, total, _ENUM_CHUNK):
            msgs = np.arange(start, min(start + _ENUM_CHUNK, total), dtype=np.int64)
            bits = (msgs[:, None] >> np.arange(self.k)) & 1
            words = (bits @ gen) % 2
            w = words.sum(axis=1)
            if start == 0:
                w = w[1:]  # skip the zero word
            if w.size:
                best = min(best, int(w.min()))
                if mod4_clean and np.any(w % 4):
                    mod4_clean = False
        self._weight_stats = (best, mod4_clean)
        return self._weight_stats


@dataclass(frozen=True)
class Classification:
    contains_dual: bool
    self_dual: bool
    doubly_even: bool


def dual(code: LinearCode) -> LinearCode:
    """The dual code; its generator is the parity check of the input."""
    return LinearCode(code.parity_check)


def min_distance(code: LinearCode) -> int:
    """Minimum nonzero codeword weight, by exhaustive enumeration."""
    d, _ = code._weights()
    return d


def classify(code: LinearCode) -> Classification:
    """Dual-containment and weight-divisibility flags for the code."""
    if code._classification is not None:
        return code._classification
    g, pivots = rref(code.generator)
    contains_dual = all(
        not reduce_vector(row, g, pivots).any() for row in code.parity_check
    )
    self_dual = contains_dual and code.n == 2 * code.k
    _, doubly_even = code._weights()
    code._classification = Classification(contains_dual, self_dual, doubly_even)
    return code._classification


def reed_muller(r: int, m: int) -> LinearCode:
    """Reed-Muller code RM(r, m): evaluations of degree-<=r monomials."""
    if not (0 <= r <= m <= 8):
        raise ValueError(f"need 0 <= r <= m <= 8, got r={r}, m={m}")
    npoints = 1 << m
    coords = ((np.arange(npoints)[:, None] >> np.arange(m)) & 1).astype(np.uint8)
    rows = []
    for deg in range(r + 1):
        for subset in itertools.combinations(range(m), deg):
            row = np.ones(npoints, dtype=np.uint8)
            for i in subset:
                row &= coords[:, i]
            rows.append(row)
    return LinearCode(np.array(rows, dtype=np.uint8))


def puncture(code: LinearCode, coord: int | None = None) -> LinearCode:
    """Delete one coordinate (default: the last one)."""
    if coord is None:
        coord = code.n - 1
    if not (0 <= coord < code.n):
        raise ValueError(f"coordinate {coord} out of range for n={code.n}")
    shortened = np.delete(code.generator, coord, axis=1)
    reduced, _ = rref(shortened)
    if reduced.shape[0] < code.k:
        raise UnsupportedCodeError(
            f"puncturing coordinate {coord} drops the rank below k={code.k}"
        )
    return LinearCode(shortened)


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    for x, y in zip(a, b):
        if x != y:
            return x < y
    return False


@dataclass
class DecodeTable:
    """Syndrome -> minimal-weight error map for errors of weight <= t."""

    t: int
    n: int
    entries: dict[bytes, np.ndarray] = field(repr=False)

    def lookup(self, syn: np.ndarray) -> np.ndarray:
        key = np.asarray(syn, dtype=np.uint8).tobytes()
        err = self.entries.get(key)
        if err is None:
            raise DecodeFailure(
                f"syndrome {np.asarray(syn).tolist()} not in table (t={self.t})",
                syndrome=np.asarray(syn, dtype=np.uint8),
            )
        return err


def build_decode_table(code: LinearCode, t: int) -> DecodeTable:
    """Enumerate all errors of weight <= t and map their syndromes.

    Requires d >= 2t + 1 so the map is well defined; ties (which cannot
    occur under that bound) would resolve to the lexicographically
    smallest pattern.
    """
    if code.n > MAX_TABLE_LENGTH or t > MAX_TABLE_RADIUS:
        raise CapacityError(
            f"decode table bounds exceeded (n={code.n} > {MAX_TABLE_LENGTH} "
            f"or t={t} > {MAX_TABLE_RADIUS})"
        )
    if t < 0:
        raise ValueError("t must be nonnegative")
    d = min_distance(code)
    if d < 2 * t + 1:
        raise ValueError(f"d={d} < 2t+1={2 * t + 1}: table would be ambiguous")
    h = code.parity_check
    entries: dict[bytes, np.ndarray] = {}
    for w in range(t + 1):
        for positions in itertools.combinations(range(code.n), w):
            e = np.zeros(code.n, dtype=np.uint8)
            e[list(positions)] = 1
            key = syndrome(h, e).astype(np.uint8).tobytes()
            old = entries.get(key)
            if old is None or (weight(old) == w and _lex_less(e, old)):
                e.setflags(write=False)
                entries[key] = e
    return DecodeTable(t=t, n=code.n, entries=entries)


def load_code_file(path) -> LinearCode:
    """Read the code file format: 'n k' header then k generator rows."""
    with open(path) as fh:
        lines = [ln.split("#", 1)[0].strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError(f"{path}: empty code file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"{path}: header must be 'n k'")
    n, k = int(head[0]), int(head[1])
    rows = lines[1:]
    if len(rows) != k:
        raise ValueError(f"{path}: expected {k} rows, found {len(rows)}")
    mat = bitmat(rows)
    if mat.shape != (k, n):
        raise ValueError(f"{path}: rows are not length {n}")
    code = LinearCode(mat)
    if code.k != k:
        raise ValueError(f"{path}: generator rows are dependent (rank {code.k} < {k})")
    return code


def format_code_file(code: LinearCode, comment: str | None = None) -> str:
    out = []
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    out.append(f"{code.n} {code.k}")
    out.extend("".join(str(int(b)) for b in row) for row in code.generator)
    return "\n".join(out) + "\n"
