"""Sparse and dense pure-state simulators.

A basis index encodes qubit i as bit i (qubit 0 is the least significant
bit).  The sparse engine stores parallel arrays of basis indices and
amplitudes; the dense engine keeps the full 2^n vector and serves as a
reference implementation for cross-checking.

Gate matrices are indexed so that bit j of the local basis index is the
value of targets[j].  Permutation-with-phase ("monomial") and diagonal
gates take fast paths that never grow the support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError

PRUNE_THRESHOLD = 1e-14
DEFAULT_SUPPORT_LIMIT = 1 << 23
MAX_SPARSE_QUBITS = 48
MAX_DENSE_QUBITS = 14
UNITARITY_TOL = 1e-10
MAX_GATE_ARITY = 4


def bits_to_index(bits) -> int:
    """Basis index of a bit sequence, bits[i] going to qubit i."""
    idx = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        idx |= int(b) << i
    return idx


def index_to_bits(index: int, num_qubits: int) -> np.ndarray:
    return ((index >> np.arange(num_qubits)) & 1).astype(np.uint8)


class GateMatrix:
    """A unitary on `arity` qubits, checked at construction."""

    __slots__ = ("name", "arity", "matrix", "mono_rows", "mono_phases", "is_diagonal")

    def __init__(self, name: str, arity: int, matrix):
        if not (1 <= arity <= MAX_GATE_ARITY):
            raise ValueError(f"arity must be 1..{MAX_GATE_ARITY}, got {arity}")
        m = np.asarray(matrix, dtype=np.complex128)
        dim = 1 << arity
        if m.shape != (dim, dim):
            raise ValueError(f"gate {name}: matrix shape {m.shape} != ({dim}, {dim})")
        err = np.abs(m @ m.conj().T - np.eye(dim)).max()
        if err > UNITARITY_TOL:
            raise ValueError(f"gate {name}: not unitary (deviation {err:.2e})")
        self.name = name
        self.arity = arity
        self.matrix = m
        self.matrix.setflags(write=False)
        # monomial = exactly one nonzero per column: a key permutation + phase
        self.mono_rows = None
        self.mono_phases = None
        nz = np.abs(m) > 0
        if np.all(nz.sum(axis=0) == 1):
            rows = nz.argmax(axis=0)
            self.mono_rows = rows.astype(np.int64)
            self.mono_phases = m[rows, np.arange(dim)]
        self.is_diagonal = self.mono_rows is not None and np.array_equal(
            self.mono_rows, np.arange(dim)
        )

    def __repr__(self):
        return f"GateMatrix({self.name!r}, arity={self.arity})"


def _cnot_matrix():
    # targets = (control, target); local index = control + 2*target
    m = np.zeros((4, 4))
    for j in range(4):
        c, t = j & 1, (j >> 1) & 1
        m[c | ((t ^ c) << 1), j] = 1
    return m


def _toffoli_matrix():
    # targets = (control1, control2, target)
    m = np.zeros((8, 8))
    for j in range(8):
        c1, c2, t = j & 1, (j >> 1) & 1, (j >> 2) & 1
        m[c1 | (c2 << 1) | ((t ^ (c1 & c2)) << 2), j] = 1
    return m


def _cat_phase4_matrix():
    # targets = (a, b, c, d); phase (-1)^(a & ((b & c) ^ d))
    d = np.ones(16)
    for j in range(16):
        a, b, c, e = j & 1, (j >> 1) & 1, (j >> 2) & 1, (j >> 3) & 1
        if a & ((b & c) ^ e):
            d[j] = -1
    return np.diag(d)


_FIXED_GATES: dict[str, GateMatrix] = {}


def _fixed(name, arity, matrix):
    _FIXED_GATES[name] = GateMatrix(name, arity, matrix)


_s = 1 / np.sqrt(2.0)
_fixed("X", 1, [[0, 1], [1, 0]])
_fixed("Y", 1, [[0, -1j], [1j, 0]])
_fixed("Z", 1, [[1, 0], [0, -1]])
_fixed("H", 1, [[_s, _s], [_s, -_s]])
_fixed("PHASE_I", 1, [[1, 0], [0, 1j]])
_fixed("PHASE_I_DG", 1, [[1, 0], [0, -1j]])
_fixed("CNOT", 2, _cnot_matrix())
_fixed("CZ", 2, np.diag([1, 1, 1, -1]))
_fixed("TOFFOLI", 3, _toffoli_matrix())
_fixed("CAT_PHASE4", 4, _cat_phase4_matrix())


def standard_gate(name: str, angle: float | None = None) -> GateMatrix:
    """Named gate from the standard set; RX/RZ take an angle parameter.

    RX(theta): |0> -> cos(t/2)|0> + sin(t/2)|1>, |1> -> -sin(t/2)|0> + cos(t/2)|1>.
    RZ(phi):   |0> -> |0>, |1> -> exp(i phi/2)|1>  (half-angle convention).
    """
    if name in _FIXED_GATES:
        if angle is not None:
            raise ValueError(f"gate {name} takes no angle")
        return _FIXED_GATES[name]
    if name == "RX":
        if angle is None:
            raise ValueError("RX requires an angle")
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return GateMatrix("RX", 1, [[c, -s], [s, c]])
    if name == "RZ":
        if angle is None:
            raise ValueError("RZ requires an angle")
        return GateMatrix("RZ", 1, [[1, 0], [0, np.exp(1j * angle / 2)]])
    raise ValueError(f"unknown gate name {name!r}")


class SparseState:
    """Pure state as parallel (basis index, amplitude) arrays."""

    __slots__ = ("num_qubits", "support_limit", "keys", "amps")

    def __init__(self, num_qubits, keys, amps, support_limit=DEFAULT_SUPPORT_LIMIT):
        if not (1 <= num_qubits <= MAX_SPARSE_QUBITS):
            raise CapacityError(
                f"num_qubits={num_qubits} outside 1..{MAX_SPARSE_QUBITS}"
            )
        self.num_qubits = num_qubits
        self.support_limit = support_limit
        self.keys = np.asarray(keys, dtype=np.int64)
        self.amps = np.asarray(amps, dtype=np.complex128)
        if self.keys.shape != self.amps.shape or self.keys.ndim != 1:
            raise ValueError("keys and amps must be equal-length 1-d arrays")
        if len(self.keys) > support_limit:
            raise CapacityError(
                f"support {len(self.keys)} exceeds limit {support_limit}"
            )

    @property
    def support_size(self) -> int:
        return len(self.keys)

    def norm(self) -> float:
        return float(np.sqrt((self.amps.real**2 + self.amps.imag**2).sum()))

    def amplitudes(self) -> dict[int, complex]:
        return {int(k): complex(a) for k, a in zip(self.keys, self.amps)}

    def amplitude(self, index) -> complex:
        hits = np.nonzero(self.keys == int(index))[0]
        return complex(self.amps[hits[0]]) if hits.size else 0j

    def copy(self) -> SparseState:
        return SparseState(
            self.num_qubits, self.keys.copy(), self.amps.copy(), self.support_limit
        )

    def tensor(self, other: SparseState) -> SparseState:
        """self on the low qubits, other shifted above them."""
        n = self.num_qubits + other.num_qubits
        attempted = self.support_size * other.support_size
        if attempted > self.support_limit:
            raise CapacityError(
                f"tensor support {attempted} exceeds limit {self.support_limit}"
            )
        keys = (self.keys[None, :] | (other.keys[:, None] << self.num_qubits)).ravel()
        amps = (self.amps[None, :] * other.amps[:, None]).ravel()
        return SparseState(n, keys, amps, self.support_limit)

    def extend(self, extra: int) -> SparseState:
        """Append `extra` fresh |0> qubits above the existing ones (in place)."""
        if self.num_qubits + extra > MAX_SPARSE_QUBITS:
            raise CapacityError(
                f"{self.num_qubits}+{extra} qubits exceeds {MAX_SPARSE_QUBITS}"
            )
        self.num_qubits += extra
        return self

    def extract(self, qubits) -> SparseState:
        """New state over `qubits` (in order); every other qubit must be
        in a definite basis state, or ValueError is raised."""
        qubits = list(qubits)
        keep_mask = 0
        for q in qubits:
            keep_mask |= 1 << q
        rest = self.keys & ~np.int64(keep_mask)
        if len(rest) and np.any(rest != rest[0]):
            raise ValueError("remaining qubits are not in a definite basis state")
        new_keys = np.zeros_like(self.keys)
        for j, q in enumerate(qubits):
            new_keys |= ((self.keys >> np.int64(q)) & 1) << np.int64(j)
        return SparseState(len(qubits), new_keys, self.amps.copy(), self.support_limit)


@dataclass(frozen=True)
class MeasurementOutcome:
    qubit: int
    bit: int
    probability: float


def basis_state(
    num_qubits: int, bits=0, support_limit=DEFAULT_SUPPORT_LIMIT
) -> SparseState:
    """|bits> as a sparse state; bits may be an index or a bit sequence."""
    idx = bits if isinstance(bits, (int, np.integer)) else bits_to_index(bits)
    if not (0 <= idx < (1 << num_qubits)):
        raise ValueError(f"basis index {idx} out of range for {num_qubits} qubits")
    return SparseState(num_qubits, [idx], [1.0 + 0j], support_limit)


def from_amplitudes(
    num_qubits: int, mapping: dict[int, complex], support_limit=DEFAULT_SUPPORT_LIMIT
) -> SparseState:
    keys = np.fromiter(mapping.keys(), dtype=np.int64, count=len(mapping))
    amps = np.fromiter(mapping.values(), dtype=np.complex128, count=len(mapping))
    keep = np.abs(amps) > PRUNE_THRESHOLD
    return SparseState(num_qubits, keys[keep], amps[keep], support_limit)


def _check_targets(state_qubits: int, gate: GateMatrix, targets) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(targets) != gate.arity:
        raise ValueError(f"gate {gate.name} needs {gate.arity} targets, got {targets}")
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")
    for t in targets:
        if not (0 <= t < state_qubits):
            raise ValueError(f"target {t} out of range for {state_qubits} qubits")
    return targets


def _gather_local(keys: np.ndarray, targets) -> np.ndarray:
    loc = np.zeros(len(keys), dtype=np.int64)
    for j, t in enumerate(targets):
        loc |= ((keys >> np.int64(t)) & 1) << np.int64(j)
    return loc


def _scatter_const(local: int, targets) -> int:
    out = 0
    for j, t in enumerate(targets):
        out |= ((local >> j) & 1) << t
    return out


def apply_gate(state: SparseState, gate: GateMatrix, targets) -> SparseState:
    """Apply the gate in place and return the state."""
    targets = _check_targets(state.num_qubits, gate, targets)
    keys, amps = state.keys, state.amps
    if len(keys) == 0:
        return state
    loc = _gather_local(keys, targets)
    if gate.is_diagonal:
        state.amps = amps * gate.mono_phases[loc]
        return state
    mask = np.int64(_scatter_const((1 << gate.arity) - 1, targets))
    if gate.mono_rows is not None:
        new_loc = gate.mono_rows[loc]
        new_keys = keys & ~mask
        for j, t in enumerate(targets):
            new_keys |= ((new_loc >> np.int64(j)) & 1) << np.int64(t)
        state.keys = new_keys
        phases = gate.mono_phases[loc]
        state.amps = amps if np.all(phases == 1.0) else amps * phases
        return state
    # general path: scatter every output row, then coalesce duplicates
    dim = 1 << gate.arity
    base = keys & ~mask
    attempted = len(keys) * dim
    if attempted > state.support_limit:
        raise CapacityError(
            f"gate expansion to {attempted} entries exceeds limit "
            f"{state.support_limit}"
        )
    piece_keys = np.empty(attempted, dtype=np.int64)
    piece_amps = np.empty(attempted, dtype=np.complex128)
    size = len(keys)
    for out in range(dim):
        sl = slice(out * size, (out + 1) * size)
        piece_keys[sl] = base | np.int64(_scatter_const(out, targets))
        piece_amps[sl] = gate.matrix[out, loc] * amps
    new_keys, inverse = np.unique(piece_keys, return_inverse=True)
    acc = np.zeros(len(new_keys), dtype=np.complex128)
    np.add.at(acc, inverse, piece_amps)
    keep = np.abs(acc) > PRUNE_THRESHOLD
    state.keys = new_keys[keep]
    state.amps = acc[keep]
    return state


def measure(state: SparseState, qubit: int, rng) -> tuple[MeasurementOutcome, SparseState]:
    """Projective measurement of one qubit; collapses in place."""
    if not (0 <= qubit < state.num_qubits):
        raise ValueError(f"qubit {qubit} out of range")
    bits = (state.keys >> np.int64(qubit)) & 1
    w = state.amps.real**2 + state.amps.imag**2
    total = w.sum()
    p1 = float(w[bits == 1].sum() / total)
    bit = 1 if rng.random() < p1 else 0
    keep = bits == bit
    kept_norm = np.sqrt(w[keep].sum())
    state.keys = state.keys[keep]
    state.amps = state.amps[keep] / kept_norm
    prob = p1 if bit else 1.0 - p1
    return MeasurementOutcome(qubit=qubit, bit=bit, probability=prob), state


def postselect(state: SparseState, qubit: int, bit: int) -> float:
    """Force one measurement branch; returns its probability (in place)."""
    bits = (state.keys >> np.int64(qubit)) & 1
    w = state.amps.real**2 + state.amps.imag**2
    total = w.sum()
    keep = bits == bit
    prob = float(w[keep].sum() / total)
    if prob < 1e-12:
        raise ValueError(f"branch qubit {qubit}={bit} has probability {prob}")
    state.keys = state.keys[keep]
    state.amps = state.amps[keep] / np.sqrt(w[keep].sum())
    return prob


def _overlap(a: SparseState, b: SparseState) -> complex:
    ia, ib = np.argsort(a.keys), np.argsort(b.keys)
    common, ca, cb = np.intersect1d(
        a.keys[ia], b.keys[ib], assume_unique=True, return_indices=True
    )
    if common.size == 0:
        return 0j
    return complex(np.vdot(a.amps[ia][ca], b.amps[ib][cb]))


def fidelity(a, b) -> float:
    """|<a|b>|^2 for normalized a, b; insensitive to global phase."""
    a = sparsify(a) if isinstance(a, DenseState) else a
    b = sparsify(b) if isinstance(b, DenseState) else b
    if a.num_qubits != b.num_qubits:
        raise ValueError("states have different qubit counts")
    na, nb = a.norm(), b.norm()
    return abs(_overlap(a, b)) ** 2 / (na * nb) ** 2


def dump_lines(state: SparseState) -> list[str]:
    """Support entries as 'bitstring re im', sorted by bitstring.

    The bitstring prints qubit num_qubits-1 first (plain binary of the
    basis index), so sorting by string equals sorting by index.
    """
    order = np.argsort(state.keys)
    n = state.num_qubits
    return [
        f"{format(int(k), f'0{n}b')} {a.real:.12g} {a.imag:.12g}"
        for k, a in zip(state.keys[order], state.amps[order])
    ]


class DenseState:
    """Full 2^n state vector; the reference engine for small systems."""

    __slots__ = ("num_qubits", "vector")

    def __init__(self, num_qubits: int, vector):
        if not (1 <= num_qubits <= MAX_DENSE_QUBITS):
            raise CapacityError(
                f"num_qubits={num_qubits} outside 1..{MAX_DENSE_QUBITS}"
            )
        v = np.asarray(vector, dtype=np.complex128)
        if v.shape != (1 << num_qubits,):
            raise ValueError(f"vector must have length {1 << num_qubits}")
        self.num_qubits = num_qubits
        self.vector = v

    @classmethod
    def basis(cls, num_qubits: int, index: int = 0) -> DenseState:
        v = np.zeros(1 << num_qubits, dtype=np.complex128)
        v[index] = 1.0
        return cls(num_qubits, v)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def copy(self) -> DenseState:
        return DenseState(self.num_qubits, self.vector.copy())


def dense_apply_gate(state: DenseState, gate: GateMatrix, targets) -> DenseState:
    targets = _check_targets(state.num_qubits, gate, targets)
    dim = 1 << gate.arity
    idx = np.arange(1 << state.num_qubits, dtype=np.int64)
    loc = _gather_local(idx, targets)
    base = idx[loc == 0]
    gathered = [state.vector[base | _scatter_const(j, targets)] for j in range(dim)]
    out = np.empty_like(state.vector)
    for i in range(dim):
        acc = np.zeros(len(base), dtype=np.complex128)
        for j in range(dim):
            if gate.matrix[i, j] != 0:
                acc += gate.matrix[i, j] * gathered[j]
        out[base | _scatter_const(i, targets)] = acc
    state.vector = out
    return state


def dense_measure(state: DenseState, qubit: int, rng) -> tuple[MeasurementOutcome, DenseState]:
    idx = np.arange(1 << state.num_qubits, dtype=np.int64)
    one = ((idx >> qubit) & 1) == 1
    w = np.abs(state.vector) ** 2
    total = w.sum()
    p1 = float(w[one].sum() / total)
    bit = 1 if rng.random() < p1 else 0
    keep = one if bit else ~one
    out = np.zeros_like(state.vector)
    out[keep] = state.vector[keep]
    state.vector = out / np.sqrt(w[keep].sum())
    prob = p1 if bit else 1.0 - p1
    return MeasurementOutcome(qubit=qubit, bit=bit, probability=prob), state


def densify(state: SparseState) -> DenseState:
    if state.num_qubits > MAX_DENSE_QUBITS:
        raise CapacityError(
            f"{state.num_qubits} qubits exceeds dense cap {MAX_DENSE_QUBITS}"
        )
    v = np.zeros(1 << state.num_qubits, dtype=np.complex128)
    v[state.keys] = state.amps
    return DenseState(state.num_qubits, v)


def sparsify(state: DenseState, support_limit=DEFAULT_SUPPORT_LIMIT) -> SparseState:
    keys = np.nonzero(np.abs(state.vector) > PRUNE_THRESHOLD)[0].astype(np.int64)
    return SparseState(state.num_qubits, keys, state.vector[keys], support_limit)
