"""CSS codes built from dual-containing classical codes.

A classical [n, k] code C with its dual inside it yields a quantum code
on n qubits encoding 2k - n logical qubits; everything here handles the
2k - n = 1 case.  The logical basis states are coset superpositions

    parity-v state:  sum over the weight-v coset of the dual inside C,
    rotated basis:   sum over all of C with signs by the v.w parity,

and a bitwise Hadamard maps one family onto the other.  Logical X and Z
both act on the all-ones support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import f2linalg as f2
from . import statevec as sv
from .errors import (
    CapacityError,
    DecodeFailure,
    LeakageError,
    UnsupportedCodeError,
)
from .noise import apply_noisy_gate, noisy_measure

LEAKAGE_TOL = 1e-9
MAX_COSET_TABLE_QUBITS = 20


def _coset_keys(generator_rows: np.ndarray, offset: int = 0) -> np.ndarray:
    """All words of the row span (as basis indices), xored with offset."""
    rows = [int(sv.bits_to_index(r)) for r in generator_rows]
    keys = np.zeros(1, dtype=np.int64) + offset
    for r in rows:
        keys = np.concatenate([keys, keys ^ r])
    return keys


@dataclass(frozen=True)
class CssCode:
    """Quantum code data derived from one classical dual-containing code."""

    classical: f2.LinearCode
    decode_table: f2.DecodeTable
    t: int
    logical_support: np.ndarray  # all-ones; both logical X and Z live here
    coset_parity: np.ndarray | None  # index -> 0/1 coset parity, -1 outside C
    phase_sign: int | None  # bitwise diag(1, i) acts as logical diag(1, sign*i)

    @property
    def n(self) -> int:
        return self.classical.n

    @property
    def k_logical(self) -> int:
        return 2 * self.classical.k - self.classical.n


def build_css_code(classical: f2.LinearCode, t: int | None = None) -> CssCode:
    """Validate the classical code and precompute decoding structures."""
    cls = f2.classify(classical)
    if not cls.contains_dual:
        raise UnsupportedCodeError("classical code does not contain its dual")
    k_logical = 2 * classical.k - classical.n
    if k_logical != 1:
        raise UnsupportedCodeError(
            f"code encodes {k_logical} logical qubits; exactly 1 is supported"
        )
    ones = np.ones(classical.n, dtype=np.uint8)
    if not classical.contains(ones):
        raise UnsupportedCodeError("all-ones word is not a codeword")
    d = f2.min_distance(classical)
    if t is None:
        t = (d - 1) // 2
    table = f2.build_decode_table(classical, t)

    coset_parity = None
    if classical.n <= MAX_COSET_TABLE_QUBITS:
        coset_parity = np.full(1 << classical.n, -1, dtype=np.int8)
        words = classical.codewords()
        keys = (words.astype(np.int64) << np.arange(classical.n)).sum(axis=1)
        coset_parity[keys] = words.sum(axis=1) % 2
        coset_parity.setflags(write=False)

    phase_sign = _phase_sign(classical)
    ones.setflags(write=False)
    return CssCode(
        classical=classical,
        decode_table=table,
        t=t,
        logical_support=ones,
        coset_parity=coset_parity,
        phase_sign=phase_sign,
    )


def _phase_sign(classical: f2.LinearCode) -> int | None:
    """Logical sign of bitwise diag(1, i), or None if not uniform.

    The even coset must have weights divisible by 4 and the odd coset a
    single weight residue mod 4 (1 -> +1, 3 -> -1); both hold when the
    code is a punctured doubly-even self-dual code.
    """
    if classical.k > 16:
        return None
    words = classical.codewords()
    w = words.sum(axis=1)
    even = w[w % 2 == 0]
    odd = w[w % 2 == 1]
    if odd.size == 0 or np.any(even % 4):
        return None
    residues = set(int(r) for r in odd % 4)
    if residues == {1}:
        return 1
    if residues == {3}:
        return -1
    return None


@dataclass(frozen=True)
class BlockLayout:
    """Named, disjoint groups of qubit indices inside one state."""

    names: tuple[str, ...]
    indices: tuple[tuple[int, ...], ...]

    @classmethod
    def from_sizes(cls, sizes) -> BlockLayout:
        names, indices = [], []
        at = 0
        for name, size in sizes:
            names.append(name)
            indices.append(tuple(range(at, at + size)))
            at += size
        return cls(tuple(names), tuple(indices))

    def block(self, name: str) -> tuple[int, ...]:
        if name not in self.names:
            raise KeyError(name)
        return self.indices[self.names.index(name)]

    @property
    def total_qubits(self) -> int:
        return max((max(ix) for ix in self.indices if ix), default=-1) + 1


def logical_state(code: CssCode, v: int, support_limit=sv.DEFAULT_SUPPORT_LIMIT) -> sv.SparseState:
    """The parity-v logical basis state on n qubits."""
    if v not in (0, 1):
        raise ValueError("logical value must be 0 or 1")
    offset = sv.bits_to_index(code.logical_support) if v else 0
    keys = _coset_keys(code.classical.parity_check, offset)
    amps = np.full(len(keys), 1.0 / np.sqrt(len(keys)), dtype=np.complex128)
    return sv.SparseState(code.n, keys, amps, support_limit)


def c_state(code: CssCode, v: int, support_limit=sv.DEFAULT_SUPPORT_LIMIT) -> sv.SparseState:
    """The rotated-basis state: all of C with signs (-1)^(v * weight)."""
    if v not in (0, 1):
        raise ValueError("logical value must be 0 or 1")
    words = code.classical.codewords()
    keys = (words.astype(np.int64) << np.arange(code.n)).sum(axis=1)
    amps = np.full(len(keys), 1.0 / np.sqrt(len(keys)), dtype=np.complex128)
    if v:
        amps = amps * np.where(words.sum(axis=1) % 2, -1.0, 1.0)
    return sv.SparseState(code.n, keys, amps, support_limit)


def encode_logical(code: CssCode, alpha: complex, beta: complex) -> sv.SparseState:
    """alpha |0_L> + beta |1_L>; coefficients must be normalized."""
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-9:
        raise ValueError("encode_logical needs |alpha|^2 + |beta|^2 = 1")
    return encode_logical_blocks(code, np.array([alpha, beta], dtype=np.complex128))


def encode_logical_blocks(
    code: CssCode, coeffs, support_limit=sv.DEFAULT_SUPPORT_LIMIT
) -> sv.SparseState:
    """Encode an m-qubit state into m blocks laid out contiguously.

    coeffs[x] multiplies the product of per-block logical basis states
    with block b holding bit b of x (block 0 on qubits 0..n-1).
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    m = int(np.log2(len(coeffs)))
    if 1 << m != len(coeffs):
        raise ValueError("coefficient vector length must be a power of two")
    if abs(np.linalg.norm(coeffs) - 1.0) > 1e-9:
        raise ValueError("coefficients must be normalized")
    n = code.n
    coset0 = _coset_keys(code.classical.parity_check, 0)
    ones = sv.bits_to_index(code.logical_support)
    per_value = [coset0, coset0 ^ ones]
    scale = len(coset0) ** (-m / 2)
    all_keys, all_amps = [], []
    for x in range(1 << m):
        if coeffs[x] == 0:
            continue
        keys = np.zeros(1, dtype=np.int64)
        for b in range(m):
            block_keys = per_value[(x >> b) & 1] << np.int64(b * n)
            keys = (keys[:, None] | block_keys[None, :]).ravel()
        all_keys.append(keys)
        all_amps.append(np.full(len(keys), coeffs[x] * scale, dtype=np.complex128))
    return sv.SparseState(
        m * n, np.concatenate(all_keys), np.concatenate(all_amps), support_limit
    )


def _block_words(keys: np.ndarray, block) -> np.ndarray:
    words = np.zeros(len(keys), dtype=np.int64)
    for j, q in enumerate(block):
        words |= ((keys >> np.int64(q)) & 1) << np.int64(j)
    return words


def decode_blocks(code: CssCode, state: sv.SparseState, blocks, tol=LEAKAGE_TOL) -> np.ndarray:
    """Project m blocks onto the logical basis; unit m-qubit coefficients.

    Every qubit outside the blocks must be in a definite basis state.
    Raises LeakageError when the weight off the logical subspace is at
    least `tol` of the total.
    """
    if code.coset_parity is None:
        raise CapacityError(f"no coset table for n={code.n}; cannot decode states")
    blocks = [tuple(b) for b in blocks]
    m = len(blocks)
    keys, amps = state.keys, state.amps
    total = float((amps.real**2 + amps.imag**2).sum())

    logical_index = np.zeros(len(keys), dtype=np.int64)
    valid = np.ones(len(keys), dtype=bool)
    covered = 0
    for block in blocks:
        for q in block:
            covered |= 1 << q
    for b, block in enumerate(blocks):
        par = code.coset_parity[_block_words(keys, block)]
        valid &= par >= 0
        logical_index |= np.where(par > 0, 1, 0).astype(np.int64) << b

    rest = keys & ~np.int64(covered)
    if np.any(valid):
        rest_vals, rest_counts = np.unique(rest[valid], return_counts=True)
        # weigh rest sectors by amplitude mass, not count
        sector_mass = np.zeros(len(rest_vals))
        inv = np.searchsorted(rest_vals, rest[valid])
        np.add.at(sector_mass, inv, (amps.real**2 + amps.imag**2)[valid])
        dominant = rest_vals[int(np.argmax(sector_mass))]
        valid &= rest == dominant

    coeffs = np.zeros(1 << m, dtype=np.complex128)
    np.add.at(coeffs, logical_index[valid], amps[valid])
    coeffs *= (1 << code.classical.parity_check.shape[0]) ** (-m / 2)

    captured = float((coeffs.real**2 + coeffs.imag**2).sum())
    leakage = 1.0 - captured / total
    if leakage >= tol:
        raise LeakageError(
            f"leakage {leakage:.3e} outside the {m}-block logical subspace",
            leakage=leakage,
        )
    return coeffs / np.sqrt(captured)


def decode_logical(code: CssCode, state: sv.SparseState, block=None, tol=LEAKAGE_TOL):
    """(alpha, beta) of one block's content within the code space."""
    if block is None:
        block = tuple(range(code.n))
    c = decode_blocks(code, state, [block], tol=tol)
    return complex(c[0]), complex(c[1])


def transversal_cnot(state, control_block, target_block, model=None, rng=None, log=None):
    """Bitwise CNOT between two blocks: logical target ^= control."""
    gate = sv.standard_gate("CNOT")
    for c, t in zip(control_block, target_block, strict=True):
        apply_noisy_gate(state, gate, (c, t), model, rng, log)
    return state


def transversal_h(state, block, model=None, rng=None, log=None):
    """Bitwise Hadamard: exchanges the two logical basis families."""
    gate = sv.standard_gate("H")
    for q in block:
        apply_noisy_gate(state, gate, (q,), model, rng, log)
    return state


def transversal_phase(code: CssCode, state, block, dagger=False, model=None, rng=None, log=None):
    """Bitwise diag(1, i) (or its inverse); needs a doubly even dual.

    Acts on the logical qubit as diag(1, code.phase_sign * i), with the
    sign flipped when dagger is set.
    """
    if code.phase_sign is None:
        raise UnsupportedCodeError(
            "bitwise phase is not a logical operation for this code"
        )
    gate = sv.standard_gate("PHASE_I_DG" if dagger else "PHASE_I")
    for q in block:
        apply_noisy_gate(state, gate, (q,), model, rng, log)
    return state


def logical_controlled_phase(state, block_a, block_b, model=None, rng=None, log=None):
    """Bitwise CZ across two blocks: logical (-1)^(a & b)."""
    gate = sv.standard_gate("CZ")
    for a, b in zip(block_a, block_b, strict=True):
        apply_noisy_gate(state, gate, (a, b), model, rng, log)
    return state


def logical_pauli(state, block, which: str, model=None, rng=None, log=None):
    """Logical X or Z: the bitwise Pauli on the all-ones support."""
    if which not in ("X", "Z"):
        raise ValueError("which must be 'X' or 'Z'")
    gate = sv.standard_gate(which)
    for q in block:
        apply_noisy_gate(state, gate, (q,), model, rng, log)
    return state


def measure_logical(code: CssCode, state, block, model=None, rng=None, log=None):
    """Measure every qubit of the block and classically correct.

    Returns (logical bit, state).  The reported word is snapped to the
    nearest codeword via the decode table; its weight parity is the
    logical value.  Raises DecodeFailure when the word is farther than t
    from every codeword (a logical measurement error).
    """
    bits = np.zeros(len(block), dtype=np.uint8)
    for j, q in enumerate(block):
        out, _ = noisy_measure(state, q, model, rng, log)
        bits[j] = out.bit
    syn = f2.syndrome(code.classical.parity_check, bits)
    try:
        err = code.decode_table.lookup(syn)
    except DecodeFailure as exc:
        raise DecodeFailure(
            f"logical readout outside radius t={code.t}",
            syndrome=syn,
            raw_parity=int(bits.sum() % 2),
        ) from exc
    corrected = bits ^ err
    return int(corrected.sum() % 2), state
