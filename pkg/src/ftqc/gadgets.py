"""Fault-tolerant gadgets: cat-state syndrome extraction, the two-phase
correction cycle, verified logical-zero preparation, the three-block
Toffoli ancilla factory, and the measurement-conditioned Toffoli.

Layout convention: gadgets operate in place on one sparse state that
holds the data block(s) plus a scratch WorkRegion (cat qubits and one
verification qubit).  Scratch qubits are reset before reuse, so a fixed
region serves arbitrarily many rounds.

Syndrome extraction measures one parity-check row by XOR-ing the data
support into a verified cat state rotated to an even-parity
superposition; the cat parity readout is the syndrome bit.  Each cat
qubit touches exactly one data qubit, so any single fault damages at
most one data qubit once inconsistent cat preparations are rejected.
Verification XORs pairs of cat qubits into the scratch qubit; the pairs
are drawn as a random connected path (plus extra random pairs), which
rejects every inconsistent bit pattern outright, not just with high
probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import csscode as cc
from . import statevec as sv
from .errors import DecodeFailure, GadgetAbort, SyndromeFailure
from .f2linalg import rref
from .noise import apply_noisy_gate, noisy_measure

CAT_RETRY_CAP = 10
SYNDROME_ROUND_CAP = 25
DEFAULT_R_CONSISTENT = 3
ZERO_PREP_ATTEMPT_CAP = 10


@dataclass
class CatBlock:
    qubits: tuple[int, ...]
    verified: bool = False
    checks_done: int = 0


@dataclass(frozen=True)
class WorkRegion:
    """Scratch qubits a gadget may reset and reuse."""

    cat: tuple[int, ...]
    aux: int


@dataclass
class SyndromeRecord:
    basis: str
    rounds: list = field(default_factory=list)  # (syndrome array, accepted) pairs
    final: np.ndarray | None = None


@dataclass
class GadgetReport:
    outcomes: list = field(default_factory=list)
    corrections: list = field(default_factory=list)
    retries: int = 0
    logical_error: bool = False
    syndrome_records: list = field(default_factory=list)
    error_events: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "outcomes": [int(b) for b in self.outcomes],
            "corrections": list(self.corrections),
            "retries": self.retries,
            "logical_error": self.logical_error,
            "syndromes": [
                {
                    "basis": rec.basis,
                    "rounds": [
                        {"syndrome": [int(b) for b in syn], "accepted": bool(acc)}
                        for syn, acc in rec.rounds
                    ],
                    "final": None if rec.final is None else [int(b) for b in rec.final],
                }
                for rec in self.syndrome_records
            ],
            "error_events": [
                {
                    "step": ev.step,
                    "location": ev.location,
                    "qubits": list(ev.qubits),
                    "pauli": ev.pauli,
                }
                for ev in self.error_events
            ],
        }


def _reset(state, qubit, model, rng, log):
    """Measure and flip to |0); conditioned on the reported bit."""
    out, _ = noisy_measure(state, qubit, model, rng, log, location=f"reset:q{qubit}")
    if out.bit:
        apply_noisy_gate(
            state, sv.standard_gate("X"), (qubit,), model, rng, log,
            location=f"reset:q{qubit}",
        )


def _prepare_cat_in(state, qubits, model, rng, log):
    """Fresh cat on the given qubits: reset, H on the head, CNOT chain."""
    for q in qubits:
        _reset(state, q, model, rng, log)
    apply_noisy_gate(state, sv.standard_gate("H"), (qubits[0],), model, rng, log)
    gate = sv.standard_gate("CNOT")
    for a, b in zip(qubits, qubits[1:]):
        apply_noisy_gate(state, gate, (a, b), model, rng, log)


def prepare_cat(length: int, model=None, rng=None, log=None):
    """Standalone cat state |0..0> + |1..1> on `length` fresh qubits."""
    if length < 2:
        raise ValueError("cat needs at least 2 qubits")
    state = sv.basis_state(length, 0)
    if rng is None:
        rng = np.random.default_rng()
    _prepare_cat_in(state, tuple(range(length)), model, rng, log)
    return state, CatBlock(qubits=tuple(range(length)))


def _check_pairs(length: int, num_checks: int, rng) -> list[tuple[int, int]]:
    """Random verification pairs; the first length-1 form a random path,
    so any inconsistent bit pattern has a detecting pair."""
    pairs = []
    perm = rng.permutation(length)
    for i in range(min(num_checks, length - 1)):
        pairs.append((int(perm[i]), int(perm[i + 1])))
    while len(pairs) < num_checks:
        i, j = rng.choice(length, size=2, replace=False)
        pairs.append((int(i), int(j)))
    return pairs


def verify_cat(state, cat: CatBlock, num_checks: int | None = None, model=None,
               rng=None, log=None, aux: int | None = None) -> bool:
    """XOR random pairs of cat qubits into a scratch qubit; accept on all
    zeros.  Extends the state by one qubit when no aux is provided."""
    qubits = cat.qubits
    if rng is None:
        rng = np.random.default_rng()
    if num_checks is None:
        num_checks = len(qubits)
    if aux is None:
        state.extend(1)
        aux = state.num_qubits - 1
    gate = sv.standard_gate("CNOT")
    for i, j in _check_pairs(len(qubits), num_checks, rng):
        _reset(state, aux, model, rng, log)
        apply_noisy_gate(state, gate, (qubits[i], aux), model, rng, log,
                         location="cat-check")
        apply_noisy_gate(state, gate, (qubits[j], aux), model, rng, log,
                         location="cat-check")
        out, _ = noisy_measure(state, aux, model, rng, log, location="cat-check")
        cat.checks_done += 1
        if out.bit:
            cat.verified = False
            return False
    cat.verified = True
    return True


def _verified_cat(state, qubits, aux, model, rng, log, num_checks=None,
                  retry_cap=CAT_RETRY_CAP, report=None) -> CatBlock:
    for _ in range(retry_cap):
        _prepare_cat_in(state, qubits, model, rng, log)
        cat = CatBlock(qubits=tuple(qubits))
        if verify_cat(state, cat, num_checks, model, rng, log, aux=aux):
            return cat
        if report is not None:
            report.retries += 1
    raise GadgetAbort(f"cat verification failed {retry_cap} times in a row")


def measure_syndrome_bit(state, block, check_row, work: WorkRegion, model=None,
                         rng=None, log=None, num_checks=None,
                         retry_cap=CAT_RETRY_CAP, report=None) -> int:
    """One syndrome bit of the block for one parity-check row."""
    block = tuple(block)
    support = [block[i] for i in np.flatnonzero(np.asarray(check_row))]
    length = len(support)
    if length < 2:
        raise ValueError("check row must touch at least 2 qubits")
    if length > len(work.cat):
        raise ValueError(f"work region has {len(work.cat)} cat qubits, need {length}")
    cat_qubits = work.cat[:length]
    _verified_cat(state, cat_qubits, work.aux, model, rng, log,
                  num_checks=num_checks, retry_cap=retry_cap, report=report)
    h = sv.standard_gate("H")
    for q in cat_qubits:
        apply_noisy_gate(state, h, (q,), model, rng, log)
    gate = sv.standard_gate("CNOT")
    for data_q, cat_q in zip(support, cat_qubits):
        apply_noisy_gate(state, gate, (data_q, cat_q), model, rng, log,
                         location="syndrome-xor")
    parity = 0
    for q in cat_qubits:
        out, _ = noisy_measure(state, q, model, rng, log, location="syndrome-read")
        parity ^= out.bit
    return parity


def measure_full_syndrome(state, block, parity_check, work: WorkRegion, basis="s",
                          r_consistent=DEFAULT_R_CONSISTENT, cap=SYNDROME_ROUND_CAP,
                          model=None, rng=None, log=None, num_checks=None,
                          report=None) -> SyndromeRecord:
    """Repeat the full syndrome until r_consistent consecutive rounds agree.

    For the rotated basis the caller must already have applied the
    bitwise Hadamard; the measurement circuit itself is basis-blind.
    Failure to converge within `cap` rounds leaves final=None.
    """
    rec = SyndromeRecord(basis=basis)
    streak = 0
    previous = None
    for _ in range(cap):
        syn = np.array(
            [
                measure_syndrome_bit(state, block, row, work, model, rng, log,
                                     num_checks=num_checks, report=report)
                for row in parity_check
            ],
            dtype=np.uint8,
        )
        if previous is not None and np.array_equal(syn, previous):
            streak += 1
        else:
            streak = 1
        previous = syn
        rec.rounds.append((syn, False))
        if streak >= r_consistent:
            rec.final = syn
            for i in range(len(rec.rounds) - r_consistent, len(rec.rounds)):
                rec.rounds[i] = (rec.rounds[i][0], True)
            break
    return rec


def correct_block(code: cc.CssCode, state, block, work: WorkRegion, model=None,
                  rng=None, log=None, r_consistent=DEFAULT_R_CONSISTENT,
                  cap=SYNDROME_ROUND_CAP, num_checks=None) -> GadgetReport:
    """Two-phase correction: fix bit errors, rotate, fix former phase
    errors, rotate back.

    Raises SyndromeFailure when either phase never converges; a decoding
    miss (syndrome outside the table) sets logical_error instead of
    correcting.
    """
    if rng is None:
        rng = np.random.default_rng()
    report = GadgetReport()
    log_start = len(log.events) if log is not None else 0
    h = code.classical.parity_check
    block = tuple(block)

    for phase, pauli_name in (("s", "X"), ("c", "Z")):
        if phase == "c":
            cc.transversal_h(state, block, model, rng, log)
        rec = measure_full_syndrome(state, block, h, work, basis=phase,
                                    r_consistent=r_consistent, cap=cap,
                                    model=model, rng=rng, log=log,
                                    num_checks=num_checks, report=report)
        report.syndrome_records.append(rec)
        if rec.final is None:
            if log is not None:
                report.error_events = log.events[log_start:]
            raise SyndromeFailure(
                f"no consistent {phase}-basis syndrome in {cap} rounds", record=rec
            )
        if rec.final.any():
            try:
                err = code.decode_table.lookup(rec.final)
            except DecodeFailure:
                report.logical_error = True
                err = np.zeros(code.n, dtype=np.uint8)
            x = sv.standard_gate("X")
            for pos in np.flatnonzero(err):
                apply_noisy_gate(state, x, (block[pos],), model, rng, log,
                                 location="correction")
                report.corrections.append(f"{pauli_name}@{int(pos)}")
        if phase == "c":
            cc.transversal_h(state, block, model, rng, log)

    if log is not None:
        report.error_events = log.events[log_start:]
    return report


def _zero_encoder_circuit(code: cc.CssCode, state, block, model, rng, log):
    """Unitary (non-fault-tolerant) encoder for the logical zero: put the
    dual generator's pivots in superposition, then copy each row out."""
    rows, pivots = rref(code.classical.parity_check)
    h = sv.standard_gate("H")
    gate = sv.standard_gate("CNOT")
    for r, pivot in enumerate(pivots):
        apply_noisy_gate(state, h, (block[pivot],), model, rng, log,
                         location="encode")
        for col in np.flatnonzero(rows[r]):
            if col != pivot:
                apply_noisy_gate(state, gate, (block[pivot], block[col]),
                                 model, rng, log, location="encode")


def prepare_logical_zero_ft(code: cc.CssCode, model=None, rng=None, log=None,
                            max_attempts=ZERO_PREP_ATTEMPT_CAP,
                            r_consistent=DEFAULT_R_CONSISTENT,
                            cap=SYNDROME_ROUND_CAP) -> sv.SparseState:
    """Logical zero with verification: encode, demand clean syndromes in
    both bases, and check the logical value on a disposable copy.

    The copy check XORs the block into a second (unverified) zero block
    and reads that block out destructively; the data block survives.
    Returns an n-qubit state.  Raises GadgetAbort when every attempt
    fails verification.
    """
    if rng is None:
        rng = np.random.default_rng()
    n = code.n
    layout = cc.BlockLayout.from_sizes(
        [("data", n), ("copy", n), ("cat", n), ("aux", 1)]
    )
    data, copy = layout.block("data"), layout.block("copy")
    work = WorkRegion(cat=layout.block("cat"), aux=layout.block("aux")[0])
    for _ in range(max_attempts):
        state = sv.basis_state(layout.total_qubits, 0)
        _zero_encoder_circuit(code, state, data, model, rng, log)
        rec_s = measure_full_syndrome(state, data, code.classical.parity_check,
                                      work, "s", r_consistent, cap, model, rng, log)
        if rec_s.final is None or rec_s.final.any():
            continue
        cc.transversal_h(state, data, model, rng, log)
        rec_c = measure_full_syndrome(state, data, code.classical.parity_check,
                                      work, "c", r_consistent, cap, model, rng, log)
        cc.transversal_h(state, data, model, rng, log)
        if rec_c.final is None or rec_c.final.any():
            continue
        _zero_encoder_circuit(code, state, copy, model, rng, log)
        cc.transversal_cnot(state, data, copy, model, rng, log)
        try:
            bit, _ = cc.measure_logical(code, state, copy, model, rng, log)
        except DecodeFailure:
            continue
        if bit != 0:
            continue
        return state.extract(data)
    raise GadgetAbort(f"logical zero failed verification {max_attempts} times")


@dataclass(frozen=True)
class ToffoliAncilla:
    """Three blocks holding the Toffoli resource state
    (|000> + |010> + |100> + |111>)/2 in the logical basis."""

    blocks: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    rounds: int

    def shifted(self, offset: int) -> "ToffoliAncilla":
        """Same blocks re-based by `offset`, for use after tensoring the
        extracted ancilla next to data blocks."""
        return ToffoliAncilla(
            blocks=tuple(tuple(q + offset for q in b) for b in self.blocks),
            rounds=self.rounds,
        )


def toffoli_ancilla_coeffs() -> np.ndarray:
    """Logical coefficients of the Toffoli resource state: uniform over
    (a, b, a AND b) triples, block 0 = bit 0."""
    c = np.zeros(8)
    for a in (0, 1):
        for b in (0, 1):
            c[a | (b << 1) | ((a & b) << 2)] = 0.5
    return c


def prepare_toffoli_ancilla(code: cc.CssCode, rounds=1, model=None, rng=None,
                            log=None, zero_prep="ft",
                            num_checks=None) -> tuple[sv.SparseState, ToffoliAncilla, GadgetReport]:
    """Build the three-block Toffoli resource state.

    Each round entangles an n-qubit verified cat with the blocks through
    the four-qubit conditional phase, rotates and reads the cat out, and
    flips the third block when the odd-parity branch was observed.  On a
    clean resource state later rounds accept with certainty, so extra
    rounds raise confidence under noise.  zero_prep picks the block
    source: "ft" (verified) or "bare" (plain encoder, for experiments).
    """
    if rounds < 1:
        raise ValueError("need at least one round")
    if rng is None:
        rng = np.random.default_rng()
    n = code.n
    layout = cc.BlockLayout.from_sizes(
        [("b0", n), ("b1", n), ("b2", n), ("cat", n), ("aux", 1)]
    )
    blocks = tuple(layout.block(f"b{i}") for i in range(3))
    work = WorkRegion(cat=layout.block("cat"), aux=layout.block("aux")[0])
    report = GadgetReport()
    log_start = len(log.events) if log is not None else 0

    if zero_prep == "ft":
        state = prepare_logical_zero_ft(code, model, rng, log)
        for _ in range(2):
            state = state.tensor(prepare_logical_zero_ft(code, model, rng, log))
    else:
        state = sv.basis_state(3 * n, 0)
        for b in blocks:
            _zero_encoder_circuit(code, state, b, model, rng, log)
    state.extend(n + 1)
    for b in blocks:
        cc.transversal_h(state, b, model, rng, log)

    cat_gate = sv.standard_gate("CAT_PHASE4")
    h = sv.standard_gate("H")
    for _ in range(rounds):
        _verified_cat(state, work.cat, work.aux, model, rng, log,
                      num_checks=num_checks, report=report)
        for i in range(n):
            apply_noisy_gate(
                state, cat_gate,
                (work.cat[i], blocks[0][i], blocks[1][i], blocks[2][i]),
                model, rng, log, location="ancilla-phase",
            )
        for q in work.cat:
            apply_noisy_gate(state, h, (q,), model, rng, log)
        parity = 0
        for q in work.cat:
            out, _ = noisy_measure(state, q, model, rng, log,
                                   location="ancilla-read")
            parity ^= out.bit
        report.outcomes.append(parity)
        if parity:
            cc.logical_pauli(state, blocks[2], "X", model, rng, log)
            report.corrections.append("X@block2")

    if log is not None:
        report.error_events = log.events[log_start:]
    return state, ToffoliAncilla(blocks=blocks, rounds=rounds), report


# Branch corrections for the two-to-three gate, keyed by the two logical
# measurement outcomes.  Derived by tracking the surviving term
# |s_{x+m1}, s_{y+m2}, s_{(x+m1)(y+m2)}> back to |s_x, s_y, s_xy>;
# validated against a brute-force unencoded oracle in the test suite.
TWO_TO_THREE_CORRECTIONS: dict[tuple[int, int], tuple[tuple[str, ...], ...]] = {
    (0, 0): (),
    (0, 1): (("CNOT", 0, 2), ("X", 1)),
    (1, 0): (("CNOT", 1, 2), ("X", 0)),
    (1, 1): (("CNOT", 0, 2), ("CNOT", 1, 2), ("X", 2), ("X", 0), ("X", 1)),
}


def toffoli_two_to_three(code: cc.CssCode, state, q1, q2, ancilla: ToffoliAncilla,
                         model=None, rng=None, log=None) -> GadgetReport:
    """Consume blocks q1, q2; the ancilla blocks become (x, y, x AND y).

    XORs the first two ancilla blocks into the data blocks, measures the
    data blocks out, and applies the branch correction for the observed
    pair of logical outcomes.
    """
    if rng is None:
        rng = np.random.default_rng()
    report = GadgetReport()
    log_start = len(log.events) if log is not None else 0
    a = ancilla.blocks
    cc.transversal_cnot(state, a[0], q1, model, rng, log)
    cc.transversal_cnot(state, a[1], q2, model, rng, log)
    outcomes = []
    for block in (q1, q2):
        try:
            bit, _ = cc.measure_logical(code, state, block, model, rng, log)
        except DecodeFailure as exc:
            report.logical_error = True
            bit = exc.raw_parity
        outcomes.append(bit)
    report.outcomes = outcomes
    for op in TWO_TO_THREE_CORRECTIONS[tuple(outcomes)]:
        if op[0] == "CNOT":
            cc.transversal_cnot(state, a[op[1]], a[op[2]], model, rng, log)
            report.corrections.append(f"CNOT@block{op[1]}->block{op[2]}")
        else:
            cc.logical_pauli(state, a[op[1]], "X", model, rng, log)
            report.corrections.append(f"X@block{op[1]}")
    if log is not None:
        report.error_events = log.events[log_start:]
    return report


def toffoli_full(code: cc.CssCode, state, q1, q2, q3, ancilla: ToffoliAncilla,
                 model=None, rng=None, log=None) -> GadgetReport:
    """Encoded Toffoli on (q1, q2, q3); the result lands on the ancilla
    blocks (in order: q1, q2, target).

    After the two-to-three step the third ancilla block holds x AND y;
    XOR-ing the old target in and reading it out in the rotated basis
    leaves (x, y, (x AND y) xor z) up to a phase fixed by a conditional
    controlled-phase plus logical Z.
    """
    report = toffoli_two_to_three(code, state, q1, q2, ancilla, model, rng, log)
    log_start = len(log.events) if log is not None else 0
    a = ancilla.blocks
    cc.transversal_cnot(state, q3, a[2], model, rng, log)
    cc.transversal_h(state, q3, model, rng, log)
    try:
        bit, _ = cc.measure_logical(code, state, q3, model, rng, log)
    except DecodeFailure as exc:
        report.logical_error = True
        bit = exc.raw_parity
    report.outcomes.append(bit)
    if bit:
        cc.logical_controlled_phase(state, a[0], a[1], model, rng, log)
        cc.logical_pauli(state, a[2], "Z", model, rng, log)
        report.corrections.append("CZ@block0,block1")
        report.corrections.append("Z@block2")
    if log is not None:
        report.error_events.extend(log.events[log_start:])
    return report
