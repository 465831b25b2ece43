"""Injectable per-gate Pauli noise and flip-prone measurement.

Each noisy gate draws once against p_gate; on failure a uniformly random
non-identity Pauli pattern lands on the gate's support.  Measurement
noise flips only the reported bit: the state stays projected on the true
outcome.  A disabled model skips every noise draw, so noiseless runs
consume the RNG exactly like their ideal counterparts.

Reproducibility: make_rng(seed, stream) builds independent generators by
seed-sequence splitting; identical (seed, stream) pairs give identical
draw sequences.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import statevec as sv

PAULI_CHARS = "IXYZ"


def make_rng(seed: int, stream=0) -> np.random.Generator:
    """Generator for (seed, stream); streams may be ints or int tuples."""
    if isinstance(stream, (int, np.integer)):
        stream = (int(stream),)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(stream)))


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return make_rng(self.seed, self.stream)


@dataclass(frozen=True)
class ScriptedFault:
    """Deterministic fault for sweep harnesses: fires at one operation.

    pattern is a Pauli string matching the gate arity, or "FLIP" to
    corrupt a measurement record.  Requires an ErrorLog so operations
    are numbered.
    """

    op_index: int
    pattern: str


@dataclass(frozen=True)
class NoiseModel:
    p_gate: float
    p_meas: float | None = None
    enabled: bool = True
    channel: str = "uniform"  # or "independent": per-qubit I/X/Y/Z draws
    p_idle: float = 0.0
    script: ScriptedFault | None = None

    def __post_init__(self):
        if not (0.0 <= self.p_gate <= 1.0):
            raise ValueError(f"p_gate={self.p_gate} outside [0, 1]")
        if self.p_meas is None:
            object.__setattr__(self, "p_meas", self.p_gate)
        if not (0.0 <= self.p_meas <= 1.0):
            raise ValueError(f"p_meas={self.p_meas} outside [0, 1]")
        if self.channel not in ("uniform", "independent"):
            raise ValueError(f"unknown channel {self.channel!r}")


@dataclass(frozen=True)
class ErrorEvent:
    step: int
    location: str
    qubits: tuple[int, ...]
    pauli: str  # Pauli pattern aligned with qubits, or "MEAS_FLIP"


@dataclass
class ErrorLog:
    """Numbered record of noise opportunities and the faults that fired."""

    events: list[ErrorEvent] = field(default_factory=list)
    ops: int = 0
    gate_ops: int = 0
    meas_ops: int = 0
    trace: list | None = None  # optional (index, kind, location, targets) tuples

    def tick(self, kind: str, location: str, targets) -> int:
        index = self.ops
        self.ops += 1
        if kind == "gate":
            self.gate_ops += 1
        else:
            self.meas_ops += 1
        if self.trace is not None:
            self.trace.append((index, kind, location, tuple(targets)))
        return index

    def record(self, step, location, qubits, pauli):
        self.events.append(ErrorEvent(step, location, tuple(qubits), pauli))


def sample_pauli(arity: int, rng) -> str:
    """Uniform non-identity Pauli pattern on `arity` qubits."""
    idx = int(rng.integers(1, 4**arity))
    chars = []
    for _ in range(arity):
        chars.append(PAULI_CHARS[idx & 3])
        idx >>= 2
    return "".join(chars)


def _apply_pauli_pattern(state, pattern: str, targets, log, step, location):
    hit = [(c, q) for c, q in zip(pattern, targets) if c != "I"]
    for c, q in hit:
        sv.apply_gate(state, sv.standard_gate(c), (q,))
    if hit and log is not None:
        log.record(step, location, [q for _, q in hit], "".join(c for c, _ in hit))


def apply_noisy_gate(
    state, gate, targets, model: NoiseModel | None = None, rng=None, log=None,
    location: str | None = None,
):
    """Ideal gate, then (maybe) a Pauli fault on its support."""
    where = location or gate.name
    step = log.tick("gate", where, targets) if log is not None else -1
    sv.apply_gate(state, gate, targets)
    if model is None or not model.enabled:
        return state
    if model.script is not None:
        if step < 0:
            raise ValueError("scripted faults require an ErrorLog")
        if step == model.script.op_index and model.script.pattern != "FLIP":
            pattern = model.script.pattern
            if len(pattern) != len(targets):
                raise ValueError(
                    f"scripted pattern {pattern!r} does not match arity {len(targets)}"
                )
            _apply_pauli_pattern(state, pattern, targets, log, step, where)
        return state
    if model.p_gate > 0 and rng.random() < model.p_gate:
        if model.channel == "uniform":
            pattern = sample_pauli(len(targets), rng)
        else:
            pattern = "".join(PAULI_CHARS[rng.integers(0, 4)] for _ in targets)
        _apply_pauli_pattern(state, pattern, targets, log, step, where)
    return state


def apply_idle_noise(state, qubits, model: NoiseModel | None = None, rng=None, log=None):
    """Optional idle-step noise (off unless p_idle > 0); one draw per qubit."""
    if model is None or not model.enabled or model.p_idle <= 0:
        return state
    for q in qubits:
        step = log.tick("gate", "idle", (q,)) if log is not None else -1
        if rng.random() < model.p_idle:
            _apply_pauli_pattern(state, sample_pauli(1, rng), (q,), log, step, "idle")
    return state


def noisy_measure(
    state, qubit: int, model: NoiseModel | None = None, rng=None, log=None,
    location: str | None = None,
):
    """Measure; the reported bit may flip, the collapse never lies."""
    where = location or f"measure:q{qubit}"
    step = log.tick("measure", where, (qubit,)) if log is not None else -1
    outcome, state = sv.measure(state, qubit, rng)
    if model is None or not model.enabled:
        return outcome, state
    flip = False
    if model.script is not None:
        flip = step == model.script.op_index and model.script.pattern == "FLIP"
    elif model.p_meas > 0:
        flip = rng.random() < model.p_meas
    if flip:
        outcome = sv.MeasurementOutcome(
            qubit=outcome.qubit, bit=outcome.bit ^ 1, probability=outcome.probability
        )
        if log is not None:
            log.record(step, where, (qubit,), "MEAS_FLIP")
    return outcome, state


def export_error_log(events, path) -> None:
    """Write fault events as CSV: step,location,qubits,pauli."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "location", "qubits", "pauli"])
        for ev in events:
            writer.writerow(
                [ev.step, ev.location, ";".join(str(q) for q in ev.qubits), ev.pauli]
            )
