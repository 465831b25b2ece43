"""Monte Carlo harness: logical-vs-physical error rate sweeps, paired
unencoded baselines, scaling fits, and CSV/JSON export.

Trials are independent with per-trial RNG streams derived from the
master seed, so aggregate counts do not depend on execution order; the
loop here is serial.  Failure counts are data, not exceptions: gadget
aborts, decode failures, and leakage all increment the failure tally.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import csscode as cc
from . import f2linalg as f2
from . import gadgets as gd
from . import statevec as sv
from .errors import DecodeFailure, GadgetAbort, LeakageError
from .noise import ErrorLog, NoiseModel, make_rng

WILSON_Z99 = 2.5758293035489004  # two-sided 99% normal quantile
DEFAULT_TRIALS = 10_000
FIDELITY_FAIL_BELOW = 0.99

EXPERIMENT_KINDS = ("memory", "transversal-gate", "toffoli", "ancilla")


@dataclass
class ExperimentConfig:
    kind: str
    code_file: str = "steane"
    p_values: tuple[float, ...] = (1e-3,)
    rounds: int = 1
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    r_consistent: int = gd.DEFAULT_R_CONSISTENT
    out: str | None = None

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        self.p_values = tuple(float(p) for p in self.p_values)
        for p in self.p_values:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"p={p} outside [0, 1]")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        raw = json.loads(Path(path).read_text())
        return cls(**raw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p_values"] = list(self.p_values)
        return d


@dataclass
class PointResult:
    p: float
    trials: int
    failures: int
    rate: float
    ci_lo: float
    ci_hi: float
    retries_mean: float
    seconds: float
    gate_ops_mean: float = 0.0
    baseline_failures: int | None = None
    baseline_rate: float | None = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    points: list[PointResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "points": [asdict(pt) for pt in self.points],
        }


def wilson_interval(failures: int, trials: int, z: float = WILSON_Z99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * np.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def load_code(code_file: str) -> cc.CssCode:
    if code_file == "steane":
        classical = f2.puncture(f2.reed_muller(1, 3))
    else:
        classical = f2.load_code_file(code_file)
    return cc.build_css_code(classical)


def _memory_trial(code, config, p, stream_rng):
    """One encoded memory trial.  Returns (failed, retries, gate_ops)."""
    n = code.n
    layout = cc.BlockLayout.from_sizes([("data", n), ("cat", n), ("aux", 1)])
    data = layout.block("data")
    work = gd.WorkRegion(cat=layout.block("cat"), aux=layout.block("aux")[0])
    model = NoiseModel(p_gate=p)
    log = ErrorLog()
    v = int(stream_rng.integers(2))
    state = cc.logical_state(code, v)
    state = state.tensor(sv.basis_state(n + 1, 0))
    retries = 0
    try:
        for _ in range(config.rounds):
            rep = gd.correct_block(code, state, data, work, model=model,
                                   rng=stream_rng, log=log,
                                   r_consistent=config.r_consistent)
            retries += rep.retries
    except GadgetAbort:
        return True, retries, log.gate_ops
    noisy_gate_ops = log.gate_ops
    # a final clean sweep separates accumulated logical damage from
    # trailing physical errors the next cycle would have caught
    try:
        gd.correct_block(code, state, data, work, model=None, rng=stream_rng,
                         r_consistent=config.r_consistent)
        alpha, beta = cc.decode_logical(code, state, block=data)
    except (GadgetAbort, DecodeFailure, LeakageError):
        return True, retries, noisy_gate_ops
    decoded = 1 if abs(beta) > abs(alpha) else 0
    return decoded != v, retries, noisy_gate_ops


def _baseline_trial(p, gate_ops, stream_rng):
    """Unencoded single-qubit memory under the same count of per-gate
    noise opportunities; bit flips (X or Y draws) of odd parity lose."""
    if gate_ops == 0 or p == 0.0:
        return False
    hits = stream_rng.random(gate_ops) < p
    k = int(hits.sum())
    if k == 0:
        return False
    flips = (stream_rng.integers(1, 4, size=k) <= 2).sum()  # X or Y
    return bool(flips & 1)


def memory_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Encoded memory failure rate vs p with a paired unencoded baseline.

    Per trial: prepare a random logical basis state, run `rounds` noisy
    correction cycles, one clean cycle, decode; failure = decoded value
    differs or the block left the code space.  The baseline replays the
    trial's gate-noise budget against a bare qubit.
    """
    code = load_code(config.code_file)
    result = ExperimentResult(config=config)
    for p_idx, p in enumerate(config.p_values):
        t0 = time.perf_counter()
        failures = 0
        base_failures = 0
        retries_total = 0
        gate_ops_total = 0
        for trial in range(config.trials):
            rng = make_rng(config.seed, (p_idx, trial, 0))
            failed, retries, gate_ops = _memory_trial(code, config, p, rng)
            failures += failed
            retries_total += retries
            gate_ops_total += gate_ops
            base_rng = make_rng(config.seed, (p_idx, trial, 1))
            base_failures += _baseline_trial(p, gate_ops, base_rng)
        lo, hi = wilson_interval(failures, config.trials)
        result.points.append(PointResult(
            p=p, trials=config.trials, failures=failures,
            rate=failures / config.trials, ci_lo=lo, ci_hi=hi,
            retries_mean=retries_total / config.trials,
            seconds=time.perf_counter() - t0,
            gate_ops_mean=gate_ops_total / config.trials,
            baseline_failures=base_failures,
            baseline_rate=base_failures / config.trials,
        ))
    return result


_TRANSVERSAL_GATES = ("H", "PHASE", "CNOT", "CZ", "X", "Z")


def _gate_oracle(name: str, phase_sign: int) -> sv.GateMatrix:
    if name == "PHASE":
        return sv.GateMatrix("PHASE_ORACLE", 1, np.diag([1.0, 1.0j * phase_sign]))
    return sv.standard_gate(name)


def _oracle_coeffs(coeffs, gate: sv.GateMatrix, num_logical: int):
    ref = sv.DenseState(num_logical, np.array(coeffs, dtype=complex))
    sv.dense_apply_gate(ref, gate, tuple(range(gate.arity)))
    return ref.vector


def _random_logical_coeffs(num_logical, rng):
    raw = rng.normal(size=2 ** num_logical) + 1j * rng.normal(size=2 ** num_logical)
    return raw / np.linalg.norm(raw)


def _transversal_trial(code, config, p, rng):
    n = code.n
    model = NoiseModel(p_gate=p)
    log = ErrorLog()
    name = _TRANSVERSAL_GATES[rng.integers(len(_TRANSVERSAL_GATES))]
    m = 2 if name in ("CNOT", "CZ") else 1
    layout = cc.BlockLayout.from_sizes(
        [(f"b{i}", n) for i in range(m)] + [("cat", n), ("aux", 1)]
    )
    blocks = [layout.block(f"b{i}") for i in range(m)]
    work = gd.WorkRegion(cat=layout.block("cat"), aux=layout.block("aux")[0])
    coeffs = _random_logical_coeffs(m, rng)
    state = cc.encode_logical_blocks(code, coeffs)
    state.extend(n + 1)
    retries = 0
    try:
        if name == "H":
            cc.transversal_h(state, blocks[0], model, rng, log)
        elif name == "PHASE":
            cc.transversal_phase(code, state, blocks[0], model=model, rng=rng, log=log)
        elif name == "CNOT":
            cc.transversal_cnot(state, blocks[0], blocks[1], model, rng, log)
        elif name == "CZ":
            cc.logical_controlled_phase(state, blocks[0], blocks[1], model, rng, log)
        else:
            cc.logical_pauli(state, blocks[0], name, model, rng, log)
        for b in blocks:
            rep = gd.correct_block(code, state, b, work, model=model, rng=rng,
                                   log=log, r_consistent=config.r_consistent)
            retries += rep.retries
        got = cc.decode_blocks(code, state, blocks)
    except (GadgetAbort, DecodeFailure, LeakageError):
        return True, retries, log.gate_ops
    want = _oracle_coeffs(coeffs, _gate_oracle(name, code.phase_sign or 1), m)
    fail = abs(np.vdot(want, got)) ** 2 < FIDELITY_FAIL_BELOW
    return fail, retries, log.gate_ops


def _toffoli_trial(code, config, p, rng):
    n = code.n
    model = NoiseModel(p_gate=p)
    log = ErrorLog()
    bits = int(rng.integers(8))
    retries = 0
    try:
        anc_state, anc, rep = gd.prepare_toffoli_ancilla(
            code, rounds=config.rounds, model=model, rng=rng, log=log)
        retries += rep.retries
        anc_state = anc_state.extract([q for b in anc.blocks for q in b])
    except (GadgetAbort, DecodeFailure, LeakageError):
        return True, retries, log.gate_ops
    state = cc.encode_logical_blocks(code, np.eye(8)[bits])
    state = state.tensor(anc_state)
    anc = anc.shifted(3 * n)
    q = [tuple(range(i * n, (i + 1) * n)) for i in range(3)]
    try:
        rep = gd.toffoli_full(code, state, q[0], q[1], q[2], anc, model=model,
                              rng=rng, log=log)
        if rep.logical_error:
            return True, retries, log.gate_ops
        # consumed data blocks are definite after their logical readout,
        # so the survivors fit alongside a fresh work region
        state = state.extract([qb for b in anc.blocks for qb in b])
        state.extend(n + 1)
        layout = cc.BlockLayout.from_sizes(
            [("pad", 3 * n), ("cat", n), ("aux", 1)])
        work = gd.WorkRegion(cat=layout.block("cat"), aux=layout.block("aux")[0])
        out_blocks = [tuple(range(i * n, (i + 1) * n)) for i in range(3)]
        for b in out_blocks:
            crep = gd.correct_block(code, state, b, work, model=model, rng=rng,
                                    log=log, r_consistent=config.r_consistent)
            retries += crep.retries
        got = cc.decode_blocks(code, state, out_blocks)
    except (GadgetAbort, DecodeFailure, LeakageError):
        return True, retries, log.gate_ops
    x, y, z = bits & 1, (bits >> 1) & 1, bits >> 2
    want_idx = x | (y << 1) | ((z ^ (x & y)) << 2)
    fail = abs(got[want_idx]) ** 2 < FIDELITY_FAIL_BELOW
    return fail, retries, log.gate_ops


def _ancilla_trial(code, config, p, rng):
    n = code.n
    model = NoiseModel(p_gate=p)
    log = ErrorLog()
    retries = 0
    try:
        state, anc, rep = gd.prepare_toffoli_ancilla(
            code, rounds=config.rounds, model=model, rng=rng, log=log)
        retries += rep.retries
        layout = cc.BlockLayout.from_sizes(
            [("pad", 3 * n), ("cat", n), ("aux", 1)])
        work = gd.WorkRegion(cat=layout.block("cat"), aux=layout.block("aux")[0])
        for b in anc.blocks:
            crep = gd.correct_block(code, state, b, work, model=model, rng=rng,
                                    log=log, r_consistent=config.r_consistent)
            retries += crep.retries
        got = cc.decode_blocks(code, state, anc.blocks)
    except (GadgetAbort, DecodeFailure, LeakageError):
        return True, retries, log.gate_ops
    want = gd.toffoli_ancilla_coeffs()
    fail = abs(np.vdot(want, got)) ** 2 < FIDELITY_FAIL_BELOW
    return fail, retries, log.gate_ops


_GADGET_TRIALS = {
    "transversal-gate": _transversal_trial,
    "toffoli": _toffoli_trial,
    "ancilla": _ancilla_trial,
}


def gadget_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Failure rate of a noisy gadget followed by one correction cycle,
    judged against the unencoded oracle of the same operation."""
    if config.kind not in _GADGET_TRIALS:
        raise ValueError(f"gadget_experiment cannot run kind {config.kind!r}")
    trial_fn = _GADGET_TRIALS[config.kind]
    code = load_code(config.code_file)
    result = ExperimentResult(config=config)
    for p_idx, p in enumerate(config.p_values):
        t0 = time.perf_counter()
        failures = 0
        retries_total = 0
        gate_ops_total = 0
        for trial in range(config.trials):
            rng = make_rng(config.seed, (p_idx, trial, 0))
            failed, retries, gate_ops = trial_fn(code, config, p, rng)
            failures += failed
            retries_total += retries
            gate_ops_total += gate_ops
        lo, hi = wilson_interval(failures, config.trials)
        result.points.append(PointResult(
            p=p, trials=config.trials, failures=failures,
            rate=failures / config.trials, ci_lo=lo, ci_hi=hi,
            retries_mean=retries_total / config.trials,
            seconds=time.perf_counter() - t0,
            gate_ops_mean=gate_ops_total / config.trials,
        ))
    return result


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    if config.kind == "memory":
        return memory_experiment(config)
    return gadget_experiment(config)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    stderr: float
    intercept: float
    used_p: tuple[float, ...]
    excluded_p: tuple[float, ...]


def fit_scaling(result: ExperimentResult) -> ScalingFit:
    """Least-squares slope of log(rate) against log(p).

    Zero-failure points carry no log-rate and are excluded; fewer than
    two informative points is an error.
    """
    used = [(pt.p, pt.rate) for pt in result.points if pt.failures > 0 and pt.p > 0]
    excluded = tuple(pt.p for pt in result.points
                     if pt.failures == 0 or pt.p == 0)
    if len(used) < 2:
        raise ValueError(f"need at least 2 nonzero-failure points, have {len(used)}")
    x = np.log(np.array([p for p, _ in used]))
    y = np.log(np.array([r for _, r in used]))
    xbar, ybar = x.mean(), y.mean()
    sxx = float(((x - xbar) ** 2).sum())
    slope = float(((x - xbar) * (y - ybar)).sum() / sxx)
    intercept = float(ybar - slope * xbar)
    resid = y - (intercept + slope * x)
    if len(used) > 2:
        stderr = float(np.sqrt((resid ** 2).sum() / (len(used) - 2) / sxx))
    else:
        stderr = float("nan")
    return ScalingFit(slope=slope, stderr=stderr, intercept=intercept,
                      used_p=tuple(p for p, _ in used), excluded_p=excluded)


CSV_HEADER = "p,trials,failures,rate,ci_lo,ci_hi,retries_mean,seconds"


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def export_results(result: ExperimentResult, path) -> tuple[Path, Path]:
    """Write <path>.csv and <path>.json; returns both paths.

    CSV columns are fixed; everything else (config echo, seed, baseline
    and gate-count detail) lives in the JSON.
    """
    base = Path(path)
    if base.suffix in (".csv", ".json"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    csv_path = base.with_suffix(".csv")
    json_path = base.with_suffix(".json")
    lines = [CSV_HEADER]
    for pt in result.points:
        lines.append(",".join(_fmt(v) for v in (
            pt.p, pt.trials, pt.failures, pt.rate, pt.ci_lo, pt.ci_hi,
            pt.retries_mean, pt.seconds)))
    csv_path.write_text("\n".join(lines) + "\n")
    json_path.write_text(json.dumps(result.to_dict(), indent=2) + "\n")
    return csv_path, json_path
