"""Command-line front end: code inspection, state preparation, gadget
runs, and Monte Carlo experiments.

Exit codes: 0 success, 1 usage error, 2 gadget abort, 3 I/O failure.
The FTQC_SEED environment variable supplies the seed when --seed is
absent.  Machine-readable artifacts go to files; stdout carries either
machine-format dumps (code/encode) or human summaries (correct,
toffoli, experiment).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import csscode as cc
from . import f2linalg as f2
from . import gadgets as gd
from . import montecarlo as mc
from . import statevec as sv
from .errors import GadgetAbort, UnsupportedCodeError
from .noise import ErrorLog, NoiseModel, make_rng

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ABORT = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _builtin_code_path() -> Path:
    return Path(__file__).parent / "data" / "steane.code"


def _load_classical(name: str) -> f2.LinearCode:
    if name == "steane":
        name = str(_builtin_code_path())
    return f2.load_code_file(name)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("FTQC_SEED")
    if env is not None:
        return int(env)
    return 0


def _cmd_code_info(args) -> int:
    code = _load_classical(args.file)
    cls = f2.classify(code)
    d = f2.min_distance(code)
    line = (
        f"n={code.n} k={code.k} d={d}"
        f" contains_dual={str(cls.contains_dual).lower()}"
        f" self_dual={str(cls.self_dual).lower()}"
        f" doubly_even={str(cls.doubly_even).lower()}"
    )
    if cls.contains_dual and 2 * code.k - code.n == 1:
        css = cc.build_css_code(code)
        sign = css.phase_sign if css.phase_sign is not None else 0
        line += f" t={css.t} logical_qubits=1 phase_sign={sign:+d}"
    print(line)
    return EXIT_OK


def _cmd_code_rm(args) -> int:
    code = f2.reed_muller(args.r, args.m)
    comment = f"RM({args.r},{args.m})"
    if args.puncture is not None:
        coord = None if args.puncture < 0 else args.puncture
        code = f2.puncture(code, coord)
        shown = coord if coord is not None else 2 ** args.m - 1
        comment += f" with coordinate {shown} deleted"
    sys.stdout.write(f2.format_code_file(code, comment=comment))
    return EXIT_OK


def _cmd_encode(args) -> int:
    code = cc.build_css_code(_load_classical(args.file))
    if args.basis == "s":
        state = cc.logical_state(code, args.logical)
    else:
        state = cc.c_state(code, args.logical)
    for line in sv.dump_lines(state):
        print(line)
    return EXIT_OK


def _parse_injection(spec: str, n: int) -> tuple[str, int]:
    try:
        pauli, pos = spec.split("@")
        pos = int(pos)
    except ValueError:
        raise ValueError(f"bad injection {spec!r}, expected PAULI@POS")
    if pauli not in ("X", "Y", "Z") or not 0 <= pos < n:
        raise ValueError(f"bad injection {spec!r}")
    return pauli, pos


def _cmd_correct(args) -> int:
    code = cc.build_css_code(_load_classical(args.file))
    n = code.n
    seed = _resolve_seed(args)
    rng = make_rng(seed)
    model = NoiseModel(p_gate=args.p) if args.p else None
    log = ErrorLog()
    layout = cc.BlockLayout.from_sizes([("data", n), ("cat", n), ("aux", 1)])
    data = layout.block("data")
    work = gd.WorkRegion(cat=layout.block("cat"), aux=layout.block("aux")[0])
    reference = cc.logical_state(code, 0)
    state = reference.copy()
    state = state.tensor(sv.basis_state(n + 1, 0))
    if args.inject:
        pauli, pos = _parse_injection(args.inject, n)
        sv.apply_gate(state, sv.standard_gate(pauli), (data[pos],))
        print(f"injected: {pauli}@{pos}")
    report = gd.correct_block(code, state, data, work, model=model, rng=rng,
                              log=log)
    for rec in report.syndrome_records:
        bits = "".join(str(int(b)) for b in rec.final)
        print(f"{rec.basis}-syndrome: {bits} ({len(rec.rounds)} rounds)")
    print(f"corrections: {' '.join(report.corrections) or 'none'}")
    fid = sv.fidelity(state.extract(data), reference)
    print(f"fidelity: {fid:.12g}")
    print(f"seed: {seed}")
    if args.out:
        payload = report.to_dict()
        payload["fidelity"] = fid
        payload["seed"] = seed
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def _cmd_toffoli(args) -> int:
    code = cc.build_css_code(_load_classical(args.code))
    n = code.n
    if len(args.input) != 3 or any(ch not in "01" for ch in args.input):
        raise ValueError(f"bad --input {args.input!r}, expected three bits")
    x, y, z = (int(ch) for ch in args.input)
    seed = _resolve_seed(args)
    rng = make_rng(seed)
    model = NoiseModel(p_gate=args.p) if args.p else None
    log = ErrorLog()
    anc_state, anc, rep_prep = gd.prepare_toffoli_ancilla(
        code, rounds=args.rounds, model=model, rng=rng, log=log)
    anc_state = anc_state.extract([q for b in anc.blocks for q in b])
    coeffs = np.zeros(8)
    coeffs[x | (y << 1) | (z << 2)] = 1.0
    state = cc.encode_logical_blocks(code, coeffs)
    state = state.tensor(anc_state)
    anc = anc.shifted(3 * n)
    blocks = [tuple(range(i * n, (i + 1) * n)) for i in range(3)]
    report = gd.toffoli_full(code, state, blocks[0], blocks[1], blocks[2], anc,
                             model=model, rng=rng, log=log)
    decoded = cc.decode_blocks(code, state, anc.blocks)
    idx = int(np.argmax(np.abs(decoded)))
    out_bits = f"{idx & 1}{(idx >> 1) & 1}{idx >> 2}"
    print(f"input: {args.input}")
    print(f"output: {out_bits}")
    print(f"outcomes: {' '.join(str(int(b)) for b in report.outcomes)}")
    print(f"corrections: {' '.join(report.corrections) or 'none'}")
    print(f"seed: {seed}")
    if args.out:
        payload = report.to_dict()
        payload["input"] = args.input
        payload["output"] = out_bits
        payload["seed"] = seed
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    config = mc.ExperimentConfig.from_json(args.config)
    if args.p is not None:
        config.p_values = tuple(args.p)
        config.__post_init__()
    if args.trials is not None:
        config.trials = args.trials
    if args.seed is not None:
        config.seed = args.seed
    elif os.environ.get("FTQC_SEED") is not None:
        config.seed = int(os.environ["FTQC_SEED"])
    if args.out is not None:
        config.out = args.out
    result = mc.run_experiment(config)
    out_base = config.out or (Path(args.config).with_suffix("").name + "-results")
    csv_path, json_path = mc.export_results(result, out_base)
    saturated = False
    for pt in result.points:
        print(f"p={pt.p:g} rate={pt.rate:.6g} "
              f"ci=[{pt.ci_lo:.6g}, {pt.ci_hi:.6g}] failures={pt.failures}/{pt.trials}")
        if pt.failures == pt.trials:
            saturated = True
    print(f"wrote {csv_path} and {json_path}")
    if saturated:
        print("warning: at least one point failed every trial", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="ftqc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    code_p = sub.add_parser("code", help="inspect or construct classical codes")
    code_sub = code_p.add_subparsers(dest="code_command", required=True)
    info_p = code_sub.add_parser("info", help="classify a code file")
    info_p.add_argument("file")
    info_p.set_defaults(fn=_cmd_code_info)
    rm_p = code_sub.add_parser("rm", help="emit a Reed-Muller code file")
    rm_p.add_argument("r", type=int)
    rm_p.add_argument("m", type=int)
    rm_p.add_argument("--puncture", type=int, default=None,
                      help="coordinate to delete (-1 for the last)")
    rm_p.set_defaults(fn=_cmd_code_rm)

    enc_p = sub.add_parser("encode", help="print an encoded basis state")
    enc_p.add_argument("file")
    enc_p.add_argument("--logical", type=int, choices=(0, 1), required=True)
    enc_p.add_argument("--basis", choices=("s", "c"), default="s")
    enc_p.set_defaults(fn=_cmd_encode)

    cor_p = sub.add_parser("correct", help="run one correction cycle")
    cor_p.add_argument("file")
    cor_p.add_argument("--inject", default=None, metavar="PAULI@POS")
    cor_p.add_argument("--seed", type=int, default=None)
    cor_p.add_argument("--p", type=float, default=0.0)
    cor_p.add_argument("--out", default=None)
    cor_p.set_defaults(fn=_cmd_correct)

    tof_p = sub.add_parser("toffoli", help="run the encoded Toffoli")
    tof_p.add_argument("--input", required=True, metavar="BITS")
    tof_p.add_argument("--p", type=float, default=0.0)
    tof_p.add_argument("--seed", type=int, default=None)
    tof_p.add_argument("--rounds", type=int, default=1)
    tof_p.add_argument("--code", default="steane")
    tof_p.add_argument("--out", default=None)
    tof_p.set_defaults(fn=_cmd_toffoli)

    exp_p = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    exp_p.add_argument("config")
    exp_p.add_argument("--p", type=float, nargs="+", default=None)
    exp_p.add_argument("--trials", type=int, default=None)
    exp_p.add_argument("--seed", type=int, default=None)
    exp_p.add_argument("--out", default=None)
    exp_p.set_defaults(fn=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.fn(args)
    except GadgetAbort as exc:
        print(f"gadget abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except (FileNotFoundError, PermissionError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError, UnsupportedCodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
