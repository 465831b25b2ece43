"""Paired comparison of Toffoli-ancilla quality versus verification rounds.

Each trial index draws one noise stream and replays it for every rounds
value, so the per-round differences are common-random-number paired.
Reports the raw resource fidelity and the fidelity after one clean
correction cycle per block (what a consumer of the factory sees).

Desk-scale note: at p=1e-3 the per-round effect is a fraction of a
percent, so separating the means needs trial counts in the tens of
thousands; the default here shows the machinery, not significance.

    python3 scripts/ancilla_rounds.py --p 1e-3 --trials 400
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ftqc import csscode as cc
from ftqc import f2linalg as f2
from ftqc import gadgets as gd
from ftqc.errors import DecodeFailure, GadgetAbort, LeakageError
from ftqc.noise import NoiseModel, make_rng


def one_trial(code, rounds, p, rng):
    n = code.n
    model = NoiseModel(p_gate=p)
    oracle = gd.toffoli_ancilla_coeffs()
    blocks = tuple(tuple(range(i * n, (i + 1) * n)) for i in range(3))
    try:
        state, anc, _ = gd.prepare_toffoli_ancilla(
            code, rounds=rounds, model=model, rng=rng, zero_prep="bare")
    except GadgetAbort:
        return 0.0, 0.0
    sub = state.extract([q for b in anc.blocks for q in b])
    try:
        raw = abs(np.vdot(oracle, cc.decode_blocks(code, sub, blocks))) ** 2
    except (DecodeFailure, LeakageError, ValueError):
        raw = 0.0
    sub.extend(n + 1)
    work = gd.WorkRegion(cat=tuple(range(3 * n, 4 * n)), aux=4 * n)
    try:
        for b in blocks:
            gd.correct_block(code, sub, b, work)
        corrected = abs(np.vdot(oracle, cc.decode_blocks(code, sub, blocks))) ** 2
    except (GadgetAbort, DecodeFailure, LeakageError):
        corrected = 0.0
    return raw, corrected


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, default=1e-3)
    ap.add_argument("--trials", type=int, default=400)
    ap.add_argument("--rounds", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    code = cc.build_css_code(f2.puncture(f2.reed_muller(1, 3)))
    print(f"{'rounds':>6} {'raw mean':>10} {'corrected':>10}  "
          f"(p={args.p:g}, {args.trials} paired trials)")
    for rounds in args.rounds:
        raw = np.empty(args.trials)
        corrected = np.empty(args.trials)
        for t in range(args.trials):
            rng = make_rng(args.seed, (t,))  # same stream for every rounds value
            raw[t], corrected[t] = one_trial(code, rounds, args.p, rng)
        print(f"{rounds:>6} {raw.mean():>10.5f} {corrected.mean():>10.5f}")


if __name__ == "__main__":
    main()
