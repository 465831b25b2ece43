"""Encoded-memory failure rate versus physical error rate.

Sweeps p, fits the log-log slope, and writes rates.csv / rates.json.
The paired unencoded baseline shares each trial's gate budget, so the
break-even point is visible directly in the output table.

    python3 scripts/memory_sweep.py --trials 2000 --out runs/memory
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ftqc.montecarlo import (ExperimentConfig, export_results, fit_scaling,
                             memory_experiment)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, nargs="+",
                    default=[3e-4, 1e-3, 3e-3])
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--rounds", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/memory")
    args = ap.parse_args()

    config = ExperimentConfig(kind="memory", p_values=tuple(args.p),
                              trials=args.trials, rounds=args.rounds,
                              seed=args.seed)
    result = memory_experiment(config)

    print(f"{'p':>10} {'encoded':>10} {'baseline':>10} {'99% ci':>24}")
    for pt in result.points:
        ci = f"[{pt.ci_lo:.2e}, {pt.ci_hi:.2e}]"
        print(f"{pt.p:>10.1e} {pt.rate:>10.2e} {pt.baseline_rate:>10.2e} {ci:>24}")

    try:
        fit = fit_scaling(result)
        print(f"log-log slope {fit.slope:.3f} (stderr {fit.stderr:.3f}) "
              f"over p={list(fit.used_p)}")
        if fit.excluded_p:
            print(f"excluded zero-failure points: {list(fit.excluded_p)}")
    except ValueError as exc:
        print(f"no scaling fit: {exc}")

    csv_path, json_path = export_results(result, args.out)
    print(f"wrote {csv_path} and {json_path}")


if __name__ == "__main__":
    main()
