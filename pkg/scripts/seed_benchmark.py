"""Terminal vs energy-saving control at the experimental operating point, over several seeds.

    python scripts/seed_benchmark.py --seeds 8 --out results/benchmark.csv
"""

import argparse
import csv
from dataclasses import replace
from pathlib import Path

import numpy as np

from smcbench.analysis import benchmark
from smcbench.engine import SimConfig, format_number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=8)
    parser.add_argument("--duration", type=float, default=1.5)
    parser.add_argument("--out", type=Path, default=None, help="optional CSV of per-seed scalars")
    args = parser.parse_args()

    rows = []
    for seed in range(args.seeds):
        cfg = SimConfig(duration=args.duration, seed=seed)
        cfg = replace(cfg, disturbance=replace(cfg.disturbance, seed=seed))
        _, report = benchmark(cfg)
        s = report.scalars
        rows.append({"seed": seed, **{k: s[k] for k in (
            "energy_a", "energy_b", "delta_energy",
            "convergence_time_a", "convergence_time_b",
            "steady_state_error_a", "steady_state_error_b",
            "control_on_fraction_b", "chattering_b",
        )}})
        print(f"seed {seed}: E_term={s['energy_a']:.4f}  E_es={s['energy_b']:.4f}  "
              f"tc_term={s['convergence_time_a']:.4f}  tc_es={s['convergence_time_b']:.4f}  "
              f"on={s['control_on_fraction_b']:.3f}")

    saving = np.array([r["delta_energy"] / r["energy_a"] for r in rows])
    tc = np.array([r["convergence_time_b"] for r in rows], dtype=float)
    print(f"energy saved: mean {saving.mean():.1%}, min {saving.min():.1%}")
    print(f"energy-saving convergence: {np.nanmin(tc):.3f}..{np.nanmax(tc):.3f} s, "
          f"{np.count_nonzero(np.isnan(tc))} unconverged")

    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            for r in rows:
                writer.writerow({k: format_number(v) for k, v in r.items()})


if __name__ == "__main__":
    main()
