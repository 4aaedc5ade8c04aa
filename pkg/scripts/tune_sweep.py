"""Tuned beta2 and its energy across disturbance ratios D/U with beta1 fixed.

    python scripts/tune_sweep.py --beta1 0.85 --ratios 0.1 0.2 0.3 0.4 --grid 11
"""

import argparse
from dataclasses import replace

from smcbench.analysis import NoImprovingPair, tune_thresholds
from smcbench.engine import SimConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--beta1", type=float, default=0.85)
    parser.add_argument("--ratios", type=float, nargs="+", default=[0.1, 0.2, 0.3, 0.4])
    parser.add_argument("--grid", type=int, default=11)
    parser.add_argument("--duration", type=float, default=1.0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    template = SimConfig()
    gain_u = template.plant.input_gain * template.controller.u_max
    print("D/U    beta2     J_emp    J_hat    E      E_hat")
    for ratio in args.ratios:
        cfg = replace(template, plant=replace(template.plant, disturbance_bound=ratio * gain_u))
        try:
            r = tune_thresholds(cfg, beta1=args.beta1, grid=args.grid,
                                duration=args.duration, workers=args.workers)
        except NoImprovingPair:
            print(f"{ratio:.2f}   no improving pair")
            continue
        print(f"{ratio:.2f}  {r.beta2:+.4f}  {r.convergence_time:.4f}  {r.baseline_time:.4f}  "
              f"{r.energy:.4f} {r.baseline_energy:.4f}")


if __name__ == "__main__":
    main()
