"""Text rendering of the admissible (beta1, beta2) triangle for a disturbance ratio D/U.

    python scripts/feasibility_map.py --ratio 0.3 --resolution 41
"""

import argparse

from smcbench.analysis import feasibility_raster


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--ratio", type=float, default=0.3, help="D/U")
    parser.add_argument("--resolution", type=int, default=41)
    args = parser.parse_args()

    b1, b2, mask = feasibility_raster(args.ratio, args.resolution)
    # beta2 upwards, beta1 to the right
    for j in reversed(range(len(b2))):
        row = "".join("#" if mask[i, j] else "." for i in range(len(b1)))
        print(f"{b2[j]:+.2f} {row}")
    print(f"      beta1 from {b1[0]:.3f} to {b1[-1]:.3f}")
    print(f"feasible fraction of [0,1) x (-1,1): {mask.mean():.4f}")
    print(f"nominal pair (0.85, 0.1) feasible: {0.85 + 0.1 > 2 * args.ratio}")


if __name__ == "__main__":
    main()
