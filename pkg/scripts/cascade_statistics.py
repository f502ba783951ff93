"""Distribution of the cascaded-vs-direct gap for random pure states and
random projective measurements.

    python3 scripts/cascade_statistics.py --dims 2-5 --trials 2000
"""

import argparse

import numpy as np

from sicprob.io import bundled_frame
from sicprob.sampling import random_projective_povm, random_pure_state
from sicprob.scenarios import cascaded_vs_direct


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", default="2-5")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    lo, _, hi = args.dims.partition("-")
    rng = np.random.default_rng(args.seed)
    print(f"{'d':>3} {'mean':>8} {'p01':>8} {'median':>8} {'max':>8} {'>0.01':>7}")
    for d in range(int(lo), int(hi or lo) + 1):
        frame = bundled_frame(d)
        gaps = np.array(
            [cascaded_vs_direct(random_pure_state(d, rng), frame, random_projective_povm(d, rng)).gap for _ in range(args.trials)]
        )
        q = np.quantile(gaps, [0.01, 0.5])
        print(f"{d:>3} {gaps.mean():8.4f} {q[0]:8.4f} {q[1]:8.4f} {gaps.max():8.4f} {np.mean(gaps > 0.01):7.1%}")


if __name__ == "__main__":
    main()
