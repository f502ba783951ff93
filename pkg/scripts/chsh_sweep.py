"""CHSH value of the ququart Bell pair as Bob's second setting rotates, with
Alice at 0 and 90 degrees and Bob's first setting at 45 degrees.

    python3 scripts/chsh_sweep.py --steps 13
"""

import argparse

import numpy as np

from sicprob.io import bundled_frame
from sicprob.scenarios import build_ququart_bell, lhv_chsh_bound, run_chsh


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=13)
    args = ap.parse_args()
    frame = bundled_frame(4)
    bound = lhv_chsh_bound()
    print(f"{'b2 (deg)':>9} {'S':>10} {'route dev':>10}  violates")
    for b2 in np.linspace(-180, 180, args.steps):
        setup = build_ququart_bell((0.0, np.pi / 2, np.pi / 4, np.deg2rad(b2)))
        res = run_chsh(setup.state, setup.alice, setup.bob, frame=frame)
        print(f"{b2:9.1f} {res.chsh_value:10.6f} {res.route_deviation:10.1e}  {res.chsh_value > bound + 1e-9}")


if __name__ == "__main__":
    main()
