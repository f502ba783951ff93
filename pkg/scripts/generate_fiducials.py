"""Regenerate the bundled fiducial fixtures in src/sicprob/fiducials/.

    python scripts/generate_fiducials.py --dims 2-8 --seed 2024
"""

import argparse
from pathlib import Path

from sicprob import io
from sicprob.sic import SicSearchConfig, find_fiducial, sic_from_fiducial, verify_sic

OUT = Path(__file__).resolve().parents[1] / "src" / "sicprob" / "fiducials"


def parse_dims(text):
    lo, _, hi = text.partition("-")
    return range(int(lo), int(hi or lo) + 1)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", default="2-8")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--restarts", type=int, default=50)
    ap.add_argument("--tol", type=float, default=1e-10, help="verification tolerance")
    ap.add_argument("--search-tol", type=float, default=1e-13)
    args = ap.parse_args()
    for d in parse_dims(args.dims):
        res = find_fiducial(SicSearchConfig(dim=d, seed=args.seed, restarts=args.restarts, tol=args.search_tol, verify_tol=args.tol))
        report = verify_sic(sic_from_fiducial(res.fiducial), args.tol)
        assert report.passed, report
        fx = io.Fixture(d, res.fiducial, args.seed, res.frame_potential, args.tol)
        io.save_json(OUT / f"d{d}.json", "fixture", fx)
        print(f"d={d}: restart {res.restart}, max overlap deviation {report.max_offdiag_deviation:.2e}")


if __name__ == "__main__":
    main()
