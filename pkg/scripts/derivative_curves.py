#!/usr/bin/env python3
"""Scaled spectra together with their slope curves d(eps)/dx.

At the critical coupling the slope vanishes toward x -> 0; above it the
slope dips to zero at the crossing x_c -- the inflection whose curvature
diverges there.  One CSV per coupling.
"""

import argparse
import sys
from pathlib import Path

from lipkin.cli import main as lipkin_main

COUPLINGS = [1.0, 10.0]


def run(n: int, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for lam in COUPLINGS:
        target = outdir / f"derivative_n{n}_g{lam:g}.csv"
        code = lipkin_main([
            "spectrum", "--n", str(n), "--lambda", str(lam),
            "--sector", "merged", "--lower-half", "--derivative",
            "--output", str(target),
        ])
        if code != 0:
            sys.exit(code)
        print(f"wrote {target}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=4096)
    parser.add_argument("--outdir", type=Path, default=Path("data"))
    args = parser.parse_args()
    run(args.n, args.outdir)
