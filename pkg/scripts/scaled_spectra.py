#!/usr/bin/env python3
"""Scaled-spectrum sweep: the lower half of the spectrum on the
(x, eps) = (2k/N, 2E_k/N) scale for several couplings.

Writes one CSV per coupling into the output directory.  The curves show
the critical line eps = -1 being touched at coupling 1 and crossed at a
coupling-dependent x_c above it.
"""

import argparse
import sys
from pathlib import Path

from lipkin.cli import main as lipkin_main

COUPLINGS = [0.0, 1.0, 5.0, 10.0]


def run(n: int, outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for lam in COUPLINGS:
        target = outdir / f"spectrum_n{n}_g{lam:g}.csv"
        code = lipkin_main([
            "spectrum", "--n", str(n), "--lambda", str(lam),
            "--sector", "merged", "--lower-half",
            "--output", str(target),
        ])
        if code != 0:
            sys.exit(code)
        print(f"wrote {target}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2000)
    parser.add_argument("--outdir", type=Path, default=Path("data"))
    args = parser.parse_args()
    run(args.n, args.outdir)
