#!/usr/bin/env python3
"""Rescaled-error histogram data for nested vs. matousek scrambling.

Runs the single-estimate grid (r=1) and the median-of-15 grid (r=15) at
n = 16 and n = 64 with 10^4 repetitions each, writing one CSV per cell.
Pass extra rqmc-median flags after the script's own arguments, e.g.
--reps 1000 for a quick look.
"""

import sys

from rqmc_median.cli import main

if __name__ == "__main__":
    extra = sys.argv[1:]
    for r in ("1", "15"):
        code = main(["histogram", "--scramblers", "nested,matousek",
                     "--integrands", "f1,f2", "--m", "4,6", "--r", r,
                     "--out", "results/histograms"] + extra)
        if code != 0:
            sys.exit(code)
    sys.exit(0)
