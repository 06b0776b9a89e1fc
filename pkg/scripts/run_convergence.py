#!/usr/bin/env python3
"""Convergence sweep of the median estimator for nested vs. matousek.

Desk scale by default: r=101 with 32 outer repeats over n = 2^4 .. 2^12.
For the full-scale run (r=1001, single repeat per n) add:
    --r 1001 --reps 1
Any extra rqmc-median flags are forwarded.
"""

import sys

from rqmc_median.cli import main

if __name__ == "__main__":
    sys.exit(main(["convergence", "--out", "results/convergence"] + sys.argv[1:]))
