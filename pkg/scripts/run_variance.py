#!/usr/bin/env python3
"""Empirical vs. theoretical Var(Q) for every scrambler at n = 64.

Writes one CSV with per-cell empirical variance, the sigma^2/n^3 reference,
and their ratio.  Extra rqmc-median flags are forwarded (e.g. --reps 100000
for a tighter table, --m 4,6,8 for more sizes).
"""

import sys

from rqmc_median.cli import main

if __name__ == "__main__":
    sys.exit(main(["variance", "--out", "results/variance"] + sys.argv[1:]))
