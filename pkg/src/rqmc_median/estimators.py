"""Single-net, average-of-replicates, and median-of-replicates estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrands import IntegrandSpec
from .nets import NetPoints, van_der_corput_net
from .scramble import RandomStream, ScramblerSpec, apply_scrambler

__all__ = [
    "ReplicateBatch",
    "average_estimator",
    "median_estimator",
    "q_estimate",
    "replicate_batch",
]


@dataclass(frozen=True)
class ReplicateBatch:
    """r independent single-net estimates of one integral.

    Replicate j (0-based) was produced with stream_id = j under
    `master_seed`, so any replicate is reproducible in isolation.
    """

    estimates: tuple[float, ...]
    n_points: int
    r: int
    scrambler: ScramblerSpec
    integrand: str
    master_seed: int

    def __post_init__(self):
        if self.r < 1 or len(self.estimates) != self.r:
            raise ValueError("estimates length must equal r >= 1")


def q_estimate(f: IntegrandSpec, pts: NetPoints) -> float:
    """Equal-weight average of f over the points, compensated summation."""
    vals = f.eval(pts.points)
    return math.fsum(vals) / pts.n


def replicate_batch(f: IntegrandSpec, spec: ScramblerSpec, m: int, r: int,
                    master_seed: int) -> ReplicateBatch:
    """r independent scrambled-net estimates, one stream per replicate."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    pts = van_der_corput_net(spec.base, m)
    estimates = tuple(
        q_estimate(f, apply_scrambler(pts, spec, RandomStream(master_seed, j)))
        for j in range(r)
    )
    return ReplicateBatch(estimates, pts.n, r, spec, f.name, master_seed)


def average_estimator(batch: ReplicateBatch) -> float:
    return math.fsum(batch.estimates) / batch.r


def median_estimator(batch: ReplicateBatch) -> float:
    """Sample median; for even r, the midpoint of the two central order statistics."""
    return float(np.median(batch.estimates))
