"""Test integrands with exact integrals and exact gradient energy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["IntegrandSpec", "builtin", "builtin_names", "sigma2_by_quadrature"]


@dataclass(frozen=True)
class IntegrandSpec:
    """A test function together with its exact constants.

    `exact_sigma2` is the gradient energy (1/12) * integral of f'(x)**2 over
    [0, 1], the constant that scales the n**-3 variance of scrambled-net
    estimates.  `derivative` is the analytic f', kept for cross-checks.
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    exact_integral: float
    exact_sigma2: float
    smoothness_tag: str  # finite | infinite | linear | constant

    def __post_init__(self):
        if self.exact_sigma2 < 0:
            raise ValueError("exact_sigma2 must be nonnegative")


_BUILTINS = {
    "f1": IntegrandSpec(
        name="f1",
        eval=lambda x: np.power(x, 1.5),
        derivative=lambda x: 1.5 * np.sqrt(x),
        exact_integral=2.0 / 5.0,
        exact_sigma2=3.0 / 32.0,
        smoothness_tag="finite",
    ),
    "f2": IntegrandSpec(
        name="f2",
        eval=lambda x: np.exp(-x),
        derivative=lambda x: -np.exp(-x),
        exact_integral=1.0 - math.exp(-1.0),
        exact_sigma2=(1.0 - math.exp(-2.0)) / 24.0,
        smoothness_tag="infinite",
    ),
    "linear": IntegrandSpec(
        name="linear",
        eval=lambda x: np.asarray(x, dtype=np.float64),
        derivative=lambda x: np.ones_like(np.asarray(x, dtype=np.float64)),
        exact_integral=0.5,
        exact_sigma2=1.0 / 12.0,
        smoothness_tag="linear",
    ),
    "constant": IntegrandSpec(
        name="constant",
        eval=lambda x: np.ones_like(np.asarray(x, dtype=np.float64)),
        derivative=lambda x: np.zeros_like(np.asarray(x, dtype=np.float64)),
        exact_integral=1.0,
        exact_sigma2=0.0,
        smoothness_tag="constant",
    ),
}


def builtin_names() -> tuple[str, ...]:
    return tuple(_BUILTINS)


def builtin(name: str) -> IntegrandSpec:
    """Look up a built-in integrand by name."""
    try:
        return _BUILTINS[name]
    except KeyError:
        raise ValueError(
            f"unknown integrand {name!r}; choose from {', '.join(_BUILTINS)}"
        ) from None


def sigma2_by_quadrature(f: IntegrandSpec, n_panels: int) -> float:
    """Gradient energy by composite midpoint quadrature with differenced f'.

    Midpoints keep the evaluation away from x = 0, where f1's higher
    derivatives blow up; the central-difference step is three decades below
    the panel width.
    """
    if n_panels < 16:
        raise ValueError(f"n_panels must be >= 16, got {n_panels}")
    width = 1.0 / n_panels
    mids = (np.arange(n_panels) + 0.5) * width
    h = width * 1e-3
    slope = (f.eval(mids + h) - f.eval(mids - h)) / (2.0 * h)
    return math.fsum(slope * slope) * width / 12.0
