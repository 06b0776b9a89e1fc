"""Randomizations of one-dimensional digital nets.

Four randomizations of a (0, m, 1)-net, each consuming an explicit seeded
stream:

* nested digit scrambling -- every digit is permuted by a uniform random
  permutation selected by the preceding digits (a b-ary permutation tree);
* jittered sampling -- one uniform point per stratum, the distributional
  equivalent of nested scrambling in one dimension;
* linear (affine matrix) scrambling -- digits are mapped through a random
  lower-triangular matrix mod b, in one of three classical shapes (free
  entries, Toeplitz, or constant columns), optionally followed by an
  additive random digit shift.

All scramblers preserve the net property exactly at digit level and are pure
functions of (net, spec, stream): repeated calls give bit-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .digits import default_depth
from .nets import NetPoints, is_net, stratum_indices

__all__ = [
    "LINEAR_KINDS",
    "RandomStream",
    "ScramblerKind",
    "ScramblerSpec",
    "apply_scrambler",
    "scramble_jittered",
    "scramble_linear",
    "scramble_nested",
]


class ScramblerKind(str, Enum):
    NESTED = "nested"
    JITTERED = "jittered"
    MATOUSEK = "matousek"
    TEZUKA = "tezuka"
    STRIPED = "striped"


LINEAR_KINDS = frozenset(
    {ScramblerKind.MATOUSEK, ScramblerKind.TEZUKA, ScramblerKind.STRIPED}
)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class ScramblerSpec:
    """Which randomization to apply.

    `depth` is the number of digits carried through the scramble (default:
    full double resolution for the base).  `shift` adds a uniform random
    digit vector mod b after the matrix and applies to linear kinds only;
    without it the point 0.0 is a fixed point of every linear map and the
    one-point marginal is not uniform.  Linear kinds need a prime base so
    the diagonal entries are invertible mod b.
    """

    kind: ScramblerKind
    base: int = 2
    depth: int | None = None
    shift: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", ScramblerKind(self.kind))
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if self.depth is not None and self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.kind in LINEAR_KINDS and not _is_prime(self.base):
            raise ValueError(
                f"{self.kind.value} scrambling needs a prime base, got {self.base}"
            )

    def resolved_depth(self) -> int:
        return self.depth if self.depth is not None else default_depth(self.base)


@dataclass(frozen=True)
class RandomStream:
    """One replicate's worth of randomness.

    Equal (master_seed, stream_id) pairs reproduce the same draw sequence;
    distinct stream_ids give statistically independent streams.
    """

    master_seed: int
    stream_id: int

    def __post_init__(self):
        if not 0 <= self.master_seed < 1 << 64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise ValueError("stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        """A freshly seeded generator positioned at the start of the stream."""
        ss = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_id,))
        return np.random.default_rng(ss)


def _digit_values(digmat: np.ndarray, base: int) -> np.ndarray:
    """Map digit rows to reals: row -> sum_k row[k] * base**-(k+1).

    For base 2 at depth <= 53 the dot product is exact (every partial sum of
    distinct negative powers of two spans at most 53 bits).
    """
    depth = digmat.shape[1]
    weights = np.power(float(base), -np.arange(1, depth + 1, dtype=np.float64))
    return digmat.astype(np.float64) @ weights


def _require_net(pts: NetPoints) -> None:
    if not is_net(pts):
        raise ValueError("input points do not form a (0, m, 1)-net")


def _nested_tables(rng: np.random.Generator, base: int, m: int) -> list[np.ndarray]:
    """Permutation tables for digit levels 1..m, drawn level-major.

    Table k (0-based) has one row per length-k digit prefix in lexicographic
    order; each row is an independent uniform permutation of {0, ..., b-1}.
    """
    tables = []
    for k in range(m):
        tiled = np.tile(np.arange(base, dtype=np.uint8), (base**k, 1))
        tables.append(rng.permuted(tiled, axis=1))
    return tables


def _apply_nested(digmat: np.ndarray, base: int, tables: list[np.ndarray],
                  tail: np.ndarray | None) -> np.ndarray:
    """Permute digits by prefix-keyed tables; overwrite digits past len(tables).

    In a valid net every length-m prefix is unique to one point, so digits
    past level m see each tree node exactly once and a permuted zero digit is
    simply a uniform digit: `tail` supplies those draws directly.
    """
    n, depth = digmat.shape
    m = len(tables)
    out = np.empty_like(digmat)
    prefix = np.zeros(n, dtype=np.int64)
    for k in range(m):
        col = digmat[:, k].astype(np.int64)
        out[:, k] = tables[k][prefix, col]
        prefix = prefix * base + col
    if depth > m:
        out[:, m:] = digmat[:, m:] if tail is None else tail
    return out


def scramble_nested(pts: NetPoints, rs: RandomStream, depth: int | None = None) -> NetPoints:
    """Nested (permutation-tree) scrambling of a net.

    Digit k of every point is sent through a uniform random permutation
    keyed by the point's first k-1 digits; points sharing a prefix share the
    permutation.  Output points keep the input index order.
    """
    _require_net(pts)
    base, m = pts.base, pts.m
    if depth is None:
        depth = default_depth(base)
    if depth < m:
        raise ValueError(f"depth {depth} below m={m} would destroy the net property")
    digmat = pts.digits(depth)
    rng = rs.generator()
    tables = _nested_tables(rng, base, m)
    tail = None
    if depth > m:
        tail = rng.integers(0, base, size=(pts.n, depth - m), dtype=np.uint8)
    out = _apply_nested(digmat, base, tables, tail)
    return NetPoints(base, m, _digit_values(out, base), exact_digits=out)


def _jittered_points(pts: NetPoints, u: np.ndarray) -> np.ndarray:
    """Place the point of stratum i at (i + u[i]) / n, clamped inside the stratum."""
    n = pts.n
    strata = stratum_indices(pts)
    x = (strata + u[strata]) / n
    # (i + u)/n can round up onto the right edge when u is within an ulp of 1
    right = (strata + 1.0) / n
    return np.minimum(x, np.nextafter(right, 0.0))


def scramble_jittered(pts: NetPoints, rs: RandomStream) -> NetPoints:
    """Jittered sampling: stratum i's point is redrawn uniformly on [i/n, (i+1)/n)."""
    _require_net(pts)
    u = rs.generator().random(pts.n)
    return NetPoints(pts.base, pts.m, _jittered_points(pts, u))


def _draw_matrix(kind: ScramblerKind, base: int, depth: int,
                 rng: np.random.Generator) -> np.ndarray:
    """One lower-triangular depth x depth scrambling matrix mod base.

    Diagonal entries are uniform on {1, ..., b-1}; free entries uniform on
    {0, ..., b-1}.  Draw order per family: matousek draws the diagonal then a
    full square block, of which only the strictly-lower part is used; tezuka
    draws its first column top-down; striped draws its column constants left
    to right.
    """
    if kind == ScramblerKind.MATOUSEK:
        h = rng.integers(1, base, size=depth, dtype=np.int64)
        g = rng.integers(0, base, size=(depth, depth), dtype=np.int64)
        return np.tril(g, -1) + np.diag(h)
    if kind == ScramblerKind.TEZUKA:
        col = np.empty(depth, dtype=np.int64)
        col[0] = rng.integers(1, base)
        if depth > 1:
            col[1:] = rng.integers(0, base, size=depth - 1, dtype=np.int64)
        offset = np.arange(depth)[:, None] - np.arange(depth)[None, :]
        return np.where(offset >= 0, col[np.clip(offset, 0, depth - 1)], 0)
    if kind == ScramblerKind.STRIPED:
        h = rng.integers(1, base, size=depth, dtype=np.int64)
        return np.tril(np.broadcast_to(h, (depth, depth)))
    raise ValueError(f"{kind.value} is not a linear scrambling kind")


def _apply_linear(digmat: np.ndarray, base: int, matrix: np.ndarray,
                  shift: np.ndarray | None) -> np.ndarray:
    """x = (M a + shift) mod b applied to every digit row."""
    prod = digmat.astype(np.float64) @ matrix.T.astype(np.float64)  # exact small ints
    out = prod.astype(np.int64)
    if shift is not None:
        out += shift
    return (out % base).astype(np.uint8)


def scramble_linear(pts: NetPoints, spec: ScramblerSpec, rs: RandomStream) -> NetPoints:
    """Linear (affine matrix) scrambling with the family chosen by `spec.kind`.

    One matrix (and one shift vector, if enabled) is drawn per call and
    applied to every point of the net, which is what keeps the scrambled
    points a net with probability one.
    """
    if spec.kind not in LINEAR_KINDS:
        raise ValueError(f"{spec.kind.value} is not a linear scrambling kind")
    if spec.base != pts.base:
        raise ValueError(f"spec base {spec.base} does not match net base {pts.base}")
    _require_net(pts)
    base, m = pts.base, pts.m
    depth = spec.resolved_depth()
    if depth < m:
        raise ValueError(f"depth {depth} below m={m} would destroy the net property")
    digmat = pts.digits(depth)
    rng = rs.generator()
    matrix = _draw_matrix(spec.kind, base, depth, rng)
    shift = rng.integers(0, base, size=depth, dtype=np.int64) if spec.shift else None
    out = _apply_linear(digmat, base, matrix, shift)
    return NetPoints(base, m, _digit_values(out, base), exact_digits=out)


def apply_scrambler(pts: NetPoints, spec: ScramblerSpec, rs: RandomStream) -> NetPoints:
    """Dispatch on spec.kind; the single entry point used by the estimators."""
    if spec.kind == ScramblerKind.NESTED:
        return scramble_nested(pts, rs, spec.depth)
    if spec.kind == ScramblerKind.JITTERED:
        return scramble_jittered(pts, rs)
    return scramble_linear(pts, spec, rs)
