"""Deterministic 2-D sample streams on the unit square.

Two stream kinds share one interface: the Halton low-discrepancy sequence
(radical inverse of the point index in a pair of distinct prime bases) and a
seedable PCG64 pseudorandom baseline.  A stream is a pure function of
(spec, offset, count), so disjoint offset windows can be handed to
independent workers with no shared state and no dependence on call order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

DEFAULT_BASES: tuple[int, int] = (2, 11)


class Point2(NamedTuple):
    """A sample point with both coordinates in [0, 1)."""

    u: float
    v: float


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


@dataclass(frozen=True)
class SequenceSpec:
    """Configuration of a deterministic 2-D point stream.

    ``kind`` is ``"halton"`` (radical-inverse points in two distinct prime
    bases, consuming indices from ``start_index`` upward) or
    ``"pseudorandom"`` (PCG64 seeded with ``seed``; each point consumes two
    consecutive 64-bit draws, u first).
    """

    kind: str
    bases: tuple[int, int] = DEFAULT_BASES
    start_index: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("halton", "pseudorandom"):
            raise ValueError(f"unknown sequence kind: {self.kind!r}")
        if self.kind == "halton":
            b0, b1 = self.bases
            if not (_is_prime(b0) and _is_prime(b1)):
                raise ValueError(f"bases must both be prime, got {self.bases}")
            if b0 == b1:
                raise ValueError("bases must be distinct")
            if self.start_index < 1:
                # index 0 is the corner point (0, 0); it is never emitted
                raise ValueError("start_index must be >= 1")
        else:
            if not 0 <= self.seed < 2**64:
                raise ValueError("seed must be an unsigned 64-bit integer")

    @classmethod
    def halton(cls, bases: tuple[int, int] = DEFAULT_BASES, start_index: int = 1) -> "SequenceSpec":
        return cls(kind="halton", bases=(int(bases[0]), int(bases[1])), start_index=start_index)

    @classmethod
    def pseudorandom(cls, seed: int) -> "SequenceSpec":
        return cls(kind="pseudorandom", seed=int(seed))

    def describe(self) -> str:
        """Short one-line summary used in reports and CLI output."""
        if self.kind == "halton":
            return f"halton(bases={self.bases[0]},{self.bases[1]};start={self.start_index})"
        return f"pcg64(seed={self.seed})"


def radical_inverse(index: int, base: int) -> float:
    """Reflect the base-``base`` digit expansion of ``index`` about the radix point.

    radical_inverse(d_k ... d_1 d_0 in base b) = 0.d_0 d_1 ... d_k in base b,
    always in [0, 1).  radical_inverse(0, b) == 0.0.
    """
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    if index < 0:
        raise ValueError(f"index must be >= 0, got {index}")
    f = 1.0
    value = 0.0
    while index > 0:
        index, digit = divmod(index, base)
        f /= base
        value += f * digit
    return value


def _radical_inverse_batch(indices: np.ndarray, base: int) -> np.ndarray:
    # Same per-element add order as radical_inverse (exhausted elements only
    # accumulate exact zero terms), so values are bit-identical to the scalar.
    idx = indices.astype(np.uint64, copy=True)
    out = np.zeros(idx.shape, dtype=np.float64)
    f = 1.0
    b = np.uint64(base)
    while idx.any():
        f /= base
        out += f * (idx % b)
        idx //= b
    return out


def halton_point(index: int, spec: SequenceSpec) -> Point2:
    """The Halton point at ``index``: u in bases[0], v in bases[1]."""
    if spec.kind != "halton":
        raise ValueError("halton_point requires a halton spec")
    if index < spec.start_index:
        raise ValueError(f"index {index} is below start_index {spec.start_index}")
    return Point2(radical_inverse(index, spec.bases[0]), radical_inverse(index, spec.bases[1]))


def stream(spec: SequenceSpec, offset: int, count: int) -> np.ndarray:
    """``count`` consecutive stream points after skipping the first ``offset``.

    Returns a (count, 2) float64 array with every coordinate in [0, 1).
    The result depends only on the arguments: for Halton these are the
    points at indices start_index+offset .. start_index+offset+count-1; for
    the pseudorandom stream they are draws offset .. offset+count-1 of the
    seeded generator.
    """
    if offset < 0:
        raise ValueError(f"offset must be >= 0, got {offset}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if spec.kind == "halton":
        lo = spec.start_index + offset
        idx = np.arange(lo, lo + count, dtype=np.uint64)
        u = _radical_inverse_batch(idx, spec.bases[0])
        v = _radical_inverse_batch(idx, spec.bases[1])
        return np.column_stack((u, v))
    bits = np.random.PCG64(spec.seed)
    # Generator.random() consumes one 64-bit word per float64, so one point
    # is exactly two words; advance() jumps whole points in O(log offset).
    bits.advance(2 * offset)
    return np.random.Generator(bits).random((count, 2))
