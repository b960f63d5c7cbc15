"""Erasure patterns and the sliding-window loss model.

A window of W consecutive time slots is *admissible* when it contains either
a single run of consecutive erasures no longer than B, or at most N erasures
at arbitrary positions.  The worst cases of that model — exactly B
consecutive, or exactly N anywhere — are the *maximal* patterns; every
admissible window is dominated elementwise by one of them, so checks over
the maximal set cover the whole model.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .errors import DimensionError, ParameterError
from .gf import FieldMatrix


@dataclass(frozen=True)
class ErasurePattern:
    """Fixed-length binary mask; 1 marks an erased position (index 0 = time 0)."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("pattern bits must be 0 or 1")

    @property
    def length(self) -> int:
        return len(self.bits)

    @property
    def weight(self) -> int:
        return sum(self.bits)

    def is_consecutive(self) -> bool:
        """True when all erased positions form one contiguous run (or none)."""
        ones = [i for i, b in enumerate(self.bits) if b]
        return not ones or ones[-1] - ones[0] + 1 == len(ones)

    def dominates(self, bits: Sequence[int]) -> bool:
        return len(bits) == self.length and all(e <= m for e, m in zip(bits, self.bits))

    @classmethod
    def from_string(cls, s: str) -> "ErasurePattern":
        return cls(tuple(int(ch) for ch in s))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class WbnSpec:
    """Sliding-window loss model: window size, burst limit, arbitrary-loss limit."""

    window: int
    burst: int
    arbitrary: int

    def __post_init__(self):
        if self.window <= 0:
            raise ParameterError("window must be positive")
        if self.burst > 0:
            if not self.burst >= self.arbitrary >= 1:
                raise ParameterError(
                    f"need burst >= arbitrary >= 1, got B={self.burst}, N={self.arbitrary}"
                )
        elif self.arbitrary != 0 or self.burst != 0:
            raise ParameterError("burst = 0 forces arbitrary = 0")


def window_admissible(bits: Sequence[int], burst: int, arbitrary: int) -> bool:
    """Burst-or-arbitrary admissibility for a single window's worth of flags."""
    total = sum(bits)
    if total <= arbitrary:
        return True
    if total > burst:
        return False
    ones = [i for i, b in enumerate(bits) if b]
    return ones[-1] - ones[0] + 1 == total


@lru_cache(maxsize=None)
def enumerate_maximal_patterns(window: int, burst: int, arbitrary: int) -> tuple[ErasurePattern, ...]:
    """All maximal patterns for the (window, burst, arbitrary) model.

    Exactly-B-consecutive placements unioned with exactly-N-anywhere
    placements, deduplicated (the burst set collapses into the arbitrary set
    when B == N), in lexicographic order.
    """
    if not window >= burst >= arbitrary >= 0 or (burst > 0 and arbitrary < 1):
        raise ParameterError(
            f"need window >= burst >= arbitrary (>= 1 unless burst = 0); "
            f"got W={window}, B={burst}, N={arbitrary}"
        )
    found: set[tuple[int, ...]] = set()
    for start in range(window - burst + 1):
        bits = [0] * window
        bits[start:start + burst] = [1] * burst
        found.add(tuple(bits))
    for positions in combinations(range(window), arbitrary):
        bits = [0] * window
        for pos in positions:
            bits[pos] = 1
        found.add(tuple(bits))
    return tuple(ErasurePattern(bits) for bits in sorted(found))


def is_valid_wbn_sequence(sequence: Sequence[int], spec: WbnSpec) -> bool:
    """Check every length-W window of a finite erasure prefix.

    Windows sliding past the end of the prefix are padded with zeros, so only
    the prefix's own positions can violate the model.
    """
    seq = list(sequence)
    w = spec.window
    for start in range(len(seq)):
        if not window_admissible(seq[start:start + w], spec.burst, spec.arbitrary):
            return False
    return True


def dominating_pattern(bits: Sequence[int], burst: int, arbitrary: int) -> ErasurePattern | None:
    """Some maximal pattern covering ``bits`` elementwise, or None."""
    for pattern in enumerate_maximal_patterns(len(bits), burst, arbitrary):
        if pattern.dominates(bits):
            return pattern
    return None


def mask_columns(m: FieldMatrix, pattern: ErasurePattern) -> FieldMatrix:
    """Zero the columns of ``m`` flagged by the pattern (the erasure operator)."""
    if m.cols != pattern.length:
        raise DimensionError(f"matrix has {m.cols} columns, pattern length {pattern.length}")
    out = m.array.copy()
    for j, bit in enumerate(pattern.bits):
        if bit:
            out[:, j] = 0
    return FieldMatrix(m.field, out)
