"""Encoding and delay-constrained decoding of one code block.

Two decoders are provided.  The sequential decoder recovers symbols in
index order, folding already-recovered symbols back into the received data
before solving for the next one — the cheap path an implementation would
actually run.  The oracle decoder asks, independently for every symbol,
whether it is uniquely determined by all data available by its deadline;
it is the information-theoretic reference the sequential decoder is tested
against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .construct import GeneratorMatrix
from .erasures import ErasurePattern
from .errors import DimensionError
from .gf import _solve_augmented


@dataclass(frozen=True)
class BlockCodeword:
    """The n coded symbols of one block; the first k equal the source."""

    symbols: tuple[int, ...]


@dataclass(frozen=True)
class ReceivedBlock:
    """Post-channel view of a block: erased positions hold None."""

    symbols: tuple[int | None, ...]

    @classmethod
    def receive(cls, codeword: BlockCodeword | Sequence[int],
                pattern: ErasurePattern | Sequence[int]) -> "ReceivedBlock":
        values = codeword.symbols if isinstance(codeword, BlockCodeword) else tuple(codeword)
        bits = pattern.bits if isinstance(pattern, ErasurePattern) else tuple(pattern)
        if len(bits) != len(values):
            raise DimensionError("pattern length != codeword length")
        return cls(tuple(None if b else v for v, b in zip(values, bits)))

    @property
    def pattern(self) -> ErasurePattern:
        return ErasurePattern(tuple(1 if s is None else 0 for s in self.symbols))


@dataclass
class BlockDecodeResult:
    """Per-symbol outcome; a failed symbol is data, not an exception."""

    recovered: list[bool]
    values: list[int | None]

    @property
    def all_recovered(self) -> bool:
        return all(self.recovered)


def block_encode(source: Sequence[int], g: GeneratorMatrix) -> BlockCodeword:
    """x = s·G (systematic: the first k outputs are the source)."""
    s = np.asarray(source, dtype=np.int64).reshape(-1)
    if s.shape[0] != g.params.k:
        raise DimensionError(f"source length {s.shape[0]} != k = {g.params.k}")
    x = (s % g.field.p) @ g.matrix.array % g.field.p
    return BlockCodeword(tuple(int(v) for v in x))


def _received_indices(r: ReceivedBlock, deadline: int) -> list[int]:
    return [j for j in range(deadline + 1) if r.symbols[j] is not None]


def decode_sequential(r: ReceivedBlock, g: GeneratorMatrix) -> BlockDecodeResult:
    """Recover symbols in order, each by its own deadline.

    At step i the data are the unerased symbols with time index at most
    min(i+T, n-1); contributions of symbols recovered at earlier steps are
    subtracted, and symbol i is solved from what remains.  Symbols that
    failed earlier simply stay in the unknown set.
    """
    params = g.params
    k, n, t = params.k, params.n, params.delay
    p = g.field.p
    inv = g.field.inverses
    if len(r.symbols) != n:
        raise DimensionError(f"received block length {len(r.symbols)} != n = {n}")
    grows = g.matrix.array.tolist()

    known: dict[int, int] = {}
    recovered = [False] * k
    values: list[int | None] = [None] * k
    for i in range(k):
        deadline = min(i + t, n - 1)
        observed = _received_indices(r, deadline)
        unknown = [u for u in range(k) if u not in known]
        pos = unknown.index(i)
        aug = [[grows[u][j] for j in observed] + [1 if rowpos == pos else 0]
               for rowpos, u in enumerate(unknown)]
        coeffs = _solve_augmented(aug, p, inv)
        if coeffs is None:
            continue
        residual = 0
        for j, c in zip(observed, coeffs):
            if c:
                y = r.symbols[j]
                for u, val in known.items():
                    y -= val * grows[u][j]
                residual += c * y
        value = residual % p
        known[i] = value
        recovered[i] = True
        values[i] = value
    return BlockDecodeResult(recovered, values)


def decode_oracle(r: ReceivedBlock, g: GeneratorMatrix) -> BlockDecodeResult:
    """Per-symbol maximal recovery: symbol i counts as recovered iff it is
    uniquely determined by every unerased symbol with time index <= i+T
    (full elimination, no sequential assumption)."""
    params = g.params
    k, n, t = params.k, params.n, params.delay
    p = g.field.p
    inv = g.field.inverses
    if len(r.symbols) != n:
        raise DimensionError(f"received block length {len(r.symbols)} != n = {n}")
    grows = g.matrix.array.tolist()

    recovered = [False] * k
    values: list[int | None] = [None] * k
    for i in range(k):
        deadline = min(i + t, n - 1)
        observed = _received_indices(r, deadline)
        aug = [[grows[u][j] for j in observed] + [1 if u == i else 0]
               for u in range(k)]
        coeffs = _solve_augmented(aug, p, inv)
        if coeffs is None:
            continue
        recovered[i] = True
        values[i] = sum(c * r.symbols[j] for j, c in zip(observed, coeffs) if c) % p
    return BlockDecodeResult(recovered, values)
