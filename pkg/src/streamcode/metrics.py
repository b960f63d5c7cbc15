"""Column distance, column span, and the rate-optimality check.

Both metrics look at depth-(T+1) codeword prefixes whose first source packet
is nonzero: the column distance is the minimum number of nonzero channel
packets, the column span the minimum length of the window from the first to
the last nonzero packet (reported inclusively, so a support of B+1 packets
has span B+1).  A code is optimal when its rate meets the bound
k/n = (T-d+2)/(T+c-d+1) with equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from .conv import ConvCode
from .errors import SearchBudgetError
from .gf import _forward_eliminate

DEFAULT_BUDGET = 1 << 24


@dataclass(frozen=True)
class DistanceReport:
    """Brute-force (or probe-based) distance/span figures for one code."""

    distance: int
    span: int
    optimal: bool
    method: str


def truncated_generator(code: ConvCode, depth: int) -> np.ndarray:
    """Block upper-triangular matrix mapping [s_0..s_depth] to [x_0..x_depth]."""
    k, n = code.base.params.k, code.base.params.n
    rows = (depth + 1) * k
    cols = (depth + 1) * n
    out = np.zeros((rows, cols), dtype=np.int64)
    for r in range(depth + 1):
        for c in range(r, depth + 1):
            ell = c - r
            if ell < len(code.gens):
                out[r * k:(r + 1) * k, c * n:(c + 1) * n] = code.gens[ell]
    return out


def _digits(values: np.ndarray, base: int, width: int) -> np.ndarray:
    """Mixed-radix expansion, most significant digit first."""
    out = np.empty((values.shape[0], width), dtype=np.int64)
    v = values.copy()
    for pos in range(width - 1, -1, -1):
        out[:, pos] = v % base
        v //= base
    return out


def _support_scan(code: ConvCode, depth: int, budget: int) -> tuple[int, int]:
    params = code.base.params
    k, n, p = params.k, params.n, code.base.field.p
    total = p ** (k * (depth + 1))
    if total > budget:
        raise SearchBudgetError(
            f"enumeration of {total} message prefixes exceeds budget {budget}"
        )
    gconv = truncated_generator(code, depth)
    tail_count = p ** (k * depth)
    best_weight = depth + 2
    best_span = depth + 2
    chunk = 1 << 12
    for head in range(1, p ** k):
        head_digits = _digits(np.array([head]), p, k)[0]
        for start in range(0, tail_count, chunk):
            idx = np.arange(start, min(start + chunk, tail_count))
            msgs = np.empty((idx.shape[0], k * (depth + 1)), dtype=np.int64)
            msgs[:, :k] = head_digits
            if depth:
                msgs[:, k:] = _digits(idx, p, k * depth)
            codewords = (msgs @ gconv) % p
            nonzero = codewords.reshape(-1, depth + 1, n).any(axis=2)
            weights = nonzero.sum(axis=1)
            best_weight = min(best_weight, int(weights.min()))
            first = nonzero.argmax(axis=1)
            last = depth - nonzero[:, ::-1].argmax(axis=1)
            best_span = min(best_span, int((last - first + 1).min()))
    return best_weight, best_span


@lru_cache(maxsize=32)
def _support_scan_cached(matrix_bytes: bytes, shape: tuple[int, int], p: int,
                         window: int, delay: int, burst: int, arbitrary: int,
                         depth: int, budget: int) -> tuple[int, int]:
    # Reconstruct lazily so both public functions share one enumeration.
    from .construct import CodeParams, GeneratorMatrix
    from .conv import interleave
    from .gf import FieldMatrix, PrimeField

    arr = np.frombuffer(matrix_bytes, dtype=np.int64).reshape(shape)
    g = GeneratorMatrix(
        CodeParams(window, delay, burst, arbitrary),
        FieldMatrix(PrimeField(p), arr),
    )
    return _support_scan(interleave(g), depth, budget)


def _scan(code: ConvCode, depth: int, budget: int) -> tuple[int, int]:
    params = code.base.params
    arr = np.ascontiguousarray(code.base.matrix.array)
    return _support_scan_cached(
        arr.tobytes(), arr.shape, code.base.field.p,
        params.window, params.delay, params.burst, params.arbitrary,
        depth, budget,
    )


def column_distance_bruteforce(code: ConvCode, depth: int | None = None,
                               budget: int = DEFAULT_BUDGET) -> int:
    """Minimum nonzero-packet count over all prefixes with s_0 != 0."""
    depth = code.base.params.delay if depth is None else depth
    return _scan(code, depth, budget)[0]


def column_span_bruteforce(code: ConvCode, depth: int | None = None,
                           budget: int = DEFAULT_BUDGET) -> int:
    """Minimum inclusive support length over all prefixes with s_0 != 0."""
    depth = code.base.params.delay if depth is None else depth
    return _scan(code, depth, budget)[1]


def check_optimal(code: ConvCode, distance: int, span: int) -> bool:
    """Exact rational test of rate = (T-d+2)/(T+c-d+1)."""
    params = code.base.params
    t = params.delay
    return Fraction(params.k, params.n) == Fraction(t - distance + 2, t + span - distance + 1)


def _first_packet_recoverable(glist: list[list[int]], k: int, n: int, depth: int,
                              erased_packets: tuple[int, ...], p: int, inv) -> bool:
    kept_cols: list[int] = []
    erased = set(erased_packets)
    for c in range(depth + 1):
        if c not in erased:
            kept_cols.extend(range(c * n, (c + 1) * n))
    base_rows = [[row[c] for c in kept_cols] for row in glist]
    for j in range(k):
        aug = [row + [1 if r == j else 0] for r, row in enumerate(base_rows)]
        pivots = _forward_eliminate(aug, p, inv)
        if pivots and pivots[-1] == len(kept_cols):
            return False
    return True


def erasure_probe_bounds(code: ConvCode, depth: int | None = None) -> tuple[int, int]:
    """Lower bounds (d_lower, c_lower) by direct erasure probing.

    d_lower-1 is the largest count of arbitrary packet erasures in the first
    depth+1 slots under which the first source packet is always recoverable
    by its deadline; c_lower-1 the largest burst length likewise.
    """
    depth = code.base.params.delay if depth is None else depth
    params = code.base.params
    k, n, p = params.k, params.n, code.base.field.p
    inv = code.base.field.inverses
    glist = truncated_generator(code, depth).tolist()

    def survives_all(patterns) -> bool:
        return all(
            _first_packet_recoverable(glist, k, n, depth, pat, p, inv)
            for pat in patterns
        )

    d_lower = 1
    for count in range(1, depth + 2):
        if not survives_all(combinations(range(depth + 1), count)):
            break
        d_lower = count + 1
    c_lower = 1
    for length in range(1, depth + 2):
        bursts = [tuple(range(s, s + length)) for s in range(depth + 2 - length)]
        if not survives_all(bursts):
            break
        c_lower = length + 1
    return d_lower, c_lower
