"""Exact linear algebra over prime fields GF(p).

Matrices are dense ``numpy`` int64 arrays with entries reduced mod p.  The
elimination core works on plain Python lists of ints: every matrix in this
package is tiny (tens of rows at most), where per-call numpy overhead costs
more than the arithmetic itself.

Pivoting is deterministic — leftmost eligible column first, first nonzero
row from the top — so solutions, and everything downstream that decodes
through them, are reproducible.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DimensionError, FieldTooSmallError


def is_prime(p: int) -> bool:
    """Deterministic primality test by trial division (fine for the sizes here)."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def next_prime_above(x: int) -> int:
    """Smallest prime strictly greater than ``x``."""
    candidate = x + 1
    while not is_prime(candidate):
        candidate += 1
    return candidate


class PrimeField:
    """The prime field GF(p); 0 and 1 are the additive and multiplicative units."""

    __slots__ = ("p", "_inverses")

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"field order must be prime, got {p}")
        self.p = p
        self._inverses: tuple[int, ...] | None = None

    @property
    def inverses(self) -> tuple[int, ...]:
        """Table of multiplicative inverses, index 0 unused (kept as 0)."""
        if self._inverses is None:
            p = self.p
            self._inverses = tuple(pow(a, p - 2, p) if a else 0 for a in range(p))
        return self._inverses

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.inverses[a]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


class FieldMatrix:
    """A dense matrix over a prime field.

    Wraps an int64 ndarray whose entries all lie in [0, p).  Supports just
    the operations the rest of the package needs; heavy lifting happens in
    the module-level elimination routines.
    """

    __slots__ = ("field", "array")

    def __init__(self, field: PrimeField, entries):
        arr = np.asarray(entries, dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-D matrix, got ndim={arr.ndim}")
        if arr.size and (arr.min() < 0 or arr.max() >= field.p):
            arr = arr % field.p
        self.field = field
        self.array = arr

    @classmethod
    def identity(cls, k: int, field: PrimeField) -> "FieldMatrix":
        return cls(field, np.eye(k, dtype=np.int64))

    @classmethod
    def zeros(cls, rows: int, cols: int, field: PrimeField) -> "FieldMatrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(self.field, self.array.T.copy())

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.field != other.field:
            raise DimensionError("field mismatch")
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.array.shape} by {other.array.shape}")
        return FieldMatrix(self.field, (self.array @ other.array) % self.field.p)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and other.field == self.field
            and other.array.shape == self.array.shape
            and bool(np.array_equal(other.array, self.array))
        )

    def __hash__(self) -> int:
        return hash((self.field.p, self.array.shape, self.array.tobytes()))

    def tolist(self) -> list[list[int]]:
        return self.array.tolist()

    def __repr__(self) -> str:
        return f"FieldMatrix({self.field!r}, {self.tolist()})"


def _as_column(v, rows: int, p: int) -> list[int]:
    vec = np.asarray(v, dtype=np.int64).reshape(-1)
    if vec.shape[0] != rows:
        raise DimensionError(f"vector length {vec.shape[0]} != matrix rows {rows}")
    return (vec % p).tolist()


def _forward_eliminate(rows: list[list[int]], p: int, inv: Sequence[int]) -> list[int]:
    """Forward Gaussian elimination in place; returns the pivot column list.

    Pivot order: leftmost column first, first nonzero row from the top.
    """
    m = len(rows)
    if m == 0 or not rows[0]:
        return []
    width = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(width):
        pivot_row = -1
        for i in range(r, m):
            if rows[i][c]:
                pivot_row = i
                break
        if pivot_row < 0:
            continue
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        lead = rows[r]
        scale = inv[lead[c]]
        if scale != 1:
            for j in range(c, width):
                lead[j] = lead[j] * scale % p
        for i in range(r + 1, m):
            f = rows[i][c]
            if f:
                row = rows[i]
                for j in range(c, width):
                    row[j] = (row[j] - f * lead[j]) % p
        pivots.append(c)
        r += 1
        if r == m:
            break
    return pivots


def _solve_augmented(rows: list[list[int]], p: int, inv: Sequence[int]) -> list[int] | None:
    """Solve A·x = b given the augmented rows [A | b]; free variables are 0.

    Returns None when the system is inconsistent.
    """
    if not rows:
        return []
    width = len(rows[0])
    ncols = width - 1
    pivots = _forward_eliminate(rows, p, inv)
    if pivots and pivots[-1] == ncols:
        return None
    x = [0] * ncols
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        row = rows[r]
        acc = row[ncols]
        for j in pivots[r + 1:]:
            if row[j]:
                acc -= row[j] * x[j]
        x[c] = acc % p
    return x


def rank(m: FieldMatrix) -> int:
    """Rank over GF(p) by exact Gaussian elimination."""
    rows = m.array.tolist()
    return len(_forward_eliminate(rows, m.field.p, m.field.inverses))


def in_column_space(m: FieldMatrix, v) -> bool:
    """True iff ``v`` is a linear combination of the columns of ``m``.

    Equivalent to rank([m | v]) == rank(m); computed with one elimination —
    with leftmost-first pivoting, ``v`` adds rank iff a pivot lands in the
    augmented column.
    """
    col = _as_column(v, m.rows, m.field.p)
    rows = [row + [col[i]] for i, row in enumerate(m.array.tolist())]
    pivots = _forward_eliminate(rows, m.field.p, m.field.inverses)
    return not (pivots and pivots[-1] == m.cols)


def solve(m: FieldMatrix, v) -> np.ndarray | None:
    """Some x with m·x = v, or None if inconsistent.

    Deterministic: free variables are set to 0 and pivots are chosen
    leftmost-column-first.
    """
    col = _as_column(v, m.rows, m.field.p)
    rows = [row + [col[i]] for i, row in enumerate(m.array.tolist())]
    x = _solve_augmented(rows, m.field.p, m.field.inverses)
    if x is None:
        return None
    return np.asarray(x, dtype=np.int64)


# Exhaustively re-check the defining property up to this code length;
# beyond it the Cauchy argument is trusted.
_MDS_CHECK_LIMIT = 20


@lru_cache(maxsize=None)
def _mds_parity_cached(L: int, B: int, p: int) -> tuple[tuple[int, ...], ...]:
    field = PrimeField(p)
    inv = field.inverses
    entries = tuple(tuple(inv[(i + j + 1) % p] for j in range(B)) for i in range(L))
    if 0 < L and 0 < B and L + B <= _MDS_CHECK_LIMIT:
        full = [[1 if r == c else 0 for c in range(L)] + list(entries[r]) for r in range(L)]
        for subset in combinations(range(L + B), L):
            sub = [[full[r][c] for c in subset] for r in range(L)]
            if len(_forward_eliminate(sub, p, inv)) != L:
                raise AssertionError(
                    f"parity construction lost the any-{L}-columns property at {subset}"
                )
    return entries


def mds_parity(L: int, B: int, field: PrimeField) -> FieldMatrix:
    """L×B parity block V such that any L columns of [I_L V] are independent.

    Built as the Cauchy-type matrix V[i][j] = (i + j + 1)^{-1} mod p.  The
    sums i + j + 1 lie in [1, L+B-1], so for p >= L+B none of them vanish,
    the row labels {0..L-1} and column labels {-1..-B} stay distinct, and
    every minor of V is nonzero — which is exactly the property required.
    The property is re-verified exhaustively for L+B <= 20.
    """
    if L < 0 or B < 0:
        raise ValueError("dimensions must be nonnegative")
    if L > 0 and B > 0 and field.p < L + B:
        raise FieldTooSmallError(f"need p >= L+B = {L + B}, got p = {field.p}")
    entries = _mds_parity_cached(L, B, field.p)
    arr = np.array(entries, dtype=np.int64).reshape(L, B)
    return FieldMatrix(field, arr)
