"""Generator-matrix construction and the achievability verifier.

The workbench builds systematic k×n generator matrices G = [I_k P] sized for
the optimal rate k/n = (T-N+1)/(T+B-N+1).  The parity block P follows one of
two structural templates (one for rate >= 1/2, one for rate < 1/2) whose
cells are either structurally zero, part of an MDS parity block, or free.
Free and MDS cells get i.i.d. uniform field elements from a seeded RNG, and a
candidate is kept only if it passes the achievability check: for every symbol
index i and every maximal erasure pattern on the (T+1)-slot decoding window,
the unit vector of symbol i must lie in the column space of the masked,
shifted window submatrix of G.  Rejection sampling plus this check replaces
the existence proof's sequential choice of free rows.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .erasures import ErasurePattern, enumerate_maximal_patterns
from .errors import ConstructionExhaustedError, DimensionError, ParameterError
from .gf import FieldMatrix, PrimeField, _forward_eliminate, mds_parity

# Template cell states.
CELL_ZERO = 0
CELL_MDS = 1
CELL_FREE = 2


@dataclass(frozen=True)
class CodeParams:
    """Window/delay/burst/arbitrary parameters with the derived code size.

    The main regime requires window > delay >= burst >= arbitrary >= 1 (a
    degenerate lossless model with burst = arbitrary = 0 is also accepted).
    k = delay - arbitrary + 1 source symbols are carried per packet and
    n = k + burst symbols are transmitted.
    """

    window: int
    delay: int
    burst: int
    arbitrary: int

    def __post_init__(self):
        w, t, b, n = self.window, self.delay, self.burst, self.arbitrary
        if b == 0 and n == 0:
            if not w > t >= 0:
                raise ParameterError(f"need window > delay >= 0, got W={w}, T={t}")
            return
        if not (w > t >= b >= n >= 1):
            raise ParameterError(
                f"need window > delay >= burst >= arbitrary >= 1, "
                f"got W={w}, T={t}, B={b}, N={n}"
            )

    @classmethod
    def window_limited(cls, window: int, delay: int, burst: int, arbitrary: int) -> "CodeParams":
        """Parameters for the small-window case (window <= delay).

        When the window is shorter than a packet's lifespan the optimal code
        is the one built for delay window-1; decoding then finishes early
        relative to the requested delay.
        """
        if not (delay >= burst >= arbitrary >= 1):
            raise ParameterError("need delay >= burst >= arbitrary >= 1")
        if window > delay:
            raise ParameterError("window_limited is for window <= delay; use CodeParams")
        if window <= burst:
            raise ParameterError("window must exceed the burst limit")
        return cls(window=window, delay=window - 1, burst=burst, arbitrary=arbitrary)

    @property
    def k(self) -> int:
        return self.delay - self.arbitrary + 1

    @property
    def n(self) -> int:
        return self.k + self.burst

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)


def capacity(window: int, delay: int, burst: int, arbitrary: int) -> Fraction:
    """Maximum achievable rate for the given parameters, as an exact fraction.

    (T-N+1)/(T+B-N+1) when the window covers a packet's lifespan
    (W >= T+1), else (W-N)/(W+B-N).
    """
    w, t, b, n = window, delay, burst, arbitrary
    if not (t >= b >= n >= 1):
        raise ParameterError(f"need delay >= burst >= arbitrary >= 1, got T={t}, B={b}, N={n}")
    if w >= t + 1:
        return Fraction(t - n + 1, t + b - n + 1)
    if w <= b:
        raise ParameterError(f"small-window case needs window > burst, got W={w}, B={b}")
    return Fraction(w - n, w + b - n)


def field_size_bound(delay: int, burst: int, arbitrary: int) -> int:
    """Field-size threshold above which a verified construction always exists."""
    t, b, n = delay, burst, arbitrary
    if not (t >= b >= n >= 1):
        raise ParameterError(f"need delay >= burst >= arbitrary >= 1, got T={t}, B={b}, N={n}")
    return 2 * (math.comb(t + 1, n) + t - b + 2)


@dataclass(frozen=True)
class GeneratorTemplate:
    """Structural mask over the k×(n-k) parity grid.

    ``cells`` holds CELL_ZERO / CELL_MDS / CELL_FREE states.  MDS cells have
    deterministic values (an MDS parity block, see ``fixed_parity``); free
    cells are the rows the construction gets to choose.
    """

    params: CodeParams
    regime: str  # "high-rate" | "low-rate" | "mds" | "martinian-sundberg"
    cells: tuple[tuple[int, ...], ...]

    def cell_grid(self) -> np.ndarray:
        return np.array(self.cells, dtype=np.int8)

    def positions(self, state: int) -> list[tuple[int, int]]:
        """Row-major (row, col) positions of cells in the given state."""
        return [
            (r, c)
            for r, row in enumerate(self.cells)
            for c, cell in enumerate(row)
            if cell == state
        ]

    def fixed_parity(self, field: PrimeField) -> np.ndarray:
        """Parity grid with MDS cells filled deterministically, all else 0."""
        params = self.params
        k, b, n_arb = params.k, params.burst, params.arbitrary
        parity = np.zeros((k, b), dtype=np.int64)
        if b == 0:
            return parity
        if self.regime == "mds":
            parity[:, :] = mds_parity(k, b, field).array
        elif self.regime == "high-rate":
            if k > b:
                parity[b:, :] = mds_parity(k - b, b, field).array
        elif self.regime == "low-rate":
            height = k - b + n_arb
            v = mds_parity(height, n_arb, field).array
            left_w = b - k
            parity[b - n_arb:, :left_w] = v[:, :left_w]
            parity[b - n_arb:, 2 * b - k - n_arb:] = v[:, left_w:]
        elif self.regime == "martinian-sundberg":
            for i in range(b):
                parity[i, i] = 1
            if k > b:
                parity[b:, :] = mds_parity(k - b, b, field).array
        else:
            raise ValueError(f"unknown regime {self.regime!r}")
        return parity


def _grid(k: int, b: int) -> list[list[int]]:
    return [[CELL_ZERO] * b for _ in range(k)]


@lru_cache(maxsize=None)
def build_template(params: CodeParams) -> GeneratorTemplate:
    """Parity template for the parameters: MDS-only when B == N, else the
    banded high-rate form (k >= B) or the split low-rate form (k < B)."""
    k, b, n_arb = params.k, params.burst, params.arbitrary
    grid = _grid(k, b)
    if b == n_arb:
        regime = "mds"
        for r in range(k):
            for c in range(b):
                grid[r][c] = CELL_MDS
    elif k >= b:
        regime = "high-rate"
        for i in range(b - n_arb):  # banded rows: one length-N stripe each
            for c in range(i, i + n_arb):
                grid[i][c] = CELL_FREE
        for r in range(b - n_arb, b):  # square block of free rows
            for c in range(b - n_arb, b):
                grid[r][c] = CELL_FREE
        for r in range(b, k):
            for c in range(b):
                grid[r][c] = CELL_MDS
    else:
        regime = "low-rate"
        left_w = b - k
        stripe = k - b + n_arb
        for i in range(b - n_arb):
            for c in range(left_w):
                grid[i][c] = CELL_FREE
            for c in range(left_w + i, left_w + i + stripe):
                grid[i][c] = CELL_FREE
        for r in range(b - n_arb, k):
            for c in range(left_w):
                grid[r][c] = CELL_MDS
            for c in range(2 * b - k - n_arb, b):
                grid[r][c] = CELL_MDS
    return GeneratorTemplate(params, regime, tuple(tuple(row) for row in grid))


def _ms_template(params: CodeParams) -> GeneratorTemplate:
    k, b = params.k, params.burst
    if k < b:
        raise ParameterError(f"construction needs k >= burst, got k={k}, B={b}")
    grid = _grid(k, b)
    for i in range(b):
        grid[i][i] = CELL_MDS
    for r in range(b, k):
        for c in range(b):
            grid[r][c] = CELL_MDS
    return GeneratorTemplate(params, "martinian-sundberg", tuple(tuple(row) for row in grid))


@dataclass(frozen=True)
class GeneratorMatrix:
    """A systematic generator matrix [I_k | P] together with its parameters."""

    params: CodeParams
    matrix: FieldMatrix
    construction: str = "unspecified"

    def __post_init__(self):
        k, n = self.params.k, self.params.n
        if self.matrix.array.shape != (k, n):
            raise DimensionError(
                f"matrix shape {self.matrix.array.shape} != ({k}, {n}) from parameters"
            )
        if not np.array_equal(self.matrix.array[:, :k], np.eye(k, dtype=np.int64)):
            raise ParameterError("generator must be systematic: G = [I_k | P]")

    @property
    def field(self) -> PrimeField:
        return self.matrix.field

    @property
    def parity(self) -> np.ndarray:
        return self.matrix.array[:, self.params.k:]

    def to_json(self, **extra) -> str:
        payload = {
            "p": self.field.p,
            "W": self.params.window,
            "T": self.params.delay,
            "B": self.params.burst,
            "N": self.params.arbitrary,
            "rows": self.matrix.tolist(),
        }
        payload.update(extra)
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, construction: str = "loaded") -> "GeneratorMatrix":
        data = json.loads(text)
        params = CodeParams(
            window=int(data["W"]), delay=int(data["T"]),
            burst=int(data["B"]), arbitrary=int(data["N"]),
        )
        field = PrimeField(int(data["p"]))
        return cls(params, FieldMatrix(field, data["rows"]), construction)


def _assemble(params: CodeParams, field: PrimeField, parity: np.ndarray,
              construction: str) -> GeneratorMatrix:
    k = params.k
    g = np.hstack([np.eye(k, dtype=np.int64), parity.astype(np.int64) % field.p])
    return GeneratorMatrix(params, FieldMatrix(field, g), construction)


def find_achievability_witness(g: GeneratorMatrix) -> tuple[int, ErasurePattern] | None:
    """First (symbol index, maximal pattern) that breaks achievability, or None.

    For symbol i the decoder, having recovered symbols 0..i-1, sees columns
    i..i+T of G (zero-padded past n-1) restricted to unerased slots; symbol i
    is recoverable iff its unit vector lies in that column space.  Patterns
    are visited in lexicographic order, symbols ascending, and the first
    failure short-circuits.
    """
    params = g.params
    k, n = params.k, params.n
    t = params.delay
    p = g.field.p
    inv = g.field.inverses
    rows_full = g.matrix.array.tolist()
    patterns = enumerate_maximal_patterns(t + 1, params.burst, params.arbitrary)
    for i in range(k):
        width = min(t, n - 1 - i)  # window columns i..i+T, clipped at n-1
        sub = [row[i:i + width + 1] for row in rows_full[i:]]
        height = k - i
        for pattern in patterns:
            bits = pattern.bits
            keep = [c for c in range(width + 1) if not bits[c]]
            aug = [[row[c] for c in keep] + [1 if r == 0 else 0]
                   for r, row in enumerate(sub)]
            pivots = _forward_eliminate(aug, p, inv)
            if pivots and pivots[-1] == len(keep):
                return i, pattern
    return None


def verify_achievable(g: GeneratorMatrix) -> bool:
    """True iff the achievability condition holds for every symbol and pattern."""
    return find_achievability_witness(g) is None


def _rng_for(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed))


def construct_random(params: CodeParams, field: PrimeField, seed,
                     mode: str = "random") -> GeneratorMatrix:
    """One random candidate from the structural template; deterministic per seed.

    mode "random": every non-zero template cell (free and MDS alike) gets an
    independent uniform draw over the whole field, zeros included — the
    verifier is what rejects degenerate draws.  mode "deterministic-mds":
    MDS cells come from the Cauchy parity block and only free cells are
    drawn.  Draw order is row-major over the randomized cells.
    """
    if mode not in ("random", "deterministic-mds"):
        raise ValueError(f"unknown mode {mode!r}")
    template = build_template(params)
    if mode == "deterministic-mds":
        parity = template.fixed_parity(field)
        targets = template.positions(CELL_FREE)
    else:
        parity = np.zeros((params.k, params.burst), dtype=np.int64)
        targets = template.positions(CELL_FREE) + template.positions(CELL_MDS)
        targets.sort()
    if targets:
        rng = _rng_for(seed)
        draws = rng.integers(0, field.p, size=len(targets))
        for (r, c), value in zip(targets, draws):
            parity[r, c] = value
    return _assemble(params, field, parity, f"{mode} (unverified)")


@dataclass(frozen=True)
class ConstructionResult:
    generator: GeneratorMatrix
    attempts: int


def construct_verified(params: CodeParams, field: PrimeField, seed,
                       max_attempts: int = 5000,
                       mode: str = "random") -> ConstructionResult:
    """Rejection-sample candidates until one passes the achievability check.

    Attempt a draws from the stream (seed, attempt-index a), so results do
    not depend on how attempts are scheduled.  Raises
    ConstructionExhaustedError when the limit is hit — usually a sign the
    field is too small.
    """
    base = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    for attempt in range(1, max_attempts + 1):
        child = np.random.SeedSequence(
            base.entropy, spawn_key=tuple(base.spawn_key) + (attempt,)
        )
        candidate = construct_random(params, field, child, mode=mode)
        if verify_achievable(candidate):
            verified = GeneratorMatrix(params, candidate.matrix, mode)
            return ConstructionResult(verified, attempt)
    raise ConstructionExhaustedError(
        f"no verified code in {max_attempts} attempts for {params} over GF({field.p}); "
        f"the field is likely too small", max_attempts,
    )


def baseline_martinian_sundberg(params: CodeParams, field: PrimeField) -> GeneratorMatrix:
    """Burst-only baseline: parity [I_B on top of an MDS block].

    Optimal for arbitrary = 1; its generator has rows of weight 2, so two
    scattered erasures can wipe a symbol when arbitrary > 1.
    """
    template = _ms_template(params)
    return _assemble(params, field, template.fixed_parity(field), "martinian-sundberg")


def baseline_mds(params: CodeParams, field: PrimeField) -> GeneratorMatrix:
    """Plain MDS baseline [I_k | V]; handles any <= B erasures when B == N."""
    parity = mds_parity(params.k, params.burst, field).array
    return _assemble(params, field, parity, "mds")
