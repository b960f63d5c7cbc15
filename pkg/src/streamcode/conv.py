"""Diagonal interleaving of a block code into a streaming convolutional code.

One block codeword is spread over n consecutive packets, one coordinate per
time step, so the coordinate streams [x_i[0], x_{i+1}[1], ..., x_{i+n-1}[n-1]]
are independent block codewords ("diagonals").  The per-time generator
matrices are then diagonal slices of the block generator, packet i depends
only on the last few source packets, and streaming decoding reduces to block
decoding on each diagonal with data truncated at the emission deadline.

Source packets before time 0 are zero by convention; both the encoder and
the decoder know this, so startup needs no special casing beyond clipping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .construct import GeneratorMatrix
from .errors import DimensionError
from .gf import _solve_augmented


class ConvCode:
    """A streaming code made of diagonal slices of a systematic block code."""

    __slots__ = ("base", "gens", "memory")

    def __init__(self, base: GeneratorMatrix, gens: Sequence[np.ndarray]):
        self.base = base
        self.gens = tuple(np.asarray(g, dtype=np.int64) for g in gens)
        self.memory = len(self.gens) - 1

    @property
    def effective_memory(self) -> int:
        """Largest slice index that is actually nonzero."""
        for ell in range(len(self.gens) - 1, -1, -1):
            if self.gens[ell].any():
                return ell
        return 0

    def generator_sum(self) -> np.ndarray:
        return sum(self.gens) % self.base.field.p


def interleave(g: GeneratorMatrix) -> ConvCode:
    """Slice G into its n diagonal generator matrices.

    Slice ell carries entry G[j, ell+j] at position (j, ell+j); the slices
    sum back to G, and packet i of the stream is sum_ell s_{i-ell} @ slice_ell.
    """
    k, n = g.params.k, g.params.n
    arr = g.matrix.array
    gens = []
    for ell in range(n):
        slice_ = np.zeros((k, n), dtype=np.int64)
        for j in range(min(k, n - ell)):
            slice_[j, ell + j] = arr[j, ell + j]
        gens.append(slice_)
    return ConvCode(g, gens)


class StreamEncoder:
    """Causal encoder: x_i = sum_ell s_{i-ell} @ G_ell, with zero prehistory."""

    def __init__(self, code: ConvCode):
        self.code = code
        k = code.base.params.k
        self._terms = []  # (lag, source idx array, column idx array, coeffs)
        for ell, gen in enumerate(code.gens):
            js, cols = np.nonzero(gen)
            if js.size:
                self._terms.append((ell, js, cols, gen[js, cols]))
        self._history = [np.zeros(k, dtype=np.int64) for _ in range(code.effective_memory + 1)]

    def step(self, source: Sequence[int]) -> np.ndarray:
        params = self.code.base.params
        p = self.code.base.field.p
        s = np.asarray(source, dtype=np.int64) % p
        if s.shape != (params.k,):
            raise DimensionError(f"source packet must have length k = {params.k}")
        self._history.insert(0, s)
        self._history.pop()
        x = np.zeros(params.n, dtype=np.int64)
        for lag, js, cols, coeffs in self._terms:
            if lag < len(self._history):
                np.add.at(x, cols, self._history[lag][js] * coeffs)
        return x % p


def encode_stream(code: ConvCode, sources: np.ndarray, pad: int = 0) -> np.ndarray:
    """Encode a whole source array (rows = packets) at once.

    ``pad`` appends that many all-zero source packets so parity for the tail
    keeps flowing.  Column c of the output is assembled from the shifted
    source columns that feed it, which is just the diagonal structure read
    column-wise.
    """
    params = code.base.params
    p = code.base.field.p
    k, n = params.k, params.n
    s = np.asarray(sources, dtype=np.int64)
    if s.ndim != 2 or s.shape[1] != k:
        raise DimensionError(f"sources must be (steps, {k})")
    if pad:
        s = np.vstack([s, np.zeros((pad, k), dtype=np.int64)])
    steps = s.shape[0]
    arr = code.base.matrix.array
    out = np.zeros((steps, n), dtype=np.int64)
    for c in range(n):
        acc = out[:, c]
        for j in range(min(k, c + 1)):
            coeff = arr[j, c]
            if coeff:
                lag = c - j
                if lag < steps:
                    acc[lag:] += coeff * s[:steps - lag, j]
        out[:, c] = acc % p
    return out


class DiagonalSolver:
    """Memoized per-diagonal recovery for one convolutional code.

    A query names a coordinate j, the number of window positions clipped
    before time 0, and the erasure flags over the remaining window up to the
    coordinate's deadline.  The answer — unrecoverable, or the positions and
    coefficients whose dot product with the received values yields the
    symbol — depends only on that key, so it is cached; simulated channels
    revisit the same local patterns constantly.
    """

    def __init__(self, code: ConvCode):
        base = code.base
        self.code = code
        self.k = base.params.k
        self.n = base.params.n
        self.delay = base.params.delay
        self.p = base.field.p
        self.inv = base.field.inverses
        self.grows = base.matrix.array.tolist()
        self.deadline_pos = [min(j + self.delay, self.n - 1) for j in range(self.k)]
        self._cache: dict[tuple, tuple[tuple[int, ...], tuple[int, ...]] | None] = {}

    def coefficients(self, j: int, clip: int, bits: tuple[int, ...]):
        """Recovery plan for coordinate j of a diagonal.

        ``bits[m]`` is the erasure flag of window position clip+m; the window
        may stop at any position >= j (callers truncate at the deadline).
        Returns (offsets, coeffs) with offsets relative to the diagonal
        start, or None when the symbol is not determined.
        """
        key = (j, clip, bits)
        try:
            return self._cache[key]
        except KeyError:
            pass
        kept = [clip + m for m, b in enumerate(bits) if not b]
        target = j - clip
        aug = [
            [self.grows[u][pos] for pos in kept] + [1 if u - clip == target else 0]
            for u in range(clip, self.k)
        ]
        coeffs = _solve_augmented(aug, self.p, self.inv)
        if coeffs is None:
            plan = None
        else:
            pairs = [(pos, c) for pos, c in zip(kept, coeffs) if c]
            plan = (tuple(pos for pos, _ in pairs), tuple(c for _, c in pairs))
        self._cache[key] = plan
        return plan


@dataclass(frozen=True)
class PacketDecision:
    """Outcome for one source packet at its deadline."""

    time: int
    values: tuple[int, ...] | None
    lost: bool


class StreamDecoder:
    """Online decoder: packet i's estimate is emitted at time i+T.

    Each coordinate is decoded on its own diagonal from the symbols received
    by the deadline; a packet is lost iff any coordinate is unrecoverable.
    """

    def __init__(self, code: ConvCode):
        self.code = code
        self.solver = DiagonalSolver(code)
        self._received: list[np.ndarray | None] = []
        self._time = 0

    def push(self, packet: Sequence[int] | None) -> PacketDecision | None:
        """Ingest the time-slot's packet (None = erased); maybe emit a decision."""
        params = self.code.base.params
        if packet is not None:
            arr = np.asarray(packet, dtype=np.int64) % self.code.base.field.p
            if arr.shape != (params.n,):
                raise DimensionError(f"channel packet must have length n = {params.n}")
            self._received.append(arr)
        else:
            self._received.append(None)
        now = self._time
        self._time += 1
        due = now - params.delay
        if due < 0:
            return None
        return self._decode_at(due, now)

    def _decode_at(self, due: int, now: int) -> PacketDecision:
        solver = self.solver
        packet = self._received[due]
        if packet is not None:
            return PacketDecision(due, tuple(int(v) for v in packet[:solver.k]), False)
        values = []
        for j in range(solver.k):
            diag = due - j
            clip = max(0, -diag)
            stop = diag + solver.deadline_pos[j]  # == now when the deadline binds
            bits = tuple(
                1 if self._received[tm] is None else 0
                for tm in range(diag + clip, min(stop, now) + 1)
            )
            plan = solver.coefficients(j, clip, bits)
            if plan is None:
                return PacketDecision(due, None, True)
            offsets, coeffs = plan
            total = 0
            for pos, c in zip(offsets, coeffs):
                total += c * int(self._received[diag + pos][pos])
            values.append(total % solver.p)
        return PacketDecision(due, tuple(values), False)


def decode_trace(code: ConvCode, erased: Sequence[int],
                 packets: np.ndarray) -> list[tuple[bool, bool]]:
    """Offline decode of a full trace.

    For every source time t, returns (met_deadline, recovered_eventually):
    recovery with data up to t+T, and recovery with all trace data (delay
    constraint dropped).  Slots past the end of the trace count as erased.
    """
    solver = DiagonalSolver(code)
    e = np.asarray(erased, dtype=np.int64)
    length = e.shape[0]
    x = np.asarray(packets, dtype=np.int64)
    if x.shape != (length, solver.n):
        raise DimensionError("packets must be (len(erased), n)")

    def recoverable(t: int, cap_fn) -> bool:
        for j in range(solver.k):
            diag = t - j
            clip = max(0, -diag)
            stop = cap_fn(j, diag)
            bits = tuple(
                1 if (tm >= length or e[tm]) else 0
                for tm in range(diag + clip, stop + 1)
            )
            if solver.coefficients(j, clip, bits) is None:
                return False
        return True

    results = []
    for t in range(length):
        if not e[t]:
            results.append((True, True))
            continue
        met = recoverable(t, lambda j, diag: diag + solver.deadline_pos[j])
        eventually = met or recoverable(t, lambda j, diag: diag + solver.n - 1)
        results.append((met, eventually))
    return results
