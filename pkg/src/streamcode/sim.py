"""Monte Carlo experiments: loss-rate sweeps and construction success rates.

Loss accounting is all-or-nothing per source packet: a packet counts as lost
iff any of its k coordinates is unrecoverable at the packet's deadline.  The
first packets are scored like all others (zero prehistory makes them
decodable), and the channel keeps running T extra slots past the horizon so
the tail is scored under the same rules.

Every (sweep point, trial) gets its own RNG streams derived from the master
seed and integer indices, so results are identical no matter how the work is
scheduled across threads.
"""

from __future__ import annotations

import json
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channels import make_channel
from .construct import (
    CodeParams, PrimeField,
    baseline_martinian_sundberg, baseline_mds, construct_verified,
)
from .conv import ConvCode, DiagonalSolver, encode_stream, interleave
from .errors import ConfigError

SWEEP_CSV_HEADER = "code,channel,epsilon,packets,losses,loss_prob,seconds"
TABLE_CSV_HEADER = "T,cT,dT,p,field,samples,successes,rate"


@dataclass
class LossStats:
    """Aggregate outcome of streaming one code over one channel realization."""

    packets_sent: int
    packets_lost: int
    burst_histogram: dict[int, int]
    wall_time: float = 0.0

    @property
    def loss_probability(self) -> float:
        return self.packets_lost / self.packets_sent if self.packets_sent else 0.0


def burst_histogram(trace: Sequence[int]) -> dict[int, int]:
    """Counts of maximal runs of consecutive erasures, keyed by run length."""
    arr = np.asarray(trace, dtype=np.int8)
    if arr.size == 0:
        return {}
    padded = np.concatenate(([0], arr, [0]))
    edges = np.flatnonzero(np.diff(padded))
    starts, ends = edges[::2], edges[1::2]
    hist: dict[int, int] = {}
    for length in (ends - starts):
        hist[int(length)] = hist.get(int(length), 0) + 1
    return hist


@dataclass(frozen=True)
class CodeSpec:
    """One code entry of a run config."""

    name: str
    params: CodeParams
    field: PrimeField
    mode: str = "random"  # random | deterministic-mds | martinian-sundberg | mds
    seed: int | None = None
    attempts: int = 5000

    def build(self, fallback_seed) -> ConvCode:
        if self.mode in ("random", "deterministic-mds"):
            seed = fallback_seed if self.seed is None else np.random.SeedSequence(self.seed)
            result = construct_verified(
                self.params, self.field, seed, max_attempts=self.attempts, mode=self.mode
            )
            g = result.generator
        elif self.mode == "martinian-sundberg":
            g = baseline_martinian_sundberg(self.params, self.field)
        elif self.mode == "mds":
            g = baseline_mds(self.params, self.field)
        else:
            raise ConfigError(f"unknown code mode {self.mode!r}")
        return interleave(g)


@dataclass(frozen=True)
class RunConfig:
    """Validated simulation configuration."""

    seed: int
    horizon: int
    sweep: tuple[float, ...]
    channel: dict
    codes: tuple[CodeSpec, ...]
    trials: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        try:
            seed = int(data["seed"])
            horizon = int(data["horizon"])
            sweep = tuple(float(e) for e in data.get("sweep", [0.0]))
            channel = dict(data["channel"])
            trials = int(data.get("trials", 1))
            codes = []
            for entry in data["codes"]:
                params = CodeParams(
                    window=int(entry["W"]), delay=int(entry["T"]),
                    burst=int(entry["B"]), arbitrary=int(entry["N"]),
                )
                codes.append(CodeSpec(
                    name=str(entry.get("name", entry.get("mode", "code"))),
                    params=params,
                    field=PrimeField(int(entry.get("field", 997))),
                    mode=str(entry.get("mode", "random")),
                    seed=(int(entry["seed"]) if "seed" in entry else None),
                    attempts=int(entry.get("attempts", 5000)),
                ))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad run config: {exc}") from exc
        if trials < 1:
            raise ConfigError("trials must be >= 1")
        if not codes:
            raise ConfigError("at least one code is required")
        if "type" not in channel:
            raise ConfigError("channel config needs a 'type'")
        floor = max(c.params.window + c.params.n + c.params.delay for c in codes)
        if horizon < floor:
            raise ConfigError(f"horizon must be >= W + n + T = {floor}")
        return cls(seed, horizon, sweep, channel, tuple(codes), trials)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def count_losses(code: ConvCode, erased: np.ndarray, horizon: int,
                 source_rng: np.random.Generator,
                 solver: DiagonalSolver | None = None) -> tuple[int, int]:
    """Stream `horizon` uniform source packets through the code and channel.

    ``erased`` must cover horizon + T slots.  Returns (packets, losses).
    Recovered coordinate values are cross-checked against the true source;
    a mismatch would mean a decoder bug and raises immediately.  Passing a
    solver reuses its pattern cache across calls.
    """
    params = code.base.params
    k, t, p = params.k, params.delay, code.base.field.p
    if erased.shape[0] < horizon + t:
        raise ConfigError("erasure trace shorter than horizon + delay")
    if solver is None:
        solver = DiagonalSolver(code)
    sources = source_rng.integers(0, p, size=(horizon, k), dtype=np.int64)
    transmitted = encode_stream(code, sources, pad=t)
    e = np.asarray(erased[:horizon + t], dtype=np.int8)

    losses = 0
    for tstep in np.flatnonzero(e[:horizon] == 1):
        tstep = int(tstep)
        packet_ok = True
        for j in range(k):
            diag = tstep - j
            clip = -diag if diag < 0 else 0
            stop = diag + solver.deadline_pos[j]
            bits = tuple(int(b) for b in e[diag + clip:stop + 1])
            plan = solver.coefficients(j, clip, bits)
            if plan is None:
                packet_ok = False
                break
            offsets, coeffs = plan
            value = 0
            for pos, c in zip(offsets, coeffs):
                value += c * int(transmitted[diag + pos, pos])
            if value % p != int(sources[tstep, j]):
                raise AssertionError(
                    f"decoder returned a wrong value at t={tstep}, coordinate {j}"
                )
        if not packet_ok:
            losses += 1
    return horizon, losses


@dataclass(frozen=True)
class SweepPoint:
    code: str
    channel: str
    epsilon: float
    stats: LossStats


def _format_float(x: float) -> str:
    return f"{x:.10g}"


def run_loss_sweep(cfg: RunConfig, threads: int = 1) -> list[SweepPoint]:
    """Loss probability for every (code, epsilon) pair of the config.

    Channel streams are keyed by (epsilon index, trial) so all codes face the
    same erasures at a sweep point; source streams are keyed per code.
    Aggregation order is fixed, so output does not depend on thread count.
    """
    master = np.random.SeedSequence(cfg.seed)
    codes = [
        (spec, spec.build(np.random.SeedSequence(cfg.seed, spawn_key=(0, idx))))
        for idx, spec in enumerate(cfg.codes)
    ]
    delay_max = max(spec.params.delay for spec in cfg.codes)

    def one_trial(eps_idx: int, trial: int):
        eps = cfg.sweep[eps_idx]
        channel_rng = np.random.default_rng(
            np.random.SeedSequence(cfg.seed, spawn_key=(1, eps_idx, trial))
        )
        channel = make_channel(cfg.channel, eps, channel_rng)
        erased = channel.take(cfg.horizon + delay_max)
        hist = burst_histogram(erased[:cfg.horizon])
        row = []
        for code_idx, (spec, conv) in enumerate(codes):
            source_rng = np.random.default_rng(
                np.random.SeedSequence(cfg.seed, spawn_key=(2, code_idx, eps_idx, trial))
            )
            start = _time.perf_counter()
            packets, losses = count_losses(conv, erased, cfg.horizon, source_rng)
            elapsed = _time.perf_counter() - start
            row.append((code_idx, packets, losses, hist, elapsed))
        return row

    tasks = [(e, t) for e in range(len(cfg.sweep)) for t in range(cfg.trials)]
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda a: one_trial(*a), tasks))
    else:
        rows = [one_trial(*task) for task in tasks]

    channel_name = cfg.channel["type"]
    results: list[SweepPoint] = []
    for eps_idx, eps in enumerate(cfg.sweep):
        per_code: dict[int, LossStats] = {}
        for (e_idx, trial), row in zip(tasks, rows):
            if e_idx != eps_idx:
                continue
            for code_idx, packets, losses, hist, elapsed in row:
                agg = per_code.setdefault(code_idx, LossStats(0, 0, {}, 0.0))
                agg.packets_sent += packets
                agg.packets_lost += losses
                agg.wall_time += elapsed
                for length, count in hist.items():
                    agg.burst_histogram[length] = agg.burst_histogram.get(length, 0) + count
        for code_idx, (spec, _) in enumerate(codes):
            results.append(SweepPoint(spec.name, channel_name, eps, per_code[code_idx]))
    return results


def sweep_csv(points: Iterable[SweepPoint], timing: bool = False) -> str:
    """CSV per the output contract; wall time is reported only on request so
    repeated runs stay byte-identical."""
    lines = [SWEEP_CSV_HEADER]
    for pt in points:
        seconds = f"{pt.stats.wall_time:.3f}" if timing else "0.000"
        lines.append(
            f"{pt.code},{pt.channel},{_format_float(pt.epsilon)},"
            f"{pt.stats.packets_sent},{pt.stats.packets_lost},"
            f"{_format_float(pt.stats.loss_probability)},{seconds}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SuccessRateRow:
    delay: int
    span_target: int
    distance_target: int
    p: int
    samples: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.samples if self.samples else 0.0


def success_rate_experiment(param_list: Sequence[tuple[int, int, int]],
                            field_list: Sequence[int], samples: int, seed: int,
                            threads: int = 1,
                            mode: str = "random") -> list[SuccessRateRow]:
    """Fraction of random draws that verify, per (T, c_T, d_T) and field.

    The targets map to parameters as B = c_T - 1, N = d_T - 1 with window
    T + 1.  Sample s of a cell draws from stream (seed, cell indices, s),
    independent of scheduling.
    """
    from .construct import construct_random, verify_achievable

    if samples < 1:
        raise ConfigError("samples must be >= 1")
    jobs = []
    for p_idx, (delay, span_t, dist_t) in enumerate(param_list):
        params = CodeParams(window=delay + 1, delay=delay,
                            burst=span_t - 1, arbitrary=dist_t - 1)
        for f_idx, p in enumerate(field_list):
            jobs.append((p_idx, f_idx, params, PrimeField(p)))

    def run_chunk(job_idx: int, start: int, stop: int) -> int:
        p_idx, f_idx, params, field = jobs[job_idx]
        hits = 0
        for s in range(start, stop):
            g = construct_random(
                params, field,
                np.random.SeedSequence(seed, spawn_key=(p_idx, f_idx, s)),
                mode=mode,
            )
            if verify_achievable(g):
                hits += 1
        return hits

    chunk = 250
    tasks = [
        (job_idx, start, min(start + chunk, samples))
        for job_idx in range(len(jobs))
        for start in range(0, samples, chunk)
    ]
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(lambda a: run_chunk(*a), tasks))
    else:
        counts = [run_chunk(*task) for task in tasks]

    totals: dict[int, int] = {}
    for (job_idx, _, _), hits in zip(tasks, counts):
        totals[job_idx] = totals.get(job_idx, 0) + hits
    rows = []
    for job_idx, (p_idx, f_idx, params, field) in enumerate(jobs):
        delay, span_t, dist_t = param_list[p_idx]
        rows.append(SuccessRateRow(delay, span_t, dist_t, field.p, samples,
                                   totals.get(job_idx, 0)))
    return rows


def table_csv(rows: Iterable[SuccessRateRow]) -> str:
    lines = [TABLE_CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.delay},{row.span_target},{row.distance_target},{row.p},"
            f"GF({row.p}),{row.samples},{row.successes},{row.rate:.4f}"
        )
    return "\n".join(lines) + "\n"
