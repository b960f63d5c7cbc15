"""Erasure-sequence generators: Gilbert-Elliott, Fritchman, replay, i.i.d.

All stochastic sources draw from a seedable numpy Generator.  Within one
step the order is fixed for reproducibility: Markov transition first, then
the loss draw in the *new* state; bad states lose with probability 1 and
consume no loss draw.  Streams are split by seed plus integer stream ids
(``np.random.SeedSequence(seed, spawn_key=ids)``) so parallel runs reproduce
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError

GOOD = 0


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class GEParams:
    """Two-state Markov loss model: good loses w.p. epsilon, bad always."""

    alpha: float  # P(good -> bad)
    beta: float   # P(bad -> good)
    epsilon: float

    def __post_init__(self):
        _check_prob("alpha", self.alpha)
        _check_prob("beta", self.beta)
        _check_prob("epsilon", self.epsilon)


@dataclass(frozen=True)
class FritchmanParams:
    """One good state plus a chain of bad states E_1..E_M.

    good -> E_1 w.p. alpha; E_m -> E_{m+1} w.p. beta; the last bad state
    returns to good w.p. beta.  Loss behaviour matches the two-state model.
    """

    alpha: float
    beta: float
    epsilon: float
    bad_states: int

    def __post_init__(self):
        _check_prob("alpha", self.alpha)
        _check_prob("beta", self.beta)
        _check_prob("epsilon", self.epsilon)
        if self.bad_states < 1:
            raise ParameterError("need at least one bad state")


def ge_average_loss_rate(params: GEParams) -> float:
    """Stationary loss rate beta/(alpha+beta)*epsilon + alpha/(alpha+beta)."""
    denom = params.alpha + params.beta
    if denom == 0:
        raise ParameterError("alpha = beta = 0 has no stationary rate")
    return params.beta / denom * params.epsilon + params.alpha / denom


def fritchman_average_loss_rate(params: FritchmanParams) -> float:
    """Stationary loss rate of the (M+1)-state chain.

    Every bad state carries stationary mass alpha/beta relative to the good
    state, so the rate closes to (epsilon*beta + M*alpha) / (beta + M*alpha).
    """
    if params.alpha == 0 and params.beta == 0:
        raise ParameterError("alpha = beta = 0 has no stationary rate")
    if params.beta == 0:
        return 1.0 if params.alpha > 0 else params.epsilon
    m = params.bad_states
    return (params.epsilon * params.beta + m * params.alpha) / (params.beta + m * params.alpha)


def ge_step(state: int, params: GEParams, rng: np.random.Generator) -> tuple[int, int]:
    """One channel use: returns (erased, next_state)."""
    if state == GOOD:
        if rng.random() < params.alpha:
            state = 1
    else:
        if rng.random() < params.beta:
            state = GOOD
    if state == GOOD:
        return (1 if rng.random() < params.epsilon else 0), state
    return 1, state


def fritchman_step(state: int, params: FritchmanParams,
                   rng: np.random.Generator) -> tuple[int, int]:
    """One channel use of the multi-bad-state chain: (erased, next_state)."""
    if state == GOOD:
        if rng.random() < params.alpha:
            state = 1
    elif state < params.bad_states:
        if rng.random() < params.beta:
            state += 1
    else:
        if rng.random() < params.beta:
            state = GOOD
    if state == GOOD:
        return (1 if rng.random() < params.epsilon else 0), state
    return 1, state


class _MarkovErasureSource:
    """Shared machinery for the two Markov models."""

    def __init__(self, params, rng_or_seed, initial: str = "stationary"):
        self.params = params
        self.rng = (
            rng_or_seed
            if isinstance(rng_or_seed, np.random.Generator)
            else np.random.default_rng(rng_or_seed)
        )
        if initial == "good":
            self.state = GOOD
        elif initial == "stationary":
            self.state = self._stationary_draw()
        else:
            raise ParameterError(f"unknown initial state policy {initial!r}")

    def _stationary_draw(self) -> int:
        weights = self._stationary_distribution()
        u = self.rng.random()
        acc = 0.0
        for state, w in enumerate(weights):
            acc += w
            if u < acc:
                return state
        return len(weights) - 1

    def take(self, count: int) -> np.ndarray:
        """The next ``count`` erasure flags (uint8), same stream as step()."""
        out = np.empty(count, dtype=np.uint8)
        for i in range(count):
            out[i] = self.step()
        return out

    def step(self) -> int:
        raise NotImplementedError


class GilbertElliott(_MarkovErasureSource):
    def _stationary_distribution(self) -> list[float]:
        denom = self.params.alpha + self.params.beta
        if denom == 0:
            raise ParameterError("alpha = beta = 0 has no stationary state; use initial='good'")
        return [self.params.beta / denom, self.params.alpha / denom]

    def step(self) -> int:
        erased, self.state = ge_step(self.state, self.params, self.rng)
        return erased


class Fritchman(_MarkovErasureSource):
    def _stationary_distribution(self) -> list[float]:
        p = self.params
        if p.beta == 0 or (p.alpha == 0 and p.beta == 0):
            raise ParameterError("degenerate chain has no stationary state; use initial='good'")
        good = p.beta / (p.beta + p.bad_states * p.alpha)
        bad = good * p.alpha / p.beta
        return [good] + [bad] * p.bad_states

    def step(self) -> int:
        erased, self.state = fritchman_step(self.state, self.params, self.rng)
        return erased


class ReplaySequence:
    """Deterministic periodic erasure stream from a fixed bit template."""

    def __init__(self, bits: Sequence[int] | str, period: int | None = None):
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits]
        bits = list(bits)
        if not bits:
            raise ParameterError("replay template must be nonempty")
        if any(b not in (0, 1) for b in bits):
            raise ParameterError("replay template must be binary")
        period = len(bits) if period is None else period
        if period < len(bits):
            raise ParameterError("period shorter than the template")
        self.template = np.array(bits + [0] * (period - len(bits)), dtype=np.uint8)
        self._pos = 0

    def step(self) -> int:
        value = int(self.template[self._pos])
        self._pos = (self._pos + 1) % self.template.shape[0]
        return value

    def take(self, count: int) -> np.ndarray:
        start = self._pos
        idx = (start + np.arange(count)) % self.template.shape[0]
        self._pos = int((start + count) % self.template.shape[0])
        return self.template[idx]


class IidErasures:
    """Memoryless Bernoulli(epsilon) losses."""

    def __init__(self, epsilon: float, rng_or_seed):
        _check_prob("epsilon", epsilon)
        self.epsilon = epsilon
        self.rng = (
            rng_or_seed
            if isinstance(rng_or_seed, np.random.Generator)
            else np.random.default_rng(rng_or_seed)
        )

    def step(self) -> int:
        return 1 if self.rng.random() < self.epsilon else 0

    def take(self, count: int) -> np.ndarray:
        return (self.rng.random(count) < self.epsilon).astype(np.uint8)


def make_channel(spec: dict, epsilon: float, rng_or_seed):
    """Build an erasure source from a config mapping.

    ``epsilon`` is injected from the sweep; replay sources ignore it.
    """
    kind = spec.get("type")
    if kind == "ge":
        params = GEParams(float(spec["alpha"]), float(spec["beta"]), epsilon)
        return GilbertElliott(params, rng_or_seed, spec.get("initial", "stationary"))
    if kind == "fritchman":
        params = FritchmanParams(
            float(spec["alpha"]), float(spec["beta"]), epsilon, int(spec["bad_states"])
        )
        return Fritchman(params, rng_or_seed, spec.get("initial", "stationary"))
    if kind == "iid":
        return IidErasures(epsilon, rng_or_seed)
    if kind == "replay":
        return ReplaySequence(spec["bits"], spec.get("period"))
    raise ParameterError(f"unknown channel type {kind!r}")
