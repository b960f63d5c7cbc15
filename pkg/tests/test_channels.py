"""Gilbert-Elliott and Fritchman loss models, replay and i.i.d. sources."""

import numpy as np
import pytest
from scipy import stats

from streamcode import (
    Fritchman, FritchmanParams, GEParams, GilbertElliott, IidErasures,
    ParameterError, ReplaySequence, WbnSpec, burst_histogram,
    fritchman_average_loss_rate, fritchman_step, ge_average_loss_rate,
    ge_step, is_valid_wbn_sequence, make_channel,
)


def test_ge_rate_formula():
    assert ge_average_loss_rate(GEParams(0.0, 0.5, 0.37)) == pytest.approx(0.37)
    assert ge_average_loss_rate(GEParams(0.3, 0.2, 1.0)) == pytest.approx(1.0)
    assert ge_average_loss_rate(GEParams(1e-4, 0.6, 0.01)) == pytest.approx(0.010165, abs=1e-6)
    with pytest.raises(ParameterError):
        ge_average_loss_rate(GEParams(0.0, 0.0, 0.1))


def test_ge_step_edges():
    rng = np.random.default_rng(0)
    # certain recovery from the bad state
    _, state = ge_step(1, GEParams(0.0, 1.0, 0.0), rng)
    assert state == 0
    # absorbing lossless good state
    params = GEParams(0.0, 1.0, 0.0)
    state = 0
    for _ in range(100):
        erased, state = ge_step(state, params, rng)
        assert erased == 0 and state == 0


def test_ge_stream_deterministic_and_step_equivalent():
    params = GEParams(0.05, 0.4, 0.1)
    a = GilbertElliott(params, 123).take(5000)
    b = GilbertElliott(params, 123).take(5000)
    assert np.array_equal(a, b)
    c = GilbertElliott(params, 123)
    stepped = np.array([c.step() for _ in range(5000)], dtype=np.uint8)
    assert np.array_equal(a, stepped)


def batch_means_se(bits: np.ndarray, batches: int = 200) -> float:
    """Standard error of the mean for a correlated 0/1 stream (batch means)."""
    usable = (len(bits) // batches) * batches
    means = bits[:usable].astype(float).reshape(batches, -1).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(batches))


def test_ge_empirical_rate_within_4_se():
    params = GEParams(1e-3, 0.5, 0.02)
    bits = GilbertElliott(params, 7).take(400_000)
    expected = ge_average_loss_rate(params)
    assert abs(bits.mean() - expected) < 4 * batch_means_se(bits)


def test_ge_sojourn_lengths_geometric():
    # fast alternation so plenty of bad sojourns accumulate
    params = GEParams(0.5, 0.6, 0.0)
    bits = GilbertElliott(params, 11, initial="good").take(600_000)
    hist = burst_histogram(bits)
    lengths = sorted(hist)
    total = sum(hist.values())
    assert total > 100_000
    # chi-square against geometric(0.6) with a pooled tail
    cutoff = 8
    observed, expected = [], []
    for length in range(1, cutoff):
        observed.append(hist.get(length, 0))
        expected.append(total * 0.4 ** (length - 1) * 0.6)
    observed.append(sum(hist.get(length, 0) for length in lengths if length >= cutoff))
    expected.append(total * 0.4 ** (cutoff - 1))
    result = stats.chisquare(observed, expected)
    assert result.pvalue > 0.001


def test_fritchman_step_walks_the_bad_chain():
    # with beta = 1 every bad excursion visits E_1..E_M in order, then exits
    params = FritchmanParams(1.0, 1.0, 0.0, 3)
    rng = np.random.default_rng(2)
    state = 0
    visited = []
    for _ in range(8):
        erased, state = fritchman_step(state, params, rng)
        visited.append((erased, state))
    assert visited == [(1, 1), (1, 2), (1, 3), (0, 0)] * 2


def test_fritchman_m1_is_bitwise_ge():
    ge_params = GEParams(0.03, 0.4, 0.07)
    fr_params = FritchmanParams(0.03, 0.4, 0.07, 1)
    a = GilbertElliott(ge_params, 5).take(20000)
    b = Fritchman(fr_params, 5).take(20000)
    assert np.array_equal(a, b)


def test_fritchman_stationary_rate_matches_linear_algebra():
    params = FritchmanParams(3e-5, 0.6, 0.01, 4)
    m = params.bad_states
    # transition matrix of the (M+1)-state chain, solved directly
    P = np.zeros((m + 1, m + 1))
    P[0, 0], P[0, 1] = 1 - params.alpha, params.alpha
    for state in range(1, m):
        P[state, state], P[state, state + 1] = 1 - params.beta, params.beta
    P[m, m], P[m, 0] = 1 - params.beta, params.beta
    eigen = np.vstack([P.T - np.eye(m + 1), np.ones(m + 1)])
    target = np.concatenate([np.zeros(m + 1), [1.0]])
    pi = np.linalg.lstsq(eigen, target, rcond=None)[0]
    analytic = pi[0] * params.epsilon + (1 - pi[0])
    assert fritchman_average_loss_rate(params) == pytest.approx(analytic, rel=1e-12)


def test_fritchman_empirical_rate_and_sojourns():
    params = FritchmanParams(2e-3, 0.5, 0.0, 3)
    bits = Fritchman(params, 13).take(400_000)
    expected = fritchman_average_loss_rate(params)
    assert abs(bits.mean() - expected) < 4 * batch_means_se(bits)
    # mean bad sojourn is M/beta (sum of M geometric stage times)
    hist = burst_histogram(bits)
    total = sum(hist.values())
    mean_len = sum(k * v for k, v in hist.items()) / total
    assert mean_len == pytest.approx(params.bad_states / params.beta, rel=0.1)


def test_replay_sequence():
    src = ReplaySequence("0", period=1)
    assert not src.take(50).any()
    periodic = ReplaySequence("1110000000000000")
    bits = periodic.take(64)
    assert is_valid_wbn_sequence(bits, WbnSpec(5, 3, 2))
    dense = ReplaySequence("11", period=2)
    assert not is_valid_wbn_sequence(dense.take(20), WbnSpec(5, 3, 2))
    with pytest.raises(ParameterError):
        ReplaySequence("")
    with pytest.raises(ParameterError):
        ReplaySequence("101", period=2)


def test_replay_step_matches_take():
    a = ReplaySequence("0110", period=6)
    b = ReplaySequence("0110", period=6)
    assert [a.step() for _ in range(20)] == b.take(20).tolist()


def test_iid_channel():
    bits = IidErasures(0.3, 21).take(200_000)
    assert abs(bits.mean() - 0.3) < 4 * np.sqrt(0.3 * 0.7 / 200_000)
    assert not IidErasures(0.0, 1).take(100).any()


def test_make_channel_factory():
    ge = make_channel({"type": "ge", "alpha": 0.1, "beta": 0.5}, 0.02, 3)
    assert isinstance(ge, GilbertElliott) and ge.params.epsilon == 0.02
    fr = make_channel({"type": "fritchman", "alpha": 0.1, "beta": 0.5, "bad_states": 2}, 0.02, 3)
    assert isinstance(fr, Fritchman)
    rp = make_channel({"type": "replay", "bits": "10"}, 0.5, 3)
    assert isinstance(rp, ReplaySequence)
    with pytest.raises(ParameterError):
        make_channel({"type": "nope"}, 0.1, 3)


def test_stationary_initial_state_draw():
    # overwhelmingly-bad chain: stationary start should usually be bad
    params = GEParams(0.9, 0.001, 0.0)
    starts = [GilbertElliott(params, seed).state for seed in range(200)]
    assert sum(1 for s in starts if s == 1) > 150
    assert GilbertElliott(params, 0, initial="good").state == 0
