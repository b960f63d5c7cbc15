"""Templates, capacity, the achievability verifier, and the random constructor."""

from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from streamcode import (
    CodeParams, ConstructionExhaustedError, GeneratorMatrix, ParameterError,
    PrimeField, baseline_martinian_sundberg, baseline_mds, build_template,
    capacity, construct_random, construct_verified, field_size_bound,
    find_achievability_witness, mds_parity, next_prime_above, verify_achievable,
)
from streamcode.construct import CELL_FREE, CELL_MDS, CELL_ZERO

from conftest import EX3_ROWS, EX4_ROWS, EX6_ROWS, make_generator


def support(g: GeneratorMatrix) -> list[list[int]]:
    return (g.parity != 0).astype(int).tolist()


def test_code_params_validation():
    p = CodeParams(6, 5, 3, 2)
    assert (p.k, p.n) == (4, 7)
    assert p.rate == Fraction(4, 7)
    CodeParams(5, 4, 0, 0)  # degenerate lossless model
    for bad in [(5, 5, 3, 2), (6, 5, 2, 3), (6, 5, 3, 0), (6, 5, 6, 2)]:
        with pytest.raises(ParameterError):
            CodeParams(*bad)


def test_small_window_constructor():
    p = CodeParams.window_limited(3, 5, 2, 1)
    assert p.delay == 2 and p.rate == Fraction(2, 4)
    with pytest.raises(ParameterError):
        CodeParams.window_limited(8, 5, 3, 2)  # window > delay belongs to CodeParams
    with pytest.raises(ParameterError):
        CodeParams.window_limited(2, 5, 2, 1)


def test_capacity_values():
    assert capacity(6, 5, 3, 2) == Fraction(4, 7)
    assert capacity(8, 7, 6, 4) == Fraction(2, 5)
    # window shorter than the packet lifespan
    assert capacity(3, 5, 2, 1) == Fraction(1, 2)
    with pytest.raises(ParameterError):
        capacity(6, 5, 2, 3)


def test_capacity_small_window_branch_consistency():
    # the small-window rate equals the wide-window rate of the delay-(W-1) code
    for w, t, b, n in [(3, 5, 2, 1), (4, 9, 3, 2), (5, 7, 4, 3)]:
        assert capacity(w, t, b, n) == capacity(w, w - 1, b, n)


def test_field_size_bound_values():
    assert field_size_bound(5, 3, 2) == 38
    assert next_prime_above(field_size_bound(5, 3, 2)) == 41
    assert field_size_bound(7, 4, 2) == 66
    assert next_prime_above(field_size_bound(7, 4, 2)) == 67
    assert field_size_bound(7, 6, 4) == 146
    assert next_prime_above(field_size_bound(7, 6, 4)) == 149


def test_template_support_rate_half_regime():
    tpl = build_template(CodeParams(6, 5, 3, 2))
    assert tpl.regime == "high-rate"
    grid = tpl.cell_grid()
    expect = [
        [CELL_FREE, CELL_FREE, CELL_ZERO],
        [CELL_ZERO, CELL_FREE, CELL_FREE],
        [CELL_ZERO, CELL_FREE, CELL_FREE],
        [CELL_MDS, CELL_MDS, CELL_MDS],
    ]
    assert grid.tolist() == expect


def test_template_support_low_rate_regime():
    tpl = build_template(CodeParams(6, 5, 4, 3))
    assert tpl.regime == "low-rate"
    nonzero = (tpl.cell_grid() != CELL_ZERO).astype(int).tolist()
    assert nonzero == [[1, 1, 1, 0], [1, 0, 1, 1], [1, 0, 1, 1]]


def test_template_supports_match_worked_candidates():
    # the published worked candidates have exactly the template support
    for (w, t, b, n, rows) in [
        (6, 5, 3, 2, EX3_ROWS),
        (8, 7, 4, 2, EX4_ROWS),
        (8, 7, 6, 4, EX6_ROWS),
    ]:
        params = CodeParams(w, t, b, n)
        tpl = build_template(params)
        grid_nonzero = (tpl.cell_grid() != CELL_ZERO)
        parity = np.array(rows)[:, params.k:]
        assert np.array_equal(parity != 0, grid_nonzero), (w, t, b, n)


def test_template_degenerates_to_mds_when_burst_equals_arbitrary():
    tpl = build_template(CodeParams(8, 7, 4, 4))
    assert tpl.regime == "mds"
    assert (tpl.cell_grid() == CELL_MDS).all()


def test_template_min_row_weight():
    # with every free cell nonzero, each generator row has weight >= N+1
    for w, t, b, arb in [(6, 5, 3, 2), (8, 7, 4, 2), (6, 5, 4, 3), (8, 7, 6, 4), (9, 8, 5, 3)]:
        grid = build_template(CodeParams(w, t, b, arb)).cell_grid()
        for row_support in (grid != CELL_ZERO).sum(axis=1):
            assert 1 + int(row_support) >= arb + 1


def test_verify_worked_examples(ex2_gf5, ex3_gf41, ex5_gf47):
    assert verify_achievable(ex2_gf5)
    assert verify_achievable(ex3_gf41)
    assert verify_achievable(ex5_gf47)
    assert verify_achievable(make_generator(6, 5, 4, 3, 5, ex5_gf47.matrix.tolist()))
    assert verify_achievable(make_generator(8, 7, 6, 4, 149, EX6_ROWS))


def test_verify_rejects_burst_only_baseline(ex3_baseline_gf41):
    witness = find_achievability_witness(ex3_baseline_gf41)
    assert witness is not None
    i, pattern = witness
    assert pattern.weight == 2 and not pattern.is_consecutive()


def test_worked_rate_4_7_candidate_fails_over_gf5():
    """The small-field variant of the rate-4/7 candidate is genuinely broken.

    With losses at times 1 and 2 (two scattered erasures, admissible for
    (6,3,2)), the equations available by symbol 1's deadline reduce to
    s1 + 2*s2 and 3*s1 + s2, whose determinant is -5 = 0 mod 5.  Confirmed
    here by brute force over every source vector: symbol 1 is never pinned
    down.  See notes/decisions.md.
    """
    g5 = make_generator(6, 5, 3, 2, 5, EX3_ROWS)
    witness = find_achievability_witness(g5)
    assert witness is not None
    assert witness[0] == 1 and str(witness[1]) == "110000"

    G = np.array(EX3_ROWS)
    received = [0, 3, 4, 5, 6]  # times <= deadline 6, with 1 and 2 erased
    classes: dict[tuple, set[int]] = {}
    for s in product(range(5), repeat=4):
        x = (np.array(s) @ G) % 5
        classes.setdefault(tuple(x[received]), set()).add(s[1])
    assert all(len(v) > 1 for v in classes.values())


def test_worked_rate_6_10_candidate_fails_over_every_field():
    """The published rate-6/10 candidate has an integer-level defect.

    Restricted to rows 3..5, its last three parity columns satisfy
    col9 = 3*col8 - 2*col7 over the integers, so a length-4 burst erasing
    times 3..6 leaves symbol 3 undetermined over any prime field.  See
    notes/decisions.md.
    """
    sub = np.array(EX4_ROWS)[3:6][:, [7, 8, 9]]
    assert np.array_equal(sub[:, 2], 3 * sub[:, 1] - 2 * sub[:, 0])
    for p in (67, 997):
        witness = find_achievability_witness(make_generator(8, 7, 4, 2, p, EX4_ROWS))
        assert witness is not None
        assert witness[0] == 3 and str(witness[1]) == "11110000"


def test_verify_matches_exhaustive_decode_oracle(ex3_gf41):
    """Independent oracle: achievability == every admissible erasure prefix
    leaves every symbol decodable by its deadline (full elimination)."""
    from streamcode import ReceivedBlock, block_encode, decode_oracle
    from streamcode.erasures import window_admissible

    for g, expected in [
        (ex3_gf41, True),
        (make_generator(6, 5, 3, 2, 5, EX3_ROWS), False),
    ]:
        n, b, nn = g.params.n, g.params.burst, g.params.arbitrary
        ok = True
        for bits in product((0, 1), repeat=n):
            if not all(
                window_admissible(bits[i:i + 6], b, nn) for i in range(n)
            ):
                continue
            codeword = block_encode([1, 2, 3, 4], g)
            outcome = decode_oracle(ReceivedBlock.receive(codeword, bits), g)
            if not outcome.all_recovered:
                ok = False
                break
        assert ok == expected == verify_achievable(g)


def test_construct_random_deterministic():
    params = CodeParams(6, 5, 3, 2)
    f = PrimeField(41)
    a = construct_random(params, f, 123)
    b = construct_random(params, f, 123)
    c = construct_random(params, f, 124)
    assert np.array_equal(a.matrix.array, b.matrix.array)
    assert not np.array_equal(a.matrix.array, c.matrix.array)


def test_construct_random_fills_only_template_support():
    params = CodeParams(8, 7, 6, 4)
    g = construct_random(params, PrimeField(149), 5)
    grid = build_template(params).cell_grid()
    assert not g.parity[grid == CELL_ZERO].any()


def test_deterministic_mds_mode_pins_parity_blocks():
    params = CodeParams(8, 7, 4, 4)  # burst == arbitrary: no free cells at all
    f = PrimeField(13)
    a = construct_random(params, f, 1, mode="deterministic-mds")
    b = construct_random(params, f, 999, mode="deterministic-mds")
    assert np.array_equal(a.parity, b.parity)
    assert np.array_equal(a.parity, mds_parity(4, 4, f).array)

    params = CodeParams(6, 5, 3, 2)
    g = construct_random(params, f, 7, mode="deterministic-mds")
    assert np.array_equal(g.parity[3], mds_parity(1, 3, f).array[0])

    # low-rate placement: the one parity block is split around the zero band
    params = CodeParams(6, 5, 4, 3)
    g = construct_random(params, PrimeField(47), 7, mode="deterministic-mds")
    v = mds_parity(2, 3, PrimeField(47)).array  # height k-B+N, width N
    assert np.array_equal(g.parity[1:, :1], v[:, :1])   # left split, width B-k
    assert np.array_equal(g.parity[1:, 2:], v[:, 1:])   # right split after zeros
    assert not g.parity[1:, 1].any()


def test_construct_verified_examples():
    res = construct_verified(CodeParams(6, 5, 3, 2), PrimeField(41), seed=0)
    assert verify_achievable(res.generator)
    assert res.generator.params.rate == capacity(6, 5, 3, 2)

    res = construct_verified(CodeParams(2, 1, 1, 1), PrimeField(2), seed=0)
    assert res.generator.matrix.tolist() == [[1, 1]]


def test_window_limited_construction_achieves_small_window_capacity():
    # delay budget 5 but window only 3: build at effective delay 2
    params = CodeParams.window_limited(3, 5, 2, 1)
    result = construct_verified(params, PrimeField(11), 1)
    assert result.generator.params.rate == capacity(3, 5, 2, 1)
    assert verify_achievable(result.generator)


def test_construct_verified_exhausts_on_tiny_field():
    with pytest.raises(ConstructionExhaustedError) as err:
        construct_verified(CodeParams(8, 7, 7, 5), PrimeField(2), seed=0, max_attempts=40)
    assert err.value.attempts == 40


def test_martinian_sundberg_baseline(ex3_baseline_gf41):
    params = CodeParams(6, 5, 3, 2)
    g = baseline_martinian_sundberg(params, PrimeField(41))
    assert support(g) == support(ex3_baseline_gf41)
    assert not verify_achievable(g)

    # single-arbitrary-loss regime: rate T/(T+B), passes verification
    for t, b in [(3, 2), (5, 3), (7, 7)]:
        params = CodeParams(t + 1, t, b, 1)
        assert params.rate == Fraction(t, t + b)
        g = baseline_martinian_sundberg(params, PrimeField(next_prime_above(max(t, 4))))
        assert verify_achievable(g)

    # k == burst: parity is the identity
    g = baseline_martinian_sundberg(CodeParams(8, 7, 7, 1), PrimeField(5))
    assert np.array_equal(g.parity, np.eye(7, dtype=np.int64))

    with pytest.raises(ParameterError):
        baseline_martinian_sundberg(CodeParams(6, 5, 4, 3), PrimeField(41))


def test_mds_baseline():
    g = baseline_mds(CodeParams(8, 7, 4, 4), PrimeField(13))
    assert verify_achievable(g)
    degenerate = baseline_mds(CodeParams(5, 4, 0, 0), PrimeField(7))
    assert np.array_equal(degenerate.matrix.array, np.eye(5, dtype=np.int64))


def test_json_round_trip(ex3_gf41):
    text = ex3_gf41.to_json()
    back = GeneratorMatrix.from_json(text)
    assert back.params == ex3_gf41.params
    assert np.array_equal(back.matrix.array, ex3_gf41.matrix.array)


def test_identity_code_fails_with_losses():
    g = baseline_mds(CodeParams(5, 4, 0, 0), PrimeField(7))
    bad = GeneratorMatrix(CodeParams(6, 5, 1, 1), baseline_mds(
        CodeParams(6, 5, 1, 1), PrimeField(7)).matrix)
    assert verify_achievable(g)       # lossless model: nothing to recover
    assert verify_achievable(bad)     # one parity column covers one loss
    naked = make_generator(6, 5, 1, 1, 7, np.hstack(
        [np.eye(5, dtype=int), np.zeros((5, 1), dtype=int)]))
    assert not verify_achievable(naked)
