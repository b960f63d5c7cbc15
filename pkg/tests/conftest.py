"""Shared fixtures: the worked example matrices used across the test suite."""

import pytest

from streamcode import CodeParams, GeneratorMatrix, PrimeField
from streamcode.gf import FieldMatrix


def make_generator(W, T, B, N, p, rows) -> GeneratorMatrix:
    return GeneratorMatrix(CodeParams(W, T, B, N), FieldMatrix(PrimeField(p), rows))


# Worked rate-3/6 block code for the (5, 3, 2) model with delay 4.
EX2_ROWS = [
    [1, 0, 0, 1, 1, 0],
    [0, 1, 0, 0, 1, 1],
    [0, 0, 1, 0, 1, 2],
]

# Worked rate-4/7 code for (6, 5, 3, 2).
EX3_ROWS = [
    [1, 0, 0, 0, 1, 2, 0],
    [0, 1, 0, 0, 0, 1, 3],
    [0, 0, 1, 0, 0, 2, 1],
    [0, 0, 0, 1, 1, 1, 1],
]

# Burst-only baseline shaped like the rate-4/7 code above (row weight 2).
EX3_BASELINE_ROWS = [
    [1, 0, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 0, 1],
    [0, 0, 0, 1, 1, 1, 1],
]

# Worked rate-6/10 candidate for (8, 7, 4, 2) as published.
EX4_ROWS = [
    [1, 0, 0, 0, 0, 0, 1, 6, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 5, 25, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 16, 64],
    [0, 0, 0, 1, 0, 0, 0, 0, 9, 27],
    [0, 0, 0, 0, 1, 0, 1, 2, 4, 8],
    [0, 0, 0, 0, 0, 1, 1, 1, 1, 1],
]

# Worked rate-3/7 code for (6, 5, 4, 3).
EX5_ROWS = [
    [1, 0, 0, 1, 1, 3, 0],
    [0, 1, 0, 1, 0, 2, 4],
    [0, 0, 1, 1, 0, 1, 1],
]

# Worked rate-4/10 code for (8, 7, 6, 4).
EX6_ROWS = [
    [1, 0, 0, 0, 1, 4, 16, 64, 0, 0],
    [0, 1, 0, 0, 1, 3, 0, 27, 81, 0],
    [0, 0, 1, 0, 1, 2, 0, 0, 16, 32],
    [0, 0, 0, 1, 1, 1, 0, 0, 1, 1],
]


@pytest.fixture
def ex2_gf5():
    return make_generator(5, 4, 3, 2, 5, EX2_ROWS)


@pytest.fixture
def ex3_gf41():
    return make_generator(6, 5, 3, 2, 41, EX3_ROWS)


@pytest.fixture
def ex3_baseline_gf41():
    return make_generator(6, 5, 3, 2, 41, EX3_BASELINE_ROWS)


@pytest.fixture
def ex5_gf47():
    return make_generator(6, 5, 4, 3, 47, EX5_ROWS)
