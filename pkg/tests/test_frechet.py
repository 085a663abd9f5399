import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbfpnn.errors import DimensionError, ParameterError, ValidationError
from rbfpnn.frechet import (
    discrete_frechet,
    discrete_frechet_bruteforce,
    enumerate_paired_walks,
    generalized_frechet,
    pairwise_generalized,
    point_dist,
)

small_seq = st.lists(st.integers(0, 3).map(float), min_size=1, max_size=5)
real_seq = st.lists(
    st.floats(-10, 10, allow_nan=False, allow_infinity=False), min_size=1, max_size=8
)


@pytest.mark.parametrize("a, b, expected", [(3.0, 3.0, 0.0), (0.0, 2.0, 2.0), (-1.5, 1.5, 3.0)])
def test_point_dist(a, b, expected):
    assert point_dist(a, b) == expected
    assert point_dist(b, a) == expected


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((0, 1, 2), (0, 2), 1.0),
        ((0, 5), (0, 1, 2, 3, 4, 5), 2.0),
        ((7, 7, 7), (7,), 0.0),
    ],
)
def test_discrete_frechet_examples(a, b, expected):
    # expected values come from the enumeration oracle
    assert discrete_frechet_bruteforce(a, b) == expected
    assert discrete_frechet(a, b) == expected


@pytest.mark.parametrize(
    "a, b, expected", [((0, 1, 2), (0, 2), 1.0), ((4,), (9,), 5.0), ((1, 2), (1, 2), 0.0)]
)
def test_bruteforce_examples(a, b, expected):
    assert discrete_frechet_bruteforce(a, b) == expected


def test_bruteforce_guard():
    with pytest.raises(ParameterError):
        discrete_frechet_bruteforce(range(9), range(8))


@pytest.mark.parametrize("bad", [[], [1.0, float("nan")], [float("inf")]])
def test_rejects_invalid_sequences(bad):
    with pytest.raises(ValidationError):
        discrete_frechet(bad, [1.0])


def _is_partition(ranges, size):
    pos = 0
    for lo, hi in ranges:
        if lo != pos or hi <= lo:
            return False
        pos = hi
    return pos == size


@pytest.mark.parametrize("m, n", [(1, 1), (1, 4), (3, 2), (4, 4)])
def test_paired_walks_are_valid_and_unique(m, n):
    walks = list(enumerate_paired_walks(m, n))
    assert len(walks) == len(set(walks))
    for w in walks:
        assert _is_partition([seg[0] for seg in w], m)
        assert _is_partition([seg[1] for seg in w], n)
        for (a0, a1), (b0, b1) in w:
            assert a1 - a0 == 1 or b1 - b0 == 1


def test_degenerate_single_segment_walk_is_enumerated():
    walks = set(enumerate_paired_walks(1, 3))
    assert (((0, 1), (0, 3)),) in walks


def test_dp_matches_oracle_exhaustively_short():
    grid = [0.0, 1.0, 2.0, 3.0]
    seqs = [s for L in (1, 2, 3) for s in itertools.product(grid, repeat=L)]
    for a in seqs:
        for b in seqs:
            assert discrete_frechet(a, b) == discrete_frechet_bruteforce(a, b)


@settings(max_examples=300, deadline=None)
@given(small_seq, small_seq)
def test_dp_matches_oracle_property(a, b):
    assert discrete_frechet(a, b) == discrete_frechet_bruteforce(a, b)


@settings(max_examples=300, deadline=None)
@given(real_seq, real_seq)
def test_metric_properties(a, b):
    d = discrete_frechet(a, b)
    assert d == discrete_frechet(b, a)
    assert d >= 0
    assert discrete_frechet(a, a) == 0.0
    assert d >= max(point_dist(a[0], b[0]), point_dist(a[-1], b[-1]))
    assert d <= max(point_dist(x, y) for x in a for y in b)


@settings(max_examples=200, deadline=None)
@given(real_seq, real_seq, real_seq)
def test_triangle_inequality(a, b, c):
    assert discrete_frechet(a, c) <= discrete_frechet(a, b) + discrete_frechet(b, c) + 1e-12


@settings(max_examples=200, deadline=None)
@given(small_seq, small_seq, st.integers(-5, 5).map(float))
def test_translation_equivariance(a, b, shift):
    moved_a = [v + shift for v in a]
    moved_b = [v + shift for v in b]
    assert discrete_frechet(moved_a, moved_b) == discrete_frechet(a, b)


class TestGeneralized:
    def test_single_component_reduces(self):
        assert generalized_frechet([[0, 1, 2]], [[0, 2]]) == 1.0

    def test_pythagorean(self):
        # component distances: d_F((0,0),(3,3)) = 3, d_F((0,0),(4,4)) = 4
        assert discrete_frechet_bruteforce((0, 0), (3, 3)) == 3.0
        assert discrete_frechet_bruteforce((0, 0), (4, 4)) == 4.0
        assert generalized_frechet([[0, 0], [0, 0]], [[3, 3], [4, 4]]) == 5.0

    def test_identity(self):
        x = np.random.default_rng(3).normal(size=(3, 6))
        assert generalized_frechet(x, x) == 0.0

    def test_unequal_lengths_across_samples(self):
        got = generalized_frechet([[0, 1, 2], [0, 0, 0]], [[0, 2], [1, 1]])
        assert got == pytest.approx(math.sqrt(1.0 + 1.0), abs=1e-12)

    def test_component_count_mismatch(self):
        with pytest.raises(DimensionError):
            generalized_frechet([[0, 1], [1, 2]], [[0, 1]])

    def test_symmetric(self):
        rng = np.random.default_rng(11)
        x, y = rng.normal(size=(2, 4)), rng.normal(size=(2, 4))
        assert generalized_frechet(x, y) == generalized_frechet(y, x)

    def test_pairwise_matrix(self):
        X = np.random.default_rng(5).normal(size=(6, 2, 5))
        D = pairwise_generalized(X)
        assert np.array_equal(D, D.T)
        assert np.all(np.diag(D) == 0)
        assert D[1, 4] == generalized_frechet(X[1], X[4])
