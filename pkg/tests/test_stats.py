"""Rank-sum test checks against hand-computed values."""

import numpy as np
import pytest

from shotline.stats import rank_sum_test


def test_identical_samples_give_p_one():
    res = rank_sum_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert res.p_value == 1.0


def test_fully_separated_samples():
    # {1,2,3} vs {10,20,30}: every x below every y, so U(x) = 0.
    res = rank_sum_test([1, 2, 3], [10, 20, 30])
    assert res.u == 0.0
    assert res.p_value < 0.1


def test_hand_computed_u_statistic():
    # x = {1, 4}, y = {2, 3}: ranks 1,4 vs 2,3 -> R1 = 5,
    # U1 = n1*n2 + n1(n1+1)/2 - R1 = 4 + 3 - 5 = 2 (the tie-free table).
    res = rank_sum_test([1, 4], [2, 3])
    assert res.u == 2.0
    assert res.p_value == 1.0  # U equals its null mean


def test_symmetry_of_p_value():
    rng = np.random.default_rng(40)
    x = rng.normal(0, 1, 20)
    y = rng.normal(0.8, 1, 20)
    a = rank_sum_test(x, y)
    b = rank_sum_test(y, x)
    assert a.p_value == pytest.approx(b.p_value, rel=1e-12)
    assert a.u + b.u == pytest.approx(len(x) * len(y))


def test_z_value_against_normal_formula():
    # n1 = n2 = 20 without ties: sd = sqrt(n1*n2*(n+1)/12).
    x = list(range(0, 40, 2))  # even numbers
    y = list(range(1, 41, 2))  # odd numbers, interleaved
    res = rank_sum_test(x, y)
    # interleaved samples: U is close to its mean, p should be large
    assert res.p_value > 0.5


def test_shifted_distributions_detected():
    rng = np.random.default_rng(41)
    x = rng.normal(0.0, 1.0, 20)
    y = rng.normal(2.0, 1.0, 20)
    assert rank_sum_test(x, y).p_value < 1e-4


def test_ties_across_groups_handled():
    res = rank_sum_test([1, 1, 2], [1, 2, 2])
    assert 0.0 < res.p_value <= 1.0


def test_empty_sample_rejected():
    with pytest.raises(ValueError):
        rank_sum_test([], [1.0])
