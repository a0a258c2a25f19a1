import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ress.core import (
    GroupSummary,
    as_sample_matrix,
    column_summary,
    split_even,
    split_tstats,
    t_one_sample,
    t_two_sample,
)
from ress.errors import (
    DataError,
    DegenerateSampleError,
    OddSampleWarning,
    ShapeError,
    TooFewObservationsError,
    ZeroVarianceError,
)

from oracles import two_pass_summary


def summary(mean, var, n):
    return GroupSummary(mean=np.atleast_1d(np.asarray(mean, float)),
                        var=np.atleast_1d(np.asarray(var, float)), n=n)


class TestColumnSummary:
    def test_hand_values(self):
        s = column_summary(np.array([[1.0], [2.0], [3.0]]))
        assert s.mean[0] == 2.0
        assert s.var[0] == 1.0
        assert s.n == 3

    def test_constant_column(self):
        s = column_summary(np.full((4, 1), 5.0))
        assert s.mean[0] == 5.0
        assert s.var[0] == 0.0

    def test_row_subset(self):
        m = np.arange(12.0).reshape(6, 2)
        s = column_summary(m, [0, 2, 4])
        np.testing.assert_allclose(s.mean, [4.0, 5.0])
        np.testing.assert_allclose(s.var, [16.0, 16.0])

    def test_standard_normal_mc(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((1000, 1))
        s = column_summary(x)
        # se of the mean is 1/sqrt(n); se of s^2 is sqrt(2/(n-1))
        assert abs(s.mean[0]) < 5 / np.sqrt(1000)
        assert abs(s.var[0] - 1) < 5 * np.sqrt(2 / 999)

    def test_too_few_rows(self):
        with pytest.raises(DegenerateSampleError):
            column_summary(np.ones((1, 3)))

    def test_large_offset_keeps_precision(self):
        rng = np.random.default_rng(5)
        x = 1e9 + rng.standard_normal((200, 3))
        s = column_summary(x)
        _, v = two_pass_summary(x)
        np.testing.assert_allclose(s.var, v, rtol=1e-9)
        # the one-pass E[X^2] - E[X]^2 form loses everything here
        naive = (np.mean(x**2, axis=0) - np.mean(x, axis=0) ** 2) * 200 / 199
        assert np.max(np.abs(naive - v) / v) > 1e-3

    @settings(max_examples=200, deadline=None)
    @given(
        arrays(
            np.float64,
            st.tuples(st.integers(2, 30), st.integers(1, 6)),
            elements=st.floats(-1e6, 1e6, allow_nan=False, width=64),
        )
    )
    def test_matches_two_pass_reference(self, x):
        s = column_summary(x)
        m, v = two_pass_summary(x)
        np.testing.assert_allclose(s.mean, m, rtol=1e-12, atol=1e-9)
        scale = np.maximum(np.abs(x).max(axis=0) ** 2, 1e-300)
        assert np.all(np.abs(s.var - v) <= 1e-12 * np.maximum(np.abs(v), 0) + 1e-13 * scale)


class TestSplitEven:
    def test_even_sizes(self):
        plan = split_even(6, seed=7)
        assert len(plan.group_a) == len(plan.group_b) == 3
        assert plan.dropped is None
        assert set(plan.group_a).isdisjoint(plan.group_b)
        assert set(plan.group_a) | set(plan.group_b) == set(range(6))

    def test_odd_drops_one(self):
        with pytest.warns(OddSampleWarning):
            plan = split_even(7, seed=3)
        assert len(plan.group_a) == len(plan.group_b) == 3
        assert plan.dropped is not None
        assert set(plan.group_a) | set(plan.group_b) | {plan.dropped} == set(range(7))

    def test_deterministic(self):
        a, b = split_even(20, 99), split_even(20, 99)
        np.testing.assert_array_equal(a.group_a, b.group_a)
        np.testing.assert_array_equal(a.group_b, b.group_b)
        assert a.seed_used == 99

    def test_streams_differ(self):
        a, b = split_even(40, 1), split_even(40, 1, stream=1)
        assert not np.array_equal(a.group_a, b.group_a)

    def test_too_few(self):
        with pytest.raises(TooFewObservationsError):
            split_even(3, 0)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(4, 60), st.integers(0, 2**63 - 1))
    def test_partition_property(self, n_t, seed):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OddSampleWarning)
            plan = split_even(n_t, seed)
        a, b = set(plan.group_a.tolist()), set(plan.group_b.tolist())
        assert len(a) == len(b) == n_t // 2
        assert not a & b
        rest = set(range(n_t)) - a - b
        assert rest == ({plan.dropped} if n_t % 2 else set())

    def test_exchangeable(self):
        n_t, seeds = 10, 4000
        hits = np.zeros(n_t)
        for s in range(seeds):
            hits[split_even(n_t, s).group_a] += 1
        freq = hits / seeds
        se = np.sqrt(0.25 / seeds)
        assert np.all(np.abs(freq - 0.5) < 3.5 * se)


class TestTStatistics:
    def test_one_sample_hand(self):
        assert t_one_sample(summary(2, 1, 4))[0] == 4.0
        assert t_one_sample(summary(0, 3, 9))[0] == 0.0
        assert t_one_sample(summary(-1, 4, 16))[0] == -2.0

    def test_one_sample_zero_variance_names_columns(self):
        with pytest.raises(ZeroVarianceError) as ei:
            t_one_sample(summary([1, 2, 3], [1, 0, 0], 5))
        assert ei.value.columns == [1, 2]

    def test_two_sample_hand(self):
        # s2x/n = s2z/m = 0.5
        assert t_two_sample(summary(1, 1, 2), summary(0, 1.5, 3))[0] == pytest.approx(1.0)
        assert t_two_sample(summary(4, 2, 5), summary(4, 1, 5))[0] == 0.0
        t = t_two_sample(summary(3, 4, 4), summary(1, 9, 9))[0]
        assert t == pytest.approx(2 / np.sqrt(2), rel=1e-15)

    def test_two_sample_shape_mismatch(self):
        with pytest.raises(ShapeError):
            t_two_sample(summary([1, 2], [1, 1], 4), summary([1], [1], 4))

    def test_two_sample_zero_both(self):
        with pytest.raises(ZeroVarianceError):
            t_two_sample(summary([1, 2], [0, 1], 4), summary([1, 1], [0, 1], 4))

    def test_scale_invariance_and_sign(self):
        rng = np.random.default_rng(2)
        x = rng.exponential(size=(30, 5))
        t = t_one_sample(column_summary(x))
        for c in (1e-3, 0.7, 12.5, 1e4):
            tc = t_one_sample(column_summary(x * c))
            np.testing.assert_allclose(tc, t, rtol=1e-12)
        np.testing.assert_allclose(t_one_sample(column_summary(-x)), -t, rtol=1e-15)

    def test_split_tilde_identity(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((12, 3)) + 1
        plan = split_even(12, 0)
        tb = split_tstats(x, plan)
        s1 = column_summary(x, plan.group_a)
        s2 = column_summary(x, plan.group_b)
        np.testing.assert_allclose(tb.t2_tilde, np.sqrt(6) * s2.mean / np.sqrt(s1.var))
        np.testing.assert_allclose(tb.t1, np.sqrt(6) * s1.mean / np.sqrt(s1.var))


def test_sample_matrix_validation():
    with pytest.raises(DataError):
        as_sample_matrix([[1.0, np.nan], [2.0, 3.0]])
    assert as_sample_matrix([1.0, 2.0, 3.0]).shape == (3, 1)
