import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthdyn import (
    ConstraintError,
    DegenerateError,
    DimensionError,
    SimplexPoint,
    Tolerance,
    make_simplex_point,
    renormalize,
    sample_uniform,
    uniform_point,
)


class TestMakeSimplexPoint:
    def test_accepts_probability_vector(self):
        p = make_simplex_point([0.2, 0.3, 0.5])
        assert isinstance(p, SimplexPoint)
        assert p.n == 3
        np.testing.assert_allclose(p.as_array(), [0.2, 0.3, 0.5])

    def test_result_sums_to_one_exactly_after_cleanup(self):
        p = make_simplex_point([0.1 + 1e-10, 0.9])
        assert abs(p.as_array().sum() - 1.0) < 1e-15

    def test_clamps_tiny_negative_coordinates(self):
        p = make_simplex_point([-1e-13, 0.5, 0.5])
        arr = p.as_array()
        assert arr[0] == 0.0
        assert arr.min() >= 0.0

    def test_rejects_single_entry(self):
        with pytest.raises(DimensionError):
            make_simplex_point([1.0])

    def test_rejects_negative_coordinate(self):
        with pytest.raises(ConstraintError):
            make_simplex_point([-0.1, 0.6, 0.5])

    def test_rejects_bad_sum(self):
        with pytest.raises(ConstraintError):
            make_simplex_point([0.5, 0.6])

    def test_rejects_nan(self):
        with pytest.raises(ConstraintError):
            make_simplex_point([float("nan"), 1.0])

    def test_stored_array_is_read_only_and_copies_are_writable(self):
        p = make_simplex_point([0.4, 0.6])
        with pytest.raises(ValueError):
            p.p[0] = 1.0
        copy = p.as_array()
        copy[0] = 1.0
        assert p.p[0] == 0.4

    def test_custom_tolerance_widens_sum_check(self):
        tol = Tolerance(sum_tol=1e-2)
        p = make_simplex_point([0.5, 0.505], tol)
        assert abs(p.as_array().sum() - 1.0) < 1e-15


class TestRenormalize:
    def test_scales_positive_vector(self):
        out = renormalize(np.array([2.0, 6.0]))
        np.testing.assert_allclose(out.as_array(), [0.25, 0.75])

    def test_rejects_negative_entries(self):
        with pytest.raises(ConstraintError):
            renormalize(np.array([-1.0, 2.0]))

    def test_rejects_zero_sum(self):
        with pytest.raises(DegenerateError):
            renormalize(np.zeros(3))

    def test_subnormal_sum_still_renormalizes(self):
        out = renormalize(np.array([5e-324, 0.0]))
        np.testing.assert_allclose(out.as_array(), [1.0, 0.0])

    @given(st.lists(st.floats(min_value=1e-6, max_value=1e6), min_size=2, max_size=8))
    @settings(max_examples=200, deadline=None)
    def test_output_is_simplex_point(self, raw):
        out = renormalize(np.array(raw)).as_array()
        assert abs(out.sum() - 1.0) <= 1e-12
        assert out.min() >= 0.0


class TestSampling:
    def test_uniform_point(self):
        np.testing.assert_allclose(uniform_point(4).as_array(), [0.25] * 4)

    def test_sample_is_deterministic_per_seed(self):
        a = sample_uniform(5, 42).as_array()
        b = sample_uniform(5, 42).as_array()
        np.testing.assert_array_equal(a, b)
        c = sample_uniform(5, 43).as_array()
        assert not np.array_equal(a, c)

    def test_sample_lies_on_simplex(self):
        for seed in range(50):
            arr = sample_uniform(3, seed).as_array()
            assert abs(arr.sum() - 1.0) <= 1e-12
            assert arr.min() > 0.0

    def test_sample_mean_matches_uniform_distribution(self):
        # exponential spacings sample uniformly on the simplex, so each
        # coordinate has mean 1/n; Monte Carlo check with standard error
        # about 0.24/sqrt(3e4) < 0.002
        n = 3
        total = np.zeros(n)
        count = 30000
        for seed in range(count):
            total += sample_uniform(n, seed).as_array()
        np.testing.assert_allclose(total / count, np.full(n, 1.0 / n), atol=0.01)
