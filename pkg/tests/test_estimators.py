import math
import time
from collections import Counter

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cresa.distributions import DistributionSpec, sample, sample_matrix
from cresa.errors import CREError, TooFewSamplesError
from cresa.estimators import (
    GridParams,
    SampleMatrix,
    conditional_cre_1,
    conditional_cre_2,
    empirical_cre,
    equal_count_bins,
    grouped_cre_sum,
)
from cresa.models import sum3_model


def ecdf_cre_oracle(values):
    """Integrate -S ln S of the empirical survival function piece by piece,
    walking the distinct values with their multiplicities."""
    counts = sorted(Counter(float(v) for v in values).items())
    n = len(values)
    below = 0
    total = 0.0
    for (x, c), (x_next, _) in zip(counts, counts[1:]):
        below += c
        s = 1 - below / n
        total += -(x_next - x) * s * math.log(s)
    return total


def cond1_oracle(x, y, m):
    order = sorted(range(len(x)), key=lambda k: (x[k], k))
    n_grids = len(x) // m
    total = 0.0
    for g in range(n_grids):
        stop = (g + 1) * m if g < n_grids - 1 else len(x)
        members = [y[k] for k in order[g * m:stop]]
        total += len(members) / len(x) * ecdf_cre_oracle(members)
    return total


def cond2_oracle(x1, x2, y, I, J):
    n = len(y)

    def bins(x, k):
        order = sorted(range(n), key=lambda i: (x[i], i))
        size = n // k
        out = [0] * n
        for rank, i in enumerate(order):
            out[i] = min(rank // size, k - 1)
        return out

    b1, b2 = bins(x1, I), bins(x2, J)
    total = 0.0
    for i in range(I):
        for j in range(J):
            cell = [y[k] for k in range(n) if b1[k] == i and b2[k] == j]
            if len(cell) >= 2:
                total += len(cell) / n * ecdf_cre_oracle(cell)
    return total


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


class TestEmpiricalCRE:
    def test_two_points(self):
        assert empirical_cre([0.0, 1.0]) == pytest.approx(-0.5 * math.log(0.5))
        assert empirical_cre([0.0, 1.0]) == pytest.approx(0.34657, abs=1e-5)

    def test_constant(self):
        assert empirical_cre([3.2] * 50) == 0.0

    def test_too_few(self):
        with pytest.raises(TooFewSamplesError):
            empirical_cre([1.0])

    def test_rejects_nan(self):
        with pytest.raises(CREError):
            empirical_cre([1.0, math.nan])

    @given(arrays(float, st.integers(2, 60), elements=finite))
    def test_matches_ecdf_oracle(self, x):
        assert empirical_cre(x) == pytest.approx(ecdf_cre_oracle(x), rel=1e-9, abs=1e-9)

    @given(arrays(float, st.integers(2, 60), elements=finite))
    def test_nonnegative(self, x):
        assert empirical_cre(x) >= 0

    @given(arrays(float, st.integers(2, 60), elements=finite), st.floats(-1e3, 1e3))
    def test_translation_invariance(self, x, c):
        assert empirical_cre(x + c) == pytest.approx(empirical_cre(x), rel=1e-9, abs=1e-7)

    def test_translation_exact_on_dyadic(self):
        x = np.arange(100, dtype=float) * 0.25
        np.random.default_rng(0).shuffle(x)
        assert empirical_cre(x + 8.0) == empirical_cre(x)

    @given(arrays(float, st.integers(2, 60), elements=finite), st.floats(1e-3, 1e3))
    def test_scale_equivariance(self, x, c):
        assert empirical_cre(c * x) == pytest.approx(c * empirical_cre(x), rel=1e-9, abs=1e-9)

    def test_scale_exact_by_power_of_two(self):
        x = sample(DistributionSpec.normal(0, 1), 1000, 1)
        assert empirical_cre(4.0 * x) == 4.0 * empirical_cre(x)

    @given(arrays(float, st.integers(2, 60), elements=finite), st.randoms())
    def test_permutation_invariance(self, x, rnd):
        y = list(x)
        rnd.shuffle(y)
        assert empirical_cre(y) == empirical_cre(x)

    def test_expected_value_exponential(self):
        # E[spacing_i] = 1/(rate (n - i)) gives E = (1/rate)(((n-1)/n) ln n - ln((n-1)!)/n)
        n = 1000
        exact = 2.0 * ((n - 1) / n * math.log(n) - math.lgamma(n) / n)
        est = np.mean([empirical_cre(sample(DistributionSpec.exponential(0.5), n, s)) for s in range(400)])
        assert est == pytest.approx(exact, abs=0.015)
        assert exact == pytest.approx(1.991, abs=1e-3)

    def test_runtime_roughly_linear(self):
        x1 = sample(DistributionSpec.exponential(0.5), 10_000, 1)
        x2 = sample(DistributionSpec.exponential(0.5), 20_000, 2)

        def best(x):
            times = []
            for _ in range(30):
                t0 = time.perf_counter()
                empirical_cre(x)
                times.append(time.perf_counter() - t0)
            return min(times)

        assert best(x2) <= 4 * best(x1)


class TestGrouped:
    @given(
        st.lists(st.tuples(st.integers(0, 5), finite), min_size=1, max_size=80),
    )
    def test_matches_loop(self, pairs):
        g = np.array([p[0] for p in pairs])
        y = np.array([p[1] for p in pairs])
        expected = 0.0
        for label in set(g.tolist()):
            members = y[g == label]
            if members.size >= 2:
                expected += members.size * ecdf_cre_oracle(members)
        assert grouped_cre_sum(g, y) == pytest.approx(expected, rel=1e-9, abs=1e-7)

    def test_equal_count_bins_remainder(self):
        x = np.arange(23.0)[::-1]
        bins = equal_count_bins(x, 5)
        assert Counter(bins.tolist()) == {0: 4, 1: 4, 2: 4, 3: 4, 4: 7}
        assert bins[0] == 4  # largest value lands in the last bin

    def test_equal_count_bins_ties_by_index(self):
        bins = equal_count_bins(np.zeros(6), 3)
        assert bins.tolist() == [0, 0, 1, 1, 2, 2]


class TestConditional1:
    @settings(max_examples=40)
    @given(st.data())
    def test_matches_oracle(self, data):
        n = data.draw(st.integers(4, 60))
        m = data.draw(st.integers(2, n))
        x = data.draw(arrays(float, n, elements=st.floats(-10, 10)))
        y = data.draw(arrays(float, n, elements=st.floats(-10, 10)))
        assert conditional_cre_1(x, y, m) == pytest.approx(cond1_oracle(x, y, m), rel=1e-9, abs=1e-9)

    def test_remainder_merges_into_last_grid(self):
        x = np.arange(10.0)
        y = np.array([0, 1, 0, 1, 0, 1, 0, 1, 5, 9.0])
        # grids of 3: {0,1,2}, {3,4,5}, {6..9}
        expected = (3 * empirical_cre(y[:3]) + 3 * empirical_cre(y[3:6]) + 4 * empirical_cre(y[6:])) / 10
        assert conditional_cre_1(x, y, 3) == pytest.approx(expected)

    def test_errors(self):
        with pytest.raises(CREError):
            conditional_cre_1([1, 2, 3], [1, 2], 2)
        with pytest.raises(TooFewSamplesError):
            conditional_cre_1([1, 2, 3], [1, 2, 3], 4)

    def test_deterministic_function_of_x(self):
        # each grid spans ~1/40 of x, so exp(x) varies by at most ~0.07 inside it
        x = sample(DistributionSpec.uniform(0, 1), 20_000, 1)
        assert conditional_cre_1(x, np.exp(x), 500) < 0.05 * empirical_cre(np.exp(x))
        assert conditional_cre_1(x, np.exp(x), 50) < 0.005 * empirical_cre(np.exp(x))

    def test_independent(self):
        x = sample(DistributionSpec.normal(0, 1), 20_000, 2)
        y = sample(DistributionSpec.exponential(0.5), 20_000, 3)
        assert conditional_cre_1(x, y, 500) == pytest.approx(empirical_cre(y), rel=0.03)

    @pytest.mark.parametrize("n, center, tol", [(5000, 2.095, 0.08), (20000, 2.0, 0.05)])
    def test_exp_plus_normal_setup(self, n, center, tol):
        specs = [DistributionSpec.exponential(0.5), DistributionSpec.normal(40, 2)]
        est = []
        for seed in range(10):
            x = sample_matrix(specs, n, seed)
            est.append(conditional_cre_1(x[:, 1], x.sum(axis=1), 500))
        assert abs(np.mean(est) - center) <= tol


class TestConditional2:
    @settings(max_examples=30)
    @given(st.data())
    def test_matches_oracle(self, data):
        I = data.draw(st.integers(2, 4))
        J = data.draw(st.integers(2, 4))
        n = data.draw(st.integers(I * J, 50))
        el = st.floats(-10, 10)
        x1 = data.draw(arrays(float, n, elements=el))
        x2 = data.draw(arrays(float, n, elements=el))
        y = data.draw(arrays(float, n, elements=el))
        assert conditional_cre_2(x1, x2, y, I, J) == pytest.approx(
            cond2_oracle(x1, x2, y, I, J), rel=1e-9, abs=1e-9
        )

    def test_errors(self):
        with pytest.raises(TooFewSamplesError):
            conditional_cre_2(np.arange(10.0), np.arange(10.0), np.arange(10.0), 4, 3)
        with pytest.raises(CREError):
            conditional_cre_2(np.arange(10.0), np.arange(9.0), np.arange(10.0), 2, 2)

    def test_function_of_first_variable(self):
        x = sample_matrix([DistributionSpec.uniform(0, 1), DistributionSpec.normal(0, 1)], 20_000, 4)
        y = np.sin(3 * x[:, 0])
        # cells are 1/20 wide in x1, over which sin(3 x1) moves by <= 0.15
        assert conditional_cre_2(x[:, 0], x[:, 1], y, 20, 20) < 0.15 * empirical_cre(y)
        assert conditional_cre_2(x[:, 0], x[:, 1], y, 100, 2) < 0.04 * empirical_cre(y)

    def test_conditioning_on_more_does_not_increase(self):
        specs = [DistributionSpec.exponential(0.5), DistributionSpec.exponential(0.1), DistributionSpec.normal(40, 2)]
        x = sample_matrix(specs, 20_000, 5)
        y = sum3_model(*x.T)
        assert conditional_cre_2(x[:, 1], x[:, 2], y) <= conditional_cre_1(x[:, 1], y) + 0.05


class TestTypes:
    def test_grid_validation(self):
        with pytest.raises(CREError):
            GridParams(m=1)
        with pytest.raises(CREError):
            GridParams(I=1)

    def test_sample_matrix_validation(self):
        with pytest.raises(CREError):
            SampleMatrix(np.zeros((3, 2)), np.zeros(4), ("a", "b"))
        with pytest.raises(CREError):
            SampleMatrix(np.zeros((3, 2)), np.zeros(3), ("a",))
        with pytest.raises(CREError):
            SampleMatrix(np.array([[1.0], [np.inf]]), np.zeros(2), ("a",))
        with pytest.raises(TooFewSamplesError):
            SampleMatrix(np.zeros((1, 1)), np.zeros(1), ("a",))

    def test_column_lookup(self):
        s = SampleMatrix(np.arange(6.0).reshape(3, 2), np.zeros(3), ("a", "b"))
        np.testing.assert_array_equal(s.column("b"), [1, 3, 5])
        assert s.index(-1) == 1
        with pytest.raises(CREError):
            s.column("c")
