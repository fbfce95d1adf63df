import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from cresa.distributions import (
    GAUSSIAN_CRE,
    DistributionSpec,
    Family,
    analytic_cre,
    lognormal_from_mean_ef,
    sample,
    sample_matrix,
)
from cresa.errors import DistributionError, UnsupportedFamilyError
from cresa.estimators import empirical_cre


def quadrature_cre(spec):
    """-int S ln S over the support, by adaptive quadrature."""
    def integrand(x):
        s = float(spec.survival(x))
        return -s * math.log(s) if 0 < s < 1 else 0.0

    lo, hi = spec.frozen().ppf([1e-15, 1 - 1e-15])
    val, _ = integrate.quad(integrand, lo, hi, limit=400, points=[spec.mean])
    return val


class TestSpec:
    @pytest.mark.parametrize(
        "make",
        [
            lambda: DistributionSpec.uniform(1, 1),
            lambda: DistributionSpec.uniform(2, 1),
            lambda: DistributionSpec.normal(0, -1),
            lambda: DistributionSpec.exponential(0),
            lambda: DistributionSpec.lognormal(0, 0),
            lambda: DistributionSpec.normal(0, math.nan),
            lambda: DistributionSpec(Family.NORMAL, (1.0,)),
        ],
    )
    def test_invalid_parameters(self, make):
        with pytest.raises(DistributionError):
            make()

    def test_from_mapping_roundtrip(self):
        spec = DistributionSpec.normal(0.39, 0.015, "k0")
        assert DistributionSpec.from_mapping(spec.to_mapping(), "k0") == spec

    def test_from_mapping_error_factor(self):
        spec = DistributionSpec.from_mapping({"family": "lognormal", "mean": 2, "error_factor": 2})
        assert spec == lognormal_from_mean_ef(2, 2)

    def test_from_mapping_rejects_unknown_keys(self):
        with pytest.raises(DistributionError):
            DistributionSpec.from_mapping({"family": "normal", "mean": 0, "sd": 1, "skew": 2})
        with pytest.raises(DistributionError):
            DistributionSpec.from_mapping({"family": "gamma", "k": 1})

    @pytest.mark.parametrize(
        "spec",
        [
            DistributionSpec.uniform(-1, 3),
            DistributionSpec.normal(5, 2),
            DistributionSpec.exponential(0.5),
            DistributionSpec.lognormal(0.2, 0.4),
        ],
    )
    def test_moments_match_scipy(self, spec):
        frozen = spec.frozen()
        assert spec.mean == pytest.approx(frozen.mean())
        assert spec.std == pytest.approx(frozen.std())
        assert spec.survival(spec.mean) == pytest.approx(1 - spec.cdf(spec.mean))


class TestSample:
    def test_uniform_support(self):
        x = sample(DistributionSpec.uniform(-math.pi, math.pi), 4, seed=1)
        assert x.shape == (4,)
        assert np.all((x >= -math.pi) & (x <= math.pi))

    def test_normal_mean(self):
        x = sample(DistributionSpec.normal(0.39, 0.015), 100_000, seed=2)
        assert abs(x.mean() - 0.39) < 0.001

    def test_exponential_mean(self):
        x = sample(DistributionSpec.exponential(0.5), 100_000, seed=3)
        assert abs(x.mean() - 2.0) < 0.05

    def test_deterministic(self):
        spec = DistributionSpec.normal(0, 1)
        np.testing.assert_array_equal(sample(spec, 10, 42), sample(spec, 10, 42))
        assert not np.array_equal(sample(spec, 10, 42), sample(spec, 10, 43))

    def test_bad_size(self):
        with pytest.raises(DistributionError):
            sample(DistributionSpec.normal(0, 1), 0)

    def test_matrix_columns_independent_of_width(self):
        specs = [DistributionSpec.normal(0, 1), DistributionSpec.uniform(0, 1), DistributionSpec.exponential(1)]
        full = sample_matrix(specs, 50, 9)
        part = sample_matrix(specs[:2], 50, 9)
        np.testing.assert_array_equal(full[:, :2], part)
        np.testing.assert_array_equal(full, sample_matrix(specs, 50, 9))


class TestAnalyticCRE:
    def test_exponential(self):
        assert analytic_cre(DistributionSpec.exponential(0.5)) == 2.0

    def test_uniform(self):
        assert analytic_cre(DistributionSpec.uniform(0, 0.5)) == 0.125

    def test_normal(self):
        assert analytic_cre(DistributionSpec.normal(123.0, 1.0)) == 0.9032

    def test_lognormal_unsupported(self):
        with pytest.raises(UnsupportedFamilyError):
            analytic_cre(DistributionSpec.lognormal(0, 1))

    @pytest.mark.parametrize(
        "spec",
        [DistributionSpec.exponential(0.5), DistributionSpec.uniform(-2, 3), DistributionSpec.normal(1, 2)],
    )
    def test_against_quadrature(self, spec):
        # the normal constant is the printed 4-digit value, hence the looser bound
        assert analytic_cre(spec) == pytest.approx(quadrature_cre(spec), rel=1e-4)

    def test_gaussian_constant_rounding(self):
        assert GAUSSIAN_CRE == round(quadrature_cre(DistributionSpec.normal(0, 1)), 4)

    @given(
        mean=st.floats(-1e3, 1e3),
        sd=st.floats(1e-3, 1e3),
        c=st.floats(1e-3, 1e3),
    )
    def test_normal_scale_property(self, mean, sd, c):
        a = analytic_cre(DistributionSpec.normal(mean, c * sd))
        b = c * analytic_cre(DistributionSpec.normal(mean, sd))
        assert a == pytest.approx(b, rel=1e-12)

    @given(a=st.floats(-1e3, 1e3), width=st.floats(1e-6, 1e3))
    def test_nonnegative(self, a, width):
        assert analytic_cre(DistributionSpec.uniform(a, a + width)) > 0

    @pytest.mark.parametrize(
        "spec",
        [DistributionSpec.exponential(0.5), DistributionSpec.uniform(0, 0.5), DistributionSpec.normal(40, 2)],
    )
    def test_empirical_agrees_within_two_percent(self, spec):
        est = empirical_cre(sample(spec, 20_000, seed=5))
        assert est == pytest.approx(analytic_cre(spec), rel=0.02)


class TestErrorFactor:
    def test_parameters(self):
        spec = lognormal_from_mean_ef(2, 2)
        mu, sigma = spec.params
        assert sigma == pytest.approx(math.log(2) / 1.645)
        assert sigma == pytest.approx(0.4214, abs=1e-4)
        assert mu == pytest.approx(0.6043, abs=1e-4)
        assert spec.mean == pytest.approx(2.0)
        assert sample(spec, 200_000, seed=1).mean() == pytest.approx(2.0, rel=0.01)

    def test_degenerate_limit(self):
        mu, sigma = lognormal_from_mean_ef(1, 1 + 1e-12).params
        assert sigma < 1e-11
        assert abs(mu) < 1e-20

    def test_quantile_ratio(self):
        x = sample(lognormal_from_mean_ef(0.001, 2), 200_000, seed=4)
        ratio = np.quantile(x, 0.95) / np.median(x)
        assert ratio == pytest.approx(2.0, rel=0.02)

    @pytest.mark.parametrize("mean, ef", [(0, 2), (-1, 2), (1, 1), (1, 0.5)])
    def test_domain(self, mean, ef):
        with pytest.raises(DistributionError):
            lognormal_from_mean_ef(mean, ef)


class TestPointMass:
    def test_normal_with_zero_sd(self):
        spec = DistributionSpec.normal(3.0, 0.0)
        assert spec.is_point_mass
        assert analytic_cre(spec) == 0.0
        np.testing.assert_array_equal(sample(spec, 5, 0), np.full(5, 3.0))
        np.testing.assert_array_equal(spec.cdf([2.9, 3.0, 3.1]), [0, 1, 1])
        np.testing.assert_array_equal(spec.survival([2.9, 3.0]), [1, 0])
        np.testing.assert_array_equal(spec.ppf([0.1, 0.9]), [3.0, 3.0])
        with pytest.raises(DistributionError):
            spec.frozen()
