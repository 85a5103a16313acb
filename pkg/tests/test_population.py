import math

import numpy as np
import pytest
from scipy import stats

from uavnoma import (
    UserRegion,
    drop_rng,
    mean_user_count,
    sample_count,
    sample_drop,
    sample_positions,
    sample_user,
)

REGION = UserRegion(25.0, 100.0, math.radians(0.2))


class TestMeanUserCount:
    def test_reference_geometry(self):
        mu = mean_user_count(REGION, 1.0)
        assert mu == pytest.approx((100.0**2 - 25.0**2) * math.radians(0.2), rel=1e-15)
        assert mu == pytest.approx(32.72, abs=0.01)

    def test_empty_region(self):
        assert mean_user_count(UserRegion(50.0, 50.0, 0.1), 1.0) == 0.0

    def test_linear_in_density(self):
        assert mean_user_count(REGION, 2.0) == pytest.approx(2.0 * mean_user_count(REGION, 1.0))

    def test_rejects_bad_density(self):
        with pytest.raises(ValueError):
            mean_user_count(REGION, 0.0)


class TestSampleCount:
    def test_fixed_override(self):
        rng = np.random.default_rng(0)
        assert all(sample_count(32.7, rng, fixed_user_count=46) == 46 for _ in range(50))

    def test_zero_mean(self):
        rng = np.random.default_rng(0)
        assert sample_count(0.0, rng) == 0

    def test_poisson_mean(self):
        rng = np.random.default_rng(1)
        mu = mean_user_count(REGION, 1.0)
        n = 200_000
        counts = np.array([sample_count(mu, rng) for _ in range(n)], dtype=float)
        se = math.sqrt(mu / n)
        assert abs(counts.mean() - mu) < 4.0 * se

    def test_rejects_negative(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_count(-1.0, rng)
        with pytest.raises(ValueError):
            sample_count(5.0, rng, fixed_user_count=-2)


class TestSamplePositions:
    def test_support(self):
        r, psi, alpha = sample_positions(REGION, 50_000, np.random.default_rng(2))
        assert np.all((r >= REGION.l1_m) & (r <= REGION.l2_m))
        assert np.all(np.abs(psi) <= REGION.half_azimuth_rad)
        assert alpha.dtype == complex and alpha.shape == r.shape

    def test_area_uniform_second_moment(self):
        r, _, _ = sample_positions(REGION, 400_000, np.random.default_rng(3))
        expected = (REGION.l1_m**2 + REGION.l2_m**2) / 2.0
        se = np.std(r**2, ddof=1) / math.sqrt(r.size)
        assert abs(np.mean(r**2) - expected) < 4.0 * se

    def test_area_uniform_sub_annulus_frequency(self):
        r, _, _ = sample_positions(REGION, 400_000, np.random.default_rng(4))
        for a, b in [(30.0, 50.0), (25.0, 60.0), (80.0, 100.0)]:
            p = (b**2 - a**2) / (REGION.l2_m**2 - REGION.l1_m**2)
            hit = np.mean((r >= a) & (r <= b))
            se = math.sqrt(p * (1.0 - p) / r.size)
            assert abs(hit - p) < 4.0 * se

    def test_fading_power_is_unit_mean_exponential(self):
        _, _, alpha = sample_positions(REGION, 200_000, np.random.default_rng(5))
        power = alpha.real**2 + alpha.imag**2
        se = np.std(power, ddof=1) / math.sqrt(power.size)
        assert abs(np.mean(power) - 1.0) < 4.0 * se
        # goodness of fit against Exp(1) at significance 0.01
        result = stats.kstest(power[:50_000], "expon")
        assert result.pvalue > 0.01

    def test_pinpoint_region_pins_radius(self):
        region = UserRegion(40.0, 40.0, 0.1)
        r, _, _ = sample_positions(region, 100, np.random.default_rng(6))
        assert np.all(r == 40.0)


class TestSeedDeterminism:
    def test_same_substream_is_bitwise_identical(self):
        a = sample_positions(REGION, 100, drop_rng(99, 7))
        b = sample_positions(REGION, 100, drop_rng(99, 7))
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_distinct_drops_differ(self):
        a, _, _ = sample_positions(REGION, 100, drop_rng(99, 7))
        b, _, _ = sample_positions(REGION, 100, drop_rng(99, 8))
        assert not np.array_equal(a, b)

    def test_negative_drop_index_rejected(self):
        with pytest.raises(ValueError):
            drop_rng(1, -1)


class TestSampleUserAndDrop:
    def test_user_fields(self):
        user = sample_user(REGION, 60.0, drop_rng(1, 0))
        assert REGION.l1_m <= user.r_m <= REGION.l2_m
        assert user.theta_rad == pytest.approx(math.atan(user.r_m / 60.0))
        assert user.d_m == pytest.approx(math.hypot(60.0, user.r_m))
        assert user.pl_linear is None

    def test_drop_count_matches_users(self):
        pop = sample_drop(REGION, 32.7, drop_rng(1, 3), h_m=60.0)
        assert pop.count == len(pop.users)

    def test_fixed_count_drop(self):
        pop = sample_drop(REGION, 32.7, drop_rng(1, 4), fixed_user_count=46)
        assert pop.count == 46
