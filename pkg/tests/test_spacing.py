import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ousample.spacing import (ExponentialSpacing, LaplaceRangeError,
                              ShiftedExponentialSpacing, SpacingLaw,
                              UniformSpacing, spacing_law_from_config)

S_GRID = [0.1, 0.5, 1.0, 2.0, 5.0]

LAWS = [
    UniformSpacing(0.3),
    ExponentialSpacing(1.0),
    ExponentialSpacing(2.0),
    ShiftedExponentialSpacing(0.5, 1.0),
    ShiftedExponentialSpacing(0.2, 2.0),
]


def law_id(law):
    return repr(law)


class TestLaplaceClosedForms:
    def test_exponential_unit(self):
        assert ExponentialSpacing(1.0).laplace(1.0) == pytest.approx(0.5, rel=1e-15)

    def test_shifted_zero_delta_matches_exponential(self):
        shifted = ShiftedExponentialSpacing(0.0, 2.0)
        assert shifted.laplace(1.0) == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert shifted.laplace(1.0) == ExponentialSpacing(2.0).laplace(1.0)

    def test_shifted_closed_form(self):
        law = ShiftedExponentialSpacing(0.5, 1.0)
        assert law.laplace(1.0) == pytest.approx(math.exp(-0.5) / 2.0, rel=1e-14)

    def test_uniform_point_mass(self):
        assert UniformSpacing(0.3).laplace(2.0) == pytest.approx(math.exp(-0.6), rel=1e-15)

    @pytest.mark.parametrize("law", LAWS, ids=law_id)
    @pytest.mark.parametrize("s", S_GRID)
    def test_quadrature_agrees_with_closed_form(self, law, s):
        assert law.laplace_quadrature(s) == pytest.approx(law.laplace(s), rel=1e-9)

    @pytest.mark.parametrize("law", LAWS, ids=law_id)
    def test_domain_errors(self, law):
        for bad in (0.0, -1.0):
            with pytest.raises(ValueError):
                law.laplace(bad)
            with pytest.raises(ValueError):
                law.laplace_d1(bad)
            with pytest.raises(ValueError):
                law.laplace_d2(bad)


class TestDerivatives:
    def test_exponential_values(self):
        law = ExponentialSpacing(1.0)
        assert law.laplace_d1(1.0) == pytest.approx(-0.25, rel=1e-15)
        assert law.laplace_d2(1.0) == pytest.approx(0.25, rel=1e-15)

    def test_shifted_values(self):
        law = ShiftedExponentialSpacing(0.5, 1.0)
        assert law.laplace_d1(1.0) == pytest.approx(-math.exp(-0.5) / 2.0, rel=1e-13)
        assert law.laplace_d2(1.0) == pytest.approx(5.0 * math.exp(-0.5) / 8.0, rel=1e-13)
        assert ShiftedExponentialSpacing(0.0, 1.0).laplace_d1(1.0) == pytest.approx(-0.25)

    @pytest.mark.parametrize("law", LAWS, ids=law_id)
    @pytest.mark.parametrize("s", S_GRID)
    def test_first_derivative_finite_difference(self, law, s):
        h = 1e-5 * max(1.0, s)
        fd = (law.laplace(s + h) - law.laplace(s - h)) / (2.0 * h)
        assert law.laplace_d1(s) == pytest.approx(fd, rel=1e-6)

    @pytest.mark.parametrize("law", LAWS, ids=law_id)
    @pytest.mark.parametrize("s", S_GRID)
    def test_second_derivative_finite_difference(self, law, s):
        h = 1e-5 * max(1.0, s)
        fd = (law.laplace_d1(s + h) - law.laplace_d1(s - h)) / (2.0 * h)
        assert law.laplace_d2(s) == pytest.approx(fd, rel=1e-6)

    @pytest.mark.parametrize("law", LAWS, ids=law_id)
    @pytest.mark.parametrize("s", S_GRID)
    def test_complete_monotonicity_signs(self, law, s):
        assert 0.0 < law.laplace(s) < 1.0
        assert law.laplace_d1(s) < 0.0
        assert law.laplace_d2(s) > 0.0


class TestInverse:
    def test_exponential_closed_form(self):
        assert ExponentialSpacing(1.0).inverse_laplace(0.5) == pytest.approx(1.0, rel=1e-14)
        assert ExponentialSpacing(2.0).inverse_laplace(0.8) == pytest.approx(0.5, rel=1e-14)

    def test_shifted_round_trip_example(self):
        law = ShiftedExponentialSpacing(0.5, 1.0)
        y = law.laplace(1.0)  # ~0.30327
        assert law.inverse_laplace(y) == pytest.approx(1.0, rel=1e-9)

    @pytest.mark.parametrize("law", LAWS, ids=law_id)
    @pytest.mark.parametrize("s", S_GRID)
    def test_round_trip(self, law, s):
        assert law.inverse_laplace(law.laplace(s)) == pytest.approx(s, rel=1e-9)

    @pytest.mark.parametrize("law", LAWS, ids=law_id)
    @pytest.mark.parametrize("y", [-0.1, 0.0, 1.0, 1.5])
    def test_out_of_range_targets(self, law, y):
        with pytest.raises(LaplaceRangeError):
            law.inverse_laplace(y)


class TestRenewalIntegral:
    def test_poisson_constant_renewal_density(self):
        # H(v) = beta for Poisson sampling, so the integral is beta/s exactly;
        # the geometric-sum route must give the same number.
        law = ExponentialSpacing(1.0)
        assert law.renewal_integral(2.0) == pytest.approx(0.5, rel=1e-15)
        g = law.laplace(2.0)
        assert SpacingLaw.renewal_integral(law, 2.0) == pytest.approx(g / (1 - g), rel=1e-15)
        assert ExponentialSpacing(3.0).renewal_integral(6.0) == pytest.approx(0.5, rel=1e-15)

    def test_shifted_against_truncated_convolution_sum(self):
        # Independent oracle: sum over k of the Laplace transform of the
        # k-fold convolution f^(k)(v) = b^k (v-k d)^{k-1} e^{-b(v-k d)}/(k-1)!,
        # each integrated by Gauss-Laguerre quadrature.
        delta, beta, s = 0.5, 1.0, 2.0
        law = ShiftedExponentialSpacing(delta, beta)
        nodes, weights = np.polynomial.laguerre.laggauss(64)
        total = 0.0
        for k in range(1, 51):
            # substitute u = (s + beta) * w in the shifted-gamma integral
            logs = (np.log(weights) + (k - 1) * np.log(nodes)
                    - (k - 1) * math.log(s + beta))
            m = logs.max()
            integral = math.exp(m) * np.exp(logs - m).sum() / (s + beta)
            log_coeff = -s * k * delta + k * math.log(beta) - math.lgamma(k)
            total += math.exp(log_coeff) * integral
        assert law.renewal_integral(s) == pytest.approx(total, rel=1e-8)
        assert law.renewal_integral(s) == pytest.approx(0.13977, rel=1e-4)


class TestSampling:
    def test_uniform_is_degenerate(self):
        rng = np.random.default_rng(0)
        law = UniformSpacing(0.3)
        assert law.sample(rng) == 0.3
        assert np.all(law.sample(rng, 100) == 0.3)

    def test_exponential_law_of_large_numbers(self):
        rng = np.random.default_rng(1)
        draws = ExponentialSpacing(2.0).sample(rng, 10 ** 6)
        se = 0.5 / math.sqrt(10 ** 6)
        assert abs(draws.mean() - 0.5) < 3.0 * se

    def test_shifted_hard_minimum(self):
        rng = np.random.default_rng(2)
        draws = ShiftedExponentialSpacing(0.5, 2.0).sample(rng, 10 ** 4)
        assert np.all(draws >= 0.5)

    def test_deterministic_given_seed(self):
        law = ShiftedExponentialSpacing(0.1, 3.0)
        a = law.sample(np.random.default_rng(7), 50)
        b = law.sample(np.random.default_rng(7), 50)
        assert np.array_equal(a, b)


class TestShiftedZeroDeltaReduction:
    @pytest.mark.parametrize("beta", [0.5, 1.0, 4.0])
    def test_all_operations_reduce(self, beta):
        shifted = ShiftedExponentialSpacing(0.0, beta)
        plain = ExponentialSpacing(beta)
        for s in S_GRID:
            assert shifted.laplace(s) == plain.laplace(s)
            assert shifted.laplace_d1(s) == plain.laplace_d1(s)
            assert shifted.laplace_d2(s) == plain.laplace_d2(s)
            assert shifted.renewal_integral(s) == pytest.approx(
                plain.renewal_integral(s), rel=1e-14)
            y = plain.laplace(s)
            assert shifted.inverse_laplace(y) == pytest.approx(
                plain.inverse_laplace(y), rel=1e-11)
        assert shifted.mean() == plain.mean()
        a = shifted.sample(np.random.default_rng(3), 20)
        b = plain.sample(np.random.default_rng(3), 20)
        assert np.array_equal(a, b)


@given(
    s1=st.floats(min_value=0.01, max_value=20.0),
    s2=st.floats(min_value=0.01, max_value=20.0),
)
def test_laplace_strictly_decreasing(s1, s2):
    if s1 == s2:
        return
    lo, hi = min(s1, s2), max(s1, s2)
    for law in LAWS:
        assert law.laplace(lo) > law.laplace(hi)


class TestConstructionAndConfig:
    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            UniformSpacing(0.0)
        with pytest.raises(ValueError):
            ExponentialSpacing(-1.0)
        with pytest.raises(ValueError):
            ShiftedExponentialSpacing(-0.1, 1.0)
        with pytest.raises(ValueError):
            ShiftedExponentialSpacing(0.1, 0.0)

    def test_mean_spacing(self):
        assert UniformSpacing(0.3).mean() == 0.3
        assert ExponentialSpacing(2.0).mean() == 0.5
        assert ShiftedExponentialSpacing(0.5, 2.0).mean() == 1.0

    @pytest.mark.parametrize("law", LAWS, ids=law_id)
    def test_config_round_trip(self, law):
        assert spacing_law_from_config(law.to_config()) == law

    def test_aliases_and_errors(self):
        law = spacing_law_from_config({"kind": "shifted_exponential", "delta": 0.2, "beta": 3})
        assert law == ShiftedExponentialSpacing(0.2, 3.0)
        with pytest.raises(ValueError):
            spacing_law_from_config({"kind": "gamma", "beta": 1})
        with pytest.raises(ValueError):
            spacing_law_from_config({"beta": 1})
        with pytest.raises(ValueError):
            spacing_law_from_config({"kind": "exponential"})
