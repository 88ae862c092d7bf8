import math

import pytest
import sympy

from ousample.asymptotics import (AsymptoticSummary, drift_bias_limit,
                                  drift_variance_limit, exponential_case,
                                  proposition1, proposition2, theorem1)
from ousample.process import ProcessParams
from ousample.spacing import (ExponentialSpacing, ShiftedExponentialSpacing,
                              UniformSpacing)

PARAMS = ProcessParams(alpha=1.0, sigma2=2.0)  # eta = 1
EXP1 = ExponentialSpacing(1.0)

ALPHAS = (0.1, 0.5, 1.0, 2.0, 5.0)
BETAS = (0.5, 1.0, 2.0, 10.0)


class TestProposition1:
    def test_unit_case_frozen_values(self):
        out = proposition1(PARAMS, EXP1, n=100)
        assert out["e_tn"] == pytest.approx(0.99 * 0.5, rel=1e-14)
        assert out["e_vn"] == pytest.approx(1.0, rel=1e-14)
        assert out["n_var_tn"] == pytest.approx(17.0 / 6.0, rel=1e-12)
        assert out["n_var_vn"] == pytest.approx(4.0, rel=1e-12)
        assert out["n_cov_tv"] == pytest.approx(3.0, rel=1e-12)

    def test_mean_tn_scales_with_n(self):
        a = proposition1(PARAMS, EXP1, n=10)
        b = proposition1(PARAMS, EXP1, n=1000)
        assert a["e_tn"] == pytest.approx(0.9 * 0.5, rel=1e-14)
        assert b["e_tn"] == pytest.approx(0.999 * 0.5, rel=1e-14)

    def test_eta_squared_scaling(self):
        # all second-moment constants are homogeneous of degree 2 in eta
        big = ProcessParams(alpha=1.0, sigma2=6.0)  # eta = 3
        a = proposition1(PARAMS, EXP1, n=100)
        b = proposition1(big, EXP1, n=100)
        for key in ("n_var_tn", "n_var_vn", "n_cov_tv"):
            assert b[key] == pytest.approx(9.0 * a[key], rel=1e-12)

    def test_n_validation(self):
        with pytest.raises(ValueError):
            proposition1(PARAMS, EXP1, n=1)


class TestProposition2:
    def test_unit_case(self):
        bias, var = proposition2(PARAMS, EXP1)
        assert bias == pytest.approx(-1.5, rel=1e-14)
        assert var == pytest.approx(5.0 / 6.0, rel=1e-12)

    def test_sparse_sampling_variance_limit(self):
        # g -> 0 as alpha grows, so the ratio variance constant tends to 1
        _, var = proposition2(ProcessParams(alpha=50.0, sigma2=1.0), EXP1)
        assert var == pytest.approx(1.0, rel=0.05)

    def test_variance_constant_positive(self):
        for alpha in ALPHAS:
            for law in (EXP1, UniformSpacing(0.3), ShiftedExponentialSpacing(0.5, 1.0)):
                _, var = proposition2(ProcessParams(alpha=alpha, sigma2=1.0), law)
                assert var > 0.0


class TestTheorem1:
    def test_unit_case_headline_numbers(self):
        out = theorem1(PARAMS, EXP1)
        assert out.alpha_bias_n == pytest.approx(38.0 / 3.0, rel=1e-12)
        assert out.alpha_var_n == pytest.approx(40.0 / 3.0, rel=1e-12)
        assert out.sigma2_bias_n == pytest.approx(52.0 / 3.0, rel=1e-12)
        assert out.sigma2_var_n == pytest.approx(112.0 / 3.0, rel=1e-12)
        assert out.g_bias_n == pytest.approx(-1.5, rel=1e-14)
        assert out.g_var_n == pytest.approx(5.0 / 6.0, rel=1e-12)

    def test_finite_n_mean_factor(self):
        limit = theorem1(PARAMS, EXP1)
        finite = theorem1(PARAMS, EXP1, n=2000)
        assert finite.e_tn == pytest.approx((1.0 - 1.0 / 2000) * limit.e_tn, rel=1e-14)
        assert finite.e_tn == pytest.approx(0.49975, rel=1e-12)

    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("beta", BETAS)
    def test_matches_exponential_oracle(self, alpha, beta):
        out = theorem1(ProcessParams(alpha=alpha, sigma2=1.0), ExponentialSpacing(beta))
        bias, var = exponential_case(alpha, beta)
        assert out.alpha_bias_n == pytest.approx(bias, rel=1e-10)
        assert out.alpha_var_n == pytest.approx(var, rel=1e-10)

    def test_positivity_across_laws(self):
        laws = (EXP1, ExponentialSpacing(4.0), UniformSpacing(0.3),
                ShiftedExponentialSpacing(0.5, 1.0))
        for alpha in ALPHAS:
            for law in laws:
                out = theorem1(ProcessParams(alpha=alpha, sigma2=2.0), law)
                assert out.alpha_bias_n > 0.0
                assert out.alpha_var_n > 0.0
                assert out.sigma2_var_n > 0.0
                assert out.n_var_tn > 0.0 and out.n_var_vn > 0.0

    def test_shifted_law_continuity_at_zero_delta(self):
        a = theorem1(PARAMS, ShiftedExponentialSpacing(1e-9, 1.0))
        b = theorem1(PARAMS, EXP1)
        for f in AsymptoticSummary.CSV_FIELDS:
            assert getattr(a, f) == pytest.approx(getattr(b, f), rel=1e-6)

    def test_symbolic_oracle_shifted_law(self):
        # re-derive every constant from the symbolic Laplace transform of the
        # shifted-exponential law; catches any slip in the hand-coded
        # derivatives or the assembly arithmetic
        alpha_v, beta_v, delta_v, sigma2_v = 1.3, 0.7, 0.4, 2.0
        s, b, d = sympy.symbols("s b d", positive=True)
        g_expr = b * sympy.exp(-s * d) / (b + s)
        subs = {b: sympy.Rational(7, 10), d: sympy.Rational(2, 5)}

        def at(expr, point):
            return expr.subs(subs).subs(s, point)

        alpha_sym = sympy.Rational(13, 10)
        g = at(g_expr, alpha_sym)
        d1 = at(sympy.diff(g_expr, s), alpha_sym)
        d2 = at(sympy.diff(g_expr, s, 2), alpha_sym)
        g2 = at(g_expr, 2 * alpha_sym)
        B = 1 + g2 - 2 * g ** 2
        R = g2 / (1 - g2)
        eta = sympy.Rational(2) / (2 * alpha_sym)
        curv = -d2 * B / (2 * d1 ** 3)
        expected = {
            "alpha_bias_n": -3 * g / d1 + curv,
            "alpha_var_n": B / d1 ** 2,
            "sigma2_bias_n": 2 * eta * (-g / d1 + curv),
            "sigma2_var_n": 4 * eta ** 2 * (
                2 * alpha_sym ** 2 + 4 * alpha_sym ** 2 * R
                + 4 * alpha_sym * g / d1 + B / d1 ** 2),
            "n_var_tn": eta ** 2 * (1 + g2 + 4 * g ** 2 * (1 + R)),
            "n_var_vn": eta ** 2 * (2 + 4 * R),
            "n_cov_tv": eta ** 2 * 4 * g * (1 + R),
            "g_bias_n": -3 * g,
            "g_var_n": B,
        }
        out = theorem1(ProcessParams(alpha=alpha_v, sigma2=sigma2_v),
                       ShiftedExponentialSpacing(delta_v, beta_v))
        for name, expr in expected.items():
            target = float(sympy.N(expr, 30))
            assert getattr(out, name) == pytest.approx(target, rel=1e-10), name

    def test_serialization(self):
        out = theorem1(PARAMS, EXP1, n=100)
        d = out.to_dict()
        assert set(d) == set(AsymptoticSummary.CSV_FIELDS)
        row = out.to_csv_row().split(",")
        assert len(row) == len(AsymptoticSummary.CSV_FIELDS)
        assert float(row[0]) == pytest.approx(out.e_tn)


class TestExponentialCase:
    def test_frozen_values(self):
        bias, var = exponential_case(1.0, 1.0)
        assert bias == pytest.approx(38.0 / 3.0, rel=1e-14)
        assert var == pytest.approx(40.0 / 3.0, rel=1e-14)
        bias, var = exponential_case(2.0, 1.0)
        assert bias == pytest.approx(35.4, rel=1e-12)
        assert var == pytest.approx(79.2, rel=1e-12)
        bias, var = exponential_case(1.0, 10.0)
        assert bias == pytest.approx(42482.0 / 1200.0, rel=1e-12)
        assert var == pytest.approx(31702.0 / 1200.0, rel=1e-12)

    def test_homogeneity_degrees(self):
        # bias is degree-1 and variance degree-2 homogeneous in (alpha, beta)
        for c in (2.0, 5.0):
            b1, v1 = exponential_case(0.7, 1.3)
            b2, v2 = exponential_case(c * 0.7, c * 1.3)
            assert b2 == pytest.approx(c * b1, rel=1e-12)
            assert v2 == pytest.approx(c * c * v1, rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            exponential_case(0.0, 1.0)
        with pytest.raises(ValueError):
            exponential_case(1.0, -1.0)


class TestDesignHelpers:
    @pytest.mark.parametrize("alpha", ALPHAS)
    @pytest.mark.parametrize("beta", BETAS)
    def test_limits_match_theorem1(self, alpha, beta):
        law = ExponentialSpacing(beta)
        out = theorem1(ProcessParams(alpha=alpha, sigma2=1.0), law)
        assert drift_bias_limit(alpha, law) == pytest.approx(out.alpha_bias_n, rel=1e-14)
        assert drift_variance_limit(alpha, law) == pytest.approx(out.alpha_var_n, rel=1e-14)
