import math

import numpy as np
import pytest

from stablefit import (
    Parameterization,
    StableParams,
    characteristic_function,
    convert_parameterization,
    mixture_coefficients,
)

S0 = Parameterization.S0
S1 = Parameterization.S1


class TestStableParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            StableParams(0.0, 0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            StableParams(2.1, 0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            StableParams(1.5, 1.2, 1.0, 0.0)
        with pytest.raises(ValueError):
            StableParams(1.5, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            StableParams(1.5, 0.0, 1.0, math.inf)

    def test_alpha_two_beta_range_ok(self):
        StableParams(2.0, -1.0, 0.5, 3.0)


class TestConvert:
    def test_beta_zero_leaves_location(self):
        p = StableParams(1.5, 0.0, 1.0, 3.0, S0)
        q = convert_parameterization(p, S1)
        assert q.mu == 3.0
        assert (q.alpha, q.beta, q.sigma) == (1.5, 0.0, 1.0)

    def test_tan_three_quarters_pi(self):
        # tan(3*pi/4) = -1 exactly, so lambda = -1 and mu1 = mu0 + 1
        p = StableParams(1.5, 0.5, 2.0, 0.0, S0)
        q = convert_parameterization(p, S1)
        assert q.mu == pytest.approx(1.0, abs=1e-12)

    def test_alpha_one_log_sigma_vanishes(self):
        p = StableParams(1.0, 1.0, 1.0, 0.0, S0)
        q = convert_parameterization(p, S1)
        assert q.mu == 0.0

    def test_involution(self):
        for alpha in (0.5, 1.0, 1.3, 2.0):
            for beta in (-0.9, 0.0, 0.7):
                p = StableParams(alpha, beta, 2.5, -1.2, S0)
                back = convert_parameterization(convert_parameterization(p, S1), S0)
                assert back.mu == pytest.approx(p.mu, abs=1e-12)

    def test_same_tag_is_identity(self):
        p = StableParams(1.5, 0.5, 1.0, 1.0, S1)
        assert convert_parameterization(p, S1) == p


class TestCharacteristicFunction:
    def test_gaussian_real(self):
        p = StableParams(2.0, 0.0, 1.0, 0.0, S0)
        val = characteristic_function(p, 1.0)
        assert val == pytest.approx(math.exp(-1.0), abs=1e-12)
        assert abs(val.imag) < 1e-15

    def test_cauchy(self):
        p = StableParams(1.0, 0.0, 1.0, 0.0, S1)
        assert characteristic_function(p, 2.0) == pytest.approx(math.exp(-2.0), abs=1e-12)

    def test_at_zero(self):
        for p in [
            StableParams(1.5, 0.5, 2.0, 3.0, S0),
            StableParams(1.0, -0.7, 0.5, 1.0, S1),
        ]:
            assert characteristic_function(p, 0.0) == pytest.approx(1.0 + 0.0j)

    def test_modulus_carries_no_skew(self):
        ts = np.array([-3.0, -0.7, 0.4, 1.0, 5.0])
        for alpha in (0.6, 1.0, 1.4, 2.0):
            for beta in (-1.0, -0.3, 0.0, 0.8):
                for tag in (S0, S1):
                    p = StableParams(alpha, beta, 1.7, 0.4, tag)
                    mods = np.abs(characteristic_function(p, ts))
                    want = np.exp(-np.abs(1.7 * ts) ** alpha)
                    np.testing.assert_allclose(mods, want, atol=1e-12)

    def test_conversion_preserves_chf(self):
        # same law, both tags: identical chf everywhere
        ts = np.linspace(-4, 4, 41)
        for alpha in (0.8, 1.0, 1.6):
            p = StableParams(alpha, 0.6, 1.3, -0.5, S0)
            q = convert_parameterization(p, S1)
            np.testing.assert_allclose(
                characteristic_function(p, ts), characteristic_function(q, ts), atol=1e-12
            )


class TestMixtureCoefficients:
    def test_symmetric(self):
        mc = mixture_coefficients(StableParams(1.5, 0.0, 3.0, 0.0))
        assert (mc.eta, mc.theta, mc.lam, mc.delta) == (3.0, 0.0, 0.0, 3.0)

    def test_full_skew_kills_eta(self):
        mc = mixture_coefficients(StableParams(1.5, 1.0, 2.0, 0.0))
        assert mc.eta == 0.0
        assert mc.theta == pytest.approx(2.0)
        assert mc.lam == pytest.approx(-2.0, abs=1e-12)
        assert mc.delta == pytest.approx(2.0 * 2.0 ** (2.0 / 3.0))

    def test_half_skew_values(self):
        # direct evaluation: eta = theta = 2*0.5^(2/3), lam = -1, delta = 2*1.5^(2/3)
        mc = mixture_coefficients(StableParams(1.5, 0.5, 2.0, 0.0))
        assert mc.eta == pytest.approx(2.0 * 0.5 ** (2.0 / 3.0), rel=1e-12)
        assert mc.theta == pytest.approx(mc.eta, rel=1e-12)
        assert mc.eta == pytest.approx(1.2599, abs=5e-5)
        assert mc.lam == pytest.approx(-1.0, abs=1e-12)
        assert mc.delta == pytest.approx(2.0 * 1.5 ** (2.0 / 3.0), rel=1e-12)
        assert mc.delta == pytest.approx(2.6207, abs=5e-5)

    def test_rejects_s1(self):
        p = StableParams(1.5, 0.5, 1.0, 0.0, S1)
        with pytest.raises(ValueError):
            mixture_coefficients(p)

    def test_negative_beta_signs(self):
        mc = mixture_coefficients(StableParams(1.5, -0.5, 2.0, 0.0))
        assert mc.theta == pytest.approx(-1.2599, abs=5e-5)
        assert mc.lam == pytest.approx(1.0, abs=1e-12)
