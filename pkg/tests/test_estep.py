import numpy as np
import pytest

from stablefit import DegenerateWeightsError, RngStream, StableParams, e_step_expectations

from oracles import estep_importance_oracle


class TestInvariants:
    def test_cauchy_schwarz_and_positivity(self):
        theta = StableParams(1.3, 0.6, 1.2, -0.4)
        data = np.array([-3.0, -0.5, 0.0, 0.4, 2.0, 11.0])
        triples = e_step_expectations(data, theta, 60, RngStream(1, 500))
        for t in triples:
            assert t.e0 > 0.0
            assert t.e2 >= 0.0
            assert t.e1 * t.e1 <= t.e0 * t.e2 * (1.0 + 1e-12)

    def test_determinism(self):
        theta = StableParams(1.5, 0.3, 1.0, 0.0)
        data = np.array([0.1, 1.0, -2.0])
        a = e_step_expectations(data, theta, 40, RngStream(2, 500))
        b = e_step_expectations(data, theta, 40, RngStream(2, 500))
        assert a == b

    def test_rejects_s1_and_empty(self):
        from stablefit import Parameterization

        theta = StableParams(1.5, 0.3, 1.0, 0.0, Parameterization.S1)
        with pytest.raises(ValueError):
            e_step_expectations([0.0], theta, 10, RngStream(0))
        theta0 = StableParams(1.5, 0.3, 1.0, 0.0)
        with pytest.raises(ValueError):
            e_step_expectations([], theta0, 10, RngStream(0))


class TestOracles:
    def test_importance_sampling_oracle_point(self):
        # (y, theta) with nonzero skew: all three ratios are well posed
        theta = StableParams(1.2, 0.5, 1.0, 0.0)
        oracle = np.mean(
            [estep_importance_oracle(0.5, theta, seed=s) for s in range(5)], axis=0
        )
        ests = []
        for s in range(20):
            t = e_step_expectations(np.array([0.5]), theta, 100, RngStream(s, 501))[0]
            ests.append([t.e0, t.e1, t.e2])
        med = np.median(ests, axis=0)
        np.testing.assert_allclose(med, oracle, rtol=0.05)

    def test_high_k_self_oracle_e0(self):
        # beta = 0: the weights ignore v, so only E0 = E(P^-1 | y) admits a
        # convergent Monte Carlo target (E1's truth is 0, E2's is +inf; see
        # the symmetric-case tests below)
        theta = StableParams(1.5, 0.0, 1.0, 0.0)
        big = e_step_expectations(np.array([0.0]), theta, 2000, RngStream(77, 502))[0]
        meds = np.median(
            [
                e_step_expectations(np.array([0.0]), theta, 100, RngStream(s, 503))[0].e0
                for s in range(20)
            ]
        )
        assert meds == pytest.approx(big.e0, rel=0.05)

    def test_symmetric_case_e1_centers_on_zero(self):
        # for beta = 0 the posterior factorizes and E(V) = 0 at alpha > 1,
        # so estimates must straddle zero with small magnitude
        theta = StableParams(1.5, 0.0, 1.0, 0.0)
        e1s = [
            e_step_expectations(np.array([0.0]), theta, 100, RngStream(s, 504))[0].e1
            for s in range(20)
        ]
        assert abs(np.median(e1s)) < 0.2

    def test_symmetric_case_e2_grows_with_k(self):
        # E(P^-1 V^2 | y) has no finite value at beta = 0 (V has infinite
        # second moment and the weights do not temper it): the estimate is
        # positive and drifts upward as K grows
        theta = StableParams(1.5, 0.0, 1.0, 0.0)
        small = np.median(
            [
                e_step_expectations(np.array([0.0]), theta, 50, RngStream(s, 505))[0].e2
                for s in range(10)
            ]
        )
        large = np.median(
            [
                e_step_expectations(np.array([0.0]), theta, 800, RngStream(s, 506))[0].e2
                for s in range(10)
            ]
        )
        assert small > 0.0
        assert large > small


def test_degenerate_weights_error_names_observation():
    # sigma so small that a distant point underflows every weight
    theta = StableParams(1.9, 0.0, 1e-6, 0.0)
    data = np.array([0.0, 5.0e7])
    with pytest.raises(DegenerateWeightsError) as exc:
        e_step_expectations(data, theta, 20, RngStream(3, 507))
    assert exc.value.index == 1
