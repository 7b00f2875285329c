import math

import numpy as np
import pytest
from scipy.stats import chisquare

from stablefit import RngStream, sample_w_posterior
from stablefit.em import _sample_w_batch

from oracles import w_posterior_bin_probs, w_posterior_norm, w_posterior_target_unnorm


def test_envelope_maximum_formula():
    # max_w (w/sqrt(2pi)) exp(-y^2 w^2/2) = exp(-1/2)/(sqrt(2pi)|y|) at w = 1/|y|
    y = 1.0
    ws = np.linspace(1e-4, 10, 200_001)
    vals = ws / math.sqrt(2 * math.pi) * np.exp(-0.5 * (y * ws) ** 2)
    bound = math.exp(-0.5) / (math.sqrt(2 * math.pi) * abs(y))
    assert vals.max() <= bound * (1 + 1e-9)
    assert vals.max() == pytest.approx(bound, rel=1e-6)
    assert bound == pytest.approx(0.24197, abs=1e-5)
    assert ws[np.argmax(vals)] == pytest.approx(1.0, abs=1e-3)


def _chi2_pvalue(y, alpha, n_draws, seed):
    gen = RngStream(seed, 600).generator()
    draws = _sample_w_batch(np.full(n_draws, y), alpha, gen)
    # bin edges at equal target mass, from a dense quadrature-normalized CDF
    wmax = max(12.0, 60.0 ** (1.0 / alpha))
    wg = np.linspace(1e-9, wmax, 20_001)
    pdf = w_posterior_target_unnorm(wg, y, alpha) / w_posterior_norm(y, alpha)
    cdf = np.cumsum(pdf) * (wg[1] - wg[0])
    cdf /= cdf[-1]
    edges = np.interp(np.linspace(0, 1, 31), cdf, wg)
    edges[0], edges[-1] = 0.0, np.inf
    counts, _ = np.histogram(draws, bins=edges)
    probs = w_posterior_bin_probs(edges, y, alpha)
    return chisquare(counts, probs * n_draws).pvalue


def test_histogram_matches_quadrature_target():
    assert _chi2_pvalue(0.5, 1.3, 100_000, seed=42) > 0.01


def test_acceptance_mass_matches_quadrature():
    # acceptance rate = Z * |y| * e^(1/2), Z the unnormalized target mass
    y, alpha = 1.0, 1.0
    pred = w_posterior_norm(y, alpha) * abs(y) * math.exp(0.5)
    gen = RngStream(9, 601).generator()
    n = 100_000
    w = gen.weibull(alpha, n)
    u = gen.uniform(size=n)
    emp = (u < abs(y) * w * np.exp(0.5 - 0.5 * (abs(y) * w) ** 2)).mean()
    assert emp == pytest.approx(pred, rel=0.02)


def test_zero_branch_is_length_biased():
    # y** = 0: posterior ~ w f_W(w); mean = Gamma(1+2/a)/Gamma(1+1/a)
    alpha = 1.3
    gen = RngStream(10, 602).generator()
    draws = _sample_w_batch(np.zeros(50_000), alpha, gen)
    want = math.gamma(1 + 2 / alpha) / math.gamma(1 + 1 / alpha)
    assert draws.mean() == pytest.approx(want, rel=0.02)
    assert (draws > 0).all()


def test_scalar_api_and_determinism():
    a = sample_w_posterior(0.8, 1.4, RngStream(11, 603))
    b = sample_w_posterior(0.8, 1.4, RngStream(11, 603))
    assert a == b
    assert a > 0.0
    with pytest.raises(ValueError):
        sample_w_posterior(1.0, 2.5, RngStream(0))


def test_large_y_still_terminates():
    gen = RngStream(12, 604).generator()
    draws = _sample_w_batch(np.array([250.0, -4000.0]), 1.5, gen)
    assert (draws > 0).all()
    # posterior concentrates near w ~ 1/|y|
    assert draws[0] < 0.1
