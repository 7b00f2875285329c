"""Monte Carlo density, log-likelihood, and goodness of fit for S0 laws.

The density of an S0 law at y is estimated from the normal mixture

    f(y) ~= mean over latent pairs (p, v) of  N(y; mu0 - lambda + theta*v,
                                               2 * p * eta^2)

with (p, v) drawn from their priors.  A call with K uses K*K i.i.d. latent
pairs, and one shared pair batch serves every y passed to the same call:
sharing cuts cost n-fold at the price of correlated (never biased) estimates
across evaluation points.

Density estimates below ``DENSITY_FLOOR`` are clamped before logs are taken,
so finite-sample undersmoothing in far tails yields finite log-likelihoods.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.stats

from ._kernels import mixture_density
from .params import ALPHA_ONE_TOL, StableParams, mixture_coefficients
from .rng import RngStream
from .sampling import sample_mixing_weight, sample_stable, sample_unit_skew

__all__ = [
    "DENSITY_FLOOR",
    "pdf_mc",
    "observed_loglik",
    "ks_statistic",
    "draw_latent_pairs",
    "mixture_setup",
]

DENSITY_FLOOR = 1e-300

# Alpha values this close to 1 are nudged off the singularity of the mixture
# coefficients (lambda diverges at alpha == 1 when beta != 0).
_MIXTURE_ALPHA_TOL = 1e-6


def mixture_setup(p: StableParams):
    """Effective alpha and mixture coefficients for Monte Carlo evaluation.

    Returns ``(alpha_eff, coefs)`` where ``alpha_eff`` equals ``p.alpha``
    except within 1e-6 of 1, where it is nudged to 1 +/- 1e-6 so that the
    mixture representation stays defined for beta != 0.
    """
    if not p.is_s0:
        raise ValueError("Monte Carlo density requires S0 parameters; convert first")
    alpha = p.alpha
    if abs(alpha - 1.0) < _MIXTURE_ALPHA_TOL:
        alpha = 1.0 + _MIXTURE_ALPHA_TOL if alpha >= 1.0 else 1.0 - _MIXTURE_ALPHA_TOL
    coefs = mixture_coefficients(
        StableParams(alpha, p.beta, p.sigma, p.mu, p.parameterization)
    )
    return alpha, coefs


def draw_latent_pairs(alpha: float, count: int, gen: np.random.Generator):
    """``count`` i.i.d. latent pairs (p, v) from the mixture priors."""
    p = sample_mixing_weight(alpha, count, gen)
    v = sample_unit_skew(alpha, count, gen)
    return p, v


def pdf_mc(y, p: StableParams, K: int, rng: RngStream):
    """Monte Carlo estimate of the S0 density of ``p`` at ``y``.

    ``y`` may be a scalar or an array; all points in one call share a single
    batch of K*K latent pairs (common random numbers).  Estimates are
    nonnegative, consistent as K grows, and deterministic given ``rng``.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    alpha_eff, coefs = mixture_setup(p)
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    gen = rng.generator()
    lat_p, lat_v = draw_latent_pairs(alpha_eff, K * K, gen)
    dens = mixture_density(
        np.ascontiguousarray(y_arr),
        lat_p,
        lat_v,
        coefs.eta,
        coefs.theta,
        p.mu - coefs.lam,
    )
    return float(dens[0]) if np.isscalar(y) or np.asarray(y).ndim == 0 else dens


def observed_loglik(data, p: StableParams, K: int, rng: RngStream) -> float:
    """Sum of floored log density estimates over ``data`` (shared latents)."""
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        raise ValueError("data must be nonempty")
    dens = pdf_mc(data, p, K, rng)
    return float(np.log(np.maximum(dens, DENSITY_FLOOR)).sum())


def ks_statistic(data, p: StableParams, cdf_sample_size: int, rng: RngStream) -> float:
    """Sup distance between the data's empirical CDF and a Monte Carlo model CDF.

    The model CDF is the empirical CDF of ``cdf_sample_size`` sampler draws;
    its O(n^-1/2) error is below reporting tolerance at the required sizes.
    """
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        raise ValueError("data must be nonempty")
    if cdf_sample_size < 100_000:
        raise ValueError("cdf_sample_size must be >= 1e5")
    model = sample_stable(p, cdf_sample_size, rng)
    return float(scipy.stats.ks_2samp(data, model).statistic)
