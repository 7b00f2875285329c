"""Samplers for stable laws and the latent variables of their normal mixture.

The core generator is the Chambers-Mallows-Stuck (CMS) transform: a uniform
angle on (-pi/2, pi/2) and a standard exponential are mapped to one draw of
S1(alpha, beta, 1, 0).  Scale and location are then attached per the target
parameterization; under S0 the alpha == 1 drift cancels, so Y = sigma*X + mu0
in every branch with location handled through the S0/S1 shift.

Latent draws for the mixture hierarchy:

    P ~ S1(alpha/2, 1, cos(pi*alpha/4)^(2/alpha), 0)   (Gaussian mixing weight)
    V ~ S1(alpha, 1, 1, 0)                             (skewness carrier)

At alpha == 2 the P law degenerates to the point mass at 1 and the stable law
is Gaussian; both samplers special-case it.
"""

from __future__ import annotations

import math

import numpy as np

from ._kernels import cms_transform
from .params import ALPHA_ONE_TOL, StableParams, mixture_coefficients
from .rng import RngStream

__all__ = [
    "cms_standard",
    "sample_stable",
    "sample_mixing_weight",
    "sample_unit_skew",
    "sample_representation",
]

_HALF_PI = math.pi / 2.0


def cms_standard(alpha: float, beta: float, phi: np.ndarray, w: np.ndarray) -> np.ndarray:
    """CMS transform of angles ``phi`` ~ U(-pi/2, pi/2) and ``w`` ~ Exp(1).

    Returns draws of S1(alpha, beta, 1, 0).
    """
    phi = np.ascontiguousarray(phi, dtype=float)
    w = np.ascontiguousarray(w, dtype=float)
    return cms_transform(float(alpha), float(beta), phi, w)


def _standard_draws(gen: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    phi = gen.uniform(-_HALF_PI, _HALF_PI, size)
    w = gen.standard_exponential(size)
    return phi, w


def sample_stable(p: StableParams, n: int, rng: RngStream) -> np.ndarray:
    """``n`` i.i.d. draws from the law of ``p``; deterministic given ``rng``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = rng.generator()
    return sample_stable_with(p, n, gen)


def sample_stable_with(p: StableParams, n: int, gen: np.random.Generator) -> np.ndarray:
    """Like :func:`sample_stable` but consuming an existing generator."""
    phi, w = _standard_draws(gen, n)
    x = cms_standard(p.alpha, p.beta, phi, w)
    alpha, beta, sigma = p.alpha, p.beta, p.sigma
    if abs(alpha - 1.0) < ALPHA_ONE_TOL:
        if p.is_s0:
            # the (2/pi) beta sigma log sigma drifts cancel exactly under S0
            return sigma * x + p.mu
        return sigma * x + (2.0 / math.pi) * beta * sigma * math.log(sigma) + p.mu
    if p.is_s0:
        return sigma * x + p.mu - beta * sigma * math.tan(_HALF_PI * alpha)
    return sigma * x + p.mu


def sample_mixing_weight(alpha: float, size: int, gen: np.random.Generator) -> np.ndarray:
    """Draws of the positive mixing weight P of the Gaussian scale mixture.

    P ~ S1(alpha/2, 1, cos(pi*alpha/4)^(2/alpha), 0), whose Laplace transform
    is exp(-r^(alpha/2)); at alpha == 2 it is the point mass at 1.
    """
    if alpha == 2.0:
        gen.uniform(-_HALF_PI, _HALF_PI, size)  # keep stream consumption uniform
        gen.standard_exponential(size)
        return np.ones(size)
    scale = math.cos(math.pi * alpha / 4.0) ** (2.0 / alpha)
    phi, w = _standard_draws(gen, size)
    return scale * cms_standard(alpha / 2.0, 1.0, phi, w)


def sample_unit_skew(alpha: float, size: int, gen: np.random.Generator) -> np.ndarray:
    """Draws of V ~ S1(alpha, 1, 1, 0), the skewness carrier of the mixture."""
    phi, w = _standard_draws(gen, size)
    return cms_standard(alpha, 1.0, phi, w)


def sample_representation(p: StableParams, n: int, rng: RngStream) -> np.ndarray:
    """``n`` draws via the scale-location normal mixture of an S0 law.

    Y = eta * sqrt(2 P) * N + theta * V + mu0 - lambda, with P, V, N
    independent.  Distributionally equal to :func:`sample_stable`.  At
    alpha == 2 the mixture degenerates and mu0 + sigma*sqrt(2)*N is
    returned directly.
    """
    if not p.is_s0:
        raise ValueError("representation sampler requires S0 parameters")
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = rng.generator()
    if p.alpha == 2.0:
        return p.mu + p.sigma * math.sqrt(2.0) * gen.standard_normal(n)
    coefs = mixture_coefficients(p)
    pw = sample_mixing_weight(p.alpha, n, gen)
    v = sample_unit_skew(p.alpha, n, gen)
    z = gen.standard_normal(n)
    return coefs.eta * np.sqrt(2.0 * pw) * z + coefs.theta * v + p.mu - coefs.lam
