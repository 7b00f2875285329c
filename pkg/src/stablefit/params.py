"""Parameterizations and closed-form quantities of alpha-stable laws.

Two location conventions are supported.  S0 is continuous in all four
parameters; S1 differs from it only through the location and is
discontinuous at ``alpha == 1``.  The laws share ``(alpha, beta, sigma)``
and their locations are related by

    mu1 = mu0 - beta * sigma * tan(pi*alpha/2)        (alpha != 1)
    mu1 = mu0 - beta * (2/pi) * sigma * log(sigma)    (alpha == 1)

The scale-location normal mixture behind the EM machinery uses four
derived coefficients of an S0 law:

    eta    = sigma * (1 - |beta|)^(1/alpha)
    theta  = sigma * sgn(beta) * |beta|^(1/alpha)
    lambda = sigma * beta * tan(pi*alpha/2)
    delta  = sigma * (1 + |beta|)^(1/alpha)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "Parameterization",
    "StableParams",
    "MixtureCoefficients",
    "convert_parameterization",
    "characteristic_function",
    "mixture_coefficients",
    "ALPHA_ONE_TOL",
]

# |alpha - 1| below this uses the dedicated alpha == 1 formulas; the generic
# branch is discontinuous in form there.
ALPHA_ONE_TOL = 1e-8


class Parameterization(enum.Enum):
    S0 = "S0"
    S1 = "S1"


def _is_one(alpha: float) -> bool:
    return abs(alpha - 1.0) < ALPHA_ONE_TOL


@dataclass(frozen=True)
class StableParams:
    """A stable law: tail index, skewness, scale, location, location tag.

    ``mu`` is read as mu0 under S0 and as mu1 under S1.
    """

    alpha: float
    beta: float
    sigma: float
    mu: float
    parameterization: Parameterization = Parameterization.S0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must be in (0, 2], got {self.alpha}")
        if not (-1.0 <= self.beta <= 1.0):
            raise ValueError(f"beta must be in [-1, 1], got {self.beta}")
        if not (self.sigma > 0.0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")

    @property
    def is_s0(self) -> bool:
        return self.parameterization is Parameterization.S0

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.sigma, self.mu)


@dataclass(frozen=True)
class MixtureCoefficients:
    """Derived coefficients (eta, theta, lambda, delta) of an S0 law."""

    eta: float
    theta: float
    lam: float
    delta: float


def _location_shift(alpha: float, beta: float, sigma: float) -> float:
    # mu0 - mu1 for the given (alpha, beta, sigma)
    if beta == 0.0:
        return 0.0
    if _is_one(alpha):
        return beta * (2.0 / math.pi) * sigma * math.log(sigma)
    return beta * sigma * math.tan(math.pi * alpha / 2.0)


def convert_parameterization(p: StableParams, target: Parameterization) -> StableParams:
    """Re-express ``p`` under the ``target`` location convention.

    alpha, beta, sigma are untouched; only the location shifts.  Converting
    back returns the original parameters (up to roundoff).
    """
    if p.parameterization is target:
        return p
    shift = _location_shift(p.alpha, p.beta, p.sigma)
    if target is Parameterization.S1:
        mu = p.mu - shift
    else:
        mu = p.mu + shift
    return replace(p, mu=mu, parameterization=target)


def mixture_coefficients(p: StableParams) -> MixtureCoefficients:
    """Coefficients (eta, theta, lambda, delta) of the normal mixture of ``p``.

    Requires the S0 tag (convert first).  The representation is undefined at
    alpha == 1 with beta != 0, where lambda diverges.
    """
    if not p.is_s0:
        raise ValueError("mixture coefficients are defined for S0 parameters; convert first")
    alpha, beta, sigma = p.alpha, p.beta, p.sigma
    if beta == 0.0:
        return MixtureCoefficients(eta=sigma, theta=0.0, lam=0.0, delta=sigma)
    if _is_one(alpha):
        raise ValueError("mixture representation is undefined at alpha == 1 with beta != 0")
    ab = abs(beta)
    eta = sigma * (1.0 - ab) ** (1.0 / alpha)
    theta = sigma * math.copysign(ab ** (1.0 / alpha), beta)
    lam = sigma * beta * math.tan(math.pi * alpha / 2.0)
    delta = sigma * (1.0 + ab) ** (1.0 / alpha)
    return MixtureCoefficients(eta=eta, theta=theta, lam=lam, delta=delta)


def characteristic_function(p: StableParams, t):
    """Characteristic function of ``p`` at real frequencies ``t``.

    Accepts a scalar or array ``t`` and returns complex values of matching
    shape.  Both location conventions and both alpha branches are covered;
    the modulus is always exp(-|sigma*t|^alpha).
    """
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    alpha, beta, sigma, mu = p.alpha, p.beta, p.sigma, p.mu

    st = np.abs(sigma * t_arr)
    sgn = np.sign(t_arr)
    if _is_one(alpha):
        # |t| log|t| -> 0 as t -> 0; evaluate on the nonzero part only
        log_abs_t = np.zeros_like(t_arr)
        nz = t_arr != 0.0
        log_abs_t[nz] = np.log(np.abs(t_arr[nz]))
        re = -st
        im = -st * beta * sgn * (2.0 / math.pi) * log_abs_t + t_arr * mu
        if p.is_s0:
            im = im - (2.0 / math.pi) * t_arr * beta * sigma * math.log(sigma)
    else:
        tan_half = math.tan(math.pi * alpha / 2.0) if beta != 0.0 else 0.0
        re = -(st ** alpha)
        im = (st ** alpha) * beta * sgn * tan_half + t_arr * mu
        if p.is_s0:
            im = im - t_arr * beta * sigma * tan_half
    out = np.exp(re + 1j * im)
    return out[0] if scalar else out
