"""Numba kernels for the Monte Carlo density and E-step reductions.

All parallelism is elementwise or row-wise: every output slot is computed
independently and any reduction runs serially inside its slot.  Results are
therefore bit-identical for any thread or worker count, which the study
harness relies on.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@njit(cache=True, fastmath=True, parallel=True)
def cms_transform(alpha: float, beta: float, phi: np.ndarray, w: np.ndarray) -> np.ndarray:
    """CMS transform to S1(alpha, beta, 1, 0); phi ~ U(-pi/2, pi/2), w ~ Exp(1)."""
    n = phi.shape[0]
    out = np.empty(n)
    half_pi = 0.5 * math.pi
    if abs(alpha - 1.0) < 1e-8:
        for i in prange(n):
            bphi = half_pi + beta * phi[i]
            out[i] = (2.0 / math.pi) * (
                bphi * math.tan(phi[i])
                - beta * math.log(half_pi * w[i] * math.cos(phi[i]) / bphi)
            )
        return out
    zeta = beta * math.tan(half_pi * alpha)
    b = math.atan(zeta) / alpha
    s = (1.0 + zeta * zeta) ** (1.0 / (2.0 * alpha))
    inv_alpha = 1.0 / alpha
    expo = (1.0 - alpha) / alpha
    for i in prange(n):
        ab = alpha * (phi[i] + b)
        cos_phi = math.cos(phi[i])
        # x**c spelled as exp(c*log(x)); both bases are positive
        out[i] = (
            s
            * math.sin(ab)
            * math.exp(
                expo * (math.log(math.cos(phi[i] - ab)) - math.log(w[i]))
                - inv_alpha * math.log(cos_phi)
            )
        )
    return out


@njit(cache=True, fastmath=True, parallel=True)
def mixture_density(
    y: np.ndarray,
    p_lat: np.ndarray,
    v_lat: np.ndarray,
    eta: float,
    theta: float,
    shift: float,
) -> np.ndarray:
    """Mean over shared latent pairs of N(y; shift + theta*v, 2*p*eta^2).

    ``shift`` is mu0 - lambda.  A zero conditional variance contributes
    nothing (the |beta| = 1 edge, where the mixture degenerates).
    """
    n = y.shape[0]
    m = p_lat.shape[0]
    out = np.empty(n)
    inv_m = 1.0 / m
    for i in prange(n):
        yi = y[i]
        acc = 0.0
        for j in range(m):
            s2 = 2.0 * p_lat[j] * eta * eta
            if s2 > 0.0:
                d = yi - shift - theta * v_lat[j]
                acc += math.exp(-0.5 * d * d / s2) * _INV_SQRT_2PI / math.sqrt(s2)
        out[i] = acc * inv_m
    return out


@njit(cache=True, fastmath=True, parallel=True)
def mixture_moment_sums(
    y: np.ndarray,
    p_rows: np.ndarray,
    v_rows: np.ndarray,
    eta: float,
    theta: float,
    shift: float,
) -> np.ndarray:
    """Row-wise weight sums for the E-step.

    Row i of ``p_rows``/``v_rows`` holds the latent draws serving y[i].
    Returns an (n, 4) array of [sum C, sum C/p, sum C*v/p, sum C*v^2/p].
    """
    n = y.shape[0]
    m = p_rows.shape[1]
    out = np.empty((n, 4))
    for i in prange(n):
        yi = y[i]
        s = 0.0
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        for j in range(m):
            pj = p_rows[i, j]
            var = 2.0 * pj * eta * eta
            if var > 0.0:
                vj = v_rows[i, j]
                d = yi - shift - theta * vj
                c = math.exp(-0.5 * d * d / var) * _INV_SQRT_2PI / math.sqrt(var)
                s += c
                r = c / pj
                s0 += r
                s1 += r * vj
                s2 += r * vj * vj
        out[i, 0] = s
        out[i, 1] = s0
        out[i, 2] = s1
        out[i, 3] = s2
    return out
