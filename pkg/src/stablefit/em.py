"""EM/ECM/SEM estimator for all four parameters of an S0 stable law.

One iteration runs four phases:

1. E-step.  Per observation, self-normalized Monte Carlo estimates of
   E(P^-1 V^r | y, theta) for r = 0, 1, 2, using K*K latent prior pairs and
   normal-density weights from the mixture hierarchy.
2. M-step.  Closed-form conditional maximizers for the location mu0 and the
   scale sigma (positive root of a downward quadratic).
3. Skewness.  A cheap profile-likelihood update of beta on a coarse grid
   with one refinement, under common random numbers.
4. CM-step.  M stochastic-EM cycles for alpha: transform the data to a
   conditional N(0, W^-2) / Weibull(alpha, 1) hierarchy, impute W from its
   posterior by rejection sampling, maximize the resulting Weibull-shape
   likelihood, and average the post-burn-in cycle outputs.

After N iterations, alpha, sigma, mu0 are averaged over the post-burn-in
trace and beta is set by one full-resolution profile pass at the averaged
values.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._kernels import mixture_density, mixture_moment_sums
from .density import (
    DENSITY_FLOOR,
    draw_latent_pairs,
    ks_statistic,
    mixture_setup,
    observed_loglik,
)
from .params import Parameterization, StableParams, mixture_coefficients
from .rng import RngStream
from .sampling import sample_unit_skew

__all__ = [
    "EMConfig",
    "ExpectationTriple",
    "EMTrace",
    "FitResult",
    "DegenerateWeightsError",
    "EMAbortError",
    "e_step_expectations",
    "update_mu0",
    "update_sigma",
    "update_beta_profile",
    "transform_cm",
    "sample_w_posterior",
    "maximize_lw",
    "cm_step_alpha",
    "fit_em",
]

logger = logging.getLogger(__name__)

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Floor returned by the sigma update when every weighted residual vanishes.
SIGMA_FLOOR = 1e-12

# In-loop beta profile: coarse grid size and its reduced Monte Carlo budget.
# The final pass runs at the configured resolution and full K.
INNER_BETA_GRID = 21

# Observations are processed in fixed-size blocks so the E-step's memory
# stays bounded and its draw sequence is independent of len(data).
_ESTEP_BLOCK = 128


class DegenerateWeightsError(RuntimeError):
    """All K*K posterior weights underflowed for one observation.

    Recoverable: retry with a fresh stream or a larger K.
    """

    def __init__(self, index: int):
        super().__init__(
            f"all Monte Carlo weights underflowed for observation {index}; "
            "retry with a fresh stream or larger K"
        )
        self.index = index


class EMAbortError(RuntimeError):
    """A parameter update became non-finite; carries the trace so far."""

    def __init__(self, message: str, trace: "EMTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class EMConfig:
    """Every tuning knob of the estimator in one record.

    Defaults mirror the reference experimental settings: K=100 Monte Carlo
    grid, N=140 EM iterations with N0=100 burn-in, M=40 SEM cycles per
    CM-step with M0=20 burn-in.
    """

    K: int = 100
    N: int = 140
    N0: int = 100
    M: int = 40
    M0: int = 20
    beta_grid: int = 41
    alpha_min: float = 0.1
    cdf_sample_size: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if not 0 <= self.N0 < self.N:
            raise ValueError("need 0 <= N0 < N")
        if not 0 <= self.M0 < self.M:
            raise ValueError("need 0 <= M0 < M")
        if self.beta_grid < 3:
            raise ValueError("beta_grid must be >= 3")
        if not 0.0 < self.alpha_min < 2.0:
            raise ValueError("alpha_min must be in (0, 2)")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class ExpectationTriple:
    """Per-observation E-step output: E(P^-1 V^r | y) for r = 0, 1, 2.

    Always satisfies e0 > 0, e2 >= 0 and e1^2 <= e0 * e2 (the estimates share
    one nonnegative weight set, so Cauchy-Schwarz holds exactly).
    """

    e0: float
    e1: float
    e2: float


@dataclass(frozen=True)
class EMTrace:
    """Per-iteration parameter records, t = 0 (init) through N."""

    alpha: np.ndarray
    beta: np.ndarray
    sigma: np.ndarray
    mu0: np.ndarray

    def __len__(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class FitResult:
    params: StableParams
    trace: EMTrace
    loglik: float
    ks: float
    config: EMConfig


def _require_s0(theta: StableParams):
    if not theta.is_s0:
        raise ValueError("EM operations require S0 parameters; convert first")


def _triple_arrays(triples) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    e0 = np.array([t.e0 for t in triples])
    e1 = np.array([t.e1 for t in triples])
    e2 = np.array([t.e2 for t in triples])
    return e0, e1, e2


def e_step_expectations(
    data, theta: StableParams, K: int, rng: RngStream
) -> list[ExpectationTriple]:
    """Monte Carlo conditional expectations E(P^-1 V^r | y_i, theta), r=0,1,2.

    Each observation gets its own K*K latent prior pairs; the same draw
    matrices serve the three ratios and the density denominator.  Raises
    :class:`DegenerateWeightsError` if every weight underflows for some
    observation.
    """
    _require_s0(theta)
    if K < 1:
        raise ValueError("K must be >= 1")
    data = np.ascontiguousarray(data, dtype=float)
    n = data.size
    if n == 0:
        raise ValueError("data must be nonempty")
    alpha_eff, coefs = mixture_setup(theta)
    shift = theta.mu - coefs.lam
    count = K * K
    gen = rng.generator()

    sums = np.empty((n, 4))
    for start in range(0, n, _ESTEP_BLOCK):
        block = data[start : start + _ESTEP_BLOCK]
        m = block.size
        lat_p, lat_v = draw_latent_pairs(alpha_eff, m * count, gen)
        sums[start : start + m] = mixture_moment_sums(
            block,
            lat_p.reshape(m, count),
            lat_v.reshape(m, count),
            coefs.eta,
            coefs.theta,
            shift,
        )

    bad = np.flatnonzero(sums[:, 0] <= 0.0)
    if bad.size:
        raise DegenerateWeightsError(int(bad[0]))
    denom = sums[:, 0]
    return [
        ExpectationTriple(
            e0=float(sums[i, 1] / denom[i]),
            e1=float(sums[i, 2] / denom[i]),
            e2=float(sums[i, 3] / denom[i]),
        )
        for i in range(n)
    ]


def update_mu0(data, triples, theta: StableParams) -> float:
    """Conditional maximizer of Q in the location, other parameters fixed.

    mu0 = [sum (y_i + lambda) E0_i - theta * sum E1_i] / sum E0_i, with the
    mixture coefficients evaluated at the current ``theta``.
    """
    _require_s0(theta)
    data = np.asarray(data, dtype=float)
    e0, e1, _ = _triple_arrays(triples)
    if data.size != e0.size:
        raise ValueError("triples must align with data")
    coefs = mixture_coefficients(theta)
    s0 = e0.sum()
    return float(((data + coefs.lam) * e0).sum() / s0 - coefs.theta * e1.sum() / s0)


def update_sigma(data, triples, theta: StableParams, mu0_new: float) -> float:
    """Conditional maximizer of Q in the scale at the freshly updated location.

    Stationarity in sigma reduces to G(sigma) = -n sigma^2 + b sigma + c = 0
    with

        b = [k_lam * sum r_i E0_i - k_theta * sum r_i E1_i] / (2 k_eta^2)
        c =  sum r_i^2 E0_i / (2 k_eta^2),      r_i = y_i - mu0_new,

    where k_eta, k_theta, k_lam are the unit-scale mixture coefficients of
    (alpha, beta).  c > 0 forces exactly one positive root,
    sigma = [b + sqrt(b^2 + 4 n c)] / (2 n).
    """
    _require_s0(theta)
    data = np.asarray(data, dtype=float)
    e0, e1, _ = _triple_arrays(triples)
    if data.size != e0.size:
        raise ValueError("triples must align with data")
    alpha, beta = theta.alpha, theta.beta
    ab = abs(beta)
    if ab >= 1.0:
        raise ValueError("sigma update undefined at |beta| = 1 (degenerate mixture)")
    k_eta2 = (1.0 - ab) ** (2.0 / alpha)
    k_theta = math.copysign(ab ** (1.0 / alpha), beta) if beta != 0.0 else 0.0
    k_lam = beta * math.tan(math.pi * alpha / 2.0) if beta != 0.0 else 0.0

    r = data - mu0_new
    n = data.size
    b = (k_lam * (r * e0).sum() - k_theta * (r * e1).sum()) / (2.0 * k_eta2)
    c = ((r * r) * e0).sum() / (2.0 * k_eta2)
    root = (b + math.sqrt(b * b + 4.0 * n * c)) / (2.0 * n)
    if root < SIGMA_FLOOR:
        logger.warning("sigma update hit the minimum-scale floor (all residuals ~ 0)")
        return SIGMA_FLOOR
    return float(root)


def _profile_loglik(y, lat_p, lat_v, alpha, beta, sigma, mu0) -> float:
    coefs = mixture_coefficients(StableParams(alpha, beta, sigma, mu0))
    dens = mixture_density(y, lat_p, lat_v, coefs.eta, coefs.theta, mu0 - coefs.lam)
    return float(np.log(np.maximum(dens, DENSITY_FLOOR)).sum())


def update_beta_profile(
    data, alpha: float, sigma: float, mu0: float, K: int, grid: int, rng: RngStream
) -> float:
    """Skewness maximizing the Monte Carlo profile log-likelihood on [-1, 1].

    One uniform grid of ``grid`` points is scanned and then refined once
    between the neighbors of the best point.  All candidates share one
    latent draw batch (the priors depend only on alpha), so the comparison
    is common-random-number smooth.
    """
    if grid < 3:
        raise ValueError("grid must be >= 3")
    probe = StableParams(alpha, 0.0, sigma, mu0)
    alpha_eff, _ = mixture_setup(probe)
    y = np.ascontiguousarray(data, dtype=float)
    gen = rng.generator()
    lat_p, lat_v = draw_latent_pairs(alpha_eff, K * K, gen)

    def scan(candidates: np.ndarray) -> tuple[int, np.ndarray]:
        vals = np.array(
            [
                _profile_loglik(y, lat_p, lat_v, alpha_eff, b, sigma, mu0)
                for b in candidates
            ]
        )
        return int(np.argmax(vals)), vals

    coarse = np.linspace(-1.0, 1.0, grid)
    k, _ = scan(coarse)
    lo = coarse[max(k - 1, 0)]
    hi = coarse[min(k + 1, grid - 1)]
    fine = np.linspace(lo, hi, grid)
    j, _ = scan(fine)
    return float(fine[j])


def transform_cm(data, theta: StableParams, rng: RngStream) -> np.ndarray:
    """Map data to the conditional N/W hierarchy used by the CM-step.

    Draws v_i ~ S1(alpha, 1, 1, 0) and e_i ~ Exp(1), forms
    y* = (y - theta*v - mu0 + lambda) / delta and returns y** = y*/sqrt(2e).
    When ``theta`` is the truth, y** is distributed as N / Weibull(alpha, 1).
    """
    _require_s0(theta)
    data = np.asarray(data, dtype=float)
    alpha_eff, coefs = mixture_setup(theta)
    gen = rng.generator()
    v = sample_unit_skew(alpha_eff, data.size, gen)
    e = gen.standard_exponential(data.size)
    y_star = (data - coefs.theta * v - theta.mu + coefs.lam) / coefs.delta
    return y_star / np.sqrt(2.0 * e)


def _sample_w_zero(alpha: float, gen: np.random.Generator, size: int) -> np.ndarray:
    # posterior at y** = 0 is proportional to w * f_W(w); rejection against
    # f_W with envelope w <= w_max where the target tail mass is < 1e-12
    w_max = 60.0 ** (1.0 / alpha)
    out = np.empty(size)
    remaining = np.arange(size)
    while remaining.size:
        w = gen.weibull(alpha, size=remaining.size)
        u = gen.uniform(size=remaining.size)
        ok = (w <= w_max) & (u < w / w_max)
        out[remaining[ok]] = w[ok]
        remaining = remaining[~ok]
    return out


def _sample_w_batch(y_ss: np.ndarray, alpha: float, gen: np.random.Generator) -> np.ndarray:
    """One posterior W draw per element of y** (vectorized rejection)."""
    y_ss = np.asarray(y_ss, dtype=float)
    out = np.empty(y_ss.size)
    zero = np.flatnonzero(y_ss == 0.0)
    if zero.size:
        out[zero] = _sample_w_zero(alpha, gen, zero.size)
    pending = np.flatnonzero(y_ss != 0.0)
    abs_y = np.abs(y_ss)
    batch = 1
    while pending.size:
        m = pending.size
        w = gen.weibull(alpha, size=(m, batch))
        u = gen.uniform(size=(m, batch))
        ay = abs_y[pending][:, None]
        # u*envelope < f(y**|w) with envelope exp(-1/2)/(sqrt(2 pi)|y**|)
        acc = u < ay * w * np.exp(0.5 - 0.5 * (ay * w) ** 2)
        hit = acc.any(axis=1)
        first = np.argmax(acc, axis=1)
        rows = np.flatnonzero(hit)
        out[pending[rows]] = w[rows, first[rows]]
        pending = pending[~hit]
        batch = min(batch * 2, 256)
    return out


def sample_w_posterior(y_ss: float, alpha: float, rng: RngStream) -> float:
    """One draw from the posterior of W given y** and alpha.

    Proposes w ~ Weibull(alpha, 1) and accepts with the exact envelope
    exp(-1/2)/(sqrt(2 pi)|y**|) of the conditional density; the y** = 0
    edge uses a dedicated length-biased branch.
    """
    if not 0.0 < alpha <= 2.0:
        raise ValueError("alpha must be in (0, 2]")
    gen = rng.generator()
    return float(_sample_w_batch(np.array([float(y_ss)]), alpha, gen)[0])


def maximize_lw(w, alpha_min: float = 0.1, alpha_max: float = 2.0) -> float:
    """Maximizer in (alpha_min, alpha_max] of the Weibull-shape likelihood.

    l(alpha) = C + n log alpha - sum w_i^alpha + alpha sum log w_i, whose
    derivative n/alpha + sum log w_i - sum w_i^alpha log w_i is strictly
    decreasing; the unique interior root is bracketed, otherwise the active
    boundary is returned.
    """
    from scipy.optimize import brentq

    w = np.asarray(w, dtype=float)
    if w.size == 0:
        raise ValueError("w must be nonempty")
    if np.any(w <= 0.0):
        raise ValueError("w must be positive")
    log_w = np.log(w)
    sum_log = log_w.sum()
    n = w.size

    def score(a: float) -> float:
        return n / a + sum_log - (np.exp(a * log_w) * log_w).sum()

    lo, hi = alpha_min, alpha_max
    s_lo, s_hi = score(lo), score(hi)
    if s_hi >= 0.0:
        if s_hi > 0.0:
            logger.debug("maximize_lw: score positive at %.3f, clamping", hi)
        return hi
    if s_lo <= 0.0:
        logger.debug("maximize_lw: score negative at %.5f, clamping", lo)
        return lo
    return float(brentq(score, lo, hi, xtol=1e-12, rtol=8.9e-16))


def cm_step_alpha(data, theta: StableParams, cfg: EMConfig, rng: RngStream) -> float:
    """Tail-index update: M SEM cycles, averaged after the M0 burn-in.

    Each cycle draws fresh (v, e), imputes W from its posterior, and
    maximizes the Weibull-shape likelihood; mixture coefficients and the
    Weibull proposal shape stay at ``theta.alpha`` throughout, as staged.
    """
    _require_s0(theta)
    vals = np.empty(cfg.M)
    for j in range(cfg.M):
        y_ss = transform_cm(data, theta, rng.child(j, 0))
        w = _sample_w_batch(y_ss, theta.alpha, rng.child(j, 1).generator())
        vals[j] = maximize_lw(w, cfg.alpha_min)
    alpha_new = float(vals[cfg.M0 :].mean())
    return min(max(alpha_new, cfg.alpha_min + 1e-9), 2.0)


def _clamp_init(init: StableParams, cfg: EMConfig) -> StableParams:
    # starting values must keep the mixture machinery nondegenerate
    alpha = min(max(init.alpha, cfg.alpha_min + 1e-6), 2.0)
    beta = min(max(init.beta, -0.9), 0.9)
    return replace(init, alpha=alpha, beta=beta)


def fit_em(data, init: StableParams | None = None, cfg: EMConfig = EMConfig()) -> FitResult:
    """Full four-phase fit; deterministic given ``cfg.seed``.

    Iterates E-step, mu0/sigma updates, in-loop beta profile, and the SEM
    CM-step for alpha.  Final alpha, sigma, mu0 are trace means over the
    post-burn-in window; final beta comes from one full-resolution profile
    pass at those averages.  When ``init`` is omitted the empirical
    characteristic function estimate provides the warm start.
    """
    data = np.ascontiguousarray(data, dtype=float)
    if data.size == 0:
        raise ValueError("data must be nonempty")
    if not np.isfinite(data).all():
        raise ValueError("data must be finite")
    if init is None:
        from .baselines import cf_estimate

        init = cf_estimate(data)
    _require_s0(init)
    init = _clamp_init(init, cfg)

    base = RngStream(cfg.seed)
    n_iter = cfg.N
    alphas = np.empty(n_iter + 1)
    betas = np.empty(n_iter + 1)
    sigmas = np.empty(n_iter + 1)
    mus = np.empty(n_iter + 1)
    alphas[0], betas[0], sigmas[0], mus[0] = init.as_tuple()

    inner_k = max(20, cfg.K // 2)
    theta = init
    for t in range(1, n_iter + 1):
        triples = None
        for attempt in range(3):
            try:
                triples = e_step_expectations(data, theta, cfg.K, base.child(t, 0, attempt))
                break
            except DegenerateWeightsError as err:
                logger.debug("E-step retry at iteration %d: %s", t, err)
        if triples is None:
            raise EMAbortError(
                f"E-step weights degenerate at iteration {t} after retries",
                _make_trace(alphas, betas, sigmas, mus, t - 1),
            )
        mu_new = update_mu0(data, triples, theta)
        sigma_new = update_sigma(data, triples, theta, mu_new)
        beta_new = update_beta_profile(
            data, theta.alpha, sigma_new, mu_new, inner_k, INNER_BETA_GRID, base.child(t, 1)
        )
        theta_mid = StableParams(theta.alpha, beta_new, sigma_new, mu_new)
        alpha_new = cm_step_alpha(data, theta_mid, cfg, base.child(t, 2))
        if not all(map(math.isfinite, (alpha_new, beta_new, sigma_new, mu_new))):
            raise EMAbortError(
                f"non-finite update at iteration {t}",
                _make_trace(alphas, betas, sigmas, mus, t - 1),
            )
        alphas[t], betas[t], sigmas[t], mus[t] = alpha_new, beta_new, sigma_new, mu_new
        theta = StableParams(alpha_new, beta_new, sigma_new, mu_new)

    sel = slice(cfg.N0 + 1, n_iter + 1)
    alpha_hat = float(alphas[sel].mean())
    sigma_hat = float(sigmas[sel].mean())
    mu_hat = float(mus[sel].mean())
    beta_hat = update_beta_profile(
        data, alpha_hat, sigma_hat, mu_hat, cfg.K, cfg.beta_grid, base.child(n_iter + 1, 1)
    )
    params = StableParams(alpha_hat, beta_hat, sigma_hat, mu_hat)
    loglik = observed_loglik(data, params, cfg.K, base.child(n_iter + 1, 2))
    ks = ks_statistic(data, params, cfg.cdf_sample_size, base.child(n_iter + 1, 3))
    trace = _make_trace(alphas, betas, sigmas, mus, n_iter)
    return FitResult(params=params, trace=trace, loglik=loglik, ks=ks, config=cfg)


def _make_trace(alphas, betas, sigmas, mus, last: int) -> EMTrace:
    stop = last + 1
    return EMTrace(
        alpha=alphas[:stop].copy(),
        beta=betas[:stop].copy(),
        sigma=sigmas[:stop].copy(),
        mu0=mus[:stop].copy(),
    )
