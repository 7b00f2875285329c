"""Closed-form comparison estimators: sample quantile and empirical chf.

Both return S0 parameters and exist to benchmark the EM estimator.  The
quantile method interpolates the classical lookup tables shipped with the
package; the characteristic-function method runs the standard two-stage
regression (tail/scale from log(-log|phi|), skew/location from the phase)
on data standardized by the quantile estimates, over the fixed frequency
grid 0.1, 0.2, ..., 1.0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .params import ALPHA_ONE_TOL, StableParams

__all__ = [
    "QuantileTableSet",
    "TableClampWarning",
    "load_default_tables",
    "sq_estimate",
    "cf_estimate",
]

_MIN_POINTS = 10
_CF_GRID = np.arange(1, 11) / 10.0


class TableClampWarning(UserWarning):
    """An interpolation input fell outside the table and was clamped."""


def _bilinear(xg: np.ndarray, yg: np.ndarray, table: np.ndarray, x: float, y: float) -> float:
    # clamped bilinear lookup; table[i, j] sits at (xg[i], yg[j])
    x = min(max(x, xg[0]), xg[-1])
    y = min(max(y, yg[0]), yg[-1])
    i = min(int(np.searchsorted(xg, x, side="right")) - 1, len(xg) - 2)
    j = min(int(np.searchsorted(yg, y, side="right")) - 1, len(yg) - 2)
    tx = (x - xg[i]) / (xg[i + 1] - xg[i])
    ty = (y - yg[j]) / (yg[j + 1] - yg[j])
    return float(
        table[i, j] * (1 - tx) * (1 - ty)
        + table[i + 1, j] * tx * (1 - ty)
        + table[i, j + 1] * (1 - tx) * ty
        + table[i + 1, j + 1] * tx * ty
    )


@dataclass(frozen=True)
class QuantileTableSet:
    """Interpolation grids of the quantile estimator (see the data file)."""

    nu_alpha_grid: np.ndarray
    nu_beta_grid: np.ndarray
    alpha_table: np.ndarray
    beta_table: np.ndarray
    alpha_grid: np.ndarray
    beta_grid: np.ndarray
    nu_c_table: np.ndarray
    nu_zeta_table: np.ndarray

    def __post_init__(self):
        for grid in (self.nu_alpha_grid, self.nu_beta_grid, self.alpha_grid, self.beta_grid):
            if np.any(np.diff(grid) <= 0):
                raise ValueError("table grids must be strictly increasing")

    def _warn_clamp(self, name: str, value: float, lo: float, hi: float):
        if value < lo or value > hi:
            warnings.warn(
                f"{name}={value:.4g} outside table range [{lo:.4g}, {hi:.4g}]; clamped",
                TableClampWarning,
                stacklevel=3,
            )

    def alpha_lookup(self, nu_alpha: float, nu_beta: float) -> float:
        self._warn_clamp("nu_alpha", nu_alpha, self.nu_alpha_grid[0], self.nu_alpha_grid[-1])
        a = _bilinear(self.nu_alpha_grid, self.nu_beta_grid, self.alpha_table, nu_alpha, abs(nu_beta))
        return min(max(a, self.alpha_grid[0]), 2.0)

    def beta_lookup(self, nu_alpha: float, nu_beta: float) -> float:
        b = _bilinear(self.nu_alpha_grid, self.nu_beta_grid, self.beta_table, nu_alpha, abs(nu_beta))
        return math.copysign(min(b, 1.0), nu_beta) if nu_beta != 0.0 else 0.0

    def nu_c_lookup(self, alpha: float, beta: float) -> float:
        self._warn_clamp("alpha", alpha, self.alpha_grid[0], self.alpha_grid[-1])
        return _bilinear(self.alpha_grid, self.beta_grid, self.nu_c_table, alpha, abs(beta))

    def nu_zeta_lookup(self, alpha: float, beta: float) -> float:
        # odd in beta: the tabulated values (beta >= 0) flip sign, not magnitude
        z = _bilinear(self.alpha_grid, self.beta_grid, self.nu_zeta_table, alpha, abs(beta))
        return z if beta >= 0.0 else -z


def _parse_tables(text: str) -> dict[str, np.ndarray]:
    sections: dict[str, list[list[float]]] = {}
    current: list[list[float]] | None = None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@"):
            current = sections.setdefault(line[1:], [])
            continue
        if current is None:
            raise ValueError("table data before any @section header")
        current.append([float(tok) for tok in line.split()])
    return {name: np.array(rows).squeeze() for name, rows in sections.items()}


def load_default_tables() -> QuantileTableSet:
    """Parse the packaged plain-text table file."""
    text = resources.files("stablefit").joinpath("data/quantile_tables.txt").read_text()
    s = _parse_tables(text)
    return QuantileTableSet(
        nu_alpha_grid=s["nu_alpha_grid"],
        nu_beta_grid=s["nu_beta_grid"],
        alpha_table=s["alpha_table"],
        beta_table=s["beta_table"],
        alpha_grid=s["alpha_grid"],
        beta_grid=s["beta_grid"],
        nu_c_table=s["nu_c_table"],
        nu_zeta_table=s["nu_zeta_table"],
    )


_TABLES: QuantileTableSet | None = None


def _tables() -> QuantileTableSet:
    global _TABLES
    if _TABLES is None:
        _TABLES = load_default_tables()
    return _TABLES


def sq_estimate(data) -> StableParams:
    """Five-quantile estimate of all four S0 parameters.

    Quantile ratios are shift and scale invariant, so alpha and beta come
    from table lookups; the interquartile range then calibrates sigma and a
    skew-corrected median gives mu0.  Inputs beyond the tables clamp with a
    warning; below the smallest tabulated tail ratio the Gaussian limit
    (alpha=2, beta=0) is returned.
    """
    data = np.asarray(data, dtype=float)
    if data.size < _MIN_POINTS:
        raise ValueError(f"need at least {_MIN_POINTS} data points, got {data.size}")
    p05, p25, p50, p75, p95 = np.percentile(data, [5, 25, 50, 75, 95])
    iqr = p75 - p25
    span = p95 - p05
    if iqr <= 0.0 or span <= 0.0:
        raise ValueError("degenerate sample: quantile spread is zero")
    tab = _tables()
    nu_alpha = span / iqr
    nu_beta = (p95 + p05 - 2.0 * p50) / span
    if nu_alpha < tab.nu_alpha_grid[0]:
        alpha, beta = 2.0, 0.0
    else:
        alpha = tab.alpha_lookup(nu_alpha, nu_beta)
        beta = tab.beta_lookup(nu_alpha, nu_beta)
    sigma = iqr / tab.nu_c_lookup(alpha, beta)
    mu0 = p50 + sigma * tab.nu_zeta_lookup(alpha, beta)
    return StableParams(alpha, beta, sigma, mu0)


def _ecf(z: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.exp(1j * t[:, None] * z[None, :]).mean(axis=1)


def cf_estimate(data) -> StableParams:
    """Two-stage empirical characteristic function estimate (S0).

    Data are standardized by the quantile estimates so the fixed frequency
    grid matches the scale of the sample; the final sigma and mu0 are mapped
    back through the same affine transform, which makes the estimator
    exactly scale and shift equivariant.
    """
    data = np.asarray(data, dtype=float)
    if data.size < _MIN_POINTS:
        raise ValueError(f"need at least {_MIN_POINTS} data points, got {data.size}")
    start = sq_estimate(data)
    z = (data - start.mu) / start.sigma

    t = _CF_GRID
    phi = _ecf(z, t)
    mod = np.clip(np.abs(phi), 1e-12, 1.0 - 1e-12)
    yy = np.log(-np.log(mod))
    xx = np.log(t)
    slope, intercept = np.polyfit(xx, yy, 1)
    alpha = float(min(max(slope, 0.1), 2.0))
    sigma_z = float(np.exp(intercept / alpha))

    phase = np.angle(phi)
    if abs(alpha - 1.0) < ALPHA_ONE_TOL:
        wk = -(2.0 / math.pi) * sigma_z * t * np.log(sigma_z * t)
    else:
        wk = math.tan(math.pi * alpha / 2.0) * ((sigma_z * t) ** alpha - sigma_z * t)
    design = np.column_stack([t, wk])
    (mu_z, beta), *_ = np.linalg.lstsq(design, phase, rcond=None)
    beta = float(min(max(beta, -1.0), 1.0))

    sigma = sigma_z * start.sigma
    mu0 = float(mu_z) * start.sigma + start.mu
    return StableParams(alpha, beta, sigma, mu0)
