"""Theory of test-error distributions for equicorrelated data.

For unit-norm, label-signed feature vectors whose pairwise inner products all
equal rho, the constraint margins share one Gaussian factor:
zeta_i = sqrt(1-rho) Z_i + sqrt(rho) Z. Writing a = sqrt(rho / (1-rho)),
the version-space mass is the equicorrelated orthant probability
E[Phi(a Z)^n], the population error of a conditioned weight vector is
1 - Phi(a Z), and in the large-n limit the error CDF is the Gamma CDF
P(U <= n*eps) with U ~ Gamma((1-rho)/rho, 1). This module evaluates those
objects three independent ways (quadrature, closed asymptotics, weighted
Monte Carlo) so each can serve as an oracle for the others.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammainc, gammaln, log_ndtr, ndtr, ndtri

from .exceptions import NumericalUnderflowError
from .estimator import ErrorCdf

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_Z_CUT = 12.0  # integrand mass beyond |z| = 12 is far below any tolerance used


@dataclass(frozen=True)
class EquicorrModel:
    """Training count n and pairwise correlation rho of the equicorrelated model."""

    n: int
    rho: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie strictly between 0 and 1")

    @property
    def a(self) -> float:
        """The shared-factor loading sqrt(rho / (1 - rho))."""
        return float(np.sqrt(self.rho / (1.0 - self.rho)))

    @property
    def gamma_shape(self) -> float:
        """(1 - rho) / rho, the limit Gamma shape; equals 1/a**2."""
        return (1.0 - self.rho) / self.rho


def std_normal_cdf(x) -> float:
    """Phi(x) to full double accuracy."""
    return ndtr(x) if np.ndim(x) else float(ndtr(x))


def std_normal_quantile(p) -> float:
    """Phi^-1(p) for p strictly inside (0, 1)."""
    p_arr = np.asarray(p, dtype=np.float64)
    if ((p_arr <= 0.0) | (p_arr >= 1.0)).any():
        raise ValueError("quantile requires p in (0, 1)")
    return ndtri(p) if np.ndim(p) else float(ndtri(p))


def _log_integrand(z: np.ndarray, n: int, a: float) -> np.ndarray:
    # log of Phi(a z)^n * phi(z), without the 1/sqrt(2 pi) factor
    return n * log_ndtr(a * z) - 0.5 * z * z


def orthant_quadrature(model: EquicorrModel) -> float:
    """P(all of n equicorrelated standard normals >= 0), by adaptive quadrature.

    Evaluates E[Phi(a Z)^n] in log space, shifted by the integrand's peak so
    the quadrature stays well-scaled for any n. Serves as the exact oracle
    for the asymptotic formulas.
    """
    if model.n < 1:
        raise ValueError("orthant probability needs n >= 1")
    n, a = model.n, model.a

    def d_log_integrand(z):
        # n * a * phi(az)/Phi(az) - z
        t = a * z
        return n * a * np.exp(-0.5 * t * t - _LOG_SQRT_2PI - log_ndtr(t)) - z

    if d_log_integrand(_Z_CUT) >= 0.0:  # peak beyond the cut: out of supported range
        z_star = _Z_CUT
    else:
        z_star = brentq(d_log_integrand, 0.0, _Z_CUT, xtol=1e-10)
    g_star = _log_integrand(np.array(z_star), n, a)

    def f(z):
        return np.exp(_log_integrand(z, n, a) - g_star)

    val, _ = quad(f, -_Z_CUT, _Z_CUT, points=[z_star], limit=200, epsabs=1e-300, epsrel=1e-12)
    return float(np.exp(g_star - _LOG_SQRT_2PI) * val)


def orthant_asymptotic(model: EquicorrModel) -> float:
    """Closed-form large-n approximation of the equicorrelated orthant probability.

    sqrt(s) * Gamma(s) * (4 pi log n)^((s-1)/2) * n^-s with s = (1-rho)/rho,
    evaluated in log space. Valid as n*rho grows.
    """
    if model.n < 2:
        raise ValueError("the asymptotic formula needs n >= 2")
    s = model.gamma_shape
    log_val = (
        0.5 * np.log(s)
        + gammaln(s)
        + 0.5 * (s - 1.0) * np.log(4.0 * np.pi * np.log(model.n))
        - s * np.log(model.n)
    )
    return float(np.exp(log_val))


def next_point_correct_asymptotic(model: EquicorrModel) -> float:
    """Large-n probability 1 - (1-rho)/(n rho) that a fresh equicorrelated
    point is labeled correctly by a version-space draw."""
    return 1.0 - model.gamma_shape / model.n


def limit_cdf(model: EquicorrModel, eps: float) -> float:
    """Limiting error CDF P(U <= n * eps) with U ~ Gamma((1-rho)/rho, 1)."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    return float(gammainc(model.gamma_shape, model.n * eps))


def critical_value(model: EquicorrModel) -> float:
    """The concentration point (1-rho)/(n rho) of the limiting error law."""
    return model.gamma_shape / model.n


def exact_cdf_half_correlation(n: int, eps) -> np.ndarray:
    """Exact finite-n error CDF at rho = 1/2: 1 - (1 - eps)^(n+1) on [0, 1]."""
    eps = np.clip(np.asarray(eps, dtype=np.float64), 0.0, 1.0)
    return 1.0 - (1.0 - eps) ** (n + 1)


def simulate_equicorr_rn(
    model: EquicorrModel,
    n_draws: int,
    grid: np.ndarray,
    rng: np.random.Generator,
) -> ErrorCdf:
    """Monte Carlo oracle for ``limit_cdf`` via the shared-factor representation.

    Draws the shared factor Z, weights each draw by the version-space
    probability Phi(a Z)^n (in log space), scores it with the population
    error 1 - Phi(a Z), and returns the weight-normalized error CDF.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    z = rng.standard_normal(n_draws)
    log_w = model.n * log_ndtr(model.a * z)
    errors = ndtr(-model.a * z)
    m = float(log_w.max())
    if not np.isfinite(m):
        raise NumericalUnderflowError(
            "all version-space weights underflowed; use more draws or a smaller n"
        )
    weights = np.exp(log_w - m)
    total = float(weights.sum())
    if total == 0.0:
        raise NumericalUnderflowError(
            "all version-space weights underflowed; use more draws or a smaller n"
        )
    order = np.argsort(errors)
    cum = np.cumsum(weights[order]) / total
    idx = np.searchsorted(errors[order], grid, side="right")
    cdf = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
    cdf = np.minimum(cdf, 1.0)  # guard rounding at the top of the cumulative sum
    return ErrorCdf(grid=np.asarray(grid, dtype=np.float64), cdf=cdf, n_models=n_draws)


def equicorr_feature_rows(n: int, rho: float, n_extra: int = 0) -> np.ndarray:
    """Unit-norm feature rows realizing the equicorrelated Gram structure.

    Row i is sqrt(1-rho) e_{i+1} + sqrt(rho) e_0 in dimension
    n + n_extra + 1, so every pairwise inner product equals rho exactly and
    coordinate 0 carries the shared factor.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie strictly between 0 and 1")
    total = n + n_extra
    dim = total + 1
    rows = np.zeros((total, dim))
    rows[:, 0] = np.sqrt(rho)
    rows[np.arange(total), np.arange(1, total + 1)] = np.sqrt(1.0 - rho)
    return rows


def equicorr_population_errors(samples: np.ndarray, rho: float) -> np.ndarray:
    """Population error of sampled weights under the equicorrelated test law.

    A fresh test point loads sqrt(rho) on the shared coordinate 0 and
    sqrt(1-rho) on a new independent coordinate, so the error of w is
    Phi(-a * w[0]) exactly.
    """
    a = float(np.sqrt(rho / (1.0 - rho)))
    return ndtr(-a * np.asarray(samples, dtype=np.float64)[:, 0])


def theory_table(
    n_values, rho_values, include_asymptotic_min_n: int = 2
) -> list[dict]:
    """Rows comparing quadrature and asymptotic orthant values per (n, rho)."""
    rows = []
    for rho in rho_values:
        for n in n_values:
            model = EquicorrModel(n=int(n), rho=float(rho))
            q = orthant_quadrature(model)
            if model.n >= include_asymptotic_min_n:
                asym = orthant_asymptotic(model)
                ratio = asym / q
            else:
                asym = float("nan")
                ratio = float("nan")
            rows.append(
                {"n": model.n, "rho": model.rho, "quadrature": q, "asymptotic": asym, "ratio": ratio}
            )
    return rows
