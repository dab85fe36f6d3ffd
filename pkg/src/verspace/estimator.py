"""Test-error evaluation, error-CDF estimation, Bayes bound, worst-case construction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import ndtr

from .data import LabeledDataset
from .features import FeatureMap

DEFAULT_GRID_POINTS = 512


def default_grid(n_points: int = DEFAULT_GRID_POINTS, eps_max: float = 1.0) -> np.ndarray:
    """Uniform error grid on [0, eps_max]."""
    return np.linspace(0.0, eps_max, n_points)


@dataclass(frozen=True)
class ErrorCdf:
    """Estimated CDF of test errors over interpolating classifiers.

    ``n_models`` is the number of sampled classifiers behind the estimate and
    ``n_test`` the test-set size (0 for the population-error variant).
    """

    grid: np.ndarray
    cdf: np.ndarray
    n_models: int
    n_test: int = 0

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=np.float64)
        cdf = np.asarray(self.cdf, dtype=np.float64)
        if grid.ndim != 1 or grid.shape != cdf.shape:
            raise ValueError("grid and cdf must be 1-D arrays of equal length")
        if grid.size and (np.diff(grid) <= 0).any():
            raise ValueError("grid must be strictly increasing")
        if cdf.size and ((cdf < 0).any() or (cdf > 1).any()):
            raise ValueError("cdf values must lie in [0, 1]")
        if cdf.size and (np.diff(cdf) < 0).any():
            raise ValueError("cdf must be nondecreasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "cdf", cdf)

    def value_at(self, eps: float) -> float:
        """CDF at eps via step interpolation (last grid point <= eps)."""
        i = int(np.searchsorted(self.grid, eps, side="right")) - 1
        return float(self.cdf[i]) if i >= 0 else 0.0

    def quantile(self, q: float) -> float:
        """Smallest grid eps with cdf >= q."""
        i = int(np.searchsorted(self.cdf, q, side="left"))
        return float(self.grid[min(i, self.grid.size - 1)])

    def to_csv(self, path) -> None:
        write_cdf_csv(self, path)


def write_cdf_csv(cdf: ErrorCdf, path) -> None:
    """Serialize as ``epsilon,cdf`` rows (UTF-8, LF)."""
    lines = ["epsilon,cdf"]
    lines += [f"{float(e)!r},{float(c)!r}" for e, c in zip(cdf.grid, cdf.cdf)]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def write_errors_csv(errors: np.ndarray, path) -> None:
    """Serialize raw per-sample errors as ``sample_index,error`` rows."""
    lines = ["sample_index,error"]
    lines += [f"{i},{float(e)!r}" for i, e in enumerate(np.asarray(errors, dtype=np.float64))]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Mean and covariance of the label-signed class distribution y*x ~ N(mu, sigma)."""

    mu: np.ndarray
    sigma: Optional[np.ndarray] = None  # None means the identity

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        if mu.ndim != 1:
            raise ValueError("mu must be a vector")
        object.__setattr__(self, "mu", mu)
        if self.sigma is not None:
            sigma = np.asarray(self.sigma, dtype=np.float64)
            if sigma.shape != (mu.size, mu.size):
                raise ValueError("sigma must be d x d")
            np.linalg.cholesky(sigma)  # raises if not positive definite
            object.__setattr__(self, "sigma", sigma)

    @property
    def snr(self) -> float:
        """sqrt(mu' sigma^-1 mu); equals ||mu|| for identity covariance."""
        if self.sigma is None:
            return float(np.linalg.norm(self.mu))
        sol = cho_solve(cho_factor(self.sigma), self.mu)
        return float(np.sqrt(self.mu @ sol))


def empirical_error(w: np.ndarray, test: LabeledDataset, fmap: FeatureMap) -> float:
    """Fraction of test points with y * w.phi(x) < 0 (zero margins count correct)."""
    if test.n == 0:
        raise ValueError("empty test set")
    scores = fmap.apply(test.points) @ np.asarray(w, dtype=np.float64)
    return float(np.mean(test.labels * scores < 0.0))


def chain_errors(
    samples: np.ndarray, test: LabeledDataset, fmap: FeatureMap, block: int = 512
) -> np.ndarray:
    """Empirical test error of every sampled weight vector."""
    if test.n == 0:
        raise ValueError("empty test set")
    feats = fmap.apply(test.points)
    y = test.labels[:, None]
    out = np.empty(samples.shape[0])
    for start in range(0, samples.shape[0], block):
        stop = min(start + block, samples.shape[0])
        scores = feats @ samples[start:stop].T
        out[start:stop] = np.mean(y * scores < 0.0, axis=0)
    return out


def population_error_gaussian(w: np.ndarray, spec: GaussianMixtureSpec) -> float:
    """Exact error Phi(-w.mu / sqrt(w' sigma w)) under the mixture model."""
    w = np.asarray(w, dtype=np.float64)
    denom = np.linalg.norm(w) if spec.sigma is None else np.sqrt(w @ spec.sigma @ w)
    if denom == 0.0:
        raise ValueError("weight vector must be nonzero")
    return float(ndtr(-(w @ spec.mu) / denom))


def population_errors_gaussian(samples: np.ndarray, spec: GaussianMixtureSpec) -> np.ndarray:
    """Vectorized ``population_error_gaussian`` over sample rows."""
    W = np.asarray(samples, dtype=np.float64)
    num = W @ spec.mu
    if spec.sigma is None:
        denom = np.linalg.norm(W, axis=1)
    else:
        denom = np.sqrt(np.einsum("ij,jk,ik->i", W, spec.sigma, W))
    if (denom == 0.0).any():
        raise ValueError("weight vectors must be nonzero")
    return ndtr(-num / denom)


def bayes_lower_bound(spec: GaussianMixtureSpec) -> float:
    """Phi(-snr): the Bayes-optimal error, a floor for every classifier."""
    return float(ndtr(-spec.snr))


def error_cdf(errors: np.ndarray, grid: Optional[np.ndarray] = None, n_test: int = 0) -> ErrorCdf:
    """Empirical CDF of per-model errors evaluated on an error grid."""
    errors = np.asarray(errors, dtype=np.float64)
    if errors.size == 0:
        raise ValueError("empty error list")
    if grid is None:
        grid = default_grid()
    s = np.sort(errors)
    counts = np.searchsorted(s, grid, side="right")
    return ErrorCdf(grid=grid, cdf=counts / errors.size, n_models=errors.size, n_test=n_test)


def error_quantiles(errors: np.ndarray, qs) -> np.ndarray:
    """Exact empirical quantiles of the per-model errors."""
    return np.quantile(np.asarray(errors, dtype=np.float64), qs)


@dataclass
class WorstCaseInfo:
    """Diagnostics of the worst-case interpolator fit."""

    train_accuracy: float
    bad_accuracy: float
    iterations: int
    converged: bool
    warning: bool
    n_bad: int


def _operator_norm(X: np.ndarray, n_iter: int = 50) -> float:
    """Largest singular value, by power iteration on X'X."""
    v = np.full(X.shape[1], 1.0 / np.sqrt(X.shape[1]))
    for _ in range(n_iter):
        v = X.T @ (X @ v)
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            return 0.0
        v /= nrm
    return float(np.sqrt(np.linalg.norm(X.T @ (X @ v))))


def make_bad_points(train: LabeledDataset, n_bad: int, rng: np.random.Generator) -> np.ndarray:
    """Adversarial points: random nonnegative combinations of the label-flipped
    training points, rescaled to the average training-point norm."""
    flipped = -train.labels[:, None] * train.points
    coeffs = rng.random((n_bad, train.n))
    raw = coeffs @ flipped
    norms = np.linalg.norm(raw, axis=1)
    norms = np.where(norms > 0.0, norms, 1.0)
    target = float(np.mean(np.linalg.norm(train.points, axis=1)))
    return raw * (target / norms)[:, None]


def logistic_gd(
    X: np.ndarray,
    y: np.ndarray,
    rng: np.random.Generator,
    lr_scale: float = 0.1,
    max_iter: int = 100_000,
) -> tuple[np.ndarray, int, bool]:
    """Full-batch gradient descent on the logistic loss.

    Stops as soon as every margin y_i * x_i.w is positive (the fit
    interpolates), or at the iteration cap. Returns (w, iterations, converged).
    """
    n = X.shape[0]
    opnorm = _operator_norm(X)
    lr = lr_scale / opnorm if opnorm > 0 else lr_scale
    # tiny random start breaks symmetric stalls at w = 0
    w = 1e-3 * rng.standard_normal(X.shape[1]) / np.sqrt(X.shape[1])
    for it in range(1, max_iter + 1):
        margins = y * (X @ w)
        if (margins > 0.0).all():
            return w, it - 1, True
        # d/dw mean(log(1 + exp(-m))) = -X' (y * sigmoid(-m)) / n
        sig = 1.0 / (1.0 + np.exp(np.minimum(margins, 500.0)))
        w = w + lr * (X.T @ (y * sig)) / n
    return w, max_iter, False


def worst_case_classifier(
    train: LabeledDataset,
    rng: np.random.Generator,
    n_bad: Optional[int] = None,
    lr_scale: float = 0.1,
    max_iter: int = 100_000,
) -> tuple[np.ndarray, WorstCaseInfo]:
    """An interpolator of ``train`` steered toward maximal test error.

    Appends ``n_bad`` (default (d-1) - n) adversarial points labeled +1 lying
    in the span of the label-flipped training points, then fits the union by
    logistic-loss gradient descent. Failing to reach 99% training accuracy on
    the original points within the iteration cap sets a warning flag rather
    than raising.
    """
    n, d = train.points.shape
    if n_bad is None:
        if n >= d:
            raise ValueError("need n < d to append adversarial points")
        n_bad = (d - 1) - n
    if n_bad < 0:
        raise ValueError("n_bad must be >= 0")
    if n_bad > 0:
        bad = make_bad_points(train, n_bad, rng)
        X = np.vstack([train.points, bad])
        y = np.concatenate([train.labels, np.ones(n_bad)])
    else:
        X, y = train.points, train.labels
    w, iterations, converged = logistic_gd(X, y, rng, lr_scale=lr_scale, max_iter=max_iter)
    train_margins = train.labels * (train.points @ w)
    train_acc = float(np.mean(train_margins > 0.0))
    if n_bad > 0:
        bad_acc = float(np.mean(X[n:] @ w > 0.0))
    else:
        bad_acc = 1.0
    info = WorstCaseInfo(
        train_accuracy=train_acc,
        bad_accuracy=bad_acc,
        iterations=iterations,
        converged=converged,
        warning=train_acc < 0.99,
        n_bad=n_bad,
    )
    return w, info
