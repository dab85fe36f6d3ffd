"""Rejection-free sampling from a standard Gaussian restricted to a cone.

The target is the distribution of weight vectors w ~ N(0, I) conditioned on
A @ w >= 0, where each row of A is a label-signed feature vector. Samples are
produced by elliptical slice sampling specialised to homogeneous linear
constraints: on the ellipse through the current state and a fresh Gaussian
direction, the feasible set of angles is a single arc that can be computed in
closed form, so every proposal is accepted.

The per-step inner loop runs on a compiled kernel when available and falls
back to a pure-python twin; both consume the caller's RNG stream identically.
Set ``VERSPACE_BACKEND=pure`` (or ``compiled``) to force a choice.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _ess_py
from .exceptions import ChainNumericalError, InfeasibleConstraintsError

try:  # compiled kernel is optional
    from . import _ess_cy
except ImportError:  # pragma: no cover - depends on build environment
    _ess_cy = None


def _select_backend():
    forced = os.environ.get("VERSPACE_BACKEND", "").strip().lower()
    if forced == "pure":
        return _ess_py, "pure"
    if forced == "compiled":
        if _ess_cy is None:
            raise ImportError("VERSPACE_BACKEND=compiled but the extension is not built")
        return _ess_cy, "compiled"
    if _ess_cy is not None:
        return _ess_cy, "compiled"
    return _ess_py, "pure"


_BACKEND, _BACKEND_NAME = _select_backend()

# Steps per kernel call. Part of the sampling scheme: RNG draws happen in
# blocks of this size, so changing it would change seeded trajectories.
_BLOCK = 256


def backend_name() -> str:
    """Name of the kernel executing chain steps ('compiled' or 'pure')."""
    return _BACKEND_NAME


@dataclass(frozen=True)
class ConstraintSet:
    """The n x N matrix of label-signed feature rows defining {w : A w >= 0}."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.ascontiguousarray(np.asarray(self.rows, dtype=np.float64))
        if rows.ndim != 2:
            raise ValueError(f"constraint rows must be 2-D, got shape {rows.shape}")
        if not np.isfinite(rows).all():
            raise ValueError("constraint rows contain non-finite entries")
        norms = np.linalg.norm(rows, axis=1)
        if (norms == 0.0).any():
            bad = int(np.flatnonzero(norms == 0.0)[0])
            raise ValueError(f"constraint row {bad} is all-zero")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_row_norms", norms)

    @property
    def n_constraints(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]

    @property
    def row_norms(self) -> np.ndarray:
        return self._row_norms

    def margins(self, w: np.ndarray) -> np.ndarray:
        """Constraint products A @ w."""
        return self.rows @ w

    def is_feasible(self, w: np.ndarray) -> bool:
        m = self.margins(w)
        return bool(m.size == 0 or m.min() >= 0.0)


@dataclass(frozen=True)
class ChainConfig:
    """Chain length and reproducibility knobs."""

    n_samples: int
    warmup: int = 1000
    thinning: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.warmup < 0:
            raise ValueError("warmup must be >= 0")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")


@dataclass
class WeightChain:
    """Ordered weight samples from the constrained Gaussian, with run metadata."""

    samples: np.ndarray
    config: ChainConfig
    diagnostics: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class AngularIntervalSet:
    """Disjoint feasible angle intervals on [0, 2*pi)."""

    intervals: tuple
    total_measure: float

    @classmethod
    def from_window(cls, lo: float, hi: float) -> "AngularIntervalSet":
        """Build from a single arc [lo, hi] with lo <= 0 <= hi, wrapping mod 2*pi."""
        width = hi - lo
        if width <= 0.0:
            raise ChainNumericalError("empty feasible arc: state left the constraint cone")
        if width >= _ess_py.TWO_PI:
            return cls(intervals=((0.0, _ess_py.TWO_PI),), total_measure=_ess_py.TWO_PI)
        lo_w = lo - np.floor(lo / _ess_py.TWO_PI) * _ess_py.TWO_PI
        hi_w = lo_w + width
        if hi_w <= _ess_py.TWO_PI:
            return cls(intervals=((lo_w, hi_w),), total_measure=width)
        return cls(
            intervals=((0.0, hi_w - _ess_py.TWO_PI), (lo_w, _ess_py.TWO_PI)),
            total_measure=width,
        )

    def contains(self, theta: float, tol: float = 0.0) -> bool:
        t = theta - np.floor(theta / _ess_py.TWO_PI) * _ess_py.TWO_PI
        return any(lo - tol <= t <= hi + tol for lo, hi in self.intervals)

    def sample(self, u: float) -> float:
        """Map u in [0, 1) to an angle, uniformly by arc length."""
        target = u * self.total_measure
        for lo, hi in self.intervals:
            length = hi - lo
            if target <= length:
                return lo + target
            target -= length
        lo, hi = self.intervals[-1]
        return hi


def feasible_arcs(
    state: np.ndarray, direction: np.ndarray, constraints: ConstraintSet
) -> AngularIntervalSet:
    """Feasible angles of the ellipse w(t) = state*cos(t) + direction*sin(t).

    Each constraint contributes the half circle centred on
    atan2(a_i . direction, a_i . state); the result is their intersection,
    which for a feasible state is one arc containing t = 0. Constraints that
    are numerically zero on the whole ellipse are skipped.
    """
    state = np.asarray(state, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    pa = constraints.margins(state)
    if pa.size and pa.min() < 0.0:
        raise ValueError("state is not feasible for the given constraints")
    pd = constraints.margins(direction)
    lo, hi = _ess_py.angle_window(pa, pd, constraints.row_norms)
    return AngularIntervalSet.from_window(lo, hi)


def elliptical_slice_step(
    state: np.ndarray, constraints: ConstraintSet, rng: np.random.Generator
) -> np.ndarray:
    """One rejection-free update of a feasible state; the result is feasible."""
    state = np.asarray(state, dtype=np.float64)
    pa = constraints.margins(state)
    if pa.size and pa.min() < 0.0:
        raise ValueError("state is not feasible for the given constraints")
    nu = rng.standard_normal(state.shape[0])
    u = float(rng.random())
    w_new, _, _ = _ess_py.ess_step(
        constraints.rows, constraints.row_norms, state, pa, nu, u
    )
    return w_new


def initial_feasible_point(
    constraints: ConstraintSet,
    rng: Optional[np.random.Generator] = None,
    max_updates: int = 10**6,
) -> np.ndarray:
    """A strictly feasible weight vector, found by perceptron updates.

    Updates w <- w + a_i on the most violated constraint until all products
    are strictly positive (rows are used at unit norm, which keeps the
    mistake bound scale-free). Guaranteed to terminate when the cone has
    nonempty interior; otherwise fails after ``max_updates``.
    """
    n, d = constraints.rows.shape
    if n == 0:
        if rng is None:
            rng = np.random.default_rng()
        return rng.standard_normal(d)
    unit_rows = constraints.rows / constraints.row_norms[:, None]
    w = np.zeros(d)
    for _ in range(max_updates):
        margins = unit_rows @ w
        i = int(margins.argmin())
        if margins[i] > 0.0:
            return w
        w = w + unit_rows[i]
    raise InfeasibleConstraintsError(
        f"no strictly feasible point after {max_updates} perceptron updates: "
        "constraint set is infeasible or not strictly separable"
    )


def _run_chain(
    constraints: ConstraintSet,
    w0: np.ndarray,
    config: ChainConfig,
    rng: np.random.Generator,
    kernel=None,
) -> WeightChain:
    kernel = _BACKEND if kernel is None else kernel
    A = constraints.rows
    n, N = A.shape
    total_steps = config.warmup + config.n_samples * config.thinning
    out = np.empty((config.n_samples, N), dtype=np.float64)
    w = np.array(w0, dtype=np.float64, copy=True)
    pa = A @ w
    if pa.size and pa.min() < 0.0:
        raise ValueError("initial state is not feasible")
    krec = 0
    n_proj = 0
    step = 0
    while step < total_steps:
        B = min(_BLOCK, total_steps - step)
        dirs = rng.standard_normal((B, N))
        us = rng.random(B)
        krec, proj = kernel.process_block(
            A, constraints.row_norms, w, pa, dirs, us,
            step, config.warmup, config.thinning, out, krec,
        )
        n_proj += proj
        step += B
    assert krec == config.n_samples
    return WeightChain(
        samples=out,
        config=config,
        diagnostics={
            "n_steps": total_steps,
            "n_projections": n_proj,
            "backend": "compiled" if kernel is _ess_cy else "pure",
        },
    )


def sample_version_space(
    constraints: ConstraintSet,
    config: ChainConfig,
    rng: Optional[np.random.Generator] = None,
) -> WeightChain:
    """Sample interpolating weight vectors w ~ N(0, I) | A w >= 0.

    Runs ``config.warmup`` steps, then stores every ``config.thinning``-th
    state until ``config.n_samples`` are kept. Every stored sample satisfies
    A @ w >= 0 as evaluated. Reproducible: ``rng`` defaults to a fresh
    generator seeded with ``config.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    w0 = initial_feasible_point(constraints, rng)
    return _run_chain(constraints, w0, config, rng)
