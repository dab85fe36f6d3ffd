"""Feature maps and assembly of version-space constraints from labeled data."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .data import LabeledDataset
from .sampler import ConstraintSet


def sample_sphere_rows(n_rows: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Rows drawn uniformly from the unit sphere in ``dim`` dimensions.

    Each row is a Gaussian draw normalised to unit Euclidean norm;
    reproducible given the generator's seed.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rows = rng.standard_normal((n_rows, dim))
    norms = np.linalg.norm(rows, axis=1)
    while (norms < 1e-12).any():  # essentially unreachable; keeps rows well-defined
        bad = norms < 1e-12
        rows[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(rows, axis=1)
    return rows / norms[:, None]


@dataclass(frozen=True)
class FeatureMap:
    """Either the identity map or frozen random ReLU features max(U x, 0)."""

    kind: str
    output_dim: int
    projection: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("linear", "random_relu"):
            raise ValueError(f"unknown feature map kind: {self.kind!r}")
        if self.kind == "linear":
            if self.projection is not None:
                raise ValueError("linear map takes no projection matrix")
        else:
            U = np.asarray(self.projection, dtype=np.float64)
            if U.ndim != 2 or U.shape[0] != self.output_dim:
                raise ValueError("projection must be an output_dim x input_dim matrix")
            norms = np.linalg.norm(U, axis=1)
            if not np.allclose(norms, 1.0, atol=1e-10):
                raise ValueError("projection rows must have unit norm")
            U = np.ascontiguousarray(U)
            U.setflags(write=False)
            object.__setattr__(self, "projection", U)

    @classmethod
    def linear(cls, dim: int) -> "FeatureMap":
        return cls(kind="linear", output_dim=dim)

    @classmethod
    def random_relu(cls, input_dim: int, n_features: int, rng: np.random.Generator) -> "FeatureMap":
        U = sample_sphere_rows(n_features, input_dim, rng)
        return cls(kind="random_relu", output_dim=n_features, projection=U)

    @property
    def input_dim(self) -> Optional[int]:
        return None if self.kind == "linear" else self.projection.shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Map a vector or a matrix of row vectors into feature space."""
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "linear":
            return x
        return random_relu_map(x, self)


def linear_map(x: np.ndarray) -> np.ndarray:
    """Identity feature map."""
    return np.asarray(x, dtype=np.float64)


def random_relu_map(x: np.ndarray, fmap: FeatureMap) -> np.ndarray:
    """Elementwise max(U x, 0) for a vector x, or row-wise for a matrix."""
    if fmap.kind != "random_relu":
        raise ValueError("feature map is not of kind random_relu")
    x = np.asarray(x, dtype=np.float64)
    d = fmap.projection.shape[1]
    if x.shape[-1] != d:
        raise ValueError(f"input dimension {x.shape[-1]} does not match projection ({d})")
    return np.maximum(x @ fmap.projection.T, 0.0)


def build_constraints(data: LabeledDataset, fmap: FeatureMap) -> ConstraintSet:
    """Constraint rows y_i * phi(x_i); w interpolates the data iff A w >= 0."""
    feats = fmap.apply(data.points)
    rows = data.labels[:, None] * feats
    zero = np.flatnonzero(np.linalg.norm(rows, axis=1) == 0.0)
    if zero.size:
        raise ValueError(
            f"point {int(zero[0])} maps to the zero feature vector; its constraint is vacuous"
        )
    return ConstraintSet(rows=rows)
