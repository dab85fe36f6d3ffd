import numpy as np
import pytest

import verspace as vs


def make_blobs(n, seed, dim=64, lo=90.0, hi=160.0, noise=25.0):
    """Two linearly separable pixel blobs rendered as uint8 images."""
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n)
    base = np.where(y[:, None] == 1, hi, lo)
    side = int(np.sqrt(dim))
    imgs = np.clip(base + rng.normal(0.0, noise, (n, dim)), 0, 255).astype(np.uint8)
    return imgs.reshape(n, side, side), y.astype(np.uint8)


def separable_constraints(n, dim, seed):
    """A constraint cone with nonempty interior, from teacher-labeled Gaussians."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, dim))
    w_true = rng.standard_normal(dim)
    labels = np.sign(X @ w_true)
    labels[labels == 0] = 1.0
    return vs.ConstraintSet(rows=labels[:, None] * X)


@pytest.fixture(scope="session")
def blob_idx_dir(tmp_path_factory):
    """Synthetic IDX train/test files for the image pipeline."""
    d = tmp_path_factory.mktemp("idx")
    ti, tl = make_blobs(2000, seed=1)
    si, sl = make_blobs(1500, seed=2)
    vs.save_idx(ti, d / "train-images.idx3-ubyte")
    vs.save_idx(tl, d / "train-labels.idx1-ubyte.gz")
    vs.save_idx(si, d / "test-images.idx3-ubyte")
    vs.save_idx(sl, d / "test-labels.idx1-ubyte")
    return d
