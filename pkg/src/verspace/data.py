"""Dataset ingestion (IDX image files), binary tasks, standardization, synthetics."""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DataError

# IDX dtype codes -> big-endian numpy dtypes
_IDX_DTYPES = {
    0x08: np.dtype(np.uint8),
    0x09: np.dtype(np.int8),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}
_IDX_CODES = {v: k for k, v in _IDX_DTYPES.items()}


@dataclass(frozen=True)
class Standardization:
    """Per-feature centering/scaling record (training statistics)."""

    mean: np.ndarray
    scale: np.ndarray


@dataclass(frozen=True)
class LabeledDataset:
    """Feature rows with +-1 labels and optional standardization state."""

    points: np.ndarray
    labels: np.ndarray
    standardization: Optional[Standardization] = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.float64)
        if points.ndim != 2:
            raise ValueError("points must be an n x d matrix")
        if labels.shape != (points.shape[0],):
            raise ValueError("labels must be one per point")
        if not np.isin(labels, (-1.0, 1.0)).all():
            raise ValueError("labels must be in {-1, +1}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _open_maybe_gzip(path, mode="rb"):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode)
    return open(path, mode)


def load_idx(path) -> np.ndarray:
    """Parse an IDX tensor file (gzip-compressed if the path ends in .gz).

    Layout: two zero bytes, a dtype code byte, a dimension-count byte,
    big-endian uint32 sizes, then the payload in big-endian order.
    """
    with _open_maybe_gzip(path) as f:
        header = f.read(4)
        if len(header) < 4:
            raise DataError(f"{path}: truncated IDX header")
        zeros, code, ndim = header[:2], header[2], header[3]
        if zeros != b"\x00\x00" or code not in _IDX_DTYPES:
            expected = "00 00 <dtype in {08,09,0B,0C,0D,0E}> <ndim>"
            raise DataError(
                f"{path}: bad IDX magic: expected {expected}, found {header.hex(' ')}"
            )
        dims_raw = f.read(4 * ndim)
        if len(dims_raw) < 4 * ndim:
            raise DataError(f"{path}: truncated IDX dimension header")
        dims = struct.unpack(f">{ndim}I", dims_raw)
        dtype = _IDX_DTYPES[code]
        count = int(np.prod(dims, dtype=np.int64)) if dims else 1
        payload = f.read(count * dtype.itemsize + 1)
        if len(payload) < count * dtype.itemsize:
            raise DataError(
                f"{path}: truncated IDX payload: expected {count * dtype.itemsize} bytes, "
                f"found {len(payload)}"
            )
        if len(payload) > count * dtype.itemsize:
            raise DataError(f"{path}: IDX payload longer than the declared shape {dims}")
        arr = np.frombuffer(payload, dtype=dtype).reshape(dims)
        return arr.astype(dtype.newbyteorder("="))


def save_idx(arr: np.ndarray, path) -> None:
    """Write a tensor in IDX form; inverse of ``load_idx`` for supported dtypes."""
    arr = np.asarray(arr)
    base = arr.dtype.newbyteorder(">") if arr.dtype.itemsize > 1 else arr.dtype
    if base not in _IDX_CODES:
        raise DataError(f"dtype {arr.dtype} has no IDX code")
    code = _IDX_CODES[base]
    with _open_maybe_gzip(path, "wb") as f:
        f.write(bytes([0, 0, code, arr.ndim]))
        f.write(struct.pack(f">{arr.ndim}I", *arr.shape))
        f.write(arr.astype(base).tobytes())


def make_binary_task(
    images: np.ndarray, labels: np.ndarray, class_pos: int, class_neg: int
) -> LabeledDataset:
    """Keep two classes, flatten images to vectors, map classes to +-1."""
    if class_pos == class_neg:
        raise DataError("the two classes must be distinct")
    labels = np.asarray(labels).reshape(-1)
    images = np.asarray(images)
    if images.shape[0] != labels.shape[0]:
        raise DataError("images and labels disagree on the number of examples")
    for c in (class_pos, class_neg):
        if not (labels == c).any():
            raise DataError(f"class {c} is absent from the label file")
    mask = (labels == class_pos) | (labels == class_neg)
    x = images[mask].reshape(int(mask.sum()), -1).astype(np.float64)
    y = np.where(labels[mask] == class_pos, 1.0, -1.0)
    return LabeledDataset(points=x, labels=y)


def standardize(data: LabeledDataset) -> LabeledDataset:
    """Center each feature and scale to unit variance (zero-variance: scale 1)."""
    if data.n < 2:
        raise ValueError("standardization needs at least 2 points")
    mean = data.points.mean(axis=0)
    std = data.points.std(axis=0)
    scale = np.where(std > 0.0, std, 1.0)
    pts = (data.points - mean) / scale
    return LabeledDataset(
        points=pts, labels=data.labels, standardization=Standardization(mean, scale)
    )


def apply_standardization(data: LabeledDataset, std: Standardization) -> LabeledDataset:
    """Apply recorded (training) statistics to held-out data."""
    pts = (data.points - std.mean) / std.scale
    return LabeledDataset(points=pts, labels=data.labels, standardization=std)


def subsample(data: LabeledDataset, n: int, rng: np.random.Generator) -> LabeledDataset:
    """n points drawn uniformly without replacement."""
    if n > data.n:
        raise DataError(f"requested {n} points but the dataset has {data.n}")
    idx = rng.choice(data.n, size=n, replace=False)
    return LabeledDataset(points=data.points[idx], labels=data.labels[idx])


def sample_gaussian_mixture(
    dim: int, snr: float, n: int, rng: np.random.Generator
) -> LabeledDataset:
    """Draws from the two-component mixture x ~ N(y * mu, I), y a fair coin.

    mu = (snr/sqrt(dim), ..., snr/sqrt(dim)) so that ||mu|| = snr exactly.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if snr <= 0:
        raise ValueError("snr must be positive")
    mu = mixture_mean(dim, snr)
    y = rng.integers(0, 2, size=n) * 2.0 - 1.0
    x = y[:, None] * mu + rng.standard_normal((n, dim))
    return LabeledDataset(points=x, labels=y)


def mixture_mean(dim: int, snr: float) -> np.ndarray:
    """The equal-coordinates mean vector with Euclidean norm ``snr``."""
    return np.full(dim, snr / np.sqrt(dim))
