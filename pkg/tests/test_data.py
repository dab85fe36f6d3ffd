import gzip

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

import verspace as vs
from verspace.exceptions import DataError


# ---------------------------------------------------------------------------
# IDX parsing


def test_load_idx_label_vector(tmp_path):
    p = tmp_path / "labels.idx"
    p.write_bytes(bytes([0, 0, 8, 1]) + (2).to_bytes(4, "big") + bytes([0, 1]))
    arr = vs.load_idx(p)
    assert arr.dtype == np.uint8
    assert np.array_equal(arr, [0, 1])


def test_load_idx_image_tensor(tmp_path):
    p = tmp_path / "imgs.idx"
    header = bytes([0, 0, 8, 3])
    dims = (1).to_bytes(4, "big") + (2).to_bytes(4, "big") + (2).to_bytes(4, "big")
    p.write_bytes(header + dims + bytes([0, 255, 128, 64]))
    arr = vs.load_idx(p)
    assert arr.shape == (1, 2, 2)
    assert np.array_equal(arr[0], [[0, 255], [128, 64]])


def test_load_idx_bad_magic(tmp_path):
    p = tmp_path / "bad.idx"
    p.write_bytes(bytes([1, 2, 3, 4]) + bytes(8))
    with pytest.raises(DataError, match="expected.*found"):
        vs.load_idx(p)


def test_load_idx_truncated(tmp_path):
    p = tmp_path / "short.idx"
    p.write_bytes(bytes([0, 0, 8, 1]) + (10).to_bytes(4, "big") + bytes([1, 2]))
    with pytest.raises(DataError, match="truncated"):
        vs.load_idx(p)


def test_load_idx_overlong(tmp_path):
    p = tmp_path / "long.idx"
    p.write_bytes(bytes([0, 0, 8, 1]) + (1).to_bytes(4, "big") + bytes([1, 2, 3]))
    with pytest.raises(DataError, match="longer"):
        vs.load_idx(p)


@settings(max_examples=30, deadline=None)
@given(
    shape=st.lists(st.integers(1, 5), min_size=1, max_size=3),
    seed=st.integers(0, 10_000),
)
def test_idx_round_trip_byte_identical(tmp_path_factory, shape, seed):
    rng = np.random.default_rng(seed)
    arr = rng.integers(0, 256, size=tuple(shape), dtype=np.uint8)
    p = tmp_path_factory.mktemp("idx") / "t.idx"
    vs.save_idx(arr, p)
    first = p.read_bytes()
    loaded = vs.load_idx(p)
    assert np.array_equal(loaded, arr)
    vs.save_idx(loaded, p)
    assert p.read_bytes() == first


def test_idx_gzip_transparent(tmp_path):
    arr = np.arange(12, dtype=np.uint8).reshape(3, 4)
    p = tmp_path / "t.idx.gz"
    vs.save_idx(arr, p)
    with gzip.open(p) as f:
        f.read(1)  # really gzip-compressed
    assert np.array_equal(vs.load_idx(p), arr)


# ---------------------------------------------------------------------------
# binary tasks


def test_make_binary_task_basic():
    imgs = np.arange(4 * 9, dtype=np.uint8).reshape(4, 3, 3)
    labels = np.array([0, 1, 2, 1], dtype=np.uint8)
    ds = vs.make_binary_task(imgs, labels, class_pos=0, class_neg=1)
    assert ds.points.shape == (3, 9)
    assert np.array_equal(ds.labels, [1.0, -1.0, -1.0])


def test_make_binary_task_absent_class():
    imgs = np.zeros((2, 2, 2), dtype=np.uint8)
    labels = np.array([0, 1], dtype=np.uint8)
    with pytest.raises(DataError, match="absent"):
        vs.make_binary_task(imgs, labels, class_pos=0, class_neg=7)
    with pytest.raises(DataError, match="distinct"):
        vs.make_binary_task(imgs, labels, class_pos=1, class_neg=1)


# ---------------------------------------------------------------------------
# standardization


def test_standardize_moments():
    rng = np.random.default_rng(0)
    pts = rng.normal(3.0, 2.5, (200, 6))
    pts[:, 2] = 7.0  # constant column
    ds = vs.standardize(vs.LabeledDataset(points=pts, labels=np.ones(200)))
    assert np.abs(ds.points.mean(axis=0)).max() < 1e-9
    nondeg = [0, 1, 3, 4, 5]
    assert np.abs(ds.points[:, nondeg].var(axis=0) - 1.0).max() < 1e-6
    assert np.array_equal(ds.points[:, 2], np.zeros(200))
    assert ds.standardization.scale[2] == 1.0


def test_standardize_idempotent():
    rng = np.random.default_rng(1)
    ds = vs.LabeledDataset(points=rng.normal(2, 3, (100, 4)), labels=np.ones(100))
    once = vs.standardize(ds)
    twice = vs.standardize(once)
    assert np.abs(twice.points - once.points).max() < 1e-9


def test_standardize_test_uses_training_statistics():
    rng = np.random.default_rng(2)
    train = vs.LabeledDataset(points=rng.normal(0, 1, (50, 3)), labels=np.ones(50))
    test = vs.LabeledDataset(points=rng.normal(5, 2, (40, 3)), labels=np.ones(40))
    strain = vs.standardize(train)
    stest = vs.apply_standardization(test, strain.standardization)
    expected = (test.points - strain.standardization.mean) / strain.standardization.scale
    assert np.array_equal(stest.points, expected)
    # test-set moments are NOT zero/one: the transform came from the training data
    assert np.abs(stest.points.mean(axis=0)).min() > 0.5


# ---------------------------------------------------------------------------
# gaussian mixture


def test_mixture_mean_norm_is_snr():
    for d, snr in ((1, 0.5), (10, 2.0), (1000, 5.0)):
        assert np.linalg.norm(vs.mixture_mean(d, snr)) == pytest.approx(snr, abs=1e-12)


def test_mixture_signed_mean_matches_mu():
    d = 16
    ds = vs.sample_gaussian_mixture(d, 2.0, 10**5, np.random.default_rng(1))
    dev = np.linalg.norm((ds.labels[:, None] * ds.points).mean(axis=0) - vs.mixture_mean(d, 2.0))
    assert dev <= 0.02 * np.sqrt(d)


def test_mixture_mahalanobis_chi_square():
    d = 20
    ds = vs.sample_gaussian_mixture(d, 3.0, 10**4, np.random.default_rng(5))
    maha = np.sum((ds.labels[:, None] * ds.points - vs.mixture_mean(d, 3.0)) ** 2, axis=1)
    assert stats.kstest(maha, "chi2", args=(d,)).pvalue > 0.01


def test_mixture_labels_and_validation():
    ds = vs.sample_gaussian_mixture(5, 1.0, 100, np.random.default_rng(0))
    assert set(np.unique(ds.labels)) <= {-1.0, 1.0}
    with pytest.raises(ValueError):
        vs.sample_gaussian_mixture(0, 1.0, 10, np.random.default_rng(0))
    with pytest.raises(ValueError):
        vs.sample_gaussian_mixture(5, -1.0, 10, np.random.default_rng(0))


def test_subsample():
    ds = vs.LabeledDataset(points=np.arange(20.0).reshape(10, 2), labels=np.ones(10))
    sub = vs.subsample(ds, 4, np.random.default_rng(0))
    assert sub.n == 4
    assert len({tuple(r) for r in sub.points}) == 4  # without replacement
    with pytest.raises(DataError):
        vs.subsample(ds, 11, np.random.default_rng(0))


def test_labeled_dataset_validation():
    with pytest.raises(ValueError):
        vs.LabeledDataset(points=np.ones((2, 2)), labels=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        vs.LabeledDataset(points=np.ones((2, 2)), labels=np.ones(3))
