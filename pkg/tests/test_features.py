import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import verspace as vs


def test_linear_map_identity():
    x = np.array([1.0, -2.0, 3.0])
    assert np.array_equal(vs.linear_map(x), x)
    assert np.array_equal(vs.linear_map(np.zeros(4)), np.zeros(4))
    assert vs.linear_map(np.ones(7)).shape == (7,)


def test_sphere_rows_unit_norm():
    rows = vs.sample_sphere_rows(500, 6, np.random.default_rng(0))
    np.testing.assert_allclose(np.linalg.norm(rows, axis=1), 1.0, atol=1e-12)


def test_sphere_rows_dim_one():
    rows = vs.sample_sphere_rows(100, 1, np.random.default_rng(1))
    assert set(np.unique(rows)) <= {-1.0, 1.0}


def test_sphere_rows_mean_vanishes():
    rows = vs.sample_sphere_rows(10**5, 10, np.random.default_rng(2))
    assert np.linalg.norm(rows.mean(axis=0)) <= 0.02


def test_sphere_rows_reproducible():
    a = vs.sample_sphere_rows(50, 8, np.random.default_rng(77))
    b = vs.sample_sphere_rows(50, 8, np.random.default_rng(77))
    assert np.array_equal(a, b)


def test_random_relu_identity_projection():
    fmap = vs.FeatureMap(kind="random_relu", output_dim=2, projection=np.eye(2))
    assert np.array_equal(vs.random_relu_map(np.array([1.0, -1.0]), fmap), [1.0, 0.0])
    assert np.array_equal(vs.random_relu_map(np.zeros(2), fmap), np.zeros(2))


def test_random_relu_hand_example():
    U = np.array([[1.0, 0.0], [-1.0, 0.0]])
    fmap = vs.FeatureMap(kind="random_relu", output_dim=2, projection=U)
    assert np.array_equal(vs.random_relu_map(np.array([3.0, 5.0]), fmap), [3.0, 0.0])


def test_random_relu_dimension_mismatch():
    fmap = vs.FeatureMap.random_relu(4, 6, np.random.default_rng(0))
    with pytest.raises(ValueError):
        vs.random_relu_map(np.ones(5), fmap)


def test_feature_map_constructors_reproducible():
    a = vs.FeatureMap.random_relu(12, 30, np.random.default_rng(5))
    b = vs.FeatureMap.random_relu(12, 30, np.random.default_rng(5))
    assert np.array_equal(a.projection, b.projection)
    assert a.output_dim == 30 and a.input_dim == 12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_random_relu_nonnegative(seed):
    rng = np.random.default_rng(seed)
    fmap = vs.FeatureMap.random_relu(5, 9, rng)
    x = rng.standard_normal((4, 5)) * 10
    assert (fmap.apply(x) >= 0.0).all()


def test_feature_map_validation():
    with pytest.raises(ValueError):
        vs.FeatureMap(kind="mystery", output_dim=3)
    with pytest.raises(ValueError):
        vs.FeatureMap(kind="random_relu", output_dim=2, projection=2 * np.eye(2))
    with pytest.raises(ValueError):
        vs.FeatureMap(kind="linear", output_dim=2, projection=np.eye(2))


def test_build_constraints_single_point():
    data = vs.LabeledDataset(points=np.array([[1.0, 0.0]]), labels=np.array([-1.0]))
    cs = vs.build_constraints(data, vs.FeatureMap.linear(2))
    assert np.array_equal(cs.rows, [[-1.0, 0.0]])


def test_build_constraints_interpolation_iff_sign_agreement():
    data = vs.LabeledDataset(points=np.array([[1.0, 0.0]]), labels=np.array([1.0]))
    cs = vs.build_constraints(data, vs.FeatureMap.linear(2))
    assert cs.is_feasible(np.array([1.0, -5.0]))
    assert not cs.is_feasible(np.array([-1.0, 0.0]))


def test_constraint_gram_is_signed_feature_gram():
    rng = np.random.default_rng(3)
    pts = rng.standard_normal((6, 5))
    labels = np.where(rng.random(6) < 0.5, -1.0, 1.0)
    data = vs.LabeledDataset(points=pts, labels=labels)
    fmap = vs.FeatureMap.random_relu(5, 11, rng)
    cs = vs.build_constraints(data, fmap)
    feats = fmap.apply(pts)
    expected = np.outer(labels, labels) * (feats @ feats.T)
    np.testing.assert_allclose(cs.rows @ cs.rows.T, expected, rtol=1e-12)


def test_label_flip_negates_row():
    rng = np.random.default_rng(4)
    pts = rng.standard_normal((3, 4))
    labels = np.array([1.0, -1.0, 1.0])
    fmap = vs.FeatureMap.linear(4)
    rows = vs.build_constraints(vs.LabeledDataset(points=pts, labels=labels), fmap).rows
    flipped = labels.copy()
    flipped[1] = -flipped[1]
    rows2 = vs.build_constraints(vs.LabeledDataset(points=pts, labels=flipped), fmap).rows
    assert np.array_equal(rows2[1], -rows[1])
    assert np.array_equal(rows2[0], rows[0])


def test_build_constraints_zero_feature_vector_rejected():
    data = vs.LabeledDataset(points=np.array([[0.0, 0.0], [1.0, 1.0]]),
                             labels=np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        vs.build_constraints(data, vs.FeatureMap.linear(2))
