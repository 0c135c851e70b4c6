import math

import numpy as np
import pytest

import normalis


@pytest.fixture
def camera():
    return normalis.CameraIntrinsics(100.0, 100.0, 79.5, 59.5, 160, 120)


def test_estimators_listed():
    assert normalis.estimators() == ["sne+", "sne", "3f2n-mean", "3f2n-median", "plane-pca"]


@pytest.mark.parametrize("name", ["sne+", "sne", "3f2n-mean", "3f2n-median", "plane-pca"])
def test_plane_recovered(camera, name):
    depth, truth = normalis.render_plane([0.3, -0.2, -1.0], [0.0, 0.0, 5.0], camera)
    assert depth.shape == (120, 160)
    est = normalis.estimate_normals(depth, camera, estimator=name)
    assert est.shape == (120, 160, 3)
    err = normalis.angular_error(est, truth)
    inner = err[2:-2, 2:-2]
    assert np.isfinite(inner).all()
    assert inner.max() < 1.0


def test_disparity_matches_depth(camera):
    depth, _ = normalis.render_plane([0.1, 0.4, -1.0], [0.0, 0.0, 3.0], camera)
    a = normalis.estimate_normals(depth, camera)
    b = normalis.estimate_normals(7.0 / depth, camera, inverse_depth=True)
    mask = np.isfinite(a).all(axis=2)
    assert mask.any()
    assert np.nanmax(normalis.angular_error(a, b)) < 1e-4


def test_invalid_pixels_are_nan(camera):
    depth, _ = normalis.render_sphere([0.0, 0.0, 8.0], 2.0, camera)
    est = normalis.estimate_normals(depth, camera)
    assert np.isnan(est[0, 0]).all()
    assert np.isfinite(est[60, 80]).all()


def test_closed_form_matches_grid():
    along, nz = [0.2, -0.5, 1.0], [1.0, 0.3, 0.1]
    theta, _, _ = normalis.axial_optimal_inclination(along, nz)
    grid = normalis.grid_search_inclination(along, nz, 1e-4)
    d = abs(theta - grid) % math.pi
    assert min(d, math.pi - d) < 1e-3


def test_scores():
    assert normalis.fscore(10, 0, 0) == pytest.approx(100.0)
    assert normalis.iou(10, 5, 5) == pytest.approx(50.0)
    with pytest.raises(ArithmeticError):
        normalis.iou(0, 0, 0)


def test_oracle_check():
    r = normalis.oracle_check(trials=300, seed=7)
    assert r["passed"] and r["trials"] == 300


def test_noise_deterministic(camera):
    depth, _ = normalis.render_plane([0.0, 0.0, -1.0], [0.0, 0.0, 5.0], camera)
    a = normalis.add_noise(depth, 0.01, seed=3)
    b = normalis.add_noise(depth, 0.01, seed=3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, depth)


def test_io_round_trip(tmp_path, camera):
    depth, truth = normalis.render_plane([0.2, 0.0, -1.0], [0.0, 0.0, 4.0], camera)
    normalis.write_depth(depth, str(tmp_path / "d.pfm"))
    back = normalis.read_depth(str(tmp_path / "d.pfm"))
    np.testing.assert_allclose(back, depth, rtol=1e-6)
    normalis.write_depth(depth, str(tmp_path / "d.png"))
    np.testing.assert_allclose(normalis.read_depth(str(tmp_path / "d.png")), depth, atol=5e-4)
    normalis.write_normals(truth, str(tmp_path / "n.png"))
    assert normalis.mean_angular_error(normalis.read_normals(str(tmp_path / "n.png")), truth) < 0.01


def test_bad_input_raises(camera):
    with pytest.raises(ValueError):
        normalis.estimate_normals(np.ones(5), camera)
    with pytest.raises(ValueError):
        normalis.estimate_normals(np.ones((20, 20)), camera, estimator="bogus")
    with pytest.raises(OSError):
        normalis.read_depth("/nonexistent/x.pfm")
