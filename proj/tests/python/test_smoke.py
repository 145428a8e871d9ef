import json

import numpy as np
import pytest

import sig2d


def rng_image(h, w, c=3, seed=0):
    return np.random.default_rng(seed).random((h, w, c))


def box(x, k, l):
    return x[k + 1, l + 1] - x[k, l + 1] - x[k + 1, l] + x[k, l]


def hat(x, k, l):
    return (x[k + 1, l] - x[k, l]) * (x[k, l + 1] - x[k, l])


def test_first_order_telescopes():
    x = rng_image(7, 9, seed=1)
    for ch in range(3):
        corner = x[6, 8, ch] - x[0, 8, ch] - x[6, 0, ch] + x[0, 0, ch]
        assert sig2d.sig_first_12(x, ch) == pytest.approx(corner, abs=1e-12)
    assert sig2d.sig_first_12(x, 0, window=(2, 5, 1, 4)) == pytest.approx(
        x[5, 4, 0] - x[2, 4, 0] - x[5, 1, 0] + x[2, 1, 0], abs=1e-12)


def test_second_order_matches_numpy_loop():
    x = rng_image(6, 6, 1, seed=2)[:, :, 0]
    expect = 0.0
    for k1 in range(5):
        for l1 in range(5):
            for k2 in range(k1 + 1, 5):
                for l2 in range(l1 + 1, 5):
                    expect += hat(x, k1, l1) * box(x, k2, l2)
    got = sig2d.sig_second(x, sig2d.Kind.HATBOX)
    assert got == pytest.approx(expect, rel=1e-12, abs=1e-12)
    assert sig2d.sig_second(x, sig2d.Kind.HATBOX, brute_force=True) == pytest.approx(got, abs=1e-12)


def test_errors_map_to_python_exceptions():
    x = rng_image(5, 5)
    with pytest.raises(IndexError):
        sig2d.sig_first_12(x, 0, window=(0, 5, 0, 2))
    with pytest.raises(ValueError):
        sig2d.sig_first_hat(x, 0, window=(0, 2, 1, 3), scheme=sig2d.Scheme.CENTRAL)
    with pytest.raises(ValueError):
        sig2d.sig_second(x, sig2d.Kind.BOX)
    with pytest.raises(OSError):
        sig2d.load_image("/nonexistent/file.ppm")


def test_d4_rotation_and_symmetrized_invariance():
    x = rng_image(8, 8, seed=3)
    assert np.array_equal(sig2d.apply_d4(x, sig2d.D4.ROT90), np.rot90(x))
    assert np.array_equal(sig2d.apply_d4(x, sig2d.D4.FLIP_H), x[:, ::-1])
    base = sig2d.signature_vector(x, symmetrize=True)
    assert base.shape == (6, 3)
    for g in sig2d.D4.__members__.values():
        moved = sig2d.signature_vector(sig2d.apply_d4(x, g), symmetrize=True)
        assert np.max(np.abs(moved - base)) <= 1e-9
    assert sig2d.compose(sig2d.inverse(sig2d.D4.ROT90), sig2d.D4.ROT90) == sig2d.D4.ID


def test_pca_against_numpy_svd():
    images = [rng_image(4, 4, seed=s) for s in range(6)]
    model = sig2d.pca_fit(images, 3)
    data = np.stack([im.ravel() for im in images])
    centered = data - data.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    np.testing.assert_allclose(model.explained_variance_ratio, (s**2 / np.sum(s**2))[:3], rtol=1e-10)
    comps = np.array(model.components)
    np.testing.assert_allclose(comps @ comps.T, np.eye(3), atol=1e-10)
    coords = model.transform(images[0])
    np.testing.assert_allclose(coords, comps @ centered[0], atol=1e-10)
    again = sig2d.PcaModel.from_json(model.to_json())
    assert again.components == model.components


def test_forest_learns_separable_data_and_round_trips():
    rng = np.random.default_rng(4)
    x = np.vstack([rng.normal(0, 0.1, (20, 2)), rng.normal(1, 0.1, (20, 2))])
    y = [0] * 20 + [1] * 20
    forest = sig2d.train_forest(x, y, ["a", "b"], n_trees=25, seed=7)
    assert forest.n_trees == 25
    assert forest.predict(x) == y
    proba = np.array(forest.predict_proba(x))
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)
    text = forest.to_json()
    assert json.loads(text)["classes"] == ["a", "b"]
    assert sig2d.Forest.from_json(text).to_json() == text


def test_synthetic_textures_and_patches(tmp_path):
    sheets = sig2d.synth_textures(3, 64, seed=2)
    assert len(sheets) == 3
    sheet = next(iter(sheets.values()))
    assert sheet.shape == (64, 64, 3)
    assert 0.0 <= sheet.min() and sheet.max() <= 1.0
    patches = sig2d.sample_patches(sheet, 4, 16, seed=5)
    assert [p.shape for p in patches] == [(16, 16, 3)] * 4
    again = sig2d.sample_patches(sheet, 4, 16, seed=5)
    assert all(np.array_equal(a, b) for a, b in zip(patches, again))
    path = str(tmp_path / "sheet.ppm")
    sig2d.save_ppm(sheet, path)
    np.testing.assert_array_equal(sig2d.load_image(path), sheet)
