import numpy as np
import pytest

from nsopt.denoise import (DEFAULT_PARAMETERS, REGULARIZERS, GrayImage,
                           add_salt_pepper, dphi, make_denoising, mse, phi,
                           round_to_image, synthetic_image)
from nsopt.pgm import read_pgm, write_pgm


@pytest.mark.parametrize("reg", REGULARIZERS)
def test_phi_zero_at_origin(reg):
    assert phi(np.zeros(1), reg, 2.0)[0] == pytest.approx(0.0)


def test_hard_regularizer_saturates():
    beta = 4.0
    t = np.array([4.0, 5.0, -10.0])
    assert np.allclose(phi(t, "hard", beta), beta / 2.0)
    assert np.allclose(dphi(t, "hard", beta), 0.0)


@pytest.mark.parametrize("reg", REGULARIZERS)
def test_phi_even_and_nondecreasing_in_magnitude(reg):
    t = np.linspace(0.0, 8.0, 50)
    vals = phi(t, reg, 1.5)
    assert np.allclose(phi(-t, reg, 1.5), vals)
    assert np.all(np.diff(vals) >= -1e-12)


@pytest.mark.parametrize("reg", REGULARIZERS)
def test_dphi_matches_finite_difference(reg):
    rng = np.random.default_rng(0)
    t = rng.uniform(0.05, 5.0, 40) * rng.choice([-1.0, 1.0], 40)
    h = 1e-7
    fd = (phi(t + h, reg, 1.5) - phi(t - h, reg, 1.5)) / (2.0 * h)
    assert np.max(np.abs(fd - dphi(t, reg, 1.5))) <= 1e-5


def test_objective_zero_on_constant_noise_free_image():
    img = GrayImage(pixels=np.full((6, 6), 100))
    prob = make_denoising(img, "abs", 1.0, 1.0)
    assert prob.oracle.evaluate_f(img.pixels.astype(float).ravel()) == 0.0


def test_objective_gradient_finite_difference():
    rng = np.random.default_rng(1)
    noisy = GrayImage(pixels=rng.integers(1, 257, size=(5, 4)))
    for reg in REGULARIZERS:
        prob = make_denoising(noisy, reg, 3.0, 0.5)
        x = noisy.pixels.astype(float).ravel() + rng.uniform(0.01, 0.4, 20)
        g = prob.oracle.evaluate_g(x)
        h = 1e-6
        for i in range(0, 20, 3):
            xp = x.copy()
            xp[i] += h
            fd = (prob.oracle.evaluate_f(xp) - prob.oracle.evaluate_f(x)) / h
            assert abs(fd - g[i]) <= 1e-3 * max(1.0, abs(g[i])), (reg, i)


def test_gray_image_validates_range():
    with pytest.raises(ValueError):
        GrayImage(pixels=np.zeros((2, 2), dtype=int))
    with pytest.raises(ValueError):
        GrayImage(pixels=np.full((2, 2), 257))


def test_salt_pepper_density_zero_noop():
    img = synthetic_image(16, 16)
    out = add_salt_pepper(img, 0.0, 0)
    assert np.array_equal(out.pixels, img.pixels)


def test_salt_pepper_density_one_extremes():
    img = synthetic_image(8, 8)
    out = add_salt_pepper(img, 1.0, 0)
    assert np.all(np.isin(out.pixels, [1, 256]))


def test_salt_pepper_corruption_fraction():
    img = GrayImage(pixels=np.full((320, 320), 128))  # ~1e5 pixels
    out = add_salt_pepper(img, 0.05, 0)
    frac = np.mean(out.pixels != img.pixels)
    assert abs(frac - 0.05) < 0.005


def test_mse_identity_symmetry_and_values():
    a = GrayImage(pixels=np.array([[1, 2]]))
    b = GrayImage(pixels=np.array([[2, 4]]))
    assert mse(a, a) == 0.0
    assert mse(a, b) == pytest.approx(5.0)
    assert mse(a, b) == mse(b, a)


def test_round_to_image_clips_and_rounds():
    img = round_to_image(np.array([0.2, 1.6, 300.0, 255.4]), 2, 2)
    assert np.array_equal(img.pixels, [[1, 2], [256, 255]])


def test_identity_case_zero_density_tiny_lambda():
    clean = synthetic_image(12, 12)
    noisy = add_salt_pepper(clean, 0.0, 0)
    prob = make_denoising(noisy, "abs", 1e-12, 1.0)
    x0 = prob.x0
    # the data term dominates: the minimizer is the (clean) input itself
    restored = round_to_image(x0, 12, 12)
    assert mse(restored, clean) == 0.0


def test_default_parameters_cover_all_regularizers():
    assert set(DEFAULT_PARAMETERS) == set(REGULARIZERS)
    for lam, beta in DEFAULT_PARAMETERS.values():
        assert lam > 0 and beta > 0


# -- PGM round trips -------------------------------------------------------


def test_pgm_binary_roundtrip(tmp_path):
    img = synthetic_image(9, 7)
    path = tmp_path / "img.pgm"
    write_pgm(img, str(path), binary=True)
    back = read_pgm(str(path))
    assert np.array_equal(back.pixels, img.pixels)


def test_pgm_ascii_roundtrip(tmp_path):
    img = synthetic_image(5, 11)
    path = tmp_path / "img.pgm"
    write_pgm(img, str(path), binary=False)
    back = read_pgm(str(path))
    assert np.array_equal(back.pixels, img.pixels)


def test_pgm_comment_handling(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_text("P2\n# a comment\n2 2\n255\n0 255\n128 64\n")
    img = read_pgm(str(path))
    assert np.array_equal(img.pixels, [[1, 256], [129, 65]])


def test_pgm_rejects_wrong_magic(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P6\n2 2\n255\n" + bytes(12))
    with pytest.raises(ValueError):
        read_pgm(str(path))
