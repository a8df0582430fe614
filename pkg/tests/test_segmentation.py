import numpy as np
import pytest

from angiotrace import errors, segmentation
from angiotrace.segmentation import (CLOSE, DILATE, ERODE, OPEN, binarize,
                                     disk_se, morphology, otsu_from_histogram,
                                     otsu_threshold, quantize256,
                                     remove_small_components, square_se)
from angiotrace import phantoms


# ---------------------------------------------------------------------------
# Otsu
# ---------------------------------------------------------------------------

def otsu_bruteforce(counts):
    """Independent oracle: scan all 256 thresholds, foreground = level > t."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    best_t, best_var = None, -1.0
    for t in range(256):
        w0 = counts[: t + 1].sum()
        w1 = total - w0
        if w0 == 0 or w1 == 0:
            continue
        mu0 = (counts[: t + 1] * np.arange(t + 1)).sum() / w0
        mu1 = (counts[t + 1:] * np.arange(t + 1, 256)).sum() / w1
        var = w0 * w1 * (mu0 - mu1) ** 2
        if var > best_var:
            best_var, best_t = var, t
    return best_t


def test_otsu_two_level():
    img = np.array([[10] * 8, [200] * 8], dtype=np.uint8)
    counts = segmentation.histogram256(img)
    assert otsu_threshold(img) == otsu_bruteforce(counts) == 10


def test_otsu_three_level():
    img = np.repeat(np.array([0, 100, 255], dtype=np.uint8), 20).reshape(4, 15)
    assert otsu_threshold(img) == otsu_bruteforce(segmentation.histogram256(img))


def test_otsu_constant_degenerate():
    with pytest.raises(errors.DegenerateHistogram):
        otsu_threshold(np.full((4, 4), 9, dtype=np.uint8))


def test_otsu_random_histograms(rng):
    for _ in range(100):
        counts = rng.integers(0, 50, size=256)
        if np.count_nonzero(counts) < 2:
            continue
        assert otsu_from_histogram(counts) == otsu_bruteforce(counts)


def test_otsu_float_input_quantized():
    img = np.array([[0.0, 0.0, 1.0, 1.0]])
    t = otsu_threshold(img)
    assert t == otsu_bruteforce(segmentation.histogram256(quantize256(img)))


def test_quantize256_constant():
    assert np.array_equal(quantize256(np.full((2, 2), 3.7)), np.zeros((2, 2), np.uint8))


# ---------------------------------------------------------------------------
# binarize
# ---------------------------------------------------------------------------

def test_binarize_trivials():
    img = np.array([[10, 200]], dtype=np.uint8)
    assert not binarize(img, 255).any()
    assert binarize(img, -1).all()
    assert np.array_equal(binarize(img, 10), [[False, True]])


# ---------------------------------------------------------------------------
# morphology
# ---------------------------------------------------------------------------

def test_dilate_single_pixel():
    m = np.zeros((5, 5), dtype=bool)
    m[2, 2] = True
    out = morphology(m, square_se(1), DILATE)
    want = np.zeros((5, 5), dtype=bool)
    want[1:4, 1:4] = True
    assert np.array_equal(out, want)


def test_erode_block_to_center():
    m = np.zeros((5, 5), dtype=bool)
    m[1:4, 1:4] = True
    out = morphology(m, square_se(1), ERODE)
    want = np.zeros((5, 5), dtype=bool)
    want[2, 2] = True
    assert np.array_equal(out, want)


def test_close_fills_gap_column():
    # two 3x3 blocks separated by one background column
    m = np.zeros((3, 7), dtype=bool)
    m[:, 0:3] = True
    m[:, 4:7] = True
    out = morphology(m, square_se(1), CLOSE)
    assert out[:, 3].all()
    assert np.all(out >= m)


def test_erosion_border_is_background():
    m = np.ones((3, 3), dtype=bool)
    out = morphology(m, square_se(1), ERODE)
    want = np.zeros((3, 3), dtype=bool)
    want[1, 1] = True
    assert np.array_equal(out, want)


def test_disk_se_offsets_symmetric():
    se = disk_se(2)
    offs = set(se.offsets)
    assert (0, 0) in offs
    assert all((-dx, -dy) in offs for dx, dy in offs)


def _random_mask(rng, shape=(32, 32), p=0.4):
    return rng.random(shape) < p


def test_duality_dilate_erode(rng):
    se = square_se(1)
    for _ in range(30):
        m = _random_mask(rng)
        padded = np.pad(m, 3, constant_values=False)
        lhs = morphology(padded, se, DILATE)
        rhs = ~morphology(~padded, se, ERODE)
        inner = np.s_[3:-3, 3:-3]
        assert np.array_equal(lhs[inner], rhs[inner])


@pytest.mark.parametrize("kind", [OPEN, CLOSE])
def test_idempotence(rng, kind):
    se = square_se(1)
    for _ in range(20):
        m = _random_mask(rng)
        once = morphology(m, se, kind)
        assert np.array_equal(morphology(once, se, kind), once)


def test_extensivity(rng):
    se = square_se(1)
    for _ in range(20):
        m = _random_mask(rng)
        assert np.all(morphology(m, se, ERODE) <= m)
        assert np.all(m <= morphology(m, se, DILATE))
        assert np.all(morphology(m, se, OPEN) <= m)
        assert np.all(m <= morphology(m, se, CLOSE))


def test_monotonicity(rng):
    se = square_se(1)
    for _ in range(20):
        m2 = _random_mask(rng)
        m1 = m2 & _random_mask(rng)
        for kind in (ERODE, DILATE, OPEN, CLOSE):
            assert np.all(morphology(m1, se, kind) <= morphology(m2, se, kind))


# ---------------------------------------------------------------------------
# small-component removal
# ---------------------------------------------------------------------------

def test_remove_small_components_by_area():
    m = np.zeros((20, 20), dtype=bool)
    m[1, 1:4] = True                  # size 3
    m[10:15, 5:15] = True             # size 50
    out = remove_small_components(m, 10)
    assert not out[1, 1:4].any()
    assert np.array_equal(out[10:15, 5:15], m[10:15, 5:15])


def test_remove_small_components_trivials():
    empty = np.zeros((5, 5), dtype=bool)
    assert not remove_small_components(empty, 4).any()
    m = np.eye(5, dtype=bool)
    assert np.array_equal(remove_small_components(m, 0), m)


def test_remove_small_components_idempotent_never_adds(rng):
    for _ in range(20):
        m = _random_mask(rng, p=0.3)
        out = remove_small_components(m, 5)
        assert np.all(out <= m)
        assert np.array_equal(remove_small_components(out, 5), out)


def test_connectivity_matters():
    m = np.eye(4, dtype=bool)     # one 8-connected diagonal, four 4-connected dots
    assert remove_small_components(m, 3, connectivity=8).any()
    assert not remove_small_components(m, 3, connectivity=4).any()
