import numpy as np
import pytest
from PIL import Image

from angiotrace import errors, raster


def test_pgm_roundtrip_bit_exact(tmp_path):
    img = np.array([[0, 255], [17, 99]], dtype=np.uint8)
    path = tmp_path / "img.pgm"
    raster.save_image(img, path)
    back = raster.load_image(path)
    assert np.array_equal(back, img)


def test_pgm_roundtrip_random(tmp_path, rng):
    for i in range(20):
        h, w = rng.integers(1, 40, size=2)
        img = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
        path = tmp_path / f"r{i}.pgm"
        raster.save_image(img, path)
        assert np.array_equal(raster.load_image(path), img)


def test_png_gray_roundtrip(tmp_path):
    img = np.array([[42]], dtype=np.uint8)
    path = tmp_path / "one.png"
    raster.save_image(img, path)
    assert np.array_equal(raster.load_image(path), img)


def test_png_rgb_luminance(tmp_path):
    rgb = np.zeros((1, 2, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 0, 0)
    rgb[0, 1] = (10, 20, 30)
    path = tmp_path / "rgb.png"
    Image.fromarray(rgb, mode="RGB").save(path)
    got = raster.load_image(path)
    # integer-rounded Rec. 601 luminance
    assert got[0, 0] == round(0.299 * 255)
    assert got[0, 1] == round(0.299 * 10 + 0.587 * 20 + 0.114 * 30)


def test_text_file_is_corrupt(tmp_path):
    path = tmp_path / "bogus.pgm"
    path.write_text("hello")
    with pytest.raises(errors.CorruptFile):
        raster.load_image(path)


def test_missing_file(tmp_path):
    with pytest.raises(errors.IoFailure):
        raster.load_image(tmp_path / "nope.pgm")


def test_unsupported_ppm(tmp_path):
    path = tmp_path / "color.ppm"
    path.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
    with pytest.raises(errors.UnsupportedFormat):
        raster.load_image(path)


def test_mask_saved_two_level(tmp_path):
    mask = np.array([[True, False], [False, True]])
    path = tmp_path / "mask.pgm"
    raster.save_image(mask, path)
    back = raster.load_image(path)
    assert set(np.unique(back)) == {0, 255}


def test_constant_float_saves_all_zero(tmp_path):
    img = np.full((3, 3), 3.7)
    path = tmp_path / "const.pgm"
    raster.save_image(img, path)
    assert np.array_equal(raster.load_image(path), np.zeros((3, 3), dtype=np.uint8))


def test_float_rescale_minmax(tmp_path):
    img = np.array([[0.0, 1.0], [2.0, 4.0]])
    path = tmp_path / "f.pgm"
    raster.save_image(img, path)
    back = raster.load_image(path)
    assert back[0, 0] == 0 and back[1, 1] == 255


# --- overlays ---

def test_overlay_empty_is_rgb_copy():
    base = np.arange(12, dtype=np.uint8).reshape(3, 4)
    out = raster.render_overlay(base, [])
    assert np.array_equal(out, raster.to_rgb(base))


def test_overlay_opaque_mask():
    base = np.full((4, 4), 50, dtype=np.uint8)
    mask = np.ones((4, 4), dtype=bool)
    out = raster.render_overlay(base, [raster.OverlayLayer("mask", mask, (255, 0, 0), 1.0)])
    assert np.all(out.reshape(-1, 3) == (255, 0, 0))


def test_overlay_half_opacity_path():
    # round-half-up: 0.5*255 + 0.5*100 = 177.5 -> 178; 0.5*0 + 0.5*100 = 50
    base = np.full((5, 5), 100, dtype=np.uint8)
    pts = [(0, 0), (1, 1), (2, 2)]
    out = raster.render_overlay(base, [raster.OverlayLayer("path", pts, (255, 0, 0), 0.5)])
    for x, y in pts:
        assert tuple(out[y, x]) == (178, 50, 50)
    assert tuple(out[4, 4]) == (100, 100, 100)


def test_overlay_out_of_bounds():
    base = np.zeros((2, 2), dtype=np.uint8)
    with pytest.raises(errors.OutOfBounds):
        raster.render_overlay(base, [raster.OverlayLayer("points", [(5, 0)], (0, 0, 0), 1.0)])


def test_layers_composited_in_order():
    base = np.zeros((1, 1), dtype=np.uint8)
    mask = np.ones((1, 1), dtype=bool)
    out = raster.render_overlay(base, [
        raster.OverlayLayer("mask", mask, (255, 0, 0), 1.0),
        raster.OverlayLayer("mask", mask, (0, 255, 0), 1.0),
    ])
    assert tuple(out[0, 0]) == (0, 255, 0)
