import numpy as np
import pytest

from angiotrace import phantoms


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tube_image():
    """128x128 dark horizontal tube of width 7 crossing the full image."""
    return phantoms.horizontal_tube(128, 7)


@pytest.fixture
def bar_image():
    """128x128 dark vertical bar of width 7."""
    return phantoms.vertical_bar(128, 7)


def has_2x2_block(mask: np.ndarray) -> bool:
    return bool((mask[:-1, :-1] & mask[:-1, 1:] & mask[1:, :-1] & mask[1:, 1:]).any())
