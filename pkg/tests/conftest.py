import numpy as np
import pytest

from distbound.grid import BinaryMask, extract_boundary
from distbound.shapeio import make_shape


@pytest.fixture
def center_mask():
    """Minimal legal mask: 3x3 with the single centre node inside."""
    inside = np.zeros((3, 3), dtype=bool)
    inside[1, 1] = True
    return BinaryMask(inside=inside)


@pytest.fixture
def block_mask():
    """16x16 grid with a full 14x14 inside block (one-pixel margin)."""
    inside = np.zeros((16, 16), dtype=bool)
    inside[1:15, 1:15] = True
    return BinaryMask(inside=inside)


@pytest.fixture(scope="session")
def strip_mask():
    """Long strip: 31 full inside rows in a 200x40 canvas."""
    return make_shape("strip", (200, 40), width=31)


@pytest.fixture(scope="session")
def strip_boundary(strip_mask):
    return extract_boundary(strip_mask)


@pytest.fixture(scope="session")
def disk_mask():
    return make_shape("disk", (64, 64), r=20)


@pytest.fixture(scope="session")
def disk_boundary(disk_mask):
    return extract_boundary(disk_mask)


def random_valid_mask(rng, size=16):
    """Random mask with margin kept and at least one inside node."""
    from distbound.errors import DistboundError
    from distbound.grid import validate_mask

    while True:
        inside = np.zeros((size, size), dtype=bool)
        inside[1 : size - 1, 1 : size - 1] = rng.random((size - 2, size - 2)) < rng.uniform(
            0.05, 0.9
        )
        mask = BinaryMask(inside=inside)
        try:
            validate_mask(mask)
        except DistboundError:
            continue
        return mask
