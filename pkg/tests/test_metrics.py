import numpy as np
import pytest

from distbound.edt import edt_fast
from distbound.errors import EmptySlice, MaskMismatch
from distbound.grid import ScalarField, field_from_inside
from distbound.metrics import (
    error_l2,
    error_linf,
    error_map,
    gradient_magnitude_map,
    slice_extract,
)

from test_poisson import strip_center


def _field(mask, values):
    return field_from_inside(mask, np.asarray(values, dtype=float))


class TestNorms:
    def test_identical_fields(self, block_mask):
        n = int(block_mask.inside.sum())
        a = _field(block_mask, np.arange(n, dtype=float))
        assert error_l2(a, a, block_mask) == 0.0
        assert error_linf(a, a, block_mask) == 0.0

    def test_constant_offset(self, block_mask):
        n = int(block_mask.inside.sum())
        vals = np.arange(n, dtype=float)
        a = _field(block_mask, vals)
        b = _field(block_mask, vals + 1.0)
        assert error_l2(a, b, block_mask) == pytest.approx(1.0, abs=1e-12)
        assert error_linf(a, b, block_mask) == pytest.approx(1.0, abs=1e-12)

    def test_two_node_rms(self):
        from distbound.grid import BinaryMask

        inside = np.zeros((3, 4), dtype=bool)
        inside[1, 1:3] = True
        mask = BinaryMask(inside=inside)
        a = _field(mask, [0.0, 0.0])
        b = _field(mask, [0.0, 2.0])
        assert error_l2(a, b, mask) == pytest.approx(np.sqrt(2.0), abs=1e-12)
        assert error_linf(a, b, mask) == pytest.approx(2.0, abs=1e-12)

    def test_single_negative_deviation(self, center_mask):
        a = _field(center_mask, [1.0])
        b = _field(center_mask, [4.0])
        assert error_linf(a, b, center_mask) == 3.0

    def test_linf_dominates_l2_and_symmetry(self, block_mask):
        rng = np.random.default_rng(23)
        n = int(block_mask.inside.sum())
        for _ in range(10):
            a = _field(block_mask, rng.normal(size=n))
            b = _field(block_mask, rng.normal(size=n))
            c = _field(block_mask, rng.normal(size=n))
            assert error_linf(a, b, block_mask) >= error_l2(a, b, block_mask)
            assert error_l2(a, b, block_mask) == error_l2(b, a, block_mask)
            # triangle inequality in both norms
            assert error_l2(a, c, block_mask) <= (
                error_l2(a, b, block_mask) + error_l2(b, c, block_mask) + 1e-12
            )
            assert error_linf(a, c, block_mask) <= (
                error_linf(a, b, block_mask) + error_linf(b, c, block_mask) + 1e-12
            )

    def test_mask_mismatch(self, block_mask, center_mask):
        a = _field(block_mask, np.zeros(int(block_mask.inside.sum())))
        b = _field(center_mask, np.zeros(1))
        with pytest.raises(MaskMismatch):
            error_l2(a, b, block_mask)


class TestErrorMap:
    def test_zero_map_and_norm_consistency(self, block_mask):
        rng = np.random.default_rng(29)
        n = int(block_mask.inside.sum())
        a = _field(block_mask, rng.normal(size=n))
        b = _field(block_mask, rng.normal(size=n))
        m = error_map(a, b, block_mask)
        ins = block_mask.inside
        assert m.values[ins].max() == pytest.approx(error_linf(a, b, block_mask), abs=0)
        assert np.sqrt(np.mean(m.values[ins] ** 2)) == pytest.approx(
            error_l2(a, b, block_mask), abs=1e-15
        )
        same = error_map(a, a, block_mask)
        assert np.all(same.values[ins] == 0.0)
        # undefined outside the inside set (boundary included)
        assert not same.defined[0, 1]


class TestSlice:
    def test_constant_field(self, block_mask):
        n = int(block_mask.inside.sum())
        fld = _field(block_mask, np.full(n, 2.5))
        cols, vals = slice_extract(fld, 5)
        assert list(cols) == list(range(1, 15))
        assert np.all(vals == 2.5)

    def test_strip_midline_is_constant(self, strip_mask, strip_boundary):
        fld = edt_fast(strip_mask, strip_boundary)
        r, _ = strip_center(strip_mask)
        cols, vals = slice_extract(fld, r)
        assert len(cols) == int(strip_mask.inside[r].sum())
        # constant at the half-width wherever the end walls are farther away
        core = (cols >= 16) & (cols <= strip_mask.width - 17)
        assert np.all(vals[core] == 16.0)
        assert vals.max() == 16.0

    def test_row_outside_domain(self, strip_mask, strip_boundary):
        fld = edt_fast(strip_mask, strip_boundary)
        with pytest.raises(EmptySlice):
            slice_extract(fld, 0)
        with pytest.raises(EmptySlice):
            slice_extract(fld, 10**6)

    def test_slice_of_error_map_matches_subtraction(self, block_mask):
        rng = np.random.default_rng(31)
        n = int(block_mask.inside.sum())
        a = _field(block_mask, rng.normal(size=n))
        b = _field(block_mask, rng.normal(size=n))
        m = error_map(a, b, block_mask)
        cols, vals = slice_extract(m, 7)
        direct = np.abs(a.values[7, cols] - b.values[7, cols])
        assert np.array_equal(vals, direct)


class TestGradientMagnitude:
    def test_constant_zero(self, block_mask):
        n = int(block_mask.inside.sum())
        fld = _field(block_mask, np.full(n, 4.0))
        m = gradient_magnitude_map(fld, block_mask)
        core = np.zeros_like(block_mask.inside)
        core[2:14, 2:14] = True
        assert np.all(m.values[core] == 0.0)

    def test_linear_slope(self, block_mask):
        rows, cols = np.indices(block_mask.inside.shape)
        fld = ScalarField(
            mask=block_mask,
            values=(3.0 * cols + 4.0 * rows).astype(float),
            defined=np.ones_like(block_mask.inside),
        )
        m = gradient_magnitude_map(fld, block_mask)
        core = np.zeros_like(block_mask.inside)
        core[2:14, 2:14] = True
        assert np.allclose(m.values[core], 5.0)

    def test_strip_edt_profile(self, strip_mask, strip_boundary):
        fld = edt_fast(strip_mask, strip_boundary)
        m = gradient_magnitude_map(fld, strip_mask)
        r, c = strip_center(strip_mask)
        assert m.values[r, c] < 0.5  # medial dip
        assert m.values[r - 4, c] == pytest.approx(1.0, abs=1e-12)
        assert m.values[r + 4, c] == pytest.approx(1.0, abs=1e-12)
