import numpy as np
import pytest

from distbound.errors import DoesNotFit, EmptyMask, ParseError
from distbound.grid import boundary_mask, field_from_inside
from distbound.shapeio import (
    make_shape,
    parse_shape_spec,
    read_field_csv,
    read_mask_pgm,
    write_field_csv,
    write_heatmap_ppm,
    write_mask_pgm,
)

from conftest import random_valid_mask


class TestReadPgm:
    def test_p2_minimal_center(self):
        data = b"P2\n3 3\n255\n0 0 0\n0 255 0\n0 0 0\n"
        mask = read_mask_pgm(data)
        assert mask.inside[1, 1]
        assert mask.inside.sum() == 1

    def test_p5_disk(self, disk_mask):
        data = write_mask_pgm(disk_mask, binary=True)
        again = read_mask_pgm(data)
        assert np.array_equal(again.inside, disk_mask.inside)

    def test_threshold_half_maxval(self):
        # maxval 10: inside iff pixel >= 5
        data = b"P2\n3 3\n10\n0 0 0\n0 5 0\n0 0 0\n"
        assert read_mask_pgm(data).inside[1, 1]
        data = b"P2\n3 3\n10\n0 0 0\n0 4 0\n0 0 0\n"
        with pytest.raises(EmptyMask):
            read_mask_pgm(data)

    def test_comments_in_header(self):
        data = b"P2\n# a comment\n3 3\n# another\n255\n0 0 0\n0 255 0\n0 0 0\n"
        assert read_mask_pgm(data).inside[1, 1]

    def test_sixteen_bit_binary(self):
        pixels = np.zeros((3, 3), dtype=">u2")
        pixels[1, 1] = 40000
        data = b"P5\n3 3\n65535\n" + pixels.tobytes()
        assert read_mask_pgm(data).inside[1, 1]

    def test_truncated_body(self):
        with pytest.raises(ParseError):
            read_mask_pgm(b"P2\n3 3\n255\n0 0 0\n0 255\n")
        with pytest.raises(ParseError):
            read_mask_pgm(b"P5\n4 4\n255\n\x00\x00")

    def test_wrong_magic(self):
        with pytest.raises(ParseError):
            read_mask_pgm(b"P3\n3 3\n255\n" + b"0 " * 27)

    def test_bad_maxval(self):
        with pytest.raises(ParseError):
            read_mask_pgm(b"P2\n3 3\n70000\n" + b"0 " * 9)

    def test_roundtrip_random_masks(self):
        rng = np.random.default_rng(47)
        for _ in range(10):
            mask = random_valid_mask(rng)
            for binary in (False, True):
                again = read_mask_pgm(write_mask_pgm(mask, binary=binary))
                assert np.array_equal(again.inside, mask.inside)


class TestFieldCsv:
    def test_single_value_layout(self, center_mask):
        fld = field_from_inside(center_mask, np.array([2.5]), boundary_value=None)
        text = write_field_csv(fld).decode()
        lines = text.splitlines()
        assert lines[0] == "3 3"
        assert lines[2].split(",")[1] == "2.5"
        assert lines[1].split(",")[0] == "nan"

    def test_roundtrip_precision(self, block_mask):
        rng = np.random.default_rng(53)
        n = int(block_mask.inside.sum())
        fld = field_from_inside(block_mask, rng.normal(size=n) * 1e3)
        back = read_field_csv(write_field_csv(fld))
        ins = block_mask.inside
        rel = np.abs(back[ins] - fld.values[ins]) / np.abs(fld.values[ins])
        assert rel.max() <= 1e-7
        assert np.isnan(back[0, 0])

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            read_field_csv(b"")
        with pytest.raises(ParseError):
            read_field_csv(b"3 3\n1,2,3\n")  # truncated
        with pytest.raises(ParseError):
            read_field_csv(b"2 1\n1,2,3\n")  # too many cells
        with pytest.raises(ParseError):
            read_field_csv(b"2 1\n1,x\n")


class TestHeatmap:
    def _pixel(self, data, w, r, c):
        start = data.index(b"255\n") + 4
        off = start + 3 * (r * w + c)
        return tuple(data[off : off + 3])

    def test_color_anchors(self, center_mask):
        # 1x3-ish: use the 3x3 center mask with chosen values on defined nodes
        vals = np.array([1.0])
        fld = field_from_inside(center_mask, vals, boundary_value=0.0)
        data = write_heatmap_ppm(fld, scale_max=1.0)
        assert data.startswith(b"P6\n3 3\n255\n")
        assert self._pixel(data, 3, 1, 1) == (255, 0, 0)  # at scale_max: red
        assert self._pixel(data, 3, 0, 1) == (0, 0, 255)  # zero: blue
        assert self._pixel(data, 3, 0, 0) == (0, 0, 0)  # undefined: black

    def test_midpoint_green(self, center_mask):
        fld = field_from_inside(center_mask, np.array([0.5]), boundary_value=0.0)
        data = write_heatmap_ppm(fld, scale_max=1.0)
        assert self._pixel(data, 3, 1, 1) == (0, 255, 0)

    def test_all_zero_field_is_blue(self, block_mask):
        n = int(block_mask.inside.sum())
        fld = field_from_inside(block_mask, np.zeros(n), boundary_value=None)
        data = write_heatmap_ppm(fld)
        assert self._pixel(data, 16, 8, 8) == (0, 0, 255)

    def test_red_monotone_in_value(self, block_mask):
        n = int(block_mask.inside.sum())
        ramp = np.linspace(0.0, 1.0, n)
        fld = field_from_inside(block_mask, ramp, boundary_value=None)
        data = write_heatmap_ppm(fld, scale_max=1.0)
        ins = np.argwhere(block_mask.inside)
        reds = [self._pixel(data, 16, r, c)[0] for r, c in ins]
        order = np.argsort(ramp)
        assert all(
            reds[order[i]] <= reds[order[i + 1]] for i in range(len(order) - 1)
        )


class TestMakeShape:
    def test_tiny_disk_single_node(self):
        mask = make_shape("disk", (3, 3), r=0.4)
        assert mask.inside.sum() == 1
        assert mask.inside[1, 1]

    def test_strip_full_rows(self):
        mask = make_shape("strip", (200, 40), width=31)
        rows = np.unique(np.nonzero(mask.inside)[0])
        assert len(rows) == 31
        for r in rows:
            assert mask.inside[r].sum() == 198

    def test_annulus_excludes_inner_radius(self):
        mask = make_shape("annulus", (64, 64), r_in=5, r_out=10)
        cy = cx = (64 - 1) / 2.0
        rr, cc = np.nonzero(mask.inside)
        d = np.sqrt((rr - cy) ** 2 + (cc - cx) ** 2)
        assert d.min() >= 5.0
        assert d.max() <= 10.0

    def test_rectangle_counts(self):
        mask = make_shape("rectangle", (20, 12), w=5, h=3)
        assert mask.inside.sum() == 15

    def test_lshape_union(self):
        mask = make_shape("lshape", (64, 64), w=40, h=40, cut_w=20, cut_h=20)
        assert mask.inside.sum() == 40 * 40 - 20 * 20

    def test_does_not_fit(self):
        with pytest.raises(DoesNotFit):
            make_shape("disk", (10, 10), r=6)
        with pytest.raises(DoesNotFit):
            make_shape("disk", (10, 10), r=0.1)  # no node inside

    def test_boundary_wraps_shape(self):
        mask = make_shape("disk", (32, 32), r=10)
        assert boundary_mask(mask).sum() > 0


class TestParseShapeSpec:
    def test_square_canvas(self):
        mask = parse_shape_spec("disk:r=20,canvas=64")
        assert mask.inside.shape == (64, 64)

    def test_rectangular_canvas(self):
        mask = parse_shape_spec("strip:width=31,canvas=200x40")
        assert mask.inside.shape == (40, 200)

    def test_bad_specs(self):
        for spec in (
            "blob:r=2,canvas=16",
            "disk:r=2",
            "disk:r=2,canvas=axb",
            "disk:radius=2,canvas=16",
            "disk:r,canvas=16",
        ):
            with pytest.raises(ParseError):
                parse_shape_spec(spec)
