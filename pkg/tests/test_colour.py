import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loewner_morph.colour import (
    BiconePoint,
    HclColour,
    RgbColour,
    bicone_to_hcl,
    bicone_to_hcl_array,
    bicone_to_sym2,
    bicone_to_sym2_array,
    clamp_to_bicone,
    clamp_to_bicone_array,
    hcl_to_bicone,
    hcl_to_bicone_array,
    hcl_to_rgb,
    hcl_to_rgb_array,
    rgb_to_hcl,
    rgb_to_hcl_array,
    sym2_to_bicone,
    sym2_to_bicone_array,
)
from loewner_morph.sym2 import Sym2, eig_array

H = math.sqrt(2) / 2
S3 = math.sqrt(3) / 2


def lattice(k=17):
    axis = np.linspace(0.0, 1.0, k)
    return np.array(list(itertools.product(axis, axis, axis)))


def approx_tuple(obj, expected, abs=1e-12):
    return pytest.approx(expected, abs=abs) == tuple(vars(obj).values())


@pytest.mark.parametrize("rgb, hcl", [
    ((0, 0, 1), (2 / 3, 1, 0)),
    ((1, 1, 1), (0, 0, 1)),
    ((0, 1, 0), (1 / 3, 1, 0)),
    ((1, 0, 0), (0, 1, 0)),
    ((0, 0, 0), (0, 0, -1)),
])
def test_rgb_to_hcl(rgb, hcl):
    assert approx_tuple(rgb_to_hcl(RgbColour(*rgb)), hcl)


@pytest.mark.parametrize("hcl, rgb", [
    ((2 / 3, 1, 0), (0, 0, 1)),
    ((0, 0, -1), (0, 0, 0)),
    ((1 / 3, 1, 0), (0, 1, 0)),
])
def test_hcl_to_rgb(hcl, rgb):
    assert approx_tuple(hcl_to_rgb(HclColour(*hcl)), rgb)


def test_hcl_bicone_constraint_on_lattice():
    hcl = rgb_to_hcl_array(lattice())
    assert np.all(hcl[:, 1] <= 1 - np.abs(hcl[:, 2]) + 1e-9)
    assert np.all((hcl[:, 0] >= 0) & (hcl[:, 0] < 1))
    assert np.all(hcl[hcl[:, 1] == 0, 0] == 0)


def test_rgb_hcl_round_trip_lattice():
    rgb = lattice()
    assert np.max(np.abs(hcl_to_rgb_array(rgb_to_hcl_array(rgb)) - rgb)) < 1e-9


@pytest.mark.parametrize("hcl, xyz", [
    ((2 / 3, 1, 0), (-0.5, -S3, 0)),
    ((0, 0, 1), (0, 0, 1)),
    ((1 / 3, 1, 0), (-0.5, S3, 0)),
])
def test_hcl_to_bicone(hcl, xyz):
    assert approx_tuple(hcl_to_bicone(HclColour(*hcl)), xyz)


def test_bicone_to_hcl_examples():
    assert approx_tuple(bicone_to_hcl(BiconePoint(0, 0, 1)), (0, 0, 1))
    assert approx_tuple(bicone_to_hcl(BiconePoint(-0.5, -S3, 0)), (2 / 3, 1, 0))


def random_bicone(rng, n):
    z = rng.uniform(-1, 1, n)
    c = rng.uniform(0, 1, n) * (1 - np.abs(z))
    ang = rng.uniform(0, 2 * np.pi, n)
    return np.stack([c * np.cos(ang), c * np.sin(ang), z], -1)


def test_bicone_hcl_round_trip(rng):
    xyz = random_bicone(rng, 5000)
    assert np.max(np.abs(hcl_to_bicone_array(bicone_to_hcl_array(xyz)) - xyz)) < 1e-12


@pytest.mark.parametrize("xyz, mat", [
    ((0, 0, 0), (0, 0, 0)),
    ((0, 0, 1), (H, 0, H)),
    ((-0.5, -S3, 0), (H * S3, -H / 2, -H * S3)),
])
def test_bicone_to_sym2(xyz, mat):
    assert bicone_to_sym2(BiconePoint(*xyz)).as_array() == pytest.approx(mat, abs=1e-15)


def test_sym2_to_bicone_examples():
    assert approx_tuple(sym2_to_bicone(Sym2.identity(H)), (0, 0, 1), abs=1e-15)
    assert approx_tuple(sym2_to_bicone(Sym2(0, 0, 0)), (0, 0, 0))


def test_sym2_bicone_round_trip(rng):
    a = rng.uniform(-5, 5, (5000, 3))
    assert np.max(np.abs(bicone_to_sym2_array(sym2_to_bicone_array(a)) - a)) < 1e-14


finite = st.floats(-3, 3, allow_nan=False)


@given(finite, finite, finite, finite, finite, finite, finite, finite)
def test_matrix_map_is_linear(x1, y1, z1, x2, y2, z2, alpha, beta):
    p, q = np.array([x1, y1, z1]), np.array([x2, y2, z2])
    lhs = bicone_to_sym2_array(alpha * p + beta * q)
    rhs = alpha * bicone_to_sym2_array(p) + beta * bicone_to_sym2_array(q)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_full_chain_identity_on_lattice():
    rgb = lattice()
    mats = bicone_to_sym2_array(hcl_to_bicone_array(rgb_to_hcl_array(rgb)))
    back = hcl_to_rgb_array(bicone_to_hcl_array(sym2_to_bicone_array(mats)))
    assert np.max(np.abs(back - rgb)) < 1e-9


def test_colour_eigenvalues_within_apex_range():
    mats = bicone_to_sym2_array(hcl_to_bicone_array(rgb_to_hcl_array(lattice())))
    lam, mu, _ = eig_array(mats)
    assert lam.max() <= H + 1e-12 and mu.min() >= -H - 1e-12
    assert lam.max() == pytest.approx(H) and mu.min() == pytest.approx(-H)


class TestClamp:
    def test_in_gamut_unchanged(self, rng):
        xyz = random_bicone(rng, 2000)
        assert np.array_equal(clamp_to_bicone_array(xyz), xyz)

    def test_axis_clip(self):
        assert approx_tuple(clamp_to_bicone(BiconePoint(0, 0, 1.2)), (0, 0, 1))

    def test_projection_example(self):
        # orthogonal projection onto c + z = 1 in the (c, z) plane
        assert approx_tuple(clamp_to_bicone(BiconePoint(1.0, 0, 0.5)), (0.75, 0, 0.25))

    def test_far_outside_goes_to_rim_and_keeps_hue(self):
        p = clamp_to_bicone(BiconePoint(0, 3.0, 0.9))
        assert approx_tuple(p, (0, 1, 0))

    def test_idempotent_and_in_gamut(self, rng):
        pts = rng.uniform(-3, 3, (5000, 3))
        once = clamp_to_bicone_array(pts)
        assert np.array_equal(clamp_to_bicone_array(once), once)
        assert all(BiconePoint(*p).in_gamut() for p in once)
        hue_before = np.arctan2(pts[:, 1], pts[:, 0])
        hue_after = np.arctan2(once[:, 1], once[:, 0])
        moved = np.hypot(once[:, 0], once[:, 1]) > 1e-12
        assert np.allclose(hue_before[moved], hue_after[moved])

    def test_brute_force_nearest_point(self, rng):
        # dense sampling of the (c, z) boundary as an oracle
        t = np.linspace(0, 1, 200001)
        boundary = np.concatenate([np.stack([1 - t, t], -1), np.stack([1 - t, -t], -1)])
        for c, z in rng.uniform([0, -0.95], [2.5, 0.95], (50, 2)):
            if c <= 1 - abs(z):
                continue
            got = clamp_to_bicone_array(np.array([c, 0.0, z]))
            d = np.hypot(boundary[:, 0] - c, boundary[:, 1] - z)
            best = boundary[np.argmin(d)]
            assert got[[0, 2]] == pytest.approx(best, abs=1e-5)
