"""RGB <-> HCL <-> bi-cone <-> symmetric matrix bijection.

Colours travel through four stations::

    RGB in [0, 1]^3  ->  (hue, chroma, rescaled luminance)
                     ->  Cartesian point (x, y, z) in the bi-cone
                     ->  (sqrt(2)/2) [[z - y, x], [x, z + y]]

Black and white are the apexes ``z = -1`` and ``z = +1`` of the bi-cone and
become ``-/+ (sqrt(2)/2) I``.  The array functions act on the trailing axis of
length 3 so that whole images convert in one call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sym2 import Sym2

SQRT2 = math.sqrt(2.0)
HALF_SQRT2 = SQRT2 / 2.0

#: Chroma below this value counts as achromatic when recovering the hue.
ACHROMATIC_TOL = 1e-12

CLAMP_SLACK = 1e-12


@dataclass(frozen=True)
class RgbColour:
    r: float
    g: float
    b: float

    def __post_init__(self):
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"channel {name}={v} outside [0, 1]")

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=float)


@dataclass(frozen=True)
class HclColour:
    """Hue fraction in [0, 1), chroma and luminance rescaled to [-1, 1]."""

    h: float
    c: float
    l_tilde: float

    def as_array(self) -> np.ndarray:
        return np.array([self.h, self.c, self.l_tilde], dtype=float)


@dataclass(frozen=True)
class BiconePoint:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def in_gamut(self, tol: float = 1e-9) -> bool:
        return abs(self.z) <= 1.0 + tol and math.hypot(self.x, self.y) <= 1.0 - abs(self.z) + tol


# ---------------------------------------------------------------------------
# array kernels (trailing axis of length 3)


def rgb_to_hcl_array(rgb) -> np.ndarray:
    rgb = np.asarray(rgb, dtype=float)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    big = np.maximum(np.maximum(r, g), b)
    small = np.minimum(np.minimum(r, g), b)
    chroma = big - small
    safe = np.where(chroma > 0, 6.0 * chroma, 1.0)
    hue = np.select(
        [big == r, big == g],
        [(g - b) / safe, (b - r) / safe + 1.0 / 3.0],
        (r - g) / safe + 2.0 / 3.0,
    )
    hue = np.mod(hue, 1.0)
    hue = np.where(chroma > 0, hue, 0.0)
    return np.stack([hue, chroma, big + small - 1.0], axis=-1)


def hcl_to_rgb_array(hcl) -> np.ndarray:
    hcl = np.asarray(hcl, dtype=float)
    h, c, lt = hcl[..., 0], hcl[..., 1], hcl[..., 2]
    lum = 0.5 * (lt + 1.0)
    half_c = 0.5 * c

    # hexagonal hue reconstruction, n = 0, 8, 4 select r, g, b
    def channel(n):
        k = np.mod(n + 12.0 * h, 12.0)
        return lum - half_c * np.clip(np.minimum(k - 3.0, 9.0 - k), -1.0, 1.0)

    return np.stack([channel(0.0), channel(8.0), channel(4.0)], axis=-1)


def hcl_to_bicone_array(hcl) -> np.ndarray:
    hcl = np.asarray(hcl, dtype=float)
    angle = 2.0 * np.pi * hcl[..., 0]
    return np.stack([hcl[..., 1] * np.cos(angle), hcl[..., 1] * np.sin(angle), hcl[..., 2]], axis=-1)


def bicone_to_hcl_array(xyz) -> np.ndarray:
    xyz = np.asarray(xyz, dtype=float)
    x, y = xyz[..., 0], xyz[..., 1]
    chroma = np.hypot(x, y)
    hue = np.mod(np.arctan2(y, x) / (2.0 * np.pi), 1.0)
    # mod can return exactly 1.0 for tiny negative angles
    hue = np.where(hue >= 1.0, 0.0, hue)
    hue = np.where(chroma < ACHROMATIC_TOL, 0.0, hue)
    return np.stack([hue, chroma, xyz[..., 2]], axis=-1)


def bicone_to_sym2_array(xyz) -> np.ndarray:
    xyz = np.asarray(xyz, dtype=float)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    return HALF_SQRT2 * np.stack([z - y, x, z + y], axis=-1)


def sym2_to_bicone_array(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a11, a12, a22 = a[..., 0], a[..., 1], a[..., 2]
    return np.stack([SQRT2 * a12, (a22 - a11) / SQRT2, (a11 + a22) / SQRT2], axis=-1)


def _project_segment(c, z, end_c, end_z):
    # nearest point to (c, z) on the segment (1, 0) -- (end_c, end_z)
    dc, dz = end_c - 1.0, end_z
    t = ((c - 1.0) * dc + z * dz) / (dc * dc + dz * dz)
    t = np.clip(t, 0.0, 1.0)
    return 1.0 + t * dc, t * dz


def clamp_to_bicone_array(xyz) -> np.ndarray:
    """Project points onto the bi-cone, keeping the hue.

    ``z`` is clipped to [-1, 1] first; points whose chroma still exceeds
    ``1 - |z|`` move to the nearest point of the cone surface in their
    (chroma, z) half-plane.
    """
    xyz = np.asarray(xyz, dtype=float)
    x, y = xyz[..., 0], xyz[..., 1]
    z = np.clip(xyz[..., 2], -1.0, 1.0)
    c = np.hypot(x, y)
    # slack keeps the projection idempotent despite round-off on the surface
    outside = c > 1.0 - np.abs(z) + CLAMP_SLACK

    cu, zu = _project_segment(c, z, 0.0, 1.0)
    cl, zl = _project_segment(c, z, 0.0, -1.0)
    upper_closer = (cu - c) ** 2 + (zu - z) ** 2 <= (cl - c) ** 2 + (zl - z) ** 2
    new_c = np.where(upper_closer, cu, cl)
    new_z = np.where(upper_closer, zu, zl)

    scale = np.where(outside & (c > 0), new_c / np.where(c > 0, c, 1.0), 1.0)
    return np.stack([x * scale, y * scale, np.where(outside, new_z, z)], axis=-1)


def rgb_to_sym2_array(rgb) -> np.ndarray:
    """Full forward chain from RGB in [0, 1] to packed matrices."""
    return bicone_to_sym2_array(hcl_to_bicone_array(rgb_to_hcl_array(rgb)))


def sym2_to_rgb_array(a, clamp: bool = True) -> np.ndarray:
    """Full inverse chain; out-of-gamut matrices are clamped to the bi-cone."""
    xyz = sym2_to_bicone_array(a)
    if clamp:
        xyz = clamp_to_bicone_array(xyz)
    rgb = hcl_to_rgb_array(bicone_to_hcl_array(xyz))
    return np.clip(rgb, 0.0, 1.0) if clamp else rgb


# ---------------------------------------------------------------------------
# scalar API


def rgb_to_hcl(p: RgbColour) -> HclColour:
    return HclColour(*rgb_to_hcl_array(p.as_array()).tolist())


def hcl_to_rgb(p: HclColour) -> RgbColour:
    out = np.clip(hcl_to_rgb_array(p.as_array()), 0.0, 1.0)
    return RgbColour(*out.tolist())


def hcl_to_bicone(p: HclColour) -> BiconePoint:
    return BiconePoint(*hcl_to_bicone_array(p.as_array()).tolist())


def bicone_to_hcl(p: BiconePoint) -> HclColour:
    return HclColour(*bicone_to_hcl_array(p.as_array()).tolist())


def bicone_to_sym2(p: BiconePoint) -> Sym2:
    return Sym2.from_array(bicone_to_sym2_array(p.as_array()))


def sym2_to_bicone(m: Sym2) -> BiconePoint:
    return BiconePoint(*sym2_to_bicone_array(m.as_array()).tolist())


def clamp_to_bicone(p: BiconePoint) -> BiconePoint:
    return BiconePoint(*clamp_to_bicone_array(p.as_array()).tolist())


def rgb_to_sym2(p: RgbColour) -> Sym2:
    return bicone_to_sym2(hcl_to_bicone(rgb_to_hcl(p)))


def sym2_to_rgb(m: Sym2) -> RgbColour:
    return RgbColour(*sym2_to_rgb_array(m.as_array()).tolist())
