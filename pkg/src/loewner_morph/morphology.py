"""Sliding-window morphology on matrix fields and scalar channels.

Matrix fields are float arrays of shape ``(H, W, 3)`` holding packed
symmetric matrices (see :mod:`loewner_morph.sym2`).  Structuring-element cells
that fall outside the image are skipped, so every neighbourhood is the
structuring element intersected with the image domain.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .suprema import SupMethod

THREADS_ENV = "LOEWNER_MORPH_THREADS"

# rows of output pixels handled per block; bounds the gathered stack size
_BLOCK_PIXELS = 4096


@dataclass(frozen=True)
class StructuringElement:
    """Boolean mask with an anchor and optional additive offsets.

    Offsets only apply to the scalar operators :func:`grey_dilate` and
    :func:`grey_erode`.
    """

    mask: np.ndarray
    anchor: tuple = None
    offsets: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim != 2 or mask.size == 0:
            raise ValueError("structuring element mask must be a non-empty 2-D array")
        if not mask.any():
            raise ValueError("structuring element needs at least one active cell")
        anchor = self.anchor
        if anchor is None:
            anchor = (mask.shape[0] // 2, mask.shape[1] // 2)
        anchor = (int(anchor[0]), int(anchor[1]))
        if not (0 <= anchor[0] < mask.shape[0] and 0 <= anchor[1] < mask.shape[1]):
            raise ValueError(f"anchor {anchor} outside mask of shape {mask.shape}")
        offsets = self.offsets
        if offsets is not None:
            offsets = np.asarray(offsets, dtype=float)
            if offsets.shape != mask.shape:
                raise ValueError("offsets must have the same shape as the mask")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def square(cls, size: int) -> "StructuringElement":
        """Flat ``size x size`` square centred on its middle pixel."""
        if size < 1 or size % 2 == 0:
            raise ValueError(f"square size must be odd and >= 1, got {size}")
        return cls(np.ones((size, size), dtype=bool))

    @classmethod
    def from_text(cls, text: str) -> "StructuringElement":
        """Parse a grid of ``0``/``1`` characters.

        The anchor is marked by ``A`` (active cell) or ``a`` (inactive cell);
        without a marker the centre is used.  Blank lines and ``#`` comments
        are ignored, whitespace inside rows is optional.
        """
        rows, anchor = [], None
        for line in text.splitlines():
            line = line.split("#", 1)[0].replace(" ", "").replace("\t", "")
            if not line:
                continue
            row = []
            for col, ch in enumerate(line):
                if ch in "Aa":
                    if anchor is not None:
                        raise ValueError("more than one anchor marker")
                    anchor = (len(rows), col)
                if ch not in "01Aa":
                    raise ValueError(f"unexpected character {ch!r} in mask")
                row.append(ch in "1A")
            rows.append(row)
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("mask rows must be non-empty and of equal length")
        return cls(np.array(rows, dtype=bool), anchor)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "StructuringElement":
        return cls.from_text(Path(path).read_text())

    @property
    def is_flat(self) -> bool:
        return self.offsets is None

    def displacements(self) -> np.ndarray:
        """``(n, 2)`` integer offsets of the active cells relative to the anchor."""
        rows, cols = np.nonzero(self.mask)
        return np.stack([rows - self.anchor[0], cols - self.anchor[1]], axis=1)

    def weights(self) -> np.ndarray:
        if self.offsets is None:
            return np.zeros(int(self.mask.sum()))
        return self.offsets[self.mask]


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1").strip() or "1"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def gather_neighbourhoods(img: np.ndarray, se: StructuringElement, reflect: bool,
                          rows: slice = slice(None), return_valid: bool = False):
    """Stack the neighbourhood of every pixel in ``rows``.

    ``reflect=True`` collects ``img[x - u]`` (dilation), otherwise
    ``img[x + u]`` (erosion).  Cells outside the image are replaced by the
    first in-domain cell of the same neighbourhood, which leaves any
    idempotent aggregate unchanged.  Returns shape ``(h, W, n) + img.shape[2:]``
    and, with ``return_valid``, the ``(h, W, n)`` mask of in-domain cells.
    """
    height, width = img.shape[:2]
    disp = se.displacements()
    if reflect:
        disp = -disp
    r = np.arange(height)[rows]
    c = np.arange(width)
    src_r = r[:, None, None] + disp[None, None, :, 0]
    src_c = c[None, :, None] + disp[None, None, :, 1]
    valid = (src_r >= 0) & (src_r < height) & (src_c >= 0) & (src_c < width)
    valid = np.broadcast_to(valid, (r.size, width, disp.shape[0]))
    if not np.all(valid.any(axis=-1)):
        raise ValueError("structuring element leaves a pixel with an empty neighbourhood")
    first = np.argmax(valid, axis=-1)
    src_r = np.broadcast_to(src_r, valid.shape)
    src_c = np.broadcast_to(src_c, valid.shape)
    fill_r = np.take_along_axis(src_r, first[..., None], -1)
    fill_c = np.take_along_axis(src_c, first[..., None], -1)
    src_r = np.where(valid, src_r, fill_r)
    src_c = np.where(valid, src_c, fill_c)
    if return_valid:
        return img[src_r, src_c], valid
    return img[src_r, src_c]


def _sliding(img: np.ndarray, se: StructuringElement, reflect: bool, reducer) -> np.ndarray:
    height, width = img.shape[:2]
    step = max(1, _BLOCK_PIXELS // max(width, 1))
    blocks = [slice(i, min(i + step, height)) for i in range(0, height, step)]

    def run(block):
        return reducer(*gather_neighbourhoods(img, se, reflect, block, return_valid=True))

    threads = _thread_count()
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    return np.concatenate(parts, axis=0)


def _check_field(img) -> np.ndarray:
    img = np.asarray(img, dtype=float)
    if img.ndim != 3 or img.shape[2] != 3 or img.shape[0] == 0 or img.shape[1] == 0:
        raise ValueError(f"matrix field must have shape (H, W, 3), got {img.shape}")
    return img


def _check_flat(se: StructuringElement):
    if not se.is_flat:
        raise ValueError("matrix-valued morphology supports flat structuring elements only")


def _method(method) -> SupMethod:
    if isinstance(method, SupMethod):
        return method
    return SupMethod.parse(method)


def dilate(img, se: StructuringElement, method="les") -> np.ndarray:
    """Matrix dilation: supremum of ``img[x - u]`` over the structuring element."""
    img = _check_field(img)
    _check_flat(se)
    return _sliding(img, se, True, _method(method).sup_stack)


def erode(img, se: StructuringElement, method="les") -> np.ndarray:
    """Matrix erosion: infimum of ``img[x + u]`` over the structuring element."""
    img = _check_field(img)
    _check_flat(se)
    return _sliding(img, se, False, _method(method).inf_stack)


def opening(img, se: StructuringElement, method="les") -> np.ndarray:
    return dilate(erode(img, se, method), se, method)


def closing(img, se: StructuringElement, method="les") -> np.ndarray:
    return erode(dilate(img, se, method), se, method)


# ---------------------------------------------------------------------------
# scalar channels


def _shifted(channel: np.ndarray, se: StructuringElement, sign: int, fill: float):
    # layer k holds f(x + sign*u_k) - sign*b(u_k); cells outside the image get `fill`
    if channel.ndim != 2:
        raise ValueError(f"expected a 2-D channel, got shape {channel.shape}")
    height, width = channel.shape
    layers = []
    for (dr, dc), w in zip(se.displacements(), se.weights()):
        dr, dc = sign * dr, sign * dc
        out = np.full(channel.shape, fill)
        r0, r1 = max(0, -dr), min(height, height - dr)
        c0, c1 = max(0, -dc), min(width, width - dc)
        if r0 < r1 and c0 < c1:
            out[r0:r1, c0:c1] = channel[r0 + dr:r1 + dr, c0 + dc:c1 + dc] - sign * w
        layers.append(out)
    return np.stack(layers)


def grey_dilate(channel, se: StructuringElement) -> np.ndarray:
    """``max_u f(x - u) + b(u)`` with out-of-image ``u`` skipped."""
    channel = np.asarray(channel, dtype=float)
    out = np.max(_shifted(channel, se, -1, -np.inf), axis=0)
    if not np.all(np.isfinite(out)):
        raise ValueError("structuring element leaves a pixel with an empty neighbourhood")
    return out


def grey_erode(channel, se: StructuringElement) -> np.ndarray:
    """``min_u f(x + u) - b(u)`` with out-of-image ``u`` skipped."""
    channel = np.asarray(channel, dtype=float)
    out = np.min(_shifted(channel, se, 1, np.inf), axis=0)
    if not np.all(np.isfinite(out)):
        raise ValueError("structuring element leaves a pixel with an empty neighbourhood")
    return out


def _per_channel(rgb, se, op):
    rgb = np.asarray(rgb)
    if rgb.ndim != 3:
        raise ValueError(f"expected an (H, W, C) image, got shape {rgb.shape}")
    out = np.stack([op(rgb[..., k], se) for k in range(rgb.shape[2])], axis=-1)
    return out.astype(rgb.dtype) if np.issubdtype(rgb.dtype, np.integer) and se.is_flat else out


def channelwise_dilate(rgb, se: StructuringElement) -> np.ndarray:
    """Independent :func:`grey_dilate` of every colour channel."""
    return _per_channel(rgb, se, grey_dilate)


def channelwise_erode(rgb, se: StructuringElement) -> np.ndarray:
    return _per_channel(rgb, se, grey_erode)
