"""Image comparison metrics used by the experiments."""
from __future__ import annotations

import numpy as np

from .imageio import check_rgb8
from .morphology import StructuringElement, gather_neighbourhoods
from .suprema import les_spectrum_stack


def _same_shape(a, b):
    a, b = check_rgb8(a), check_rgb8(b)
    if a.shape != b.shape:
        raise ValueError(f"image dimensions differ: {a.shape[:2]} vs {b.shape[:2]}")
    return a.astype(np.int32), b.astype(np.int32)


def channel_abs_diff(a, b) -> tuple:
    """Absolute per-channel differences ``(|dr|, |dg|, |db|)`` as uint8 images."""
    a, b = _same_shape(a, b)
    diff = np.abs(a - b).astype(np.uint8)
    return tuple(diff[..., k] for k in range(3))


def frobenius_error_sum(a, b) -> float:
    """Sum over channels of the Frobenius norm of the channel difference (0-255 scale)."""
    a, b = _same_shape(a, b)
    diff = (a - b).astype(float)
    return float(sum(np.sqrt(np.sum(diff[..., k] ** 2)) for k in range(3)))


def mean_top_eigen_gap(field, se: StructuringElement) -> float:
    """Mean over pixels of ``lam1 - mu`` from the log-exp supremum of each neighbourhood."""
    field = np.asarray(field, dtype=float)
    lam1, mu, _ = les_spectrum_stack(gather_neighbourhoods(field, se, reflect=True))
    return float(np.mean(lam1 - mu))


def max_entry_error(a, b) -> float:
    """Largest absolute difference between two matrix fields."""
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))
