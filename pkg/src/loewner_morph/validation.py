"""Input validation helpers shared by the estimators and the CLI."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .imageio import check_rgb8
from .morphology import StructuringElement
from .suprema import SupMethod

CHANNELWISE = "channelwise"

__all__ = [
    "CHANNELWISE",
    "check_matrix_field",
    "check_method",
    "check_rgb8",
    "check_structuring_element",
]


def check_matrix_field(field) -> np.ndarray:
    """Return ``field`` as a finite float array of shape ``(H, W, 3)``."""
    field = np.asarray(field, dtype=float)
    if field.ndim != 3 or field.shape[2] != 3:
        raise ValueError(f"matrix field must have shape (H, W, 3), got {field.shape}")
    if field.shape[0] == 0 or field.shape[1] == 0:
        raise ValueError("matrix field must not be empty")
    if not np.all(np.isfinite(field)):
        raise ValueError("matrix field contains NaN or infinite entries")
    return field


def check_structuring_element(se) -> StructuringElement:
    """Accept a :class:`StructuringElement`, ``"square:k"`` or ``"mask:<path>"``."""
    if isinstance(se, StructuringElement):
        return se
    if isinstance(se, int):
        return StructuringElement.square(se)
    if not isinstance(se, str):
        raise TypeError(f"cannot interpret {se!r} as a structuring element")
    kind, _, arg = se.partition(":")
    if kind == "square":
        try:
            size = int(arg)
        except ValueError:
            raise ValueError(f"bad square size in {se!r}") from None
        return StructuringElement.square(size)
    if kind == "mask":
        if not arg:
            raise ValueError("mask: needs a file path")
        return StructuringElement.from_file(Path(arg))
    raise ValueError(f"unknown structuring element {se!r}; use square:<k> or mask:<path>")


def check_method(method, allow_channelwise: bool = False):
    """Return a :class:`SupMethod`, or ``"channelwise"`` where that is allowed."""
    if isinstance(method, SupMethod):
        return method
    if method == CHANNELWISE:
        if not allow_channelwise:
            raise ValueError("channel-wise processing only applies to RGB images")
        return CHANNELWISE
    return SupMethod.parse(str(method))
