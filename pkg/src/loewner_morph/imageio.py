"""Reading, writing and synthesising 8-bit RGB images.

Images are ``uint8`` arrays of shape ``(H, W, 3)``, row-major with the origin
at the top-left.  Binary PPM (P6, maxval 255) is handled here directly; PNG
goes through Pillow.
"""
from __future__ import annotations

import re
from importlib import resources
from pathlib import Path
from typing import Union

import numpy as np

from .colour import rgb_to_sym2_array, sym2_to_rgb_array
from .exceptions import ImageFormatError

PathLike = Union[str, Path]

BLUE = (0, 0, 255)
GREEN = (0, 255, 0)
WHITE = (255, 255, 255)
BLACK = (0, 0, 0)

_PPM_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def check_rgb8(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"RGB image must have shape (H, W, 3), got {img.shape}")
    if img.shape[0] == 0 or img.shape[1] == 0:
        raise ValueError("image must not be empty")
    if img.dtype != np.uint8:
        raise ValueError(f"RGB image must be uint8, got {img.dtype}")
    return img


def _parse_ppm(data: bytes, path) -> np.ndarray:
    if not data.startswith(b"P6"):
        raise ImageFormatError(f"{path}: not a binary PPM (P6) file")
    pos = 2
    header = []
    for _ in range(3):
        match = _PPM_TOKEN.match(data, pos)
        if match is None:
            raise ImageFormatError(f"{path}: truncated PPM header")
        header.append(match.group(1))
        pos = match.end()
    try:
        width, height, maxval = (int(tok) for tok in header)
    except ValueError:
        raise ImageFormatError(f"{path}: malformed PPM header {header!r}") from None
    if maxval != 255:
        raise ImageFormatError(f"{path}: only maxval 255 is supported, got {maxval}")
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"{path}: invalid dimensions {width}x{height}")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise ImageFormatError(f"{path}: truncated PPM header")
    pos += 1
    size = 3 * width * height
    payload = data[pos:pos + size]
    if len(payload) != size:
        raise ImageFormatError(f"{path}: truncated pixel data ({len(payload)} of {size} bytes)")
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3).copy()


def _read_png(path) -> np.ndarray:
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            if im.mode not in ("RGB", "RGBA"):
                raise ImageFormatError(f"{path}: unsupported PNG mode {im.mode} (need 8-bit RGB or RGBA)")
            im.load()
            arr = np.asarray(im)
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"{path}: {exc}") from None
    except (SyntaxError, ValueError) as exc:
        raise ImageFormatError(f"{path}: corrupt PNG ({exc})") from None
    return np.ascontiguousarray(arr[..., :3], dtype=np.uint8)


def read_image(path: PathLike) -> np.ndarray:
    """Decode a P6 PPM or 8-bit PNG file into an ``(H, W, 3)`` uint8 array.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    ImageFormatError
        For unsupported formats, bad headers or truncated data.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(b"P6"):
        return _parse_ppm(data, path)
    if data.startswith(b"\x89PNG\r\n\x1a\n"):
        return _read_png(path)
    raise ImageFormatError(f"{path}: unsupported image format (expected P6 PPM or PNG)")


def encode_ppm(img) -> bytes:
    img = check_rgb8(img)
    height, width = img.shape[:2]
    return b"P6\n%d %d\n255\n" % (width, height) + np.ascontiguousarray(img).tobytes()


def write_image(img, path: PathLike) -> None:
    """Write ``img`` as PNG if ``path`` ends in ``.png``, else as P6 PPM."""
    img = check_rgb8(img)
    path = Path(path)
    if path.suffix.lower() == ".png":
        from PIL import Image

        Image.fromarray(np.ascontiguousarray(img)).save(path, format="PNG")
    else:
        path.write_bytes(encode_ppm(img))


def synth_halves(width: int, height: int, left=BLUE, right=GREEN) -> np.ndarray:
    """Image whose left half is ``left`` and right half ``right``."""
    if width <= 0 or height <= 0:
        raise ValueError("width and height must be positive")
    if width % 2:
        raise ValueError(f"width must be even, got {width}")
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:, : width // 2] = left
    img[:, width // 2:] = right
    return img


def quantise(values) -> np.ndarray:
    """Map [0, 1] floats to bytes, rounding halves away from zero.

    Values are snapped to a 1e-9 grid first: suprema often land exactly on
    half tonal steps, and round-off of a few ulps must not decide the byte.
    """
    scaled = np.clip(np.asarray(values, dtype=float) * 255.0, 0.0, 255.0)
    return np.floor(np.round(scaled, 9) + 0.5).astype(np.uint8)


def to_matrix_image(img) -> np.ndarray:
    """Embed an 8-bit RGB image as an ``(H, W, 3)`` field of packed matrices."""
    img = check_rgb8(img)
    return rgb_to_sym2_array(img / 255.0)


def from_matrix_image(field) -> np.ndarray:
    """Clamp a matrix field to the colour bi-cone and quantise it to bytes."""
    return quantise(sym2_to_rgb_array(np.asarray(field, dtype=float)))


def bundled_image_path() -> Path:
    """Path of the bundled 64x64 natural test image."""
    return Path(str(resources.files("loewner_morph") / "data" / "natural64.ppm"))


def load_bundled_image() -> np.ndarray:
    return read_image(bundled_image_path())
