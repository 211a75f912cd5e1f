"""Regenerate src/loewner_morph/data/natural64.ppm.

Source: the "coffee" photograph shipped with scikit-image (CC0, courtesy of
Pikolo Espresso Bar), centre-cropped to a square and downsampled to 64x64
with a Lanczos filter.
"""
from pathlib import Path

import numpy as np
import skimage.data
from PIL import Image

from loewner_morph.imageio import write_image

OUT = Path(__file__).resolve().parents[1] / "src" / "loewner_morph" / "data" / "natural64.ppm"


def main():
    im = Image.fromarray(skimage.data.coffee())
    w, h = im.size
    s = min(w, h)
    box = ((w - s) // 2, (h - s) // 2, (w - s) // 2 + s, (h - s) // 2 + s)
    small = im.crop(box).resize((64, 64), Image.LANCZOS).convert("RGB")
    write_image(np.asarray(small), OUT)
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
