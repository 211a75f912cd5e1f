"""scikit-learn compatible transformers.

The transformers are stateless apart from validated parameters, so ``fit``
only checks the configuration.  They plug into :class:`sklearn.pipeline.Pipeline`
and support ``get_params``/``set_params`` and cloning.

>>> from sklearn.pipeline import make_pipeline
>>> pipe = make_pipeline(ColourMatrixEmbedding(), LoewnerMorphology("dilate", "square:3"))
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import morphology
from .imageio import from_matrix_image, to_matrix_image
from .validation import (
    CHANNELWISE,
    check_matrix_field,
    check_method,
    check_rgb8,
    check_structuring_element,
)

OPERATIONS = ("dilate", "erode", "open", "close")


class ColourMatrixEmbedding(TransformerMixin, BaseEstimator):
    """Map 8-bit RGB images to fields of symmetric 2x2 matrices and back."""

    def fit(self, X, y=None):
        check_rgb8(X)
        self.is_fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self)
        return to_matrix_image(X)

    def inverse_transform(self, X):
        """Clamp to the colour bi-cone and quantise back to uint8 RGB."""
        check_is_fitted(self)
        return from_matrix_image(check_matrix_field(X))


def _validate_common(est):
    if est.operation not in OPERATIONS:
        raise ValueError(f"operation must be one of {OPERATIONS}, got {est.operation!r}")
    if int(est.iterations) != est.iterations or est.iterations < 1:
        raise ValueError(f"iterations must be a positive integer, got {est.iterations!r}")
    return check_structuring_element(est.se)


class LoewnerMorphology(TransformerMixin, BaseEstimator):
    """Morphological operator on matrix fields.

    Parameters
    ----------
    operation : {"dilate", "erode", "open", "close"}
    se : StructuringElement or str
        ``"square:k"`` or ``"mask:<path>"``.
    method : str or SupMethod
        ``"les"``, ``"les-approx:<m>"`` or ``"trace"``.
    iterations : int
        Number of times the operation is applied.
    """

    def __init__(self, operation="dilate", se="square:3", method="les", iterations=1):
        self.operation = operation
        self.se = se
        self.method = method
        self.iterations = iterations

    def fit(self, X=None, y=None):
        self.se_ = _validate_common(self)
        self.method_ = check_method(self.method)
        if X is not None:
            check_matrix_field(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "se_")
        out = check_matrix_field(X)
        op = {"dilate": morphology.dilate, "erode": morphology.erode,
              "open": morphology.opening, "close": morphology.closing}[self.operation]
        for _ in range(int(self.iterations)):
            out = op(out, self.se_, self.method_)
        return out


class ColourMorphology(TransformerMixin, BaseEstimator):
    """Morphology on 8-bit RGB images.

    Matrix methods embed the image, filter the matrix field and export the
    result; ``method="channelwise"`` filters each colour channel on its own.
    """

    def __init__(self, operation="dilate", se="square:3", method="les", iterations=1):
        self.operation = operation
        self.se = se
        self.method = method
        self.iterations = iterations

    def fit(self, X=None, y=None):
        self.se_ = _validate_common(self)
        self.method_ = check_method(self.method, allow_channelwise=True)
        if X is not None:
            check_rgb8(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "se_")
        img = check_rgb8(X)
        if self.method_ == CHANNELWISE:
            return self._channelwise(img)
        inner = LoewnerMorphology(self.operation, self.se_, self.method_, self.iterations).fit()
        return from_matrix_image(inner.transform(to_matrix_image(img)))

    def _channelwise(self, img):
        dil, ero = morphology.channelwise_dilate, morphology.channelwise_erode
        steps = {"dilate": (dil,), "erode": (ero,), "open": (ero, dil), "close": (dil, ero)}
        out = img
        for _ in range(int(self.iterations)):
            for step in steps[self.operation]:
                out = step(out, self.se_)
        return np.asarray(out, dtype=np.uint8)
