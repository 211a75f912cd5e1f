"""Closed-form linear algebra for symmetric 2x2 matrices.

A symmetric matrix ``[[a11, a12], [a12, a22]]`` is stored either as a
:class:`Sym2` value or, for vectorised work on whole images, packed along the
last axis of an array as ``(..., 3) = (a11, a12, a22)``.  Every function with
an ``_array`` suffix works on the packed layout and broadcasts over leading
axes; the scalar functions are thin wrappers around them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .exceptions import DomainError

#: Absolute tolerance below which two eigenvalues are treated as equal.
EIGENVALUE_TIE_TOL = 1e-9

#: Smallest eigenvalue accepted by :func:`log_spd`.
LOG_DOMAIN_TOL = 1e-300


@dataclass(frozen=True)
class Sym2:
    """Symmetric real 2x2 matrix ``[[a11, a12], [a12, a22]]``."""

    a11: float
    a12: float
    a22: float

    def __post_init__(self):
        for name in ("a11", "a12", "a22"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"Sym2.{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, arr) -> "Sym2":
        """Build from a packed ``(3,)`` array or a full ``(2, 2)`` matrix."""
        arr = np.asarray(arr, dtype=float)
        if arr.shape == (2, 2):
            if arr[0, 1] != arr[1, 0]:
                raise ValueError("matrix is not symmetric")
            return cls(arr[0, 0], arr[0, 1], arr[1, 1])
        if arr.shape == (3,):
            return cls(arr[0], arr[1], arr[2])
        raise ValueError(f"expected shape (3,) or (2, 2), got {arr.shape}")

    @classmethod
    def identity(cls, scale: float = 1.0) -> "Sym2":
        return cls(scale, 0.0, scale)

    @classmethod
    def diag(cls, d1: float, d2: float) -> "Sym2":
        return cls(d1, 0.0, d2)

    def as_array(self) -> np.ndarray:
        """Packed ``(a11, a12, a22)`` representation."""
        return np.array([self.a11, self.a12, self.a22])

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    @property
    def trace(self) -> float:
        return self.a11 + self.a22

    def __add__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.a11 + other.a11, self.a12 + other.a12, self.a22 + other.a22)

    def __sub__(self, other: "Sym2") -> "Sym2":
        return Sym2(self.a11 - other.a11, self.a12 - other.a12, self.a22 - other.a22)

    def __neg__(self) -> "Sym2":
        return Sym2(-self.a11, -self.a12, -self.a22)

    def __mul__(self, scalar: float) -> "Sym2":
        return Sym2(scalar * self.a11, scalar * self.a12, scalar * self.a22)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigen-representation ``lam * u u^T + mu * v v^T`` of a :class:`Sym2`.

    ``u = (cos phi, sin phi)`` is the eigenvector of the larger eigenvalue
    ``lam`` and ``v = (-sin phi, cos phi)`` that of ``mu``.
    """

    lam: float
    mu: float
    phi: float

    def __post_init__(self):
        if self.lam < self.mu:
            raise ValueError(f"expected lam >= mu, got lam={self.lam}, mu={self.mu}")

    @property
    def u(self) -> np.ndarray:
        return np.array([math.cos(self.phi), math.sin(self.phi)])

    @property
    def v(self) -> np.ndarray:
        return np.array([-math.sin(self.phi), math.cos(self.phi)])


SymLike = Union[Sym2, Sequence[float], np.ndarray]


def as_packed(m) -> np.ndarray:
    """Return ``m`` as a float array whose last axis holds ``(a11, a12, a22)``.

    Accepts a :class:`Sym2`, an iterable of :class:`Sym2` or anything numpy
    can turn into an array with a trailing axis of length 3.
    """
    if isinstance(m, Sym2):
        return m.as_array()
    if isinstance(m, np.ndarray):
        arr = m.astype(float, copy=False)
    else:
        items = list(m) if isinstance(m, Iterable) else [m]
        if items and all(isinstance(x, Sym2) for x in items):
            arr = np.array([x.as_array() for x in items])
        else:
            arr = np.asarray(items, dtype=float)
    if arr.shape[-1:] != (3,):
        raise ValueError(f"packed symmetric matrices need a trailing axis of 3, got {arr.shape}")
    return arr


# ---------------------------------------------------------------------------
# vectorised kernels


def eig_array(a: np.ndarray):
    """Eigenvalues and eigenvector angle of packed matrices.

    Parameters
    ----------
    a : ndarray, shape (..., 3)
        Packed symmetric matrices.

    Returns
    -------
    lam, mu, phi : ndarray, shape (...)
        Larger and smaller eigenvalue and the angle in ``(-pi/2, pi/2]`` of
        the eigenvector belonging to ``lam``.  Isotropic matrices get
        ``phi = 0``.
    """
    a = np.asarray(a, dtype=float)
    a11, a12, a22 = a[..., 0], a[..., 1], a[..., 2]
    half_diff = 0.5 * (a11 - a22)
    mean = 0.5 * (a11 + a22)
    radius = np.hypot(half_diff, a12)
    phi = 0.5 * np.arctan2(a12, half_diff)
    phi = np.where(radius == 0.0, 0.0, phi)
    return mean + radius, mean - radius, phi


def compose_array(lam, mu, phi) -> np.ndarray:
    """Inverse of :func:`eig_array`; equal eigenvalues give an exact multiple of I."""
    lam, mu, phi = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (lam, mu, phi)))
    c, s = np.cos(phi), np.sin(phi)
    gap = lam - mu
    return np.stack([mu + gap * c * c, gap * c * s, mu + gap * s * s], axis=-1)


def apply_spectral_array(a: np.ndarray, func) -> np.ndarray:
    """Apply a scalar function to the eigenvalues of packed matrices."""
    lam, mu, phi = eig_array(a)
    return compose_array(func(lam), func(mu), phi)


def min_eig_array(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return 0.5 * (a[..., 0] + a[..., 2]) - np.hypot(0.5 * (a[..., 0] - a[..., 2]), a[..., 1])


def loewner_leq_array(a, b, tol: float = 0.0) -> np.ndarray:
    """Elementwise ``a <=_L b`` for packed matrices (broadcasting)."""
    return min_eig_array(np.asarray(b, dtype=float) - np.asarray(a, dtype=float)) >= -tol


def matmul_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full 2x2 product of packed matrices, returned as ``(..., 2, 2)``."""
    return to_full(a) @ to_full(b)


def to_full(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return np.stack([np.stack([a[..., 0], a[..., 1]], -1),
                     np.stack([a[..., 1], a[..., 2]], -1)], -2)


# ---------------------------------------------------------------------------
# scalar API


def eigendecompose(m: Sym2) -> SpectralDecomp:
    """Closed-form eigendecomposition of a symmetric 2x2 matrix.

    The eigenvector angle is ``atan2(2 a12, a11 - a22) / 2`` which lies in
    ``(-pi/2, pi/2]`` and is set to 0 for multiples of the identity.

    >>> eigendecompose(Sym2(0.0, 1.0, 0.0))
    SpectralDecomp(lam=1.0, mu=-1.0, phi=0.7853981633974483)
    """
    lam, mu, phi = eig_array(as_packed(m))
    return SpectralDecomp(float(lam), float(mu), float(phi))


def compose(d: SpectralDecomp) -> Sym2:
    """Rebuild ``lam u u^T + mu v v^T``."""
    return Sym2.from_array(compose_array(d.lam, d.mu, d.phi))


def exp_scaled(m: Sym2, t: float) -> Sym2:
    """Matrix exponential of ``t * m``.

    Raises
    ------
    OverflowError
        If ``t`` times an eigenvalue exceeds the double range.  Shift the
        input first, as :func:`loewner_morph.suprema.les_approx` does.
    """
    if not math.isfinite(t):
        raise ValueError(f"scale must be finite, got {t!r}")
    with np.errstate(over="ignore", invalid="ignore"):
        out = apply_spectral_array(as_packed(m), lambda x: np.exp(t * x))
    if not np.all(np.isfinite(out)):
        raise OverflowError(f"exp overflows for t={t} and eigenvalues of {m}")
    return Sym2.from_array(out)


def log_spd(m: Sym2) -> Sym2:
    """Principal logarithm of a symmetric positive definite matrix."""
    lam, mu, phi = eig_array(as_packed(m))
    if mu <= LOG_DOMAIN_TOL:
        raise DomainError(f"log_spd needs a positive definite matrix, smallest eigenvalue is {float(mu)}")
    return Sym2.from_array(compose_array(np.log(lam), np.log(mu), phi))


def power_psd(m: Sym2, p: int) -> Sym2:
    """Integer matrix power computed through the eigenvalues."""
    return Sym2.from_array(apply_spectral_array(as_packed(m), lambda x: x ** p))


def loewner_leq(a: Sym2, b: Sym2, tol: float = 0.0) -> bool:
    """True iff ``b - a`` is positive semidefinite up to ``tol``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return bool(loewner_leq_array(as_packed(a), as_packed(b), tol))
