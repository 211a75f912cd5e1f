"""Loewner-order suprema and infima of multisets of symmetric 2x2 matrices.

Three aggregation rules are provided:

* ``les_exact`` -- the log-exp supremum, the ``m -> inf`` limit of
  ``(1/m) log sum_i exp(m X_i)``, evaluated in closed form from the spectral
  data of the inputs.  It is transitive: aggregating partial results gives the
  same matrix as aggregating everything at once.
* ``les_approx`` -- the same expression at a finite scale ``m``.
* ``trace_sup`` -- the upper bound of minimal trace.

Every multiset argument may be a sequence of :class:`~loewner_morph.sym2.Sym2`
or an array of packed matrices with shape ``(n, 3)``.  The ``*_stack``
functions take ``(..., n, 3)`` arrays and reduce over the ``n`` axis; image
operators call those directly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .exceptions import DomainError
from .sym2 import (
    EIGENVALUE_TIE_TOL,
    Sym2,
    as_packed,
    compose_array,
    eig_array,
    loewner_leq_array,
    power_psd,
)

#: ``|sin(angle difference)|`` below which two eigendirections are parallel.
PARALLEL_TOL = 1e-9

DEFAULT_SCALE = 1e4


@dataclass(frozen=True)
class SupMethod:
    """Aggregation back-end for matrix morphology.

    ``kind`` is ``"les"`` (exact log-exp supremum), ``"les-approx"`` (finite
    scale ``m``) or ``"trace"``.
    """

    kind: str = "les"
    m: Optional[float] = None

    KINDS = ("les", "les-approx", "trace")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown supremum method {self.kind!r}; expected one of {self.KINDS}")
        if self.kind == "les-approx":
            m = DEFAULT_SCALE if self.m is None else float(self.m)
            if not m > 0:
                raise ValueError(f"scale m must be positive, got {m}")
            object.__setattr__(self, "m", m)
        elif self.m is not None:
            raise ValueError(f"method {self.kind!r} takes no scale")

    @classmethod
    def parse(cls, text: str) -> "SupMethod":
        """Parse ``les``, ``trace``, ``les-approx`` or ``les-approx:<m>``."""
        kind, _, scale = text.strip().partition(":")
        if scale:
            if kind != "les-approx":
                raise ValueError(f"method {kind!r} takes no scale")
            try:
                return cls(kind, float(scale))
            except ValueError as exc:
                raise ValueError(f"bad method specification {text!r}: {exc}") from None
        return cls(kind)

    def __str__(self):
        return f"les-approx:{self.m:g}" if self.kind == "les-approx" else self.kind

    def sup_stack(self, stack: np.ndarray, valid: Optional[np.ndarray] = None) -> np.ndarray:
        """Aggregate over axis -2; ``valid`` marks real items, the rest are padding.

        Padding must repeat a real item of the same multiset.  Only the
        finite-scale supremum counts multiplicities, so only it reads ``valid``.
        """
        if self.kind == "les":
            return les_exact_stack(stack)
        if self.kind == "les-approx":
            return les_approx_stack(stack, self.m, valid)
        return trace_sup_stack(stack)

    def inf_stack(self, stack: np.ndarray, valid: Optional[np.ndarray] = None) -> np.ndarray:
        return -self.sup_stack(-np.asarray(stack, dtype=float), valid)


def _multiset(xs) -> np.ndarray:
    arr = as_packed(xs)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("a non-empty multiset of symmetric matrices is required")
    if not np.all(np.isfinite(arr)):
        raise ValueError("multiset entries must be finite")
    return arr


# ---------------------------------------------------------------------------
# exact log-exp supremum


def _candidates(stack):
    """Eigenvalues of all items with the angle of their eigendirection."""
    lam, mu, phi = eig_array(stack)
    values = np.concatenate([lam, mu], axis=-1)
    angles = np.concatenate([phi, phi + 0.5 * np.pi], axis=-1)
    return lam, mu, phi, values, angles


def les_spectrum_stack(stack: np.ndarray):
    """Spectral data ``(lam1, mu, phi1)`` of the exact log-exp supremum.

    ``lam1`` is the largest eigenvalue over the multiset and ``phi1`` the
    angle of its eigendirection (the first item attaining it wins).  ``mu`` is
    the largest eigenvalue whose eigendirection is not parallel to ``phi1``,
    or ``lam1`` itself when ``lam1`` is attained along two different
    directions.
    """
    stack = np.asarray(stack, dtype=float)
    lam, mu, _, values, angles = _candidates(stack)
    top = np.argmax(lam, axis=-1)
    lam1 = np.take_along_axis(lam, top[..., None], -1)[..., 0]
    phi1 = np.take_along_axis(angles, top[..., None], -1)[..., 0]

    crossing = np.abs(np.sin(angles - phi1[..., None])) >= PARALLEL_TOL
    tied = np.any(crossing & (values >= lam1[..., None] - EIGENVALUE_TIE_TOL), axis=-1)
    best_crossing = np.max(np.where(crossing, values, -np.inf), axis=-1)
    # every item contributes a direction perpendicular to its own top one, so
    # the fallback only triggers for pathological input
    best_crossing = np.where(np.isfinite(best_crossing), best_crossing, np.max(mu, axis=-1))
    mu_sup = np.where(tied, lam1, best_crossing)
    return lam1, mu_sup, phi1


def les_exact_stack(stack: np.ndarray) -> np.ndarray:
    """Vectorised :func:`les_exact` over the second-to-last axis."""
    stack = np.asarray(stack, dtype=float)
    lam1, mu_sup, phi1 = les_spectrum_stack(stack)
    out = compose_array(lam1, mu_sup, phi1)
    # when the supremum is the top item itself, hand back its exact entries
    top = np.argmax(eig_array(stack)[0], axis=-1)
    item = np.take_along_axis(stack, top[..., None, None], -2)[..., 0, :]
    same = mu_sup == eig_array(item)[1]
    return np.where(same[..., None], item, out)


def les_exact(xs) -> Sym2:
    """Exact log-exp supremum of a multiset.

    The result is ``lam1 u1 u1^T + mu v1 v1^T`` where ``lam1`` is the
    largest eigenvalue present, ``u1`` its eigenvector, ``v1`` perpendicular
    to ``u1`` and ``mu`` the largest eigenvalue belonging to a direction not
    parallel to ``u1`` (``mu = lam1`` if ``lam1`` occurs along two directions).

    >>> les_exact([Sym2.diag(1, 0), Sym2.diag(0, 1)])
    Sym2(a11=1.0, a12=0.0, a22=1.0)
    """
    return Sym2.from_array(les_exact_stack(_multiset(xs)))


def les_inf(xs) -> Sym2:
    """Dual infimum ``-les_exact(-xs)``."""
    return Sym2.from_array(-les_exact_stack(-_multiset(xs)))


# ---------------------------------------------------------------------------
# finite-scale log-exp supremum


def les_approx_stack(stack: np.ndarray, m: float, valid: Optional[np.ndarray] = None) -> np.ndarray:
    """Vectorised :func:`les_approx`.

    Works entirely in the log domain.  With every input written as a sum of
    rank-one projectors, ``G = sum_j exp(m (nu_j - lam_max)) w_j w_j^T`` has

    * ``log tr G``  = logsumexp of the weights,
    * ``log det G`` = logsumexp over pairs of ``log a_j + log a_k +
      2 log|sin(theta_j - theta_k)|`` (Cauchy-Binet),

    which yields both eigenvalues of ``G`` without forming ``exp`` of a large
    or tiny number.  The eigendirection comes from the shifted ``G`` itself,
    whose dominant part is always of order one.  Eigendirections closer than
    ``PARALLEL_TOL`` count as parallel, as in :func:`les_exact`.  Items
    where the boolean mask ``valid`` is False get zero weight.
    """
    if not m > 0:
        raise ValueError(f"scale m must be positive, got {m}")
    stack = np.asarray(stack, dtype=float)
    lam, _, _, values, angles = _candidates(stack)
    if valid is not None:
        valid = np.broadcast_to(np.asarray(valid, dtype=bool), lam.shape)
        lam = np.where(valid, lam, -np.inf)
    shift = np.max(lam, axis=-1)
    logw = m * (values - shift[..., None])
    if valid is not None:
        logw = np.where(np.concatenate([valid, valid], axis=-1), logw, -np.inf)

    log_tr = logsumexp(logw, axis=-1)

    k = values.shape[-1]
    ii, jj = np.triu_indices(k, 1)
    sin = np.abs(np.sin(angles[..., ii] - angles[..., jj]))
    # directions parallel up to round-off would otherwise contribute spurious
    # determinant mass of order sin^2 ~ 1e-32
    sin2 = np.where(sin < PARALLEL_TOL, 0.0, sin * sin)
    with np.errstate(divide="ignore"):
        pair_terms = logw[..., ii] + logw[..., jj] + np.log(sin2)
    log_det = logsumexp(pair_terms, axis=-1)

    ratio = np.clip(np.exp(log_det - 2.0 * log_tr + math.log(4.0)), 0.0, 1.0)
    log_big = log_tr + np.log(0.5 * (1.0 + np.sqrt(1.0 - ratio)))
    log_small = log_det - log_big

    weights = np.exp(logw)
    c, s = np.cos(angles), np.sin(angles)
    g11 = np.sum(weights * c * c, axis=-1)
    g12 = np.sum(weights * c * s, axis=-1)
    g22 = np.sum(weights * s * s, axis=-1)
    phi = 0.5 * np.arctan2(2.0 * g12, g11 - g22)
    return compose_array(shift + log_big / m, shift + log_small / m, phi)


def les_approx(xs, m: float = DEFAULT_SCALE) -> Sym2:
    """``(1/m) log sum_i exp(m X_i)`` evaluated without overflow or underflow."""
    return Sym2.from_array(les_approx_stack(_multiset(xs), float(m)))


def les_approx_direct(xs, m: float) -> Sym2:
    """Naive evaluation of ``(1/m) log sum_i exp(m X_i)``.

    Kept as a reference for the unshifted formula.  It overflows once
    ``m`` times an eigenvalue passes about 709.

    Raises
    ------
    OverflowError
        When the exponential leaves the double range.
    DomainError
        When the sum has underflowed to a singular matrix.
    """
    arr = _multiset(xs)
    lam, mu, phi = eig_array(arr)
    with np.errstate(over="ignore", invalid="ignore"):
        total = np.sum(compose_array(np.exp(m * lam), np.exp(m * mu), phi), axis=0)
    if not np.all(np.isfinite(total)):
        raise OverflowError(f"exp(m X) overflows at m={m}")
    big, small, angle = eig_array(total)
    if small <= 0:
        raise DomainError(f"sum of exponentials is singular at m={m}")
    return Sym2.from_array(compose_array(np.log(big) / m, np.log(small) / m, angle))


# ---------------------------------------------------------------------------
# trace supremum
#
# With p(X) = ((a11 - a22) / 2, a12) and h(X) = (a11 + a22) / 2 one has
# Y >=_L X  <=>  h(Y) - h(X) >= |p(Y) - p(X)|.  Minimising the trace of an
# upper bound is therefore the weighted minimax problem
#     min_q max_i h_i + |q - p_i|,
# i.e. the smallest disc containing the discs (p_i, h_i - min h).  Its optimum
# is fixed by at most three of the inputs.


def _plane(stack):
    stack = np.asarray(stack, dtype=float)
    p = np.stack([0.5 * (stack[..., 0] - stack[..., 2]), stack[..., 1]], axis=-1)
    h = 0.5 * (stack[..., 0] + stack[..., 2])
    return p, h


def _from_plane(q, r):
    return np.stack([r + q[..., 0], q[..., 1], r - q[..., 0]], axis=-1)


def _candidate_discs(p, h):
    """All candidate optima supported by 1, 2 or 3 of the given items.

    ``p`` has shape (B, k, 2) and ``h`` shape (B, k).  Returns centres
    (B, C, 2), values (B, C) and a (C, 3) table of the supporting indices
    (padded by repetition); invalid candidates carry ``inf`` values.
    """
    bsz, k = h.shape
    centres, values, supports = [], [], []

    centres.append(p)
    values.append(h)
    supports.extend((i, i, i) for i in range(k))

    if k >= 2:
        ii, jj = (np.array(t) for t in zip(*itertools.combinations(range(k), 2)))
        pi, pj, hi, hj = p[:, ii], p[:, jj], h[:, ii], h[:, jj]
        delta = pj - pi
        dist = np.hypot(delta[..., 0], delta[..., 1])
        val = 0.5 * (dist + hi + hj)
        ok = dist > np.abs(hj - hi)
        frac = np.where(ok, (val - hi) / np.where(dist > 0, dist, 1.0), 0.0)
        centres.append(pi + frac[..., None] * delta)
        values.append(np.where(ok, val, np.inf))
        supports.extend(zip(ii.tolist(), jj.tolist(), jj.tolist()))

    if k >= 3:
        triples = np.array(list(itertools.combinations(range(k), 3)))
        p1, p2, p3 = (p[:, triples[:, t]] for t in range(3))
        h1, h2, h3 = (h[:, triples[:, t]] for t in range(3))
        # |q - p_t| = R - h_t for t = 1..3; differences are linear in (q, R):
        #   2 (p_t - p_1) . q - 2 (h_t - h_1) R = |p_t|^2 - |p_1|^2 - h_t^2 + h_1^2
        d2, d3 = p2 - p1, p3 - p1
        det = d2[..., 0] * d3[..., 1] - d2[..., 1] * d3[..., 0]
        scale = np.maximum(np.abs(d2).max(-1), np.abs(d3).max(-1)) ** 2
        ok = np.abs(det) > 1e-14 * np.maximum(scale, 1e-300)
        sdet = np.where(ok, det, 1.0)
        rhs2 = 0.5 * (np.sum(p2 * p2 - p1 * p1, -1) - h2 * h2 + h1 * h1)
        rhs3 = 0.5 * (np.sum(p3 * p3 - p1 * p1, -1) - h3 * h3 + h1 * h1)
        e2, e3 = h2 - h1, h3 - h1
        # q = a + b R
        a = np.stack([(rhs2 * d3[..., 1] - rhs3 * d2[..., 1]) / sdet,
                      (d2[..., 0] * rhs3 - d3[..., 0] * rhs2) / sdet], -1)
        b = np.stack([(e2 * d3[..., 1] - e3 * d2[..., 1]) / sdet,
                      (d2[..., 0] * e3 - d3[..., 0] * e2) / sdet], -1)
        off = a - p1
        qa = np.sum(b * b, -1) - 1.0
        qb = 2.0 * (np.sum(b * off, -1) + h1)
        qc = np.sum(off * off, -1) - h1 * h1
        hmax = np.maximum(np.maximum(h1, h2), h3)
        for sign in (1.0, -1.0):
            with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
                disc = qb * qb - 4.0 * qa * qc
                root = np.sqrt(np.maximum(disc, 0.0))
                linear = np.abs(qa) < 1e-14
                r = np.where(linear, -qc / np.where(qb != 0, qb, 1.0),
                             (-qb + sign * root) / (2.0 * np.where(linear, 1.0, qa)))
            valid = ok & (disc >= 0) & np.isfinite(r) & (r >= hmax - 1e-12 * (1.0 + np.abs(hmax)))
            if sign < 0:
                valid &= ~linear
            centres.append(np.where(valid[..., None], a + b * r[..., None], 0.0))
            values.append(np.where(valid, r, np.inf))
            supports.extend(map(tuple, triples.tolist()))

    return (np.concatenate(centres, axis=1), np.concatenate(values, axis=1),
            np.array(supports, dtype=np.intp))


def _feasibility_tol(h):
    return 1e-12 * (1.0 + np.max(np.abs(h), axis=-1))


def _solve_small(p, h):
    """Exact minimax over a small set by enumerating support sets.

    Among candidates that cover every item, pick the lowest value and break
    exact ties by the lexicographically smallest centre.
    """
    centres, values, supports = _candidate_discs(p, h)
    tol = _feasibility_tol(h)
    gap = np.hypot(centres[:, :, None, 0] - p[:, None, :, 0],
                   centres[:, :, None, 1] - p[:, None, :, 1]) + h[:, None, :] - values[..., None]
    worst_gap = np.where(np.isfinite(values), np.max(gap, axis=-1), np.inf)
    feasible = worst_gap <= tol[:, None]
    # round-off can leave no candidate inside the tolerance; then take the
    # least violated one
    none = ~np.any(feasible, axis=-1)
    if np.any(none):
        loosest = np.argmin(worst_gap[none], axis=-1)
        feasible[np.flatnonzero(none), loosest] = True
    vals = np.where(feasible, values, np.inf)
    keep = vals == np.min(vals, axis=-1, keepdims=True)
    for axis in (0, 1):
        coord = np.where(keep, centres[..., axis], np.inf)
        keep &= coord == np.min(coord, axis=-1, keepdims=True)
    best = np.argmax(keep, axis=-1)
    rows = np.arange(h.shape[0])
    return centres[rows, best], values[rows, best], supports[best]


def _minimax_enumerate(p, h):
    return _solve_small(p, h)[:2]


def _minimax_exchange(p, h, max_rounds=None):
    """Minimax by support-set exchange.

    Solve on a working set of at most four items (the current support plus
    the worst violator); the optimal value rises strictly each round, so the
    loop visits each support at most once.  Rows that fail to settle within
    ``max_rounds`` are finished by full enumeration.
    """
    bsz, n = h.shape
    if max_rounds is None:
        max_rounds = 4 * n + 8
    rows = np.arange(bsz)
    work = np.repeat(np.argmax(h, axis=-1)[:, None], 4, axis=1)
    q = np.empty((bsz, 2))
    r = np.empty(bsz)
    active = rows
    tol = _feasibility_tol(h)
    for _ in range(max_rounds):
        wp = p[active[:, None], work[active]]
        wh = h[active[:, None], work[active]]
        cq, cr, sup = _solve_small(wp, wh)
        q[active], r[active] = cq, cr
        viol = np.hypot(p[active, :, 0] - cq[:, None, 0], p[active, :, 1] - cq[:, None, 1]) \
            + h[active] - cr[:, None]
        worst = np.argmax(viol, axis=-1)
        bad = viol[np.arange(active.size), worst] > tol[active]
        support_idx = np.take_along_axis(work[active], sup, axis=1)
        work[active] = np.concatenate([support_idx, worst[:, None]], axis=1)
        active = active[bad]
        if active.size == 0:
            return q, r
    fq, fr = _minimax_enumerate(p[active], h[active])
    q[active], r[active] = fq, fr
    return q, r


def trace_sup_stack(stack: np.ndarray) -> np.ndarray:
    """Vectorised :func:`trace_sup` over the second-to-last axis."""
    stack = np.asarray(stack, dtype=float)
    lead = stack.shape[:-2]
    flat = stack.reshape((-1,) + stack.shape[-2:])
    p, h = _plane(flat)
    q, r = _minimax_exchange(p, h)
    return _from_plane(q, r).reshape(lead + (3,))


def trace_sup(xs) -> Sym2:
    """Loewner upper bound of minimal trace.

    >>> trace_sup([Sym2.diag(1, 0), Sym2.diag(0, 1)])
    Sym2(a11=1.0, a12=0.0, a22=1.0)
    """
    return Sym2.from_array(trace_sup_stack(_multiset(xs)[None])[0])


def trace_sup_enumerate(xs) -> Sym2:
    """Trace supremum by full O(n^3) support-set enumeration."""
    p, h = _plane(_multiset(xs)[None])
    q, r = _minimax_enumerate(p, h)
    return Sym2.from_array(_from_plane(q, r)[0])


def trace_inf(xs) -> Sym2:
    """Lower bound of maximal trace, ``-trace_sup(-xs)``."""
    return -trace_sup(-_multiset(xs))


# ---------------------------------------------------------------------------
# diagnostics


def verify_upper_bound(s, xs, tol: float = 0.0) -> bool:
    """True iff ``X <=_L s`` (up to ``tol``) for every item of ``xs``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return bool(np.all(loewner_leq_array(_multiset(xs), as_packed(s), tol)))


def verify_p_power_membership(s, xs, p: int, tol: float = 0.0) -> bool:
    """True iff ``s^p >=_L X^p`` for every item (positive semidefinite input only)."""
    if int(p) != p or p < 1:
        raise ValueError(f"p must be a positive integer, got {p!r}")
    s = Sym2.from_array(as_packed(s))
    items = [Sym2.from_array(x) for x in _multiset(xs)]
    for m in [s, *items]:
        if eig_array(m.as_array())[1] < -tol:
            raise DomainError(f"matrix power needs positive semidefinite input, got {m}")
    sp = power_psd(s, int(p))
    return verify_upper_bound(sp, [power_psd(x, int(p)) for x in items], tol)


def lex_phi(m) -> tuple:
    """Ordered eigenvalue pair ``(lam, mu)`` used for lexicographic comparison."""
    lam, mu, _ = eig_array(as_packed(m))
    return float(lam), float(mu)


def lex_precedes(a: tuple, b: tuple, tol: float = 0.0) -> bool:
    """Lexicographic ``a <= b`` on pairs; ``tol`` widens both comparisons."""
    if a[0] < b[0] - tol:
        return True
    return abs(a[0] - b[0]) <= tol and a[1] <= b[1] + tol
