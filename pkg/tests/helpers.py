"""Random generators and independent oracles shared by the test modules."""
import numpy as np

from loewner_morph.sym2 import eig_array


def nondegenerate_multiset(rng, gap=0.1, angle=0.1, sizes=(2, 5)):
    """Random multiset whose spectral structure is well separated.

    The three largest eigenvalues over all items are pairwise at least
    ``gap`` apart, and every item other than the one holding the top
    eigenvalue has eigendirections at least ``angle`` radians away from both
    eigendirections of that item.
    """
    while True:
        n = int(rng.integers(sizes[0], sizes[1] + 1))
        xs = rng.uniform(-1, 1, (n, 3))
        lam, mu, phi = eig_array(xs)
        ordered = np.sort(np.concatenate([lam, mu]))[::-1]
        if ordered[0] - ordered[1] < gap or ordered[1] - ordered[2] < gap:
            continue
        top = int(np.argmax(lam))
        diff = np.mod(phi - phi[top], np.pi / 2)
        dist = np.minimum(diff, np.pi / 2 - diff)
        dist = np.delete(dist, top)
        if dist.size and dist.min() < angle:
            continue
        return xs


def minimax_grid(xs, step=1e-3):
    """Dense grid search for ``min_q max_i h_i + |q - p_i|`` (half the minimal trace).

    The grid covers the bounding box of the ``p_i``, which contains the
    optimum because moving ``q`` towards that box never increases a distance.
    """
    xs = np.asarray(xs, dtype=float)
    p = np.stack([0.5 * (xs[:, 0] - xs[:, 2]), xs[:, 1]], -1)
    h = 0.5 * (xs[:, 0] + xs[:, 2])
    lo, hi = p.min(0), p.max(0)
    gx = np.arange(lo[0], hi[0] + step, step)[:, None]
    gy = np.arange(lo[1], hi[1] + step, step)[None, :]
    worst = np.full((gx.size, gy.size), -np.inf)
    for (px, py), hv in zip(p, h):
        np.maximum(worst, hv + np.hypot(gx - px, gy - py), out=worst)
    return float(worst.min())


def brute_max_filter(channel, mask, anchor, reflect=True, minimum=False):
    """Direct nested-loop max/min filter with domain restriction."""
    height, width = channel.shape
    out = np.empty_like(channel, dtype=float)
    for r in range(height):
        for c in range(width):
            vals = []
            for i in range(mask.shape[0]):
                for j in range(mask.shape[1]):
                    if not mask[i, j]:
                        continue
                    du, dv = i - anchor[0], j - anchor[1]
                    rr, cc = (r - du, c - dv) if reflect else (r + du, c + dv)
                    if 0 <= rr < height and 0 <= cc < width:
                        vals.append(channel[rr, cc])
            out[r, c] = min(vals) if minimum else max(vals)
    return out



def mp_les(xs, m, dps=50):
    """``(1/m) log sum exp(m X_i)`` evaluated with mpmath.

    The sum is written as rank-one terms ``w u u^T`` and its determinant is
    taken with the Cauchy-Binet identity, so nothing cancels and any ``m``
    works; ``m = 1e40`` makes this an oracle for the exact supremum.
    """
    import mpmath

    with mpmath.workdps(dps):
        terms = []
        for a11, a12, a22 in np.asarray(xs, dtype=float).tolist():
            vals, vecs = mpmath.eigsy(mpmath.matrix([[a11, a12], [a12, a22]]))
            for k in range(2):
                terms.append((mpmath.exp(m * vals[k]), vecs[0, k], vecs[1, k]))
        g11 = mpmath.fsum(w * x * x for w, x, _ in terms)
        g12 = mpmath.fsum(w * x * y for w, x, y in terms)
        g22 = mpmath.fsum(w * y * y for w, _, y in terms)
        det = mpmath.fsum(wa * wb * (xa * yb - ya * xb) ** 2
                          for i, (wa, xa, ya) in enumerate(terms) for wb, xb, yb in terms[i + 1:])
        tr = g11 + g22
        big = tr / 2 + mpmath.sqrt(max(tr * tr / 4 - det, 0))
        small = det / big
        phi = mpmath.atan2(2 * g12, g11 - g22) / 2
        lam, mu = mpmath.log(big) / m, mpmath.log(small) / m
        c, s_ = mpmath.cos(phi), mpmath.sin(phi)
        out = (mu + (lam - mu) * c * c, (lam - mu) * c * s_, mu + (lam - mu) * s_ * s_)
        return np.array([float(v) for v in out])
