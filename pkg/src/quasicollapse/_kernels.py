"""Compiled inner loops for the eigensolver (numba, no Python objects)."""
import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps
# entries below this are dropped; callers scale the matrix to unit norm,
# so the perturbation is far below rounding and no subnormal enters a rotation
_SMALL = float(np.sqrt(np.finfo(np.float64).tiny))


@njit(cache=True, nogil=True)
def _get(w, i, j):
    if i < j:
        i, j = j, i
    d = i - j
    if d >= w.shape[0]:
        return 0.0
    return w[d, j]


@njit(cache=True, nogil=True)
def _set(w, i, j, v):
    if i < j:
        i, j = j, i
    d = i - j
    if d < w.shape[0]:
        w[d, j] = v


@njit(cache=True, nogil=True)
def _rotate(w, p, c, s, n, reach, q_mat, want_q):
    # similarity by the plane rotation on rows/columns (p, p+1)
    q = p + 1
    lo = max(0, p - reach)
    hi = min(n - 1, q + reach)
    for k in range(lo, hi + 1):
        if k == p or k == q:
            continue
        apk = _get(w, p, k)
        aqk = _get(w, q, k)
        if apk == 0.0 and aqk == 0.0:
            continue
        _set(w, p, k, c * apk + s * aqk)
        _set(w, q, k, -s * apk + c * aqk)
    app = w[0, p]
    aqq = w[0, q]
    apq = w[1, p]
    cs = c * s
    w[0, p] = c * c * app + 2.0 * cs * apq + s * s * aqq
    w[0, q] = s * s * app - 2.0 * cs * apq + c * c * aqq
    w[1, p] = cs * (aqq - app) + (c * c - s * s) * apq
    if want_q:
        for r in range(q_mat.shape[0]):
            x = q_mat[r, p]
            y = q_mat[r, q]
            q_mat[r, p] = c * x + s * y
            q_mat[r, q] = -s * x + c * y


@njit(cache=True, nogil=True)
def band_to_tridiagonal(band, want_q):
    """Reduce a real symmetric band matrix to tridiagonal form.

    ``band[d, j] = A[j + d, j]`` for d = 0..b.  Returns (diag, offdiag, Q)
    with A = Q T Q^T.  Givens rotations annihilate each outer element and
    chase the resulting bulge off the end of the matrix.  Expects entries
    scaled to about unit size; smaller elements than ``_SMALL`` are flushed.
    """
    b = band.shape[0] - 1
    n = band.shape[1]
    w = np.zeros((b + 2, n))
    w[: b + 1, :] = band
    if want_q:
        q_mat = np.eye(n)
    else:
        q_mat = np.zeros((1, 1))
    reach = b + 1
    if b >= 2:
        for j in range(n - 2):
            for d in range(min(b, n - 1 - j), 1, -1):
                row = j + d
                x = _get(w, row - 1, j)
                y = _get(w, row, j)
                if abs(y) <= _SMALL:
                    _set(w, row, j, 0.0)
                    continue
                r = np.hypot(x, y)
                c = x / r
                s = y / r
                _rotate(w, row - 1, c, s, n, reach, q_mat, want_q)
                _set(w, row, j, 0.0)
                _set(w, row - 1, j, r)
                # chase the bulge at (row + b, row - 1)
                col = row - 1
                r_b = col + b + 1
                while r_b < n:
                    x = _get(w, r_b - 1, col)
                    y = _get(w, r_b, col)
                    if abs(y) <= _SMALL:
                        _set(w, r_b, col, 0.0)
                        break
                    r = np.hypot(x, y)
                    c = x / r
                    s = y / r
                    _rotate(w, r_b - 1, c, s, n, reach, q_mat, want_q)
                    _set(w, r_b, col, 0.0)
                    _set(w, r_b - 1, col, r)
                    col = r_b - 1
                    r_b = col + b + 1
    d_out = w[0, :].copy()
    e_out = np.zeros(n)
    if n > 1 and b >= 1:
        e_out[: n - 1] = w[1, : n - 1]
    return d_out, e_out, q_mat


@njit(cache=True, nogil=True)
def tridiagonal_ql(d, e, z, want_z, max_iter):
    """Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal.

    ``d`` holds the diagonal, ``e[i]`` the coupling between i and i+1
    (``e[n-1]`` ignored).  Both are overwritten; eigenvalues end up in ``d``.
    Expects entries scaled to about unit size.
    When ``want_z`` the rotations are accumulated into the columns of ``z``.
    Returns -1 on success or the index of the eigenvalue that failed.
    """
    n = d.shape[0]
    if n > 0:
        e[n - 1] = 0.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd or abs(e[m]) <= _SMALL:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            if g >= 0:
                g = d[m] - d[l] + e[l] / (g + r)
            else:
                g = d[m] - d[l] + e[l] / (g - r)
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                bb = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * bb
                p = s * r
                d[i + 1] = g + p
                g = c * r - bb
                if want_z:
                    for k in range(z.shape[0]):
                        f = z[k, i + 1]
                        z[k, i + 1] = s * z[k, i] + c * f
                        z[k, i] = c * z[k, i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1
