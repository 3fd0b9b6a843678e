"""Symmetric and Hermitian eigendecomposition plus truncation convergence.

Dense input goes through Householder tridiagonalization; band input (or a
dense matrix that turns out to be narrow-banded) goes through Givens band
reduction.  Both end in an implicit QL sweep with Wilkinson-type shifts.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .fock import TruncatedOperator, gauge_to_real, gauge_vector

__all__ = [
    "EigenConvergenceError",
    "Spectrum",
    "ConvergenceCertificate",
    "householder_tridiagonal",
    "eig_tridiagonal",
    "eig_banded",
    "eig_real_symmetric",
    "eig_hermitian",
    "eig_operator",
    "nearest_zero",
    "edge_weights",
    "converged_spectrum",
    "N_START",
    "N_CAP",
]

N_START = 64
N_CAP = 4096
QL_MAX_ITER = 30
CLUSTER_TOL = 1e-10
EDGE_FRACTION = 0.25


class EigenConvergenceError(RuntimeError):
    def __init__(self, index):
        super().__init__(f"QL iteration cap reached at eigenvalue index {index}")
        self.index = index


@dataclass
class Spectrum:
    """Sorted eigenvalues with optional eigenvector columns.

    ``trusted_count`` counts the low-|eigenvalue| levels certified by a
    convergence study; a plain decomposition trusts every level.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None
    n_max: int | None = None
    trusted_count: int = 0
    residual_norm: float = float("nan")

    def __len__(self):
        return len(self.eigenvalues)


@dataclass
class ConvergenceCertificate:
    n_max_sequence: list = field(default_factory=list)
    drifts: list = field(default_factory=list)
    tolerance: float = 0.0
    converged: bool = False
    levels: np.ndarray = field(default_factory=lambda: np.zeros(0))
    trusted: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    edge_weights: np.ndarray | None = None

    @property
    def trusted_count(self):
        return int(np.count_nonzero(self.trusted))

    @property
    def last_drift(self):
        return self.drifts[-1] if self.drifts else np.full(len(self.levels), np.inf)

    def trusted_levels(self):
        return self.levels[self.trusted]


def _check_symmetric(m, tol=1e-12):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if m.size and np.max(np.abs(m - m.conj().T)) > tol * scale:
        kind = "Hermitian" if np.iscomplexobj(m) else "symmetric"
        raise ValueError(f"matrix is not {kind}")


def _scale_exponent(x):
    """Binary exponent of max |x|; ldexp by its negative gives unit size."""
    big = np.max(np.abs(x), initial=0.0)
    if big == 0.0 or not np.isfinite(big):
        return 0
    return int(np.frexp(big)[1])


def _ldexp(x, k):
    if np.iscomplexobj(x):
        return np.ldexp(x.real, k) + 1j * np.ldexp(x.imag, k)
    return np.ldexp(x, k)


def _norm(x):
    # scaled 2-norm: squares of tiny entries would underflow into subnormals
    big = np.max(np.abs(x), initial=0.0)
    if big == 0.0 or not np.isfinite(big):
        return float(big)
    return float(big * np.linalg.norm(x / big))


def householder_tridiagonal(m):
    """Reduce a real symmetric or complex Hermitian matrix to real tridiagonal.

    Returns (d, e, Q) with M = Q T Q^H, T real symmetric tridiagonal with
    diagonal d and off-diagonal e.
    """
    a = np.array(m, dtype=complex if np.iscomplexobj(m) else float)
    shift = _scale_exponent(a)
    a = _ldexp(a, -shift)
    n = a.shape[0]
    q = np.eye(n, dtype=a.dtype)
    for k in range(n - 2):
        x = a[k + 1:, k]
        if np.max(np.abs(x), initial=0.0) <= _kernels._SMALL:
            # negligible at unit scale; flushing keeps subnormals out
            a[k + 1:, k] = 0.0
            a[k, k + 1:] = 0.0
            continue
        nx = _norm(x)
        # any unit phase avoids cancellation once x[0] is negligible, and
        # dividing by a subnormal x[0] would overflow
        x0 = abs(x[0])
        phase = x[0] / x0 if x0 > _kernels._SMALL * nx else 1.0
        alpha = -phase * nx
        v = x.copy()
        v[0] -= alpha
        nv = _norm(v)
        if nv == 0.0:
            continue
        v /= nv
        sub = a[k + 1:, k + 1:]
        p = sub @ v
        kk = np.vdot(v, p).real
        w = 2.0 * p - 2.0 * kk * v
        sub -= np.outer(v, w.conj()) + np.outer(w, v.conj())
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
        a[k + 1, k] = alpha
        a[k, k + 1] = np.conj(alpha)
        qv = q[:, k + 1:] @ v
        q[:, k + 1:] -= 2.0 * np.outer(qv, v.conj())
    d = np.real(np.diag(a)).copy()
    sub = np.diag(a, -1).copy()
    e = np.zeros(n)
    if np.iscomplexobj(a) and n > 1:
        # diagonal phase rotation makes the off-diagonal real and nonnegative
        ph = np.ones(n, dtype=complex)
        for k in range(n - 1):
            mag = abs(sub[k])
            if mag <= _kernels._SMALL:
                mag = 0.0
            ph[k + 1] = ph[k] * (sub[k] / mag if mag else 1.0)
            e[k] = mag
        q = q * ph[None, :]
    elif n > 1:
        e[: n - 1] = sub.real
    return np.ldexp(d, shift), np.ldexp(e, shift), q


def eig_tridiagonal(d, e, z=None):
    """Eigenvalues (and rotated ``z`` columns) of a real symmetric tridiagonal."""
    d = np.array(d, dtype=float)
    n = len(d)
    ee = np.zeros(n)
    ee[: n - 1] = np.asarray(e, dtype=float)[: n - 1]
    want = z is not None
    if want and np.iscomplexobj(z):
        # rotations are real: apply them to the real and imaginary parts
        zr = np.ascontiguousarray(z.real)
        zi = np.ascontiguousarray(z.imag)
        zz = np.vstack([zr, zi])
    elif want:
        zz = np.ascontiguousarray(z, dtype=float)
    else:
        zz = np.zeros((1, 1))
    # power-of-two scaling to unit size is exact and keeps the iteration
    # clear of underflow
    shift = max(_scale_exponent(d), _scale_exponent(ee))
    d = np.ldexp(d, -shift)
    ee = np.ldexp(ee, -shift)
    bad = _kernels.tridiagonal_ql(d, ee, zz, want, QL_MAX_ITER)
    if bad >= 0:
        raise EigenConvergenceError(int(bad))
    d = np.ldexp(d, shift)
    order = np.argsort(d, kind="stable")
    d = d[order]
    if not want:
        return d, None
    if np.iscomplexobj(z):
        vec = zz[:n] + 1j * zz[n:]
    else:
        vec = zz
    return d, vec[:, order]


def _residual(apply, vals, vecs):
    if vecs is None or not len(vals):
        return float("nan")
    r = apply(vecs) - vecs * vals[None, :]
    return float(np.max(np.linalg.norm(r, axis=0)))


def _band_apply(band):
    n = band.shape[1]

    def apply(v):
        out = band[0][:, None] * v
        for dd in range(1, band.shape[0]):
            lo = band[dd, : n - dd][:, None]
            out[dd:] += lo * v[: n - dd]
            out[: n - dd] += lo * v[dd:]
        return out

    return apply


def eig_banded(band, want_vectors=False):
    """Decompose a real symmetric band matrix given in lower band storage."""
    band = np.ascontiguousarray(band, dtype=float)
    if band.ndim != 2:
        raise ValueError("band storage must be two-dimensional")
    shift = _scale_exponent(band)
    d, e, q = _kernels.band_to_tridiagonal(np.ldexp(band, -shift), want_vectors)
    vals, vecs = eig_tridiagonal(np.ldexp(d, shift), np.ldexp(e, shift),
                                 q if want_vectors else None)
    res = _residual(_band_apply(band), vals, vecs)
    return Spectrum(vals, vecs, None, len(vals), res)


def _dense_bandwidth(m):
    n = m.shape[0]
    for b in range(n - 1, 0, -1):
        if np.any(np.diagonal(m, -b) != 0):
            return b
    return 0


def _to_band(m, b):
    n = m.shape[0]
    band = np.zeros((b + 1, n), dtype=m.dtype)
    for d in range(b + 1):
        band[d, : n - d] = np.diagonal(m, -d)
    return band


def eig_real_symmetric(matrix, want_vectors=False):
    """Full eigendecomposition of a real symmetric matrix.

    Narrow-banded input (half-bandwidth below a tenth of the dimension) is
    routed to band reduction; everything else to Householder reduction.
    """
    m = np.asarray(matrix)
    if np.iscomplexobj(m):
        if m.size and np.max(np.abs(m.imag)) > 0:
            raise ValueError("matrix has complex entries; use eig_hermitian")
        m = m.real
    m = np.asarray(m, dtype=float)
    _check_symmetric(m)
    n = m.shape[0]
    if n == 0:
        return Spectrum(np.zeros(0), np.zeros((0, 0)) if want_vectors else None, None, 0)
    b = _dense_bandwidth(m)
    if n > 16 and b < max(2, n // 10):
        return eig_banded(_to_band(m, b), want_vectors)
    d, e, q = householder_tridiagonal(m)
    vals, vecs = eig_tridiagonal(d, e, q if want_vectors else None)
    res = _residual(lambda v: m @ v, vals, vecs)
    return Spectrum(vals, vecs, None, n, res)


def eig_hermitian(matrix, want_vectors=False):
    """Eigendecomposition of a complex Hermitian matrix or Hamiltonian operator.

    A :class:`TruncatedOperator` Hamiltonian is made real by the JC phase map
    and sent down the band path; a plain array takes the complex Householder
    path (or the real path when it has no imaginary part).
    """
    if isinstance(matrix, TruncatedOperator):
        return eig_operator(matrix, want_vectors)
    m = np.asarray(matrix)
    if not np.iscomplexobj(m) or (m.size and not np.any(m.imag)):
        _check_symmetric(m)
        return eig_real_symmetric(m.real, want_vectors)
    _check_symmetric(m)
    d, e, q = householder_tridiagonal(m)
    vals, vecs = eig_tridiagonal(d, e, q if want_vectors else None)
    res = _residual(lambda v: m @ v, vals, vecs)
    return Spectrum(vals, vecs, None, m.shape[0], res)


def eig_operator(op: TruncatedOperator, want_vectors=False):
    """Decompose a banded Hamiltonian via its real gauge."""
    if op.band is None:
        return eig_hermitian(op.dense, want_vectors)
    real = op if op.is_real else gauge_to_real(op)
    spec = eig_banded(real.band, want_vectors)
    if want_vectors and not op.is_real:
        spec.eigenvectors = gauge_vector(spec.eigenvectors, op.basis)
    spec.n_max = op.n_max
    return spec


def nearest_zero(values, k, tie_tol=CLUSTER_TOL):
    """Indices of the k values nearest zero, ties toward the negative value.

    Values whose moduli agree within ``tie_tol`` (relative to max(1, |v|))
    count as tied, so a +-pair straddling the cut is resolved the same way
    in every truncation.
    """
    values = np.asarray(values)
    order = np.lexsort((values, np.abs(values)))
    mags = np.abs(values[order])
    out = []
    i = 0
    while i < len(order) and len(out) < k:
        j = i + 1
        while j < len(order) and mags[j] - mags[i] <= tie_tol * max(1.0, mags[i]):
            j += 1
        group = order[i:j]
        group = group[np.argsort(values[group], kind="stable")]
        out.extend(group[: k - len(out)].tolist())
        i = j
    return np.array(out, dtype=int)


def edge_weights(values, vectors, fraction=EDGE_FRACTION, tie_tol=CLUSTER_TOL):
    """Weight of each eigenvector on the top ``fraction`` of Fock levels.

    Rows follow the interleaved (n, spin) ordering.  Within clusters of
    degenerate values the vectors are first rotated by an SVD of their edge
    block, so a truncation-edge state and a physical state sharing an
    eigenvalue come apart instead of mixing.

    Returns
    -------
    weights : ndarray
    vectors : ndarray
        Copy of ``vectors`` with degenerate clusters rotated.
    """
    values = np.asarray(values)
    vectors = np.array(vectors, copy=True)
    n_levels = vectors.shape[0] // 2
    cut = 2 * (n_levels - int(round(fraction * n_levels)))
    order = np.argsort(values, kind="stable")
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and values[order[j]] - values[order[i]] <= tie_tol * max(1.0, abs(values[order[i]])):
            j += 1
        if j - i > 1:
            g = order[i:j]
            _, _, vh = np.linalg.svd(vectors[cut:, g])
            vectors[:, g] = vectors[:, g] @ vh.conj().T
        i = j
    weights = np.sum(np.abs(vectors[cut:]) ** 2, axis=0)
    return weights, vectors


def _drift(prev, cur):
    # both arrays sorted ascending, so degenerate clusters are compared as
    # matched sorted sublists
    return np.abs(prev - cur)


def converged_spectrum(build, k_levels, tol, n_start=N_START, n_cap=N_CAP,
                       want_vectors=False, edge_tol=None):
    """Double the truncation until the k levels nearest zero stop drifting.

    Parameters
    ----------
    build : callable
        ``build(n_max)`` returns a Hamiltonian :class:`TruncatedOperator`.
    k_levels : int
        Number of levels nearest zero to track.
    tol : float
        Drift tolerance between successive truncations.
    edge_tol : float, optional
        When set and the study converged, levels whose eigenvector puts more
        than this weight on the top quarter of Fock levels are untrusted.  A
        hard cutoff leaves such states pinned at the same value in every
        truncation, so drift alone cannot catch them.

    Returns
    -------
    spectrum : Spectrum
        Decomposition at the last truncation tried; ``trusted_count`` is the
        number of tracked levels whose last drift is below ``tol``.
    cert : ConvergenceCertificate
        ``converged`` is False when the cap is hit first, which is the
        expected outcome at or above critical drive.
    """
    if k_levels < 1:
        raise ValueError("k_levels must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n_start < 1 or n_cap < n_start:
        raise ValueError("need 1 <= n_start <= n_cap")
    cert = ConvergenceCertificate(tolerance=tol)
    prev = None
    n = n_start
    while True:
        spec = eig_operator(build(n), False)
        idx = nearest_zero(spec.eigenvalues, k_levels)
        levels = np.sort(spec.eigenvalues[idx])
        cert.n_max_sequence.append(n)
        if prev is not None and len(prev) == len(levels):
            drift = _drift(prev, levels)
            cert.drifts.append(drift)
            cert.converged = bool(np.all(drift < tol))
        prev = levels
        if cert.converged or 2 * n > n_cap:
            break
        n *= 2
    cert.levels = prev
    cert.trusted = cert.last_drift < tol
    check_edge = edge_tol is not None and cert.converged
    if want_vectors or check_edge:
        op = build(n)
        spec = eig_operator(op, True)
        idx = nearest_zero(spec.eigenvalues, k_levels)
        idx = idx[np.argsort(spec.eigenvalues[idx], kind="stable")]
        if check_edge:
            w, spec.eigenvectors[:, idx] = edge_weights(spec.eigenvalues[idx],
                                                        spec.eigenvectors[:, idx])
            cert.edge_weights = w
            cert.trusted = cert.trusted & (w < edge_tol)
        sel = idx[cert.trusted]
        if sel.size:
            vecs = spec.eigenvectors[:, sel]
            r = op.matvec(vecs) - vecs * spec.eigenvalues[sel][None, :]
            spec.residual_norm = float(np.max(np.linalg.norm(r, axis=0)))
        if not want_vectors:
            spec.eigenvectors = None
    spec.n_max = n
    spec.trusted_count = cert.trusted_count
    return spec, cert
