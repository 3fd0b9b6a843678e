"""Truncated Fock (x) spin matrices.

Basis ordering is interleaved: ``index(n, s) = 2 n + s`` with ``s = 0`` the
ground and ``s = 1`` the excited state of the two-level system.  Hamiltonians
are stored as lower band arrays, ``band[d, j] = M[j + d, j]``, which keeps
truncations up to a few thousand Fock levels cheap; :meth:`toarray` gives the
dense matrix when needed.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import ModelParams, squeeze_parameter

__all__ = [
    "ORDERING",
    "BasisSpec",
    "TruncatedOperator",
    "annihilation",
    "sigma_plus",
    "build_h0",
    "build_h_eta",
    "gauge_to_real",
    "gauge_vector",
    "build_squeeze",
    "SqueezeResidual",
    "verify_squeeze_identity",
    "write_matrix",
    "read_matrix",
]

ORDERING = "interleaved"


@dataclass(frozen=True)
class BasisSpec:
    n_max: int
    ordering: str = ORDERING

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")
        object.__setattr__(self, "n_max", int(self.n_max))
        if self.ordering != ORDERING:
            raise ValueError(f"unsupported ordering {self.ordering!r}")

    @property
    def dim(self):
        return 2 * (self.n_max + 1)

    def index(self, n, s):
        return 2 * n + s


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Square matrix on a truncated Fock (x) spin basis.

    Exactly one of ``band`` (lower band storage of a Hermitian matrix) and
    ``dense`` is set.
    """

    basis: BasisSpec
    hermitian: bool
    band: np.ndarray | None = None
    dense: np.ndarray | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if (self.band is None) == (self.dense is None):
            raise ValueError("give exactly one of band or dense")
        arr = self.band if self.band is not None else self.dense
        arr.setflags(write=False)
        n = arr.shape[-1]
        if n != self.basis.dim or (self.dense is not None and arr.shape != (n, n)):
            raise ValueError("matrix shape does not match the basis")
        if self.band is not None and not self.hermitian:
            raise ValueError("band storage is only used for Hermitian matrices")

    @property
    def dim(self):
        return self.basis.dim

    @property
    def n_max(self):
        return self.basis.n_max

    @property
    def is_real(self):
        arr = self.band if self.band is not None else self.dense
        return not np.iscomplexobj(arr)

    @property
    def bandwidth(self):
        """Half-bandwidth: largest |i - j| with a nonzero entry."""
        if self.band is not None:
            nz = [d for d in range(self.band.shape[0]) if np.any(self.band[d] != 0)]
            return max(nz) if nz else 0
        i, j = np.nonzero(self.dense)
        return int(np.max(np.abs(i - j))) if i.size else 0

    def toarray(self):
        if self.dense is not None:
            return np.array(self.dense)
        n = self.dim
        out = np.zeros((n, n), dtype=self.band.dtype)
        for d in range(self.band.shape[0]):
            v = self.band[d, : n - d]
            idx = np.arange(n - d)
            out[idx + d, idx] = v
            if d:
                out[idx, idx + d] = v.conj()
        return out

    def matvec(self, v):
        if self.dense is not None:
            return self.dense @ v
        n = self.dim
        v = np.asarray(v)
        dtype = np.result_type(self.band.dtype, v.dtype)
        out = self.band[0][:, None] * v if v.ndim == 2 else self.band[0] * v
        out = out.astype(dtype, copy=False)
        for d in range(1, self.band.shape[0]):
            lo = self.band[d, : n - d]
            if v.ndim == 2:
                lo = lo[:, None]
            out[d:] += lo * v[: n - d]
            out[: n - d] += lo.conj() * v[d:]
        return out

    def max_abs(self):
        arr = self.band if self.band is not None else self.dense
        return float(np.max(np.abs(arr))) if arr.size else 0.0


def annihilation(n_max):
    """Truncated bosonic annihilation operator on levels 0..n_max."""
    return np.diag(np.sqrt(np.arange(1.0, n_max + 1)), 1)


def sigma_plus():
    # |e><g| with s = 0 ground, s = 1 excited
    return np.array([[0.0, 0.0], [1.0, 0.0]])


def _jc_band(basis, coupling, counter, drive):
    n = basis.n_max
    dim = basis.dim
    width = 4 if counter else 3
    band = np.zeros((width, dim), dtype=complex)
    m = np.arange(1, n + 1)
    # <m-1,e| H |m,g> = i g sqrt(m); stored at row 2m, column 2m-1
    band[1, 2 * m - 1] = -1j * coupling * np.sqrt(m)
    # drive couples |m-1,s> and |m,s> for both spin states
    k = np.arange(n)
    band[2, 2 * k] = drive * np.sqrt(k + 1)
    band[2, 2 * k + 1] = drive * np.sqrt(k + 1)
    if counter:
        # <k+1,e| H |k,g> = i g eta sqrt(k+1); row 2k+3, column 2k
        band[3, 2 * k] = 1j * coupling * counter * np.sqrt(k + 1)
    return band


def build_h0(params: ModelParams, basis: BasisSpec):
    """Driven JC Hamiltonian i lam (a s+ - a^dag s-) + eps (a + a^dag)."""
    band = _jc_band(basis, params.lam, 0.0, params.eps)
    return TruncatedOperator(basis, True, band=band, label="h0")


def build_h_eta(params: ModelParams, basis: BasisSpec):
    """Counter-rotating Hamiltonian with coupling lam' and drive eps'.

    i lam' [(a + eta a^dag) s+ - (a^dag + eta a) s-] + eps' (a + a^dag).
    The counter-rotating term links index 2n to 2n + 3, so the half-bandwidth
    is 3 whenever eta != 0.
    """
    if params.eta >= 1.0:
        raise ValueError("the scaled coupling diverges at eta = 1")
    if params.eta == 0.0:
        return build_h0(params, basis)
    band = _jc_band(basis, params.lam_prime, params.eta, params.eps_prime)
    return TruncatedOperator(basis, True, band=band, label="h_eta")


def _gauge_phases(basis):
    u = np.ones(basis.dim, dtype=complex)
    u[1::2] = 1j
    return u


def gauge_to_real(op: TruncatedOperator):
    """Conjugate by U|n,e> = i|n,e>; Hamiltonian couplings become real."""
    if not isinstance(op, TruncatedOperator) or op.basis.ordering != ORDERING:
        raise ValueError("gauge_to_real needs an operator on the interleaved basis")
    if op.band is None:
        raise ValueError("gauge_to_real expects a banded Hamiltonian")
    u = _gauge_phases(op.basis)
    n = op.dim
    out = np.zeros(op.band.shape)
    for d in range(op.band.shape[0]):
        # (U^dag M U)[j+d, j] = conj(u[j+d]) M[j+d, j] u[j]
        v = np.conj(u[d:]) * op.band[d, : n - d] * u[: n - d]
        if np.any(np.abs(v.imag) > 1e-15 * max(1.0, np.max(np.abs(v), initial=0.0))):
            raise ValueError("operator is not gauge-real under the JC phase map")
        out[d, : n - d] = v.real
    return TruncatedOperator(op.basis, True, band=out, label=op.label + "_real")


def gauge_vector(vec, basis: BasisSpec):
    """Map eigenvectors of the gauged matrix back to the original basis."""
    u = _gauge_phases(basis)
    vec = np.asarray(vec)
    return u[:, None] * vec if vec.ndim == 2 else u * vec


def build_squeeze(z, basis: BasisSpec, flip_sign=False):
    """Squeeze operator exp[(z/2)(a^2 - a^dag^2)] (x) 1 on the truncated space.

    With this sign S a S^dag = a cosh z + a^dag sinh z, which carries the
    rotating Hamiltonian onto the counter-rotating one.  ``flip_sign`` selects
    the opposite generator and exists only to demonstrate that it fails.
    """
    if abs(z) >= 5:
        raise ValueError(f"|z| must be < 5, got {z!r}")
    a = annihilation(basis.n_max)
    gen = a @ a - a.T @ a.T
    if flip_sign:
        gen = -gen
    s = scipy.linalg.expm(0.5 * z * gen)
    dense = np.kron(s, np.eye(2))
    return TruncatedOperator(basis, False, dense=dense, label="squeeze")


@dataclass(frozen=True)
class SqueezeResidual:
    residual: float
    relative: float
    h_eta_max: float
    interior_levels: int
    n_max: int


def verify_squeeze_identity(params: ModelParams, basis: BasisSpec,
                            interior_fraction=0.5, flip_sign=False):
    """Residual of S H0 S^dag - H_eta on the interior Fock block.

    The interior block keeps Fock levels n < interior_fraction * n_max.
    """
    if not 0 < interior_fraction <= 1:
        raise ValueError("interior_fraction must lie in (0, 1]")
    h_eta = build_h_eta(params, basis)
    hmax = h_eta.max_abs()
    levels = max(1, int(interior_fraction * basis.n_max))
    if params.eta == 0.0:
        return SqueezeResidual(0.0, 0.0, hmax, levels, basis.n_max)
    z = squeeze_parameter(params)
    s = build_squeeze(z, basis, flip_sign=flip_sign).dense
    h0 = build_h0(params, basis).toarray()
    r = s @ h0 @ s.T - h_eta.toarray()
    m = 2 * levels
    res = float(np.max(np.abs(r[:m, :m])))
    return SqueezeResidual(res, res / hmax, hmax, levels, basis.n_max)


def write_matrix(op: TruncatedOperator, path, binary=False):
    """Dump a matrix: header ``dim n_max ordering=interleaved`` then entries.

    Entries are row-major (re, im) pairs, one matrix row per text line, or
    little-endian float64 pairs after the header line in binary mode.
    """
    m = op.toarray().astype(complex)
    header = f"{op.dim} {op.n_max} ordering={op.basis.ordering}\n"
    if binary:
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            fh.write(m.view(np.float64).astype("<f8").tobytes())
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header)
        for row in m.view(np.float64):
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def read_matrix(path):
    """Read a matrix written by :func:`write_matrix`; returns (matrix, BasisSpec)."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        body = fh.read()
    dim, n_max = int(header[0]), int(header[1])
    ordering = header[2].split("=", 1)[1]
    basis = BasisSpec(n_max, ordering)
    if basis.dim != dim:
        raise ValueError("header dim does not match n_max")
    try:
        text = body.decode("ascii")
        vals = np.loadtxt(io.StringIO(text), ndmin=2)
        flat = vals.reshape(dim, 2 * dim)
    except (UnicodeDecodeError, ValueError):
        flat = np.frombuffer(body, dtype="<f8").reshape(dim, 2 * dim)
    m = flat[:, 0::2] + 1j * flat[:, 1::2]
    return m, basis
