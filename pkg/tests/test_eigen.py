import numpy as np
import pytest

from quasicollapse.analytic import quasienergy_jc
from quasicollapse.eigen import (
    EigenConvergenceError,
    converged_spectrum,
    eig_banded,
    eig_hermitian,
    eig_real_symmetric,
    eig_operator,
    eig_tridiagonal,
    householder_tridiagonal,
    nearest_zero,
)
from quasicollapse.fock import BasisSpec, build_h0, gauge_to_real
from quasicollapse.model import ModelParams


def _random_symmetric(rng, n):
    a = rng.normal(size=(n, n))
    return a + a.T


def test_two_by_two():
    s = eig_real_symmetric(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(s.eigenvalues, [-1, 1], atol=1e-15)


def test_pauli_y():
    s = eig_hermitian(np.array([[0, 1j], [-1j, 0]]), want_vectors=True)
    assert np.allclose(s.eigenvalues, [-1, 1], atol=1e-15)


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        eig_hermitian(np.diag([1j, -1j]))
    with pytest.raises(ValueError):
        eig_real_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_exact_jc_spectrum():
    op = gauge_to_real(build_h0(ModelParams(1.0, 0.0), BasisSpec(50)))
    ev = eig_real_symmetric(op.toarray()).eigenvalues
    for n in range(1, 41):
        assert np.min(np.abs(ev - np.sqrt(n))) < 1e-10
        assert np.min(np.abs(ev + np.sqrt(n))) < 1e-10


@pytest.mark.parametrize("n", [1, 3, 17, 50])
def test_reconstruction(n):
    m = _random_symmetric(np.random.default_rng(n), n)
    s = eig_real_symmetric(m, want_vectors=True)
    v = s.eigenvectors
    assert np.max(np.abs(v @ np.diag(s.eigenvalues) @ v.T - m)) < 1e-10 * max(1, np.max(np.abs(m)))
    assert np.max(np.abs(v.T @ v - np.eye(n))) < 1e-10


def test_complex_householder_reconstruction():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
    m = a + a.conj().T
    d, e, q = householder_tridiagonal(m)
    t = np.diag(d) + np.diag(e[:-1], 1) + np.diag(e[:-1], -1)
    assert np.max(np.abs(q @ t @ q.conj().T - m)) < 1e-12
    s = eig_hermitian(m, want_vectors=True)
    v = s.eigenvectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(40))) < 1e-10
    assert s.residual_norm < 1e-10 * np.max(np.abs(m)) * 40


def test_hermitian_path_matches_gauge_path():
    op = build_h0(ModelParams(1.0, 0.3), BasisSpec(300))
    dense = eig_hermitian(op.toarray()).eigenvalues
    banded = eig_real_symmetric(gauge_to_real(op).toarray()).eigenvalues
    assert np.max(np.abs(dense - banded)) < 1e-11


def test_band_path_matches_dense_path():
    rng = np.random.default_rng(11)
    n, b = 60, 4
    m = _random_symmetric(rng, n)
    m = np.triu(np.tril(m, b), -b)
    band = np.array([np.concatenate([np.diagonal(m, -d), np.zeros(d)]) for d in range(b + 1)])
    s = eig_banded(band, want_vectors=True)
    assert np.allclose(s.eigenvalues, np.linalg.eigvalsh(m), atol=1e-12)
    assert np.max(np.abs(s.eigenvectors.T @ s.eigenvectors - np.eye(n))) < 1e-12


def test_tridiagonal_diagonal_input():
    d, _ = eig_tridiagonal([3.0, -1.0, 2.0], [0.0, 0.0, 0.0])
    assert list(d) == [-1.0, 2.0, 3.0]


def test_ql_iteration_cap(monkeypatch):
    from quasicollapse import eigen
    monkeypatch.setattr(eigen, "QL_MAX_ITER", 0)
    with pytest.raises(EigenConvergenceError) as info:
        eig_tridiagonal([1.0, 2.0, 3.0], [1.0, 1.0, 0.0])
    assert info.value.index == 0


def test_companion_oracle():
    rng = np.random.default_rng(5)
    for n in range(1, 9):
        m = _random_symmetric(rng, n)
        roots = np.sort(np.roots(np.poly(m)).real)
        assert np.max(np.abs(eig_real_symmetric(m).eigenvalues - roots)) < 1e-8


def test_nearest_zero_ties_toward_negative():
    vals = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    assert list(vals[nearest_zero(vals, 2)]) == [0.0, -1.0]
    assert list(vals[nearest_zero(vals, 4)]) == [0.0, -1.0, 1.0, -2.0]
    # near-ties within tolerance count as ties
    vals = np.array([1.0, -1.0 - 1e-13, 5.0])
    assert list(nearest_zero(vals, 1)) == [1]


def test_converged_spectrum_matches_formula():
    p = ModelParams(1.0, 0.25)
    spec, cert = converged_spectrum(lambda n: build_h0(p, BasisSpec(n)), 10, 1e-8)
    assert cert.converged and spec.trusted_count == 10
    assert cert.trusted_count == int(np.sum(cert.last_drift < cert.tolerance))
    pos = cert.levels[cert.levels > 1e-8]
    ref = [quasienergy_jc(n, 1, p) for n in range(len(pos))]
    assert np.allclose(pos, ref, rtol=1e-6)


def test_converged_spectrum_zero_drive_first_doubling():
    p = ModelParams(1.0, 0.0)
    _, cert = converged_spectrum(lambda n: build_h0(p, BasisSpec(n)), 10, 1e-8)
    assert cert.converged and cert.n_max_sequence == [64, 128]


def test_converged_spectrum_vectors_and_residual():
    p = ModelParams(1.0, 0.2)
    spec, cert = converged_spectrum(lambda n: build_h0(p, BasisSpec(n)), 6, 1e-8, want_vectors=True)
    dim = 2 * (spec.n_max + 1)
    assert spec.eigenvectors.shape == (dim, dim)
    assert spec.residual_norm < 1e-10 * 1.0 * dim


def test_converged_spectrum_critical_flag():
    p = ModelParams(1.0, 0.5)
    _, cert = converged_spectrum(lambda n: build_h0(p, BasisSpec(n)), 6, 1e-8, n_cap=512)
    assert not cert.converged
    assert cert.n_max_sequence == [64, 128, 256, 512]


def test_converged_spectrum_arguments():
    with pytest.raises(ValueError):
        converged_spectrum(lambda n: None, 0, 1e-8)
    with pytest.raises(ValueError):
        converged_spectrum(lambda n: None, 3, 0.0)


def test_zero_drive_chiral_pairing():
    ev = eig_real_symmetric(gauge_to_real(build_h0(ModelParams(1.0, 0.0), BasisSpec(40))).toarray()).eigenvalues
    assert np.allclose(np.sort(ev), np.sort(-ev), atol=1e-12)
    assert np.sum(np.abs(ev) < 1e-12) == 2


def test_edge_weights_separate_degenerate_pair():
    from quasicollapse.eigen import edge_weights
    n_levels = 8
    dim = 2 * n_levels
    interior = np.zeros(dim)
    interior[0] = 1.0
    edge = np.zeros(dim)
    edge[dim - 1] = 1.0
    mixed = np.stack([interior + edge, interior - edge], axis=1) / np.sqrt(2)
    w, rotated = edge_weights([0.0, 0.0], mixed)
    assert sorted(w) == pytest.approx([0.0, 1.0], abs=1e-14)
    keep = rotated[:, int(np.argmin(w))]
    assert abs(keep @ interior) == pytest.approx(1.0, abs=1e-14)


def test_edge_weights_leave_distinct_levels_alone():
    from quasicollapse.eigen import edge_weights
    v = np.eye(8)
    w, rotated = edge_weights(np.arange(8.0), v)
    assert np.array_equal(rotated, v)
    assert list(w) == [0, 0, 0, 0, 0, 0, 1, 1]


def test_converged_spectrum_untrusts_cutoff_zero_mode():
    p = ModelParams(1.0, 0.3)
    _, cert = converged_spectrum(lambda n: build_h0(p, BasisSpec(n)), 4, 1e-8, edge_tol=1e-6)
    assert cert.converged
    zeros = np.abs(cert.levels) < 1e-12
    assert zeros.sum() == 2
    assert cert.trusted[zeros].sum() == 1
    assert cert.trusted[~zeros].all()


@pytest.mark.parametrize("tiny", [5e-324, 1e-310, 1e-200])
def test_subnormal_couplings_do_not_spoil_rotations(tiny):
    op = gauge_to_real(build_h0(ModelParams(1.0, tiny), BasisSpec(2)))
    vals = eig_operator(op).eigenvalues
    assert np.allclose(vals, [-np.sqrt(2), -1, 0, 0, 1, np.sqrt(2)], atol=1e-15)


def test_tridiagonal_of_tiny_norm():
    d = np.array([1.0, 2.0, 3.0]) * 1e-300
    e = np.array([1.0, 1.0]) * 1e-300
    vals, _ = eig_tridiagonal(d, e)
    assert np.allclose(vals / 1e-300, [2 - np.sqrt(3), 2, 2 + np.sqrt(3)], rtol=1e-14)


@pytest.mark.parametrize("tiny", [3e-160, 1e-170, 1e-300])
def test_householder_tiny_column(tiny):
    m = np.array([[0, 0, tiny, 0], [0, 0, 1, 0], [tiny, 1, 0, 1j * tiny], [0, 0, -1j * tiny, 2]],
                 dtype=complex)
    vals = eig_hermitian(m).eigenvalues
    ref = np.linalg.eigvalsh(m)
    assert np.max(np.abs(vals - ref)) < 1e-14


@pytest.mark.parametrize("tiny", [2.2e-309, 5e-324])
def test_subnormal_drive_all_paths(tiny):
    op = build_h0(ModelParams(1.0, tiny), BasisSpec(3))
    ref = np.linalg.eigvalsh(build_h0(ModelParams(1.0, 0.0), BasisSpec(3)).toarray())
    dense = eig_hermitian(op.toarray(), want_vectors=True)
    band = eig_operator(op, want_vectors=True)
    for spec in (dense, band):
        assert np.max(np.abs(spec.eigenvalues - ref)) < 1e-14
        v = spec.eigenvectors
        assert np.max(np.abs(v.conj().T @ v - np.eye(len(v)))) < 1e-13


def test_householder_subnormal_leading_entry():
    op = build_h0(ModelParams(1.3328214431889946, 4.674468200197103e-108), BasisSpec(7))
    m = op.toarray()
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        spec = eig_hermitian(m)
    assert np.max(np.abs(spec.eigenvalues - np.linalg.eigvalsh(m))) < 1e-13
