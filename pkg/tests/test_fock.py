import math

import numpy as np
import pytest

from quasicollapse.fock import (
    BasisSpec,
    annihilation,
    build_h0,
    build_h_eta,
    build_squeeze,
    gauge_to_real,
    gauge_vector,
    read_matrix,
    verify_squeeze_identity,
    write_matrix,
)
from quasicollapse.model import ModelParams, squeeze_parameter


def test_basis_dimension_and_index():
    b = BasisSpec(5)
    assert b.dim == 12
    assert b.index(3, 1) == 7
    with pytest.raises(ValueError):
        BasisSpec(0)


def test_h0_entries():
    m = build_h0(ModelParams(2.0, 0.3), BasisSpec(3)).toarray()
    # <n-1,e|H|n,g> = i lam sqrt(n)
    assert m[2 * 1 + 1, 2 * 2] == pytest.approx(2j * math.sqrt(2))
    assert m[2 * 2, 2 * 1 + 1] == pytest.approx(-2j * math.sqrt(2))
    # <n+1,s|H|n,s> = eps sqrt(n+1)
    assert m[2 * 3 + 1, 2 * 2 + 1] == pytest.approx(0.3 * math.sqrt(3))
    assert m[2 * 3, 2 * 2] == pytest.approx(0.3 * math.sqrt(3))


def test_h0_small_spectrum():
    m = build_h0(ModelParams(1.0, 0.0), BasisSpec(1)).toarray()
    assert np.allclose(np.linalg.eigvalsh(m), [-1, 0, 0, 1], atol=1e-15)


def test_drive_only_spectrum():
    # lam must be positive in ModelParams, so build the drive-only matrix by
    # subtracting the coupling part
    b = BasisSpec(1)
    full = build_h0(ModelParams(1.0, 1.0), b).toarray()
    coupling = build_h0(ModelParams(1.0, 0.0), b).toarray()
    assert np.allclose(np.linalg.eigvalsh(full - coupling), [-1, -1, 1, 1], atol=1e-15)


@pytest.mark.parametrize("eta", [0.0, 0.3, 0.9])
def test_hermitian_and_banded(eta):
    op = build_h_eta(ModelParams(1.3, 0.2, eta), BasisSpec(20))
    m = op.toarray()
    assert np.max(np.abs(m - m.conj().T)) < 1e-14
    i, j = np.nonzero(m)
    width = 2 if eta == 0 else 3
    assert np.max(np.abs(i - j)) == width == op.bandwidth


def test_h_eta_reduces_to_h0():
    p = ModelParams(1.0, 0.2, 0.0)
    assert np.array_equal(build_h_eta(p, BasisSpec(10)).toarray(), build_h0(p, BasisSpec(10)).toarray())


def test_h_eta_counter_rotating_entry():
    p = ModelParams(1.0, 0.0, 0.6)
    m = build_h_eta(p, BasisSpec(4)).toarray()
    # <1,e| H |0,g> = i lam' eta
    assert m[3, 0] == pytest.approx(1j * 1.25 * 0.6)


def test_h_eta_isospectral_at_zero_drive():
    from quasicollapse.eigen import eig_operator
    ev = eig_operator(build_h_eta(ModelParams(1.0, 0.0, 0.6), BasisSpec(200))).eigenvalues
    assert np.min(np.abs(ev[ev > 0.5] - 1.0)) < 1e-8


def test_commutator_away_from_edge():
    n = 12
    a = annihilation(n)
    c = a @ a.T - a.T @ a
    assert np.allclose(c[:n, :n], np.eye(n), atol=1e-14)
    assert c[n, n] == pytest.approx(-n)


def test_gauge_small_example():
    g = gauge_to_real(build_h0(ModelParams(1.0, 0.0), BasisSpec(1)))
    m = g.toarray()
    assert not np.iscomplexobj(m)
    assert m[1, 2] == 1.0 and m[2, 1] == 1.0


def test_gauge_isospectral_and_vectors():
    op = build_h_eta(ModelParams(1.0, 0.25, 0.4), BasisSpec(30))
    m = op.toarray()
    g = gauge_to_real(op)
    gm = g.toarray()
    assert np.max(np.abs(np.imag(gm))) < 1e-15
    w, v = np.linalg.eigh(gm)
    assert np.allclose(np.linalg.eigvalsh(m), w, atol=1e-12)
    back = gauge_vector(v, op.basis)
    assert np.allclose(m @ back, back * w, atol=1e-11)


def test_gauge_rejects_dense_operator():
    with pytest.raises(ValueError):
        gauge_to_real(build_squeeze(0.1, BasisSpec(3)))


def test_squeeze_identity_at_zero():
    assert np.array_equal(build_squeeze(0.0, BasisSpec(6)).dense, np.eye(14))


def test_squeeze_vacuum_element():
    z = math.log(2)
    s = build_squeeze(z, BasisSpec(120)).dense
    assert s[0, 0] == pytest.approx(math.sqrt(4 / 5), abs=1e-12)


def test_squeeze_vacuum_column():
    # squeezed vacuum: <2k|S|0> = (-tanh z)^k sqrt((2k)!) / (2^k k!) / sqrt(cosh z)
    z = 0.4
    s = build_squeeze(z, BasisSpec(160)).dense
    for k in range(10):
        ref = (-math.tanh(z)) ** k * math.sqrt(math.factorial(2 * k)) / (2 ** k * math.factorial(k))
        assert s[2 * (2 * k), 0] == pytest.approx(ref / math.sqrt(math.cosh(z)), abs=1e-12)
        assert s[2 * (2 * k + 1), 0] == 0.0


def test_squeeze_group_inverse():
    b = BasisSpec(200)
    prod = build_squeeze(0.5, b).dense @ build_squeeze(-0.5, b).dense
    m = 2 * 50
    assert np.max(np.abs(prod[:m, :m] - np.eye(m))) < 1e-10


def test_squeeze_rejects_large_z():
    with pytest.raises(ValueError):
        build_squeeze(5.0, BasisSpec(3))


def test_squeeze_column_error_shrinks_with_truncation():
    z = 0.6
    errs = []
    for n in (16, 32, 64):
        s = build_squeeze(z, BasisSpec(n)).dense
        col = s[0:2 * 8:4, 0]
        ref = np.array([(-math.tanh(z)) ** k * math.sqrt(math.factorial(2 * k)) / (2 ** k * math.factorial(k))
                        for k in range(4)]) / math.sqrt(math.cosh(z))
        errs.append(np.max(np.abs(col - ref)))
    assert errs[0] > errs[1] > errs[2] or errs[2] < 1e-15


def test_squeeze_identity_zero_eta():
    r = verify_squeeze_identity(ModelParams(1.0, 0.1, 0.0), BasisSpec(32))
    assert r.residual == 0.0


def test_squeeze_identity_converges_on_quarter_interior():
    p = ModelParams(1.0, 0.1, 0.5)
    rel = [verify_squeeze_identity(p, BasisSpec(n), 0.25).relative for n in (64, 128, 256)]
    assert rel[0] > rel[1] > rel[2]
    assert rel[2] < 1e-6


def test_flipped_generator_fails():
    p = ModelParams(1.0, 0.1, 0.5)
    good = verify_squeeze_identity(p, BasisSpec(128), 0.25)
    bad = verify_squeeze_identity(p, BasisSpec(128), 0.25, flip_sign=True)
    assert good.relative < 1e-5 < 0.1 < bad.relative


def test_squeeze_conjugates_ladder():
    # S a S^T = a cosh z + a^dag sinh z away from the truncation edge
    p = ModelParams(1.0, 0.0, 0.4)
    z = squeeze_parameter(p)
    n = 200
    s = build_squeeze(z, BasisSpec(n)).dense[::2, ::2]
    a = annihilation(n)
    lhs = s @ a @ s.T
    rhs = a * math.cosh(z) + a.T * math.sinh(z)
    assert np.max(np.abs(lhs - rhs)[:40, :40]) < 1e-10


@pytest.mark.parametrize("binary", [False, True])
def test_matrix_dump_round_trip(tmp_path, binary):
    op = build_h0(ModelParams(1.0, 0.3), BasisSpec(4))
    path = tmp_path / "m.txt"
    write_matrix(op, path, binary=binary)
    header = path.read_bytes().split(b"\n", 1)[0]
    assert header == b"10 4 ordering=interleaved"
    m, basis = read_matrix(path)
    assert basis.n_max == 4
    assert np.array_equal(m, op.toarray())


def test_matvec_matches_dense():
    op = build_h_eta(ModelParams(1.0, 0.3, 0.5), BasisSpec(9))
    v = np.random.default_rng(3).normal(size=(20, 3)) + 0j
    assert np.allclose(op.matvec(v), op.toarray() @ v, atol=1e-14)
    assert np.allclose(op.matvec(v[:, 0]), op.toarray() @ v[:, 0], atol=1e-14)


def test_squeeze_identity_strong_squeeze_needs_small_interior():
    # level n spreads to about n e^{2z} = 19 n at eta = 0.9
    p = ModelParams(1.0, 0.1, 0.9)
    rel = [verify_squeeze_identity(p, BasisSpec(n), 0.04).relative for n in (128, 256, 512)]
    assert rel[0] > rel[1] > rel[2]
    assert verify_squeeze_identity(p, BasisSpec(256), 0.25).relative > 0.1
