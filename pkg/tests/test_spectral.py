import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from underlying_states import (DimensionError, UnknownOutcomeError, ValidationError,
                               orthocomplement_projector, projector, spectral_decompose,
                               validate_hermitian)
from conftest import PAULI_X, PAULI_Y, PAULI_Z, random_hermitian, random_unit


def test_validate_hermitian_examples():
    assert validate_hermitian(np.diag([1.0, -1.0]))
    assert not validate_hermitian(np.array([[0, 1j], [1j, 0]]))
    assert validate_hermitian(PAULI_Y)


def test_validate_hermitian_rejects_non_square():
    with pytest.raises(DimensionError):
        validate_hermitian(np.zeros((2, 3)))


def test_decompose_degenerate_diagonal():
    obs = spectral_decompose(np.diag([1.0, 1.0, -1.0]))
    assert obs.eigenvalues == (-1.0, 1.0)
    ranks = [round(np.trace(p).real) for p in obs.projectors]
    assert ranks == [1, 2]
    np.testing.assert_allclose(obs.projector(1.0), np.diag([1, 1, 0]), atol=1e-12)


def test_decompose_pauli_x():
    # characteristic polynomial l^2 - 1: eigenvalues -1, +1 with |-> and |+>
    obs = spectral_decompose(PAULI_X)
    np.testing.assert_allclose(obs.eigenvalues, [-1.0, 1.0], atol=1e-12)
    minus = np.array([1, -1]) / np.sqrt(2)
    plus = np.array([1, 1]) / np.sqrt(2)
    np.testing.assert_allclose(obs.projectors[0], np.outer(minus, minus), atol=1e-12)
    np.testing.assert_allclose(obs.projectors[1], np.outer(plus, plus), atol=1e-12)


def test_identity_single_outcome():
    obs = spectral_decompose(np.eye(3))
    assert obs.eigenvalues == (1.0,)
    np.testing.assert_allclose(obs.projectors[0], np.eye(3), atol=1e-12)


def test_non_hermitian_rejected():
    with pytest.raises(ValidationError):
        spectral_decompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_projector_examples(Z, X):
    np.testing.assert_allclose(projector(Z, 1), np.diag([1, 0]), atol=1e-12)
    np.testing.assert_allclose(projector(X, 1), 0.5 * np.ones((2, 2)), atol=1e-12)
    ident = spectral_decompose(np.eye(2))
    np.testing.assert_allclose(projector(ident, 1), np.eye(2), atol=1e-12)
    with pytest.raises(UnknownOutcomeError):
        projector(Z, 0.5)


def test_orthocomplement_examples(Z, X):
    np.testing.assert_allclose(orthocomplement_projector(Z, 1), np.diag([0, 1]), atol=1e-12)
    ident = spectral_decompose(np.eye(2))
    np.testing.assert_allclose(orthocomplement_projector(ident, 1), np.zeros((2, 2)), atol=1e-12)
    np.testing.assert_allclose(orthocomplement_projector(X, -1), 0.5 * np.ones((2, 2)), atol=1e-12)
    q = orthocomplement_projector(X, 1)
    np.testing.assert_allclose(q @ q, q, atol=1e-12)
    np.testing.assert_allclose(q, q.conj().T, atol=1e-12)


def test_grouping_merges_close_eigenvalues():
    obs = spectral_decompose(np.diag([1.0, 1.0 + 1e-10, 2.0]))
    assert len(obs) == 2
    assert obs.eigenvalues[0] == pytest.approx(1.0 + 5e-11, abs=1e-15)


@st.composite
def hermitian_with_degeneracy(draw):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    d = draw(st.integers(1, 6))
    degenerate = draw(st.booleans())
    rng = np.random.default_rng(seed)
    if degenerate:
        from scipy.stats import unitary_group
        u = unitary_group.rvs(d, random_state=rng) if d > 1 else np.eye(1)
        diag = rng.integers(-2, 3, size=d).astype(float)
        m = u @ np.diag(diag) @ u.conj().T
        return (m + m.conj().T) / 2, rng
    return random_hermitian(d, rng), rng


@settings(max_examples=60, deadline=None)
@given(hermitian_with_degeneracy())
def test_decomposition_invariants(case):
    m, _ = case
    obs = spectral_decompose(m)
    d = m.shape[0]
    tol = obs.tol
    total = np.zeros((d, d), dtype=complex)
    recon = np.zeros((d, d), dtype=complex)
    for i, (lam, p) in enumerate(obs.spectrum):
        assert np.max(np.abs(p @ p - p)) <= tol
        assert np.max(np.abs(p - p.conj().T)) <= tol
        for j, (_, q) in enumerate(obs.spectrum):
            if i != j:
                assert np.max(np.abs(p @ q)) <= tol
        total += p
        recon += lam * p
    assert np.max(np.abs(total - np.eye(d))) <= tol
    assert np.max(np.abs(recon - m)) <= tol
    assert all(a < b for a, b in zip(obs.eigenvalues, obs.eigenvalues[1:]))


@settings(max_examples=40, deadline=None)
@given(hermitian_with_degeneracy())
def test_projection_minimizes_distance(case):
    m, rng = case
    obs = spectral_decompose(m)
    d = m.shape[0]
    for p in obs.projectors:
        psi = random_unit(d, rng)
        dist = np.linalg.norm(psi - p @ psi)
        for _ in range(20):
            phi = p @ random_unit(d, rng)
            # any vector in the range, at any scale
            phi *= rng.uniform(0, 2) / max(np.linalg.norm(phi), 1e-300)
            assert dist <= np.linalg.norm(psi - phi) + obs.tol
        # orthogonal decomposition
        a = p @ psi
        b = (np.eye(d) - p) @ psi
        assert np.max(np.abs(a + b - psi)) <= 1e-14
        assert abs(np.vdot(a, b)) <= obs.tol


def test_grouping_is_deterministic():
    rng = np.random.default_rng(3)
    m = random_hermitian(5, rng)
    a, b = spectral_decompose(m), spectral_decompose(m)
    assert a.eigenvalues == b.eigenvalues
    for p, q in zip(a.projectors, b.projectors):
        np.testing.assert_array_equal(p, q)
