import numpy as np
import pytest

from underlying_states import spectral_decompose

SQ2 = np.sqrt(2.0)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / SQ2
MINUS = np.array([1, -1], dtype=complex) / SQ2
BELL = np.array([1, 0, 0, 1], dtype=complex) / SQ2


@pytest.fixture
def Z():
    return spectral_decompose(PAULI_Z, name="Z")


@pytest.fixture
def X():
    return spectral_decompose(PAULI_X, name="X")


@pytest.fixture
def Y():
    return spectral_decompose(PAULI_Y, name="Y")


@pytest.fixture
def ZI():
    return spectral_decompose(np.kron(PAULI_Z, I2), name="ZI")


@pytest.fixture
def IZ():
    return spectral_decompose(np.kron(I2, PAULI_Z), name="IZ")


def random_hermitian(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def random_unit(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)
