"""
Hermitian matrices, grouped spectral decompositions and spectral projectors.

Outcome values everywhere in the package are the *grouped* eigenvalues
produced by :func:`spectral_decompose`. Eigenvalues closer than the grouping
tolerance are treated as one outcome whose projector has rank > 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NumericError, UnknownOutcomeError, ValidationError

__all__ = [
    "HermitianObservable",
    "as_matrix",
    "validate_hermitian",
    "hermitian_tol",
    "numeric_tol",
    "default_group_tol",
    "spectral_decompose",
    "projector",
    "orthocomplement_projector",
]


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square complex ndarray, checking shape and finiteness."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("matrix has non-finite entries")
    return arr


def hermitian_tol(m) -> float:
    return 1e-10 * (1.0 + float(np.max(np.abs(m))))


def numeric_tol(spectral_radius: float = 0.0) -> float:
    return 1e-9 * (1.0 + spectral_radius)


def default_group_tol(spectral_radius: float) -> float:
    return 1e-8 * (1.0 + spectral_radius)


def validate_hermitian(m, tol: float | None = None) -> bool:
    """True iff ``max|m - m^dagger| <= tol``.

    ``tol`` defaults to ``1e-10 * (1 + max|m_ij|)``.
    """
    arr = as_matrix(m)
    if tol is None:
        tol = hermitian_tol(arr)
    return bool(np.max(np.abs(arr - arr.conj().T)) <= tol)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HermitianObservable:
    """A named Hermitian matrix together with its grouped spectral decomposition.

    Attributes
    ----------
    name : str
    matrix : ndarray, shape (d, d)
    eigenvalues : tuple of float
        Grouped eigenvalues, strictly increasing.
    projectors : tuple of ndarray
        ``projectors[i]`` projects onto the eigenspace of ``eigenvalues[i]``.
    group_tol : float
        Tolerance used for grouping; also used to resolve value lookups.
    """

    name: str
    matrix: np.ndarray = field(repr=False)
    eigenvalues: tuple
    projectors: tuple = field(repr=False)
    group_tol: float = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def spectrum(self) -> list:
        return list(zip(self.eigenvalues, self.projectors))

    @property
    def spectral_radius(self) -> float:
        return max(abs(v) for v in self.eigenvalues)

    @property
    def tol(self) -> float:
        return numeric_tol(self.spectral_radius)

    def index(self, value) -> int:
        """Position of ``value`` in :attr:`eigenvalues`.

        Exact matches win; otherwise the unique label within ``group_tol``
        is accepted, which absorbs eigensolver round-off in user-supplied
        values such as ``1.0`` for ``0.9999999999999998``.
        """
        value = float(value)
        for i, ev in enumerate(self.eigenvalues):
            if ev == value:
                return i
        diffs = np.abs(np.asarray(self.eigenvalues) - value)
        i = int(np.argmin(diffs))
        if diffs[i] <= self.group_tol:
            return i
        raise UnknownOutcomeError(
            f"{value!r} is not in the spectrum of {self.name!r} {list(self.eigenvalues)}")

    def projector(self, value) -> np.ndarray:
        return self.projectors[self.index(value)]

    def __len__(self):
        return len(self.eigenvalues)


def spectral_decompose(m, group_tol: float | None = None, name: str = "A") -> HermitianObservable:
    """Decompose a Hermitian matrix into grouped eigenvalues and projectors.

    Parameters
    ----------
    m : array_like, shape (d, d)
    group_tol : float, optional
        Sorted eigenvalues whose consecutive gap is at most ``group_tol`` are
        merged; the label of a group is the mean of its members. Defaults to
        ``1e-8 * (1 + spectral radius)``.
    name : str

    Raises
    ------
    ValidationError
        If ``m`` is not Hermitian within ``1e-10 * (1 + max|m_ij|)``.
    NumericError
        If the eigensolver does not converge.
    """
    arr = as_matrix(m)
    if not validate_hermitian(arr):
        raise ValidationError(f"observable {name!r} is not Hermitian")
    herm = (arr + arr.conj().T) / 2
    try:
        w, v = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed for {name!r}: {exc}") from exc

    if group_tol is None:
        group_tol = default_group_tol(float(np.max(np.abs(w))))

    groups = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] <= group_tol:
            groups[-1].append(i)
        else:
            groups.append([i])

    eigenvalues = []
    projectors = []
    for g in groups:
        eigenvalues.append(float(np.mean(w[g])))
        vecs = v[:, g]
        p = vecs @ vecs.conj().T
        projectors.append(_frozen((p + p.conj().T) / 2))

    return HermitianObservable(
        name=name,
        matrix=_frozen(arr),
        eigenvalues=tuple(eigenvalues),
        projectors=tuple(projectors),
        group_tol=float(group_tol),
    )


def projector(obs: HermitianObservable, value) -> np.ndarray:
    """Spectral projector onto the ``value`` eigenspace of ``obs``."""
    return obs.projector(value)


def orthocomplement_projector(obs: HermitianObservable, value) -> np.ndarray:
    """``I - projector(obs, value)``: the subspace where ``obs != value``."""
    p = obs.projector(value)
    return np.eye(obs.dim, dtype=complex) - p
