"""
Quantum states, Born probabilities, the Lüders update and sequential joints.

Pure states are unit vectors, mixed states are density operators. Functions
accept either the :class:`PureState` / :class:`DensityOperator` wrappers or
plain arrays (1-D for vectors, 2-D for density matrices).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, NumericError, UndefinedUpdateError, ValidationError
from .spectral import HermitianObservable, hermitian_tol, numeric_tol

__all__ = [
    "ZERO_TOL",
    "PureState",
    "DensityOperator",
    "Proposition",
    "random_pure_states",
    "born_probability",
    "luders_update_pure",
    "luders_update_density",
    "mixture_update_weights",
    "mixture_density",
    "sequential_distribution",
    "sequential_joint",
    "sequential_joint_operator",
    "joint_table",
    "joint_tables",
]

# Conditioning on a probability at or below this is division by zero.
ZERO_TOL = 1e-12


def _readonly(a):
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector in C^d."""

    vector: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex)
        if v.ndim != 1 or v.size == 0:
            raise DimensionError(f"a pure state must be a non-empty vector, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("state vector has non-finite entries")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > numeric_tol():
            raise ValidationError(f"state vector is not normalized (norm {norm!r})")
        object.__setattr__(self, "vector", _readonly(v))

    @classmethod
    def normalized(cls, v) -> "PureState":
        v = np.asarray(v, dtype=complex)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(v / norm)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.vector, self.vector.conj()))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.vector, dtype=dtype)

    def __repr__(self):
        return f"PureState({np.array2string(self.vector, precision=4)})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive semidefinite, unit-trace d x d matrix."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionError(f"a density operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("density operator has non-finite entries")
        if np.max(np.abs(m - m.conj().T)) > hermitian_tol(m):
            raise ValidationError("density operator is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > numeric_tol():
            raise ValidationError(f"density operator trace is {tr!r}, not 1")
        if np.linalg.eigvalsh((m + m.conj().T) / 2)[0] < -numeric_tol():
            raise ValidationError("density operator has a negative eigenvalue")
        object.__setattr__(self, "matrix", _readonly(m))

    @classmethod
    def from_mixture(cls, components) -> "DensityOperator":
        return cls(mixture_density(components))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


class Proposition(NamedTuple):
    """``[observable = value]``: a measurement of ``observable`` yields ``value``."""

    observable: HermitianObservable
    value: float

    def __str__(self):
        return f"[{self.observable.name}={self.value:g}]"


def _as_state(state):
    if isinstance(state, (PureState, DensityOperator)):
        return state
    arr = np.asarray(state)
    if arr.ndim == 1:
        return PureState(arr)
    if arr.ndim == 2:
        return DensityOperator(arr)
    raise DimensionError(f"cannot interpret array of shape {arr.shape} as a state")


def _check_dim(state, obs: HermitianObservable):
    if state.dim != obs.dim:
        raise DimensionError(
            f"state has dimension {state.dim} but {obs.name!r} has dimension {obs.dim}")


def _clamp(p: float, tol: float) -> float:
    if 0.0 <= p <= 1.0:
        return p
    if -tol <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + tol:
        return 1.0
    raise NumericError(f"probability {p!r} is outside [0, 1]")


def random_pure_states(dim: int, n: int, rng) -> list:
    """``n`` normalized complex Gaussian vectors drawn from ``rng``."""
    rng = np.random.default_rng(rng)
    z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return [PureState(row) for row in z]


def born_probability(state, obs: HermitianObservable, value) -> float:
    """``tr(rho P)`` for the projector ``P`` of ``obs`` at ``value``.

    For a pure state this is evaluated as ``||P psi||^2``, which keeps
    structurally-zero probabilities at the 1e-32 level instead of 1e-16.
    """
    state = _as_state(state)
    _check_dim(state, obs)
    p = obs.projector(value)
    if isinstance(state, PureState):
        v = p @ state.vector
        prob = float(np.vdot(v, v).real)
    else:
        prob = float(np.trace(state.matrix @ p).real)
    return _clamp(prob, obs.tol)


def luders_update_pure(psi, obs: HermitianObservable, value) -> PureState:
    """``P psi / ||P psi||``; the closest pure state in which ``[obs=value]`` is certain."""
    psi = psi if isinstance(psi, PureState) else PureState(psi)
    _check_dim(psi, obs)
    v = obs.projector(value) @ psi.vector
    prob = float(np.vdot(v, v).real)
    if prob <= ZERO_TOL:
        raise UndefinedUpdateError(
            f"cannot update on [{obs.name}={value}]: probability {prob!r} is zero")
    return PureState(v / np.sqrt(prob))


def luders_update_density(rho, obs: HermitianObservable, value) -> DensityOperator:
    """``P rho P / tr(rho P)``."""
    rho = rho if isinstance(rho, DensityOperator) else DensityOperator(rho)
    _check_dim(rho, obs)
    p = obs.projector(value)
    prob = float(np.trace(rho.matrix @ p).real)
    if prob <= ZERO_TOL:
        raise UndefinedUpdateError(
            f"cannot update on [{obs.name}={value}]: probability {prob!r} is zero")
    out = p @ rho.matrix @ p / prob
    return DensityOperator((out + out.conj().T) / 2)


def mixture_density(components) -> np.ndarray:
    """``sum_i w_i |psi_i><psi_i|`` for ``components = [(w_i, psi_i), ...]``."""
    components = list(components)
    if not components:
        raise ValidationError("a mixture needs at least one component")
    out = None
    for w, psi in components:
        v = np.asarray(psi, dtype=complex)
        term = w * np.outer(v, v.conj())
        out = term if out is None else out + term
    return out


def mixture_update_weights(components, obs: HermitianObservable, value) -> list:
    """Update each component of a convex decomposition separately.

    The new weight of component ``i`` is ``p_i P_i / P_rho`` where ``P_i`` is
    the Born probability of ``[obs=value]`` in ``psi_i`` and ``P_rho`` the
    aggregate probability; the new state is the Lüders update of ``psi_i``.
    Components with zero probability are dropped. Reassembling the result
    with :func:`mixture_density` gives ``luders_update_density`` of the input.
    """
    comps = [(float(w), psi if isinstance(psi, PureState) else PureState(psi))
             for w, psi in components]
    if not comps:
        raise ValidationError("a mixture needs at least one component")
    weights = np.array([w for w, _ in comps])
    if np.any(weights <= 0):
        raise ValidationError("mixture weights must be positive")
    if abs(weights.sum() - 1.0) > numeric_tol():
        raise ValidationError(f"mixture weights sum to {weights.sum()!r}, not 1")

    probs = [born_probability(psi, obs, value) for _, psi in comps]
    total = float(sum(w * p for (w, _), p in zip(comps, probs)))
    if total <= ZERO_TOL:
        raise UndefinedUpdateError(
            f"cannot update on [{obs.name}={value}]: aggregate probability {total!r} is zero")

    out = []
    for (w, psi), p in zip(comps, probs):
        if p <= ZERO_TOL:
            continue
        out.append((w * p / total, luders_update_pure(psi, obs, value)))
    return out


def sequential_distribution(psi, first, second) -> float:
    """Probability of ``first`` then ``second`` when measured in that order.

    ``first`` and ``second`` are ``(observable, value)`` pairs. Computed as
    ``P[A=a] * P_{T(psi)}[B=b]``; a zero first factor gives 0.
    """
    return sequential_joint(psi, [first, second])


def sequential_joint(psi, chain: Sequence) -> float:
    """Probability of the ordered chain ``[(A_1, a_1), ..., (A_m, a_m)]``.

    Product of conditionals: each link is a Born probability in the state
    updated by all previous links.
    """
    chain = list(chain)
    if not chain:
        raise ValidationError("a measurement chain needs at least one link")
    state = psi if isinstance(psi, PureState) else PureState(psi)
    total = 1.0
    for i, (obs, value) in enumerate(chain):
        p = born_probability(state, obs, value)
        if p <= ZERO_TOL:
            return 0.0
        total *= p
        if i + 1 < len(chain):
            state = luders_update_pure(state, obs, value)
    tol = max(obs.tol for obs, _ in chain)
    return _clamp(total, tol)


def sequential_joint_operator(psi, chain: Sequence) -> float:
    """Same quantity as :func:`sequential_joint`, as ``||P_m ... P_1 psi||^2``.

    Kept as an independent cross-check of the iterated form.
    """
    chain = list(chain)
    if not chain:
        raise ValidationError("a measurement chain needs at least one link")
    v = np.asarray(psi, dtype=complex)
    for obs, value in chain:
        if obs.dim != v.shape[0]:
            raise DimensionError(f"state has dimension {v.shape[0]} but {obs.name!r} has {obs.dim}")
        v = obs.projector(value) @ v
    tol = max(obs.tol for obs, _ in chain)
    return _clamp(float(np.vdot(v, v).real), tol)


def joint_tables(states, observables: Sequence[HermitianObservable]) -> np.ndarray:
    """Sequential joints for every value tuple, for a batch of pure states.

    Parameters
    ----------
    states : array_like, shape (s, d)
        Rows are unit vectors.
    observables : sequence of HermitianObservable
        Measured in the given order.

    Returns
    -------
    ndarray, shape (s, n_1, ..., n_m)
        Entry ``[k, i_1, ..., i_m]`` is the probability of the chain
        ``A_1 = eigenvalues[i_1], ..., A_m = eigenvalues[i_m]`` in state ``k``,
        computed by iterated update-and-multiply.
    """
    vecs = np.atleast_2d(np.asarray(states, dtype=complex))
    s, d = vecs.shape
    observables = list(observables)
    if not observables:
        raise ValidationError("need at least one observable")
    weights = np.ones(s)
    tol = max(o.tol for o in observables)
    for obs in observables:
        if obs.dim != d:
            raise DimensionError(f"states have dimension {d} but {obs.name!r} has {obs.dim}")
        # stack: (k, n, d) with rows P_j v
        proj = np.einsum("jab,kb->kja", np.stack(obs.projectors), vecs)
        p = np.einsum("kja,kja->kj", proj.conj(), proj).real
        if np.any(p > 1.0 + tol):
            raise NumericError("link probability exceeds 1")
        p = np.minimum(p, 1.0)
        alive = p > ZERO_TOL
        scale = np.where(alive, 1.0 / np.sqrt(np.where(alive, p, 1.0)), 0.0)
        vecs = (proj * scale[:, :, None]).reshape(-1, d)
        weights = (weights[:, None] * np.where(alive, p, 0.0)).reshape(-1)
    shape = (s,) + tuple(len(o) for o in observables)
    return weights.reshape(shape)


def joint_table(psi, observables: Sequence[HermitianObservable]) -> np.ndarray:
    """:func:`joint_tables` for a single state; shape ``(n_1, ..., n_m)``."""
    v = psi.vector if isinstance(psi, PureState) else np.asarray(psi, dtype=complex)
    if v.ndim != 1:
        raise DimensionError(f"expected a state vector, got shape {v.shape}")
    return joint_tables(v[None, :], observables)[0]
