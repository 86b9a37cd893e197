"""
Pairwise compatibility of observables and Bayes-violation witnesses.

Three deciders are provided. :func:`rehder_test` is authoritative: it checks
the operator identity ``PA PB PA == PB PA PB`` for every pair of spectral
projectors, which holds iff the projectors commute. :func:`commutator_test`
checks commutation directly, and :func:`order_independence_test` compares
the two measurement orders on a finite set of states, so it can only ever
certify incompatibility.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, NoWitnessError, ValidationError
from .spectral import HermitianObservable, numeric_tol
from .states import PureState, joint_tables, sequential_distribution

__all__ = [
    "COMPAT_TOL",
    "Witness",
    "PairResult",
    "CompatReport",
    "WorstCase",
    "commutator_test",
    "rehder_test",
    "order_independence_test",
    "find_witness",
    "scenario_pairwise_check",
]

COMPAT_TOL = 1e-8

COMPATIBLE = "all-pairwise-compatible"
INCOMPATIBLE = "incompatible"


@dataclass(frozen=True)
class Witness:
    """A state on which measuring ``pair`` in the two orders disagrees.

    ``p_ab`` is the probability of ``values`` when ``pair[0]`` is measured
    first, ``p_ba`` the reversed order, and ``violation = |p_ab - p_ba|``.
    """

    psi: PureState
    pair: tuple
    values: tuple
    p_ab: float
    p_ba: float
    violation: float

    def to_dict(self) -> dict:
        v = self.psi.vector
        return {
            "state": {"real": v.real.tolist(), "imag": v.imag.tolist()},
            "pair": list(self.pair),
            "values": list(self.values),
            "p_ab": self.p_ab,
            "p_ba": self.p_ba,
            "violation": self.violation,
        }


@dataclass(frozen=True)
class PairResult:
    pair: tuple
    method: str
    margin: float
    compatible: bool

    def to_dict(self) -> dict:
        return {"pair": list(self.pair), "method": self.method,
                "margin": self.margin, "compatible": self.compatible}


@dataclass(frozen=True)
class CompatReport:
    scenario_id: str
    verdict: str
    pairs: tuple = field(default=())
    witness: Witness | None = None

    def __post_init__(self):
        if (self.witness is None) != (self.verdict == COMPATIBLE):
            raise ValueError("a witness must be present exactly when the verdict is incompatible")

    @property
    def compatible(self) -> bool:
        return self.verdict == COMPATIBLE

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario_id,
            "verdict": self.verdict,
            "pairs": [p.to_dict() for p in self.pairs],
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


class WorstCase(NamedTuple):
    psi: PureState
    alpha: float
    beta: float
    gap: float


def _check_pair(a: HermitianObservable, b: HermitianObservable):
    if a.dim != b.dim:
        raise DimensionError(f"{a.name!r} has dimension {a.dim} but {b.name!r} has {b.dim}")


def commutator_test(a: HermitianObservable, b: HermitianObservable, tol: float = COMPAT_TOL):
    """Largest entry of ``[PA, PB]`` over all projector pairs.

    Returns
    -------
    (compatible, margin)
    """
    _check_pair(a, b)
    margin = 0.0
    for pa in a.projectors:
        for pb in b.projectors:
            margin = max(margin, float(np.max(np.abs(pa @ pb - pb @ pa))))
    return bool(margin <= tol), margin


def _sandwich_differences(a, b):
    for (ia, pa), (ib, pb) in itertools.product(enumerate(a.projectors), enumerate(b.projectors)):
        yield ia, ib, pa @ pb @ pa - pb @ pa @ pb


def rehder_test(a: HermitianObservable, b: HermitianObservable, tol: float = COMPAT_TOL):
    """Largest entry of ``PA PB PA - PB PA PB`` over all projector pairs.

    Returns
    -------
    (compatible, margin)
    """
    _check_pair(a, b)
    margin = 0.0
    for _, _, diff in _sandwich_differences(a, b):
        margin = max(margin, float(np.max(np.abs(diff))))
    return bool(margin <= tol), margin


def order_independence_test(a: HermitianObservable, b: HermitianObservable,
                            states: Sequence, tol: float = COMPAT_TOL):
    """Compare both measurement orders of ``(a, b)`` on each state.

    A ``True`` verdict only means no disagreement was seen on these states;
    confirm compatibility with :func:`rehder_test`.

    Returns
    -------
    (compatible, WorstCase)
        ``WorstCase.gap = max |P[a=alpha, b=beta] - P[b=beta, a=alpha]|``.
    """
    _check_pair(a, b)
    states = [s if isinstance(s, PureState) else PureState(s) for s in states]
    if not states:
        raise ValidationError("order_independence_test needs at least one state")
    vecs = np.stack([s.vector for s in states])
    ab = joint_tables(vecs, [a, b])
    ba = joint_tables(vecs, [b, a]).transpose(0, 2, 1)
    gaps = np.abs(ab - ba)
    k, i, j = np.unravel_index(int(np.argmax(gaps)), gaps.shape)
    worst = WorstCase(states[k], a.eigenvalues[i], b.eigenvalues[j], float(gaps[k, i, j]))
    return bool(worst.gap <= tol), worst


def _phase_fix(v: np.ndarray) -> np.ndarray:
    # largest-magnitude component made real positive, for reproducible output
    k = int(np.argmax(np.abs(v) - 1e-12 * np.arange(v.size)))
    return v * (abs(v[k]) / v[k])


def find_witness(a: HermitianObservable, b: HermitianObservable,
                 tol: float = COMPAT_TOL) -> Witness:
    """Build a state exhibiting order dependence for an incompatible pair.

    For each ``(alpha, beta)`` the difference ``D = PA PB PA - PB PA PB`` is
    Hermitian and ``<psi|D|psi> = P[a, b] - P[b, a]``. The pair maximizing the
    spectral norm of ``D`` is chosen (ties go to the lexicographically
    smallest values) and ``psi`` is the eigenvector of its largest-magnitude
    eigenvalue, so the violation equals that spectral norm.

    Raises
    ------
    NoWitnessError
        If every ``D`` has spectral norm at most ``tol``.
    """
    _check_pair(a, b)
    tie = numeric_tol(max(a.spectral_radius, b.spectral_radius))
    best = None
    for ia, ib, diff in _sandwich_differences(a, b):
        w, v = np.linalg.eigh((diff + diff.conj().T) / 2)
        norm = max(abs(w[0]), abs(w[-1]))
        if best is None or norm > best[0] + tie:
            # prefer the positive end on ties
            vec = v[:, -1] if abs(w[-1]) >= abs(w[0]) - tie else v[:, 0]
            best = (norm, ia, ib, vec)
    norm, ia, ib, vec = best
    if norm <= tol:
        raise NoWitnessError(f"{a.name!r} and {b.name!r} are compatible; no witness exists")

    psi = PureState.normalized(_phase_fix(vec))
    alpha, beta = a.eigenvalues[ia], b.eigenvalues[ib]
    p_ab = sequential_distribution(psi, (a, alpha), (b, beta))
    p_ba = sequential_distribution(psi, (b, beta), (a, alpha))
    return Witness(psi=psi, pair=(a.name, b.name), values=(alpha, beta),
                   p_ab=p_ab, p_ba=p_ba, violation=float(norm))


def scenario_pairwise_check(scenario, tol: float = COMPAT_TOL) -> CompatReport:
    """Run :func:`rehder_test` on every unordered pair of a scenario.

    ``scenario`` is a :class:`~underlying_states.scenario.Scenario` or a plain
    sequence of observables. Pairs are visited in lexicographic order of
    names; a witness is attached for the first incompatible one.
    """
    if hasattr(scenario, "observables"):
        observables = list(scenario.observables)
        scenario_id = scenario.id
    else:
        observables = list(scenario)
        scenario_id = ""
    if not observables:
        raise ValidationError("a scenario needs at least one observable")

    ordered = sorted(observables, key=lambda o: o.name)
    results = []
    witness = None
    for a, b in itertools.combinations(ordered, 2):
        ok, margin = rehder_test(a, b, tol)
        results.append(PairResult((a.name, b.name), "rehder", margin, ok))
        if not ok and witness is None:
            witness = find_witness(a, b, tol)
    verdict = COMPATIBLE if witness is None else INCOMPATIBLE
    return CompatReport(scenario_id, verdict, tuple(results), witness)
