"""
Deterministic underlying-state models for finite scenarios.

For a pairwise compatible scenario ``A_1, ..., A_m`` the sample space is the
Cartesian product of the spectra, each observable is the coordinate
function, and the measure of a pure state puts mass
``P[A_1 = l_1, ..., A_m = l_m]`` (the sequential joint) on the point
``l = (l_1, ..., l_m)``. Updating the state by Lüders' rule then matches
conditioning the measure on ``{l : l_A = alpha}``; the ``verify_*``
functions check this and the other model laws numerically.

For incompatible scenarios no such model exists. :func:`build_measure`
refuses, and :func:`demonstrate_obstruction` shows what goes wrong when the
same construction is forced with one fixed measurement order.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .compatibility import COMPAT_TOL, Witness, scenario_pairwise_check
from .errors import (CapacityError, IncompatibleScenarioError, NoObstructionError,
                     NumericError, UndefinedUpdateError, ValidationError)
from .spectral import HermitianObservable
from .states import (ZERO_TOL, PureState, born_probability, joint_tables,
                     luders_update_pure, random_pure_states, sequential_joint)

__all__ = [
    "MODEL_TOL",
    "DEFAULT_CAP",
    "SampleSpace",
    "UnderlyingMeasure",
    "UnderlyingModel",
    "VerificationReport",
    "ObstructionRecord",
    "build_sample_space",
    "build_measure",
    "fixed_order_measure",
    "build_model",
    "condition_measure",
    "verify_born_agreement",
    "verify_update_diagram",
    "verify_model_laws",
    "demonstrate_obstruction",
    "model_to_dict",
    "dump_model",
]

MODEL_TOL = 1e-9
DEFAULT_CAP = 10 ** 6


def _observables_of(scenario) -> list:
    if hasattr(scenario, "observables"):
        return list(scenario.observables)
    return list(scenario)


@dataclass(frozen=True, eq=False)
class SampleSpace:
    """Product of the spectra of ``observables``, enumerated row-major."""

    observables: tuple

    @property
    def names(self) -> tuple:
        return tuple(o.name for o in self.observables)

    @property
    def shape(self) -> tuple:
        return tuple(len(o) for o in self.observables)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def points(self) -> np.ndarray:
        """``(size, m)`` array; row ``k`` holds the coordinates of point ``k``."""
        return np.array(list(itertools.product(*(o.eigenvalues for o in self.observables))),
                        dtype=float).reshape(self.size, len(self.observables))

    def axis(self, observable) -> int:
        name = observable.name if isinstance(observable, HermitianObservable) else observable
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationError(f"{name!r} is not an observable of this sample space") from None

    def coordinate(self, observable, point_index: int) -> float:
        """Value of ``observable`` at a point (the coordinate function)."""
        i = self.axis(observable)
        idx = np.unravel_index(point_index, self.shape)[i]
        return self.observables[i].eigenvalues[idx]

    def event(self, observable, value) -> np.ndarray:
        """Boolean mask of the points where ``observable`` takes ``value``."""
        i = self.axis(observable)
        j = self.observables[i].index(value)
        mask = np.zeros(self.shape, dtype=bool)
        sl = [slice(None)] * len(self.shape)
        sl[i] = j
        mask[tuple(sl)] = True
        return mask.reshape(-1)


@dataclass(frozen=True, eq=False)
class UnderlyingMeasure:
    """Probability mass function over the points of ``space``."""

    space: SampleSpace
    pmf: np.ndarray = field(repr=False)

    def __post_init__(self):
        pmf = np.array(self.pmf, dtype=float).reshape(-1)
        if pmf.size != self.space.size:
            raise ValidationError(f"pmf has {pmf.size} entries, space has {self.space.size}")
        pmf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)

    @property
    def table(self) -> np.ndarray:
        return self.pmf.reshape(self.space.shape)

    def probability(self, *events) -> float:
        """Mass of the intersection of ``(observable, value)`` events."""
        mask = np.ones(self.space.size, dtype=bool)
        for obs, value in events:
            mask &= self.space.event(obs, value)
        return float(self.pmf[mask].sum())


def _finalize_pmf(raw: np.ndarray, tol: float) -> np.ndarray:
    """Clamp tiny negatives to zero and renormalize each row."""
    raw = np.atleast_2d(raw)
    if np.any(raw < -tol):
        raise NumericError(f"pmf entry {raw.min()!r} is negative beyond tolerance")
    out = np.where(raw < 0, 0.0, raw)
    sums = out.sum(axis=1, keepdims=True)
    if np.any(np.abs(sums - 1.0) > tol):
        raise NumericError(f"pmf sums to {sums.ravel()!r}, not 1")
    return out / sums


def _pmfs(space: SampleSpace, vecs) -> np.ndarray:
    vecs = np.atleast_2d(np.asarray(vecs, dtype=complex))
    raw = joint_tables(vecs, space.observables).reshape(vecs.shape[0], -1)
    tol = max(o.tol for o in space.observables)
    return _finalize_pmf(raw, tol)


@dataclass(frozen=True, eq=False)
class UnderlyingModel:
    """Sample space plus one measure per probe state.

    ``measure(psi)`` evaluates the state-to-measure map for any pure state,
    not only the stored probes.
    """

    scenario_id: str
    space: SampleSpace
    states: Mapping = field(repr=False)
    measures: Mapping = field(repr=False)

    def measure(self, psi) -> UnderlyingMeasure:
        psi = psi if isinstance(psi, PureState) else PureState(psi)
        return UnderlyingMeasure(self.space, _pmfs(self.space, psi.vector)[0])


@dataclass(frozen=True)
class VerificationReport:
    name: str
    passed: bool
    max_deviation: float
    tolerance: float
    checks: int
    details: dict = field(default_factory=dict)
    failures: tuple = ()

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "max_deviation": self.max_deviation,
                "tolerance": self.tolerance, "checks": self.checks,
                "details": dict(self.details), "failures": list(self.failures)}


@dataclass(frozen=True)
class ObstructionRecord:
    """Why no state-updating model exists for a scenario.

    Any such model would force ``p_ab`` (first order) and ``p_ba`` (reversed
    order) to both equal the measure of the intersection of the two events;
    ``gap`` is how far apart they actually are. ``attempted`` holds the
    deviations of the fixed-order construction on each model law, and
    ``violated_laws`` the ones above tolerance.
    """

    witness: Witness
    p_ab: float
    p_ba: float
    gap: float
    statement: str
    attempted: dict = field(default_factory=dict)
    violated_laws: tuple = ()

    def to_dict(self) -> dict:
        return {"witness": self.witness.to_dict(), "p_ab": self.p_ab, "p_ba": self.p_ba,
                "gap": self.gap, "statement": self.statement,
                "attempted": dict(self.attempted), "violated_laws": list(self.violated_laws)}


def build_sample_space(scenario, cap: int = DEFAULT_CAP) -> SampleSpace:
    """Enumerate the product of spectra; compatibility is not required."""
    observables = _observables_of(scenario)
    if not observables:
        raise ValidationError("a scenario needs at least one observable")
    space = SampleSpace(tuple(observables))
    if space.size > cap:
        raise CapacityError(f"sample space has {space.size} points, cap is {cap}")
    return space


def _require_compatible(scenario, tol_compat):
    report = scenario_pairwise_check(scenario, tol_compat)
    if not report.compatible:
        w = report.witness
        raise IncompatibleScenarioError(
            f"{w.pair[0]!r} and {w.pair[1]!r} are incompatible (order gap {w.violation:.3g}); "
            "no state-updating model exists", witness=w)
    return report


def fixed_order_measure(space: SampleSpace, psi) -> UnderlyingMeasure:
    """Sequential-joint pmf in the declared order, without a compatibility check."""
    psi = psi if isinstance(psi, PureState) else PureState(psi)
    return UnderlyingMeasure(space, _pmfs(space, psi.vector)[0])


def build_measure(space: SampleSpace, scenario, psi, *, tol_compat: float = COMPAT_TOL
                  ) -> UnderlyingMeasure:
    """Measure of ``psi``: mass ``P[A_1=l_1, ..., A_m=l_m]`` on each point ``l``.

    ``scenario`` (a Scenario or list of observables) defaults to the space's
    observables when ``None``.

    Raises
    ------
    IncompatibleScenarioError
        If some pair is incompatible; the witness is attached.
    """
    _require_compatible(space.observables if scenario is None else scenario, tol_compat)
    return fixed_order_measure(space, psi)


def _state_map(states) -> dict:
    if states is None:
        return {}
    if isinstance(states, Mapping):
        items = states.items()
    else:
        items = ((f"state[{i}]", s) for i, s in enumerate(states))
    return {k: (s if isinstance(s, PureState) else PureState(s)) for k, s in items}


def _assemble(scenario_id, space, states) -> UnderlyingModel:
    states = _state_map(states)
    if states:
        pmfs = _pmfs(space, np.stack([s.vector for s in states.values()]))
        measures = {k: UnderlyingMeasure(space, row) for k, row in zip(states, pmfs)}
    else:
        measures = {}
    return UnderlyingModel(scenario_id, space, states, measures)


def build_model(scenario, states=None, *, tol_compat: float = COMPAT_TOL,
                cap: int = DEFAULT_CAP) -> UnderlyingModel:
    """Construct the model for a pairwise compatible scenario.

    ``states`` is a mapping of ids to pure states, or a sequence (ids become
    ``state[i]``). When omitted, the scenario's probe states are used.
    """
    _require_compatible(scenario, tol_compat)
    space = build_sample_space(scenario, cap)
    if states is None:
        states = getattr(scenario, "probe_states", None)
    return _assemble(getattr(scenario, "id", ""), space, states)


def condition_measure(mu: UnderlyingMeasure, observable, value) -> UnderlyingMeasure:
    """``mu(. | observable = value)``."""
    mask = mu.space.event(observable, value)
    mass = float(mu.pmf[mask].sum())
    if mass <= ZERO_TOL:
        name = getattr(observable, "name", observable)
        raise UndefinedUpdateError(f"cannot condition on [{name}={value}]: mass {mass!r} is zero")
    return UnderlyingMeasure(mu.space, np.where(mask, mu.pmf, 0.0) / mass)


def _items(model, states):
    states = model.states if states is None else _state_map(states)
    for sid, psi in states.items():
        mu = model.measures.get(sid) if states is model.states else None
        yield sid, psi, (mu if mu is not None else model.measure(psi))


def verify_born_agreement(model: UnderlyingModel, states=None, tol: float = MODEL_TOL
                          ) -> VerificationReport:
    """Check ``P_psi[A=alpha] == mu_psi(A=alpha)`` for every observable and value."""
    space = model.space
    worst, checks, failures = 0.0, 0, []
    for sid, psi, mu in _items(model, states):
        table = mu.table
        for i, obs in enumerate(space.observables):
            axes = tuple(k for k in range(table.ndim) if k != i)
            marginal = table.sum(axis=axes)
            for j, value in enumerate(obs.eigenvalues):
                dev = abs(born_probability(psi, obs, value) - marginal[j])
                checks += 1
                worst = max(worst, dev)
                if dev > tol and len(failures) < 10:
                    failures.append(f"{sid}: [{obs.name}={value:g}] deviates by {dev:.3g}")
    return VerificationReport("born", bool(worst <= tol), float(worst), tol, checks,
                              {"born": float(worst)}, tuple(failures))


def verify_update_diagram(model: UnderlyingModel, states=None, tol: float = MODEL_TOL
                          ) -> VerificationReport:
    """Check that the measure of the updated state is the conditioned measure.

    For every state, observable and value with nonzero probability, compares
    the measure of ``luders_update_pure(psi, A, alpha)`` with
    ``condition_measure(mu_psi, A, alpha)`` pointwise.
    """
    space = model.space
    worst, checks, failures = 0.0, 0, []
    for sid, psi, mu in _items(model, states):
        events, updated = [], []
        for obs in space.observables:
            for value in obs.eigenvalues:
                if born_probability(psi, obs, value) <= ZERO_TOL:
                    continue
                events.append((obs, value))
                updated.append(luders_update_pure(psi, obs, value).vector)
        if not events:
            continue
        lhs = _pmfs(space, np.stack(updated))
        for (obs, value), row in zip(events, lhs):
            rhs = condition_measure(mu, obs, value).pmf
            dev = float(np.max(np.abs(row - rhs)))
            checks += 1
            worst = max(worst, dev)
            if dev > tol and len(failures) < 10:
                failures.append(f"{sid}: update on [{obs.name}={value:g}] deviates by {dev:.3g}")
    return VerificationReport("diagram", bool(worst <= tol), float(worst), tol, checks,
                              {"diagram": float(worst)}, tuple(failures))


def _permutations(m: int, limit: int, rng) -> list:
    if m < 2:
        return []
    if math.factorial(m) - 1 <= limit:
        return list(itertools.permutations(range(m)))[1:]
    seen = set()
    identity = tuple(range(m))
    while len(seen) < limit:
        p = tuple(int(x) for x in rng.permutation(m))
        if p != identity:
            seen.add(p)
    return sorted(seen)


def _subsets(m: int, limit: int, rng) -> list:
    all_subsets = [s for r in range(1, m) for s in itertools.combinations(range(m), r)]
    if len(all_subsets) <= limit:
        return all_subsets
    idx = rng.choice(len(all_subsets), size=limit, replace=False)
    return [all_subsets[i] for i in sorted(idx)]


def verify_model_laws(model: UnderlyingModel, states=None, tol: float = MODEL_TOL, *,
                      n_permutations: int = 20, n_chains: int = 20, n_subsets: int = 64,
                      seed: int = 0) -> VerificationReport:
    """Check the laws a state-updating model must satisfy.

    ``permutation``
        the full-scenario sequential joint is the same in every measurement
        order (up to ``n_permutations`` seeded orders);
    ``marginal``
        summing the measure over any group of observables gives the joint of
        the remaining ones (non-disturbance);
    ``joint``
        for ``n_chains`` random sub-chains per state, in random order, the
        sequential joint equals the measure of the intersection of events;
    ``nonnegativity``
        no negative mass.
    """
    rng = np.random.default_rng(seed)
    space = model.space
    obs = space.observables
    m = len(obs)
    perms = _permutations(m, n_permutations, rng)
    subsets = _subsets(m, n_subsets, rng)

    items = list(_items(model, states))
    dev = {"permutation": 0.0, "marginal": 0.0, "joint": 0.0, "nonnegativity": 0.0}
    checks = 0
    failures = []
    if not items:
        return VerificationReport("laws", True, 0.0, tol, 0, dev, ())

    vecs = np.stack([psi.vector for _, psi, _ in items])
    tables = np.stack([mu.table for _, _, mu in items])
    ids = [sid for sid, _, _ in items]

    def record(law, values, what):
        nonlocal checks
        values = np.asarray(values).reshape(len(ids), -1)
        per_state = values.max(axis=1) if values.size else np.zeros(len(ids))
        checks += len(ids)
        dev[law] = max(dev[law], float(per_state.max()))
        for sid, d in zip(ids, per_state):
            if d > tol and len(failures) < 10:
                failures.append(f"{sid}: {law} law fails for {what} by {d:.3g}")

    for perm in perms:
        t = joint_tables(vecs, [obs[p] for p in perm])
        back = t.transpose((0,) + tuple(1 + int(k) for k in np.argsort(perm)))
        record("permutation", np.abs(back - tables), "order " + ",".join(obs[p].name for p in perm))

    for sub in subsets:
        rest = tuple(1 + k for k in range(m) if k not in sub)
        marg = tables.sum(axis=rest)
        direct = joint_tables(vecs, [obs[k] for k in sub])
        record("marginal", np.abs(marg - direct), "{" + ",".join(obs[k].name for k in sub) + "}")

    for k, (sid, psi, mu) in enumerate(items):
        worst = 0.0
        for _ in range(n_chains):
            size = int(rng.integers(1, m + 1))
            order = rng.permutation(m)[:size]
            chain = []
            for a in order:
                o = obs[int(a)]
                chain.append((o, o.eigenvalues[int(rng.integers(len(o)))]))
            d = abs(sequential_joint(psi, chain) - mu.probability(*chain))
            worst = max(worst, d)
            checks += 1
            if d > tol and len(failures) < 10:
                desc = ",".join(f"{o.name}={v:g}" for o, v in chain)
                failures.append(f"{sid}: joint law fails for [{desc}] by {d:.3g}")
        dev["joint"] = max(dev["joint"], worst)

    neg = float(max(0.0, -tables.min()))
    dev["nonnegativity"] = neg
    if neg > tol:
        failures.append(f"negative mass {-neg:.3g}")
    worst = max(dev.values())
    return VerificationReport("laws", bool(worst <= tol), float(worst), tol, checks, dev, tuple(failures))


def demonstrate_obstruction(scenario, *, n_states: int = 50, seed: int = 0,
                            tol_compat: float = COMPAT_TOL, tol_model: float = MODEL_TOL,
                            cap: int = DEFAULT_CAP) -> ObstructionRecord:
    """Explain why an incompatible scenario has no state-updating model.

    Finds a witness pair, then builds the fixed-order measure for the witness
    state and ``n_states`` seeded random states and reports which model laws
    (permutation, marginal, joint, nonnegativity, diagram) it breaks. The
    exhibit is skipped when the sample space exceeds ``cap``.

    Raises
    ------
    NoObstructionError
        If the scenario is pairwise compatible.
    """
    report = scenario_pairwise_check(scenario, tol_compat)
    if report.compatible:
        raise NoObstructionError("scenario is pairwise compatible; a model exists")
    w = report.witness
    (a, b), (alpha, beta) = w.pair, w.values
    statement = (
        f"a state-updating model would force P[{a}={alpha:g}, {b}={beta:g}] = "
        f"mu(Omega({a}={alpha:g}) & Omega({b}={beta:g})) = P[{b}={beta:g}, {a}={alpha:g}], "
        f"but the two orders give {w.p_ab:.12g} and {w.p_ba:.12g}")

    attempted, violated = {}, []
    try:
        space = build_sample_space(scenario, cap)
    except CapacityError:
        space = None
    if space is not None:
        dim = space.observables[0].dim
        probes = {"witness": w.psi}
        for i, s in enumerate(random_pure_states(dim, n_states, seed)):
            probes[f"random[{i}]"] = s
        forced = _assemble(getattr(scenario, "id", ""), space, probes)
        laws = verify_model_laws(forced, tol=tol_model, seed=seed)
        diagram = verify_update_diagram(forced, tol=tol_model)
        attempted = dict(laws.details)
        attempted["diagram"] = diagram.max_deviation
        violated = [k for k, v in attempted.items() if v > tol_model]

    return ObstructionRecord(witness=w, p_ab=w.p_ab, p_ba=w.p_ba, gap=abs(w.p_ab - w.p_ba),
                             statement=statement, attempted=attempted,
                             violated_laws=tuple(violated))


def model_to_dict(model: UnderlyingModel) -> dict:
    """Export form: observable order, spectra, points and per-state pmfs."""
    space = model.space
    return {
        "scenario": model.scenario_id,
        "observables": list(space.names),
        "spectra": {o.name: list(o.eigenvalues) for o in space.observables},
        "points": space.points.tolist(),
        "pmf_per_state": {sid: mu.pmf.tolist() for sid, mu in model.measures.items()},
    }


def dump_model(model: UnderlyingModel) -> str:
    return json.dumps(model_to_dict(model), indent=2)
