"""
Scenarios: a finite set of observables on one Hilbert space, optional probe
states, a seed and tolerances. Also the JSON document format and the fixture
generators (random scenarios and the classical-wave demo).

Document format::

    {
      "id": "pauli-zx",
      "dimension": 2,
      "observables": [
        {"name": "Z", "matrix": {"real": [[1, 0], [0, -1]], "imag": [[0, 0], [0, 0]]}}
      ],
      "states": [{"name": "zero", "vector": {"real": [1, 0], "imag": [0, 0]}}],
      "seed": 0,
      "options": {"tol_compat": 1e-8, "tol_model": 1e-9, "random_states": 50,
                  "sample_space_cap": 1000000, "group_tol": null}
    }

``imag`` parts, ``id``, ``states``, ``seed`` and ``options`` are optional.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
from scipy.stats import unitary_group

from .compatibility import COMPAT_TOL, scenario_pairwise_check
from .errors import ScenarioFormatError, UnderlyingStatesError
from .model import DEFAULT_CAP, MODEL_TOL
from .spectral import HermitianObservable, spectral_decompose
from .states import PureState, born_probability, random_pure_states, sequential_distribution

__all__ = [
    "ScenarioOptions",
    "Scenario",
    "parse_scenario",
    "load_scenario",
    "scenario_to_dict",
    "dump_scenario",
    "generate_random_scenario",
    "generate_wave_demo",
    "wave_chains",
]

MAX_SEED = 2 ** 64 - 1


@dataclass(frozen=True)
class ScenarioOptions:
    tol_compat: float = COMPAT_TOL
    tol_model: float = MODEL_TOL
    random_states: int = 50
    sample_space_cap: int = DEFAULT_CAP
    group_tol: float | None = None


@dataclass(frozen=True, eq=False)
class Scenario:
    """Observables of one system, plus probe states and run settings.

    ``probe_states`` maps names to :class:`PureState`; ``metadata`` carries
    free-form annotations (the wave demo records its construction there).
    """

    id: str
    dimension: int
    observables: tuple
    probe_states: dict = field(default_factory=dict)
    seed: int = 0
    options: ScenarioOptions = field(default_factory=ScenarioOptions)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.observables:
            raise ScenarioFormatError("at least one observable is required", "observables")
        names = [o.name for o in self.observables]
        for i, n in enumerate(names):
            if n in names[:i]:
                raise ScenarioFormatError(f"duplicate observable name {n!r}", f"observables[{i}].name")
        for i, o in enumerate(self.observables):
            if o.dim != self.dimension:
                raise ScenarioFormatError(
                    f"{o.name!r} is {o.dim}x{o.dim} but dimension is {self.dimension}",
                    f"observables[{i}].matrix")
        for name, s in self.probe_states.items():
            if s.dim != self.dimension:
                raise ScenarioFormatError(
                    f"state {name!r} has length {s.dim} but dimension is {self.dimension}",
                    f"states[{name}]")
        if not 0 <= self.seed <= MAX_SEED:
            raise ScenarioFormatError("seed must be a 64-bit unsigned integer", "seed")

    def observable(self, name: str) -> HermitianObservable:
        for o in self.observables:
            if o.name == name:
                return o
        raise KeyError(name)

    def random_states(self, n: int | None = None, seed: int | None = None) -> list:
        """Seeded random probe states (``options.random_states`` by default)."""
        n = self.options.random_states if n is None else n
        return random_pure_states(self.dimension, n, self.seed if seed is None else seed)


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ScenarioFormatError(f"expected a number, got {x!r}", where)
    return float(x)


def _grid(obj, key, shape, where, required=True):
    if key not in obj:
        if required:
            raise ScenarioFormatError("missing field", f"{where}.{key}")
        return np.zeros(shape)
    data = obj[key]
    loc = f"{where}.{key}"
    if len(shape) == 1:
        if not isinstance(data, list) or len(data) != shape[0]:
            raise ScenarioFormatError(f"expected a list of {shape[0]} numbers", loc)
        return np.array([_number(x, f"{loc}[{i}]") for i, x in enumerate(data)])
    if not isinstance(data, list) or len(data) != shape[0]:
        raise ScenarioFormatError(f"expected {shape[0]} rows", loc)
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != shape[1]:
            raise ScenarioFormatError(f"expected a row of {shape[1]} numbers", f"{loc}[{i}]")
        rows.append([_number(x, f"{loc}[{i}][{j}]") for j, x in enumerate(row)])
    return np.array(rows)


def _complex_field(entry, key, where, expect_matrix):
    loc = f"{where}.{key}"
    if key not in entry:
        raise ScenarioFormatError("missing field", loc)
    obj = entry[key]
    if not isinstance(obj, dict):
        raise ScenarioFormatError("expected an object with 'real' and optional 'imag'", loc)
    real = obj.get("real")
    if not isinstance(real, list) or not real:
        raise ScenarioFormatError("missing or empty field", f"{loc}.real")
    if expect_matrix:
        shape = (len(real), len(real[0]) if isinstance(real[0], list) else -1)
        if shape[1] != shape[0]:
            raise ScenarioFormatError(f"matrix must be square, got {len(real)} rows of "
                                      f"length {shape[1]}", f"{loc}.real")
    else:
        shape = (len(real),)
    return _grid(obj, "real", shape, loc) + 1j * _grid(obj, "imag", shape, loc, required=False)


def _options(obj) -> ScenarioOptions:
    if obj is None:
        return ScenarioOptions()
    if not isinstance(obj, dict):
        raise ScenarioFormatError("expected an object", "options")
    known = {f.name for f in fields(ScenarioOptions)}
    for k in obj:
        if k not in known:
            raise ScenarioFormatError(f"unknown option {k!r}", f"options.{k}")
    kw = {}
    for k in ("tol_compat", "tol_model"):
        if k in obj:
            v = _number(obj[k], f"options.{k}")
            if v <= 0:
                raise ScenarioFormatError("must be positive", f"options.{k}")
            kw[k] = v
    for k in ("random_states", "sample_space_cap"):
        if k in obj:
            v = obj[k]
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ScenarioFormatError("must be a non-negative integer", f"options.{k}")
            kw[k] = v
    if obj.get("group_tol") is not None:
        kw["group_tol"] = _number(obj["group_tol"], "options.group_tol")
    return ScenarioOptions(**kw)


def parse_scenario(document) -> Scenario:
    """Build a validated :class:`Scenario` from JSON text or an already-parsed dict.

    Every observable is spectrally decomposed.

    Raises
    ------
    ScenarioFormatError
        With the offending line (syntax errors) or field path.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ScenarioFormatError("top level must be an object")

    dim = doc.get("dimension")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ScenarioFormatError("must be a positive integer", "dimension")

    options = _options(doc.get("options"))
    raw_obs = doc.get("observables")
    if not isinstance(raw_obs, list) or not raw_obs:
        raise ScenarioFormatError("expected a non-empty list", "observables")

    observables = []
    for i, entry in enumerate(raw_obs):
        where = f"observables[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioFormatError("expected an object", where)
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise ScenarioFormatError("expected a non-empty string", f"{where}.name")
        m = _complex_field(entry, "matrix", where, expect_matrix=True)
        if m.shape[0] != dim:
            raise ScenarioFormatError(
                f"matrix is {m.shape[0]}x{m.shape[1]} but dimension is {dim}", f"{where}.matrix")
        try:
            observables.append(spectral_decompose(m, options.group_tol, name=name))
        except UnderlyingStatesError as exc:
            raise ScenarioFormatError(str(exc), f"{where}.matrix") from None

    states = {}
    raw_states = doc.get("states", [])
    if not isinstance(raw_states, list):
        raise ScenarioFormatError("expected a list", "states")
    for i, entry in enumerate(raw_states):
        where = f"states[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioFormatError("expected an object", where)
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise ScenarioFormatError("expected a non-empty string", f"{where}.name")
        if name in states:
            raise ScenarioFormatError(f"duplicate state name {name!r}", f"{where}.name")
        v = _complex_field(entry, "vector", where, expect_matrix=False)
        if v.shape[0] != dim:
            raise ScenarioFormatError(f"vector has length {v.shape[0]} but dimension is {dim}",
                                      f"{where}.vector")
        try:
            states[name] = PureState(v)
        except UnderlyingStatesError as exc:
            raise ScenarioFormatError(str(exc), f"{where}.vector") from None

    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ScenarioFormatError("must be an integer", "seed")
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ScenarioFormatError("expected an object", "metadata")
    sid = doc.get("id", "scenario")
    if not isinstance(sid, str):
        raise ScenarioFormatError("expected a string", "id")
    return Scenario(sid, dim, tuple(observables), states, seed, options, metadata)


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def _split(a: np.ndarray) -> dict:
    return {"real": a.real.tolist(), "imag": a.imag.tolist()}


def scenario_to_dict(scenario: Scenario) -> dict:
    o = scenario.options
    doc = {
        "id": scenario.id,
        "dimension": scenario.dimension,
        "observables": [{"name": ob.name, "matrix": _split(ob.matrix)}
                        for ob in scenario.observables],
        "states": [{"name": k, "vector": _split(s.vector)}
                   for k, s in scenario.probe_states.items()],
        "seed": scenario.seed,
        "options": {"tol_compat": o.tol_compat, "tol_model": o.tol_model,
                    "random_states": o.random_states, "sample_space_cap": o.sample_space_cap,
                    "group_tol": o.group_tol},
    }
    if scenario.metadata:
        doc["metadata"] = scenario.metadata
    return doc


def dump_scenario(scenario: Scenario) -> str:
    """JSON text that :func:`parse_scenario` reads back exactly."""
    return json.dumps(scenario_to_dict(scenario), indent=2)


def generate_random_scenario(dimension: int, count: int, compatible: bool, seed: int) -> Scenario:
    """Seeded random scenario of ``count`` observables on ``C^dimension``.

    Compatible scenarios conjugate random integer diagonals in ``[-2, 2]``
    (so degenerate spectra occur) by one shared Haar unitary. Incompatible
    ones use independent GUE matrices, redrawn until some pair fails the
    compatibility check.
    """
    if dimension < 2:
        raise ValueError("dimension must be at least 2")
    if count < 1:
        raise ValueError("count must be at least 1")
    if not compatible and count < 2:
        raise ValueError("an incompatible scenario needs at least two observables")
    rng = np.random.default_rng(seed)
    names = [f"A{i}" for i in range(count)]
    kind = "compatible" if compatible else "incompatible"
    sid = f"random-d{dimension}-k{count}-{kind}-s{seed}"

    if compatible:
        u = unitary_group.rvs(dimension, random_state=rng)
        mats = []
        for _ in range(count):
            d = rng.integers(-2, 3, size=dimension).astype(float)
            m = u @ np.diag(d) @ u.conj().T
            mats.append((m + m.conj().T) / 2)
        obs = tuple(spectral_decompose(m, name=n) for m, n in zip(mats, names))
        return Scenario(sid, dimension, obs, seed=seed)

    while True:
        mats = []
        for _ in range(count):
            g = rng.standard_normal((dimension, dimension)) + 1j * rng.standard_normal((dimension, dimension))
            mats.append((g + g.conj().T) / 2)
        obs = tuple(spectral_decompose(m, name=n) for m, n in zip(mats, names))
        scenario = Scenario(sid, dimension, obs, seed=seed)
        if not scenario_pairwise_check(scenario).compatible:
            return scenario


def _wave_labels(n: int) -> list:
    """Velocity label (+1, -1 or 0) of each Fourier mode ``k``."""
    labels = []
    for k in range(n):
        if k == 0:
            labels.append(0 if n % 2 else 1)
        elif 2 * k == n:
            labels.append(-1)
        else:
            labels.append(1 if k < n - k else -1)
    return labels


def generate_wave_demo(n_modes: int, velocity: float = 1.0) -> Scenario:
    """Finite-dimensional surrogate of a string with standing and travelling waves.

    ``N`` is diagonal with eigenvalues ``1..n_modes`` (standing-wave basis).
    ``V`` is diagonal in the discrete Fourier basis: mode ``k`` and its
    conjugate ``n - k`` get ``+velocity`` and ``-velocity``. For even sizes the
    two self-conjugate modes (``0`` and ``n/2``) are paired the same way; for
    odd sizes the zero mode gets velocity 0. The probe ``psi_plus`` is the
    first travelling mode with velocity ``+velocity``.
    """
    if n_modes < 2:
        raise ValueError("n_modes must be at least 2")
    n = n_modes
    j = np.arange(n)
    fourier = np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)  # column k is mode k
    labels = _wave_labels(n)
    v_mat = fourier @ np.diag(velocity * np.array(labels, dtype=float)) @ fourier.conj().T
    v_mat = (v_mat + v_mat.conj().T) / 2
    n_mat = np.diag(np.arange(1, n + 1, dtype=float))
    plus_mode = 1 if labels[1] == 1 else 0
    observables = (spectral_decompose(n_mat, name="N"), spectral_decompose(v_mat, name="V"))
    metadata = {
        "demo": "wave",
        "velocity": velocity,
        "plus_mode": plus_mode,
        "mode_velocities": [velocity * x for x in labels],
        "note": "truncated surrogate; the velocity labelling of Fourier modes is a modelling choice",
    }
    return Scenario(f"wave-n{n}", n, observables,
                    {"psi_plus": PureState(fourier[:, plus_mode])}, seed=0, metadata=metadata)


def wave_chains(scenario: Scenario) -> list:
    """The two measurement orders of ``(V=+v, N=n)`` on ``psi_plus`` for every ``n``.

    Each row holds ``p_N`` (``P[N=n]``), ``p_VN`` (``V`` first), ``p_NV``
    (``N`` first) and ``p_Vn`` (``P[V=+v]`` in the standing wave ``n``).
    For an eigenstate of ``V`` the first order reduces to ``p_N`` and the
    second to ``p_N * p_Vn``.
    """
    big_n, big_v = scenario.observable("N"), scenario.observable("V")
    psi = scenario.probe_states["psi_plus"]
    v_plus = big_v.eigenvalues[big_v.index(scenario.metadata.get("velocity", 1.0))]
    rows = []
    for k, n in enumerate(big_n.eigenvalues):
        standing = np.zeros(scenario.dimension, dtype=complex)
        standing[k] = 1.0
        p_n = born_probability(psi, big_n, n)
        p_vn = born_probability(standing, big_v, v_plus)
        p_v_then_n = sequential_distribution(psi, (big_v, v_plus), (big_n, n))
        p_n_then_v = sequential_distribution(psi, (big_n, n), (big_v, v_plus))
        rows.append({"n": n, "p_N": p_n, "p_VN": p_v_then_n, "p_NV": p_n_then_v,
                     "p_Vn": p_vn, "N_times_Vn": p_n * p_vn})
    return rows


def with_options(scenario: Scenario, **changes) -> Scenario:
    """Copy of ``scenario`` with some options replaced (``None`` values ignored)."""
    changes = {k: v for k, v in changes.items() if v is not None}
    if not changes:
        return scenario
    return replace(scenario, options=replace(scenario.options, **changes))
