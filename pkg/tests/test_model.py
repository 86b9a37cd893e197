import itertools

import numpy as np
import pytest

from underlying_states import (CapacityError, IncompatibleScenarioError, NoObstructionError,
                               UndefinedUpdateError, build_measure, build_model,
                               build_sample_space, condition_measure, demonstrate_obstruction,
                               generate_random_scenario, luders_update_pure, spectral_decompose,
                               verify_born_agreement, verify_model_laws, verify_update_diagram)
from underlying_states.model import UnderlyingMeasure, UnderlyingModel, dump_model, fixed_order_measure
from underlying_states.states import joint_table, random_pure_states
from conftest import BELL, I2, KET0, PAULI_Z, PLUS, random_unit

import json


def test_sample_space_examples(Z, X, ZI, IZ):
    s = build_sample_space([Z])
    assert s.size == 2 and s.points.tolist() == [[-1.0], [1.0]]
    assert build_sample_space([ZI, IZ]).size == 4
    s = build_sample_space([Z, X])
    assert s.size == 4
    assert [tuple(p) for p in np.round(s.points, 12)] == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    assert s.coordinate("X", 1) == pytest.approx(1.0)
    with pytest.raises(CapacityError):
        build_sample_space([Z, X], cap=3)


def test_measure_examples(Z, ZI, IZ):
    space = build_sample_space([Z])
    mu = build_measure(space, None, KET0)
    np.testing.assert_array_equal(mu.pmf, [0.0, 1.0])

    # oracle: <psi| P1 P2 |psi> with kron-built diagonal projectors
    pm = {1: np.diag([1.0, 0.0]), -1: np.diag([0.0, 1.0])}
    oracle = [np.vdot(BELL, np.kron(pm[a], I2) @ np.kron(I2, pm[b]) @ BELL).real
              for a, b in itertools.product([-1, 1], repeat=2)]
    assert oracle == pytest.approx([0.5, 0, 0, 0.5])
    space = build_sample_space([ZI, IZ])
    np.testing.assert_allclose(build_measure(space, None, BELL).pmf, oracle, atol=1e-12)

    z3 = spectral_decompose(np.linalg.matrix_power(PAULI_Z, 3), name="Z3")
    space = build_sample_space([Z, z3])
    np.testing.assert_allclose(build_measure(space, None, PLUS).pmf, [0.5, 0, 0, 0.5], atol=1e-12)


def test_build_measure_refuses_incompatible(Z, X):
    space = build_sample_space([Z, X])
    with pytest.raises(IncompatibleScenarioError) as exc:
        build_measure(space, None, KET0)
    assert exc.value.witness.violation > 1e-8


def test_condition_examples(ZI, IZ, Z):
    space = build_sample_space([Z])
    mu = UnderlyingMeasure(space, [0.5, 0.5])
    np.testing.assert_array_equal(condition_measure(mu, "Z", 1).pmf, [0.0, 1.0])

    space = build_sample_space([ZI, IZ])
    bell = build_measure(space, None, BELL)
    cond = condition_measure(bell, "ZI", 1)
    np.testing.assert_allclose(cond.pmf, [0, 0, 0, 1], atol=1e-12)
    again = condition_measure(cond, "ZI", 1)
    np.testing.assert_array_equal(again.pmf, cond.pmf)
    with pytest.raises(UndefinedUpdateError):
        condition_measure(cond, "ZI", -1)


def test_conditioning_commutes_on_compatible_events():
    sc = generate_random_scenario(4, 3, True, seed=5)
    model = build_model(sc, random_pure_states(4, 5, 0))
    names = [o.name for o in sc.observables]
    for mu in model.measures.values():
        for (a, oa), (b, ob) in itertools.combinations(zip(names, sc.observables), 2):
            for x in oa.eigenvalues:
                for y in ob.eigenvalues:
                    try:
                        ab = condition_measure(condition_measure(mu, a, x), b, y)
                        ba = condition_measure(condition_measure(mu, b, y), a, x)
                    except UndefinedUpdateError:
                        continue
                    assert np.max(np.abs(ab.pmf - ba.pmf)) <= 1e-9


def test_born_agreement_examples(Z, ZI, IZ):
    m = build_model([Z], {"plus": PLUS})
    rep = verify_born_agreement(m)
    assert rep.passed and rep.max_deviation <= 1e-15

    m = build_model([ZI, IZ], {"bell": BELL})
    assert verify_born_agreement(m).max_deviation <= 1e-9

    corrupted = UnderlyingModel(m.scenario_id, m.space, m.states,
                                {"bell": UnderlyingMeasure(m.space, [0.7, 0.1, 0.1, 0.1])})
    rep = verify_born_agreement(corrupted)
    assert not rep.passed and rep.max_deviation > 1e-9 and rep.failures


def test_update_diagram_examples(Z, ZI, IZ):
    m = build_model([Z], {"zero": KET0})
    rep = verify_update_diagram(m)
    assert rep.passed and rep.checks == 1

    m = build_model([ZI, IZ], {"bell": BELL})
    updated = m.measure(luders_update_pure(BELL, ZI, 1))
    np.testing.assert_allclose(updated.pmf, [0, 0, 0, 1], atol=1e-12)
    assert verify_update_diagram(m).passed

    zz = spectral_decompose(np.kron(PAULI_Z, PAULI_Z), name="ZZ")
    rng = np.random.default_rng(11)
    psi = random_unit(4, rng)
    m = build_model([ZI, zz], {"psi": psi})
    rep = verify_update_diagram(m)
    assert rep.passed and rep.max_deviation <= 1e-9
    # oracle: diagonal observables, pmf(a, b) = sum_j |psi_j|^2 [zi_j = a][zz_j = b]
    zi_d, zz_d = np.diag(np.kron(PAULI_Z, I2)).real, np.diag(np.kron(PAULI_Z, PAULI_Z)).real
    w = np.abs(psi) ** 2
    oracle = np.array([[w[(zi_d == a) & (zz_d == b)].sum() for b in (-1, 1)] for a in (-1, 1)])
    np.testing.assert_allclose(m.measures["psi"].table, oracle, atol=1e-12)
    # updated on [ZZ = -1]: weights restricted to zz_d == -1 and renormalised
    w2 = np.where(zz_d == -1, w, 0) / w[zz_d == -1].sum()
    oracle2 = np.array([[w2[(zi_d == a) & (zz_d == b)].sum() for b in (-1, 1)] for a in (-1, 1)])
    np.testing.assert_allclose(m.measure(luders_update_pure(psi, zz, -1)).table, oracle2, atol=1e-12)


def test_model_laws_examples(Z, ZI, IZ):
    m = build_model([Z], {"plus": PLUS})
    rep = verify_model_laws(m)
    assert rep.passed and rep.details["permutation"] == 0.0

    m = build_model([ZI, IZ], {"bell": BELL})
    np.testing.assert_allclose(joint_table(BELL, [ZI, IZ]), joint_table(BELL, [IZ, ZI]).T, atol=1e-15)
    assert verify_model_laws(m).passed

    diag = [np.diag(v) for v in ([1, 1, -1, -1], [2, 0, 2, 0], [1, 2, 2, 3])]
    obs = [spectral_decompose(d, name=n) for d, n in zip(diag, "ABC")]
    psi = random_unit(4, np.random.default_rng(2))
    w = np.abs(psi) ** 2
    for perm in itertools.permutations(range(3)):
        t = joint_table(psi, [obs[p] for p in perm]).transpose(np.argsort(perm))
        oracle = np.zeros(t.shape)
        for idx in itertools.product(*(range(len(o)) for o in obs)):
            mask = np.ones(4, dtype=bool)
            for o, dm, i in zip(obs, diag, idx):
                mask &= np.isclose(np.diag(dm), o.eigenvalues[i])
            oracle[idx] = w[mask].sum()
        np.testing.assert_allclose(t, oracle, atol=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_constructed_model_soundness(seed):
    sc = generate_random_scenario(2 + seed, 3, True, seed=seed)
    model = build_model(sc, sc.random_states(50))
    for verify in (verify_born_agreement, verify_update_diagram, verify_model_laws):
        rep = verify(model)
        assert rep.passed, rep.failures


def test_uniqueness_against_reversed_order():
    sc = generate_random_scenario(4, 3, True, seed=21)
    model = build_model(sc, sc.random_states(10))
    obs = list(sc.observables)
    for sid, psi in model.states.items():
        rev = joint_table(psi, obs[::-1]).transpose(2, 1, 0).reshape(-1)
        np.testing.assert_allclose(model.measures[sid].pmf, rev, atol=1e-9)


def test_obstruction_examples(Z, X, Y):
    rec = demonstrate_obstruction([Z, X])
    assert rec.gap == pytest.approx(np.sqrt(2) / 4, abs=1e-12)
    assert rec.violated_laws
    rec = demonstrate_obstruction([Z, X, Y])
    assert rec.witness.pair == ("X", "Y")
    with pytest.raises(NoObstructionError):
        demonstrate_obstruction([Z, spectral_decompose(PAULI_Z, name="Z'")])


def test_fixed_order_attempt_breaks_laws(Z, X):
    space = build_sample_space([Z, X])
    states = {f"s{i}": s for i, s in enumerate(random_pure_states(2, 10, 0))}
    pmfs = {k: fixed_order_measure(space, s) for k, s in states.items()}
    forced = UnderlyingModel("zx", space, states, pmfs)
    laws = verify_model_laws(forced)
    assert not laws.passed
    assert laws.details["permutation"] > 1e-8
    assert not verify_update_diagram(forced).passed


def test_model_export_roundtrip(ZI, IZ):
    m = build_model([ZI, IZ], {"bell": BELL})
    doc = json.loads(dump_model(m))
    assert doc["observables"] == ["ZI", "IZ"]
    assert len(doc["points"]) == 4
    np.testing.assert_array_equal(doc["pmf_per_state"]["bell"], m.measures["bell"].pmf)
