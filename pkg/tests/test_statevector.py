import os

import numpy as np
import pytest

from qcwb.circuit import Circuit, Gate
from qcwb.fermion import OccupationState
from qcwb.operators import PauliSum, random_pauli_sum
from qcwb.shots import min_shots_grouped
from qcwb.statevector import (GroupSampler, apply, apply_pauli_rotation, basis_state, circuit_unitary,
                              expectation, expectation_sampled, init_state, marginal, norm_check,
                              probabilities, sample, simulation_limit, zero_state)

from dense import circuit_matrix, embed, random_circuit


def random_state(width, rng):
    psi = rng.normal(size=1 << width) + 1j * rng.normal(size=1 << width)
    return psi / np.linalg.norm(psi)


def test_init_state_examples():
    psi = init_state(OccupationState(0b0101, 4), 4)
    assert psi[5] == 1 and np.count_nonzero(psi) == 1
    np.testing.assert_array_equal(init_state(OccupationState(0, 2), 2), [1, 0, 0, 0])
    norm_check(psi)
    with pytest.raises(ValueError):
        init_state(OccupationState(0, 2), 3)


def test_gate_examples():
    out = apply(Circuit(1, [Gate("H", (0,))]))
    np.testing.assert_allclose(out, [2 ** -0.5, 2 ** -0.5])
    out = apply(Circuit(2, [Gate("CNOT", (1, 0))]), basis_state(0b10, 2))
    np.testing.assert_allclose(out, basis_state(0b11, 2))


def test_each_gate_matches_dense(rng):
    for name, qubits, angle in [("H", (2,), None), ("X", (0,), None), ("S", (1,), None),
                                ("SDG", (2,), None), ("RZ", (1,), 0.7), ("PHASE", (0,), -1.1),
                                ("CNOT", (2, 0), None), ("CNOT", (0, 2), None), ("CRZ", (1, 2), 0.4),
                                ("CPHASE", (2, 1), 1.3), ("SWAP", (0, 2), None)]:
        g = Gate(name, qubits, angle)
        psi = random_state(3, rng)
        np.testing.assert_allclose(apply(Circuit(3, [g]), psi), embed(g, 3) @ psi, atol=1e-12)


def test_random_six_qubit_circuit(rng):
    c = random_circuit(6, 80, rng)
    psi = random_state(6, rng)
    np.testing.assert_allclose(apply(c, psi), circuit_matrix(c) @ psi, atol=1e-10)


def test_apply_does_not_modify_input(rng):
    psi = random_state(2, rng)
    before = psi.copy()
    apply(Circuit(2, [Gate("X", (0,))]), psi)
    np.testing.assert_array_equal(psi, before)


def test_expectation_examples():
    assert expectation(zero_state(1), PauliSum.from_pairs([(1.0, "Z")])) == 1.0
    plus = apply(Circuit(1, [Gate("H", (0,))]))
    assert expectation(plus, PauliSum.from_pairs([(1.0, "X")])) == pytest.approx(1.0)


@pytest.mark.parametrize("width", [1, 3, 6])
def test_expectation_matches_dense(width, rng):
    h = random_pauli_sum(width, 20, rng)
    psi = random_state(width, rng)
    ref = np.vdot(psi, h.to_matrix() @ psi).real
    assert expectation(psi, h) == pytest.approx(ref, abs=1e-10)


def test_pauli_rotation_matches_expm(rng):
    from scipy.linalg import expm

    h = PauliSum.from_pairs([(1.0, "XYZ")])
    x, z = h.terms[0].masks
    psi = random_state(3, rng)
    np.testing.assert_allclose(apply_pauli_rotation(psi, x, z, 0.4),
                               expm(0.4j * h.to_matrix()) @ psi, atol=1e-12)


def test_sampling_examples():
    assert sample(zero_state(1), [0], shots=100, seed=3) == {"0": 100}
    plus = apply(Circuit(1, [Gate("H", (0,))]))
    counts = sample(plus, [0], shots=100_000, seed=11)
    assert abs(counts["0"] - 50_000) <= 5 * np.sqrt(100_000 * 0.25)
    ghz = apply(Circuit(3, [Gate("H", (0,)), Gate("CNOT", (0, 1)), Gate("CNOT", (1, 2))]))
    assert set(sample(ghz, [0, 1, 2], shots=500, seed=0)) <= {"000", "111"}


def test_sample_key_order_and_determinism():
    psi = basis_state(0b001, 3)
    assert sample(psi, [0, 1], shots=5, seed=0) == {"01": 5}
    assert sample(psi, [1, 0], shots=5, seed=0) == {"10": 5}
    plus = apply(Circuit(2, [Gate("H", (0,)), Gate("H", (1,))]))
    assert sample(plus, shots=50, seed=9) == sample(plus, shots=50, seed=9)
    with pytest.raises(ValueError):
        sample(plus, [], shots=5)
    with pytest.raises(ValueError):
        sample(plus, shots=0)


def test_marginal():
    probs = probabilities(basis_state(0b110, 3))
    np.testing.assert_array_equal(marginal(probs, [2, 0]), [0, 1, 0, 0])


def test_sampled_eigenstate_is_exact():
    h = PauliSum.from_pairs([(0.3, "ZI"), (-0.2, "IZ"), (0.1, "ZZ"), (1.5, "II")])
    psi = basis_state(0b01, 2)
    plan = min_shots_grouped(h, epsilon=0.01)
    est = expectation_sampled(psi, h, plan, seed=4)
    assert est.estimate == pytest.approx(expectation(psi, h), abs=1e-12) and est.std == 0.0


def test_group_sampler_exact_value(rng):
    h = random_pauli_sum(4, 15, rng) + PauliSum.identity(4, 0.5)
    psi = random_state(4, rng)
    plan = min_shots_grouped(h, epsilon=0.1)
    sampler = GroupSampler(psi, h, plan.groups, plan.shots)
    assert sampler.exact() == pytest.approx(expectation(psi, h), abs=1e-12)


def test_identity_only_uses_no_shots():
    h = PauliSum.identity(2, -1.25)
    sampler = GroupSampler(zero_state(2), h, (), ())
    res = sampler.run(0)
    assert res.estimate == -1.25 and res.shots == 0


def test_mismatched_plan_rejected():
    h = PauliSum.from_pairs([(0.3, "ZI"), (0.1, "XX")])
    plan = min_shots_grouped(PauliSum.from_pairs([(0.3, "ZI")]), epsilon=0.1)
    with pytest.raises(ValueError):
        expectation_sampled(zero_state(2), h, plan)


def test_simulation_limit(monkeypatch):
    monkeypatch.setenv("QCWB_DENSE_LIMIT", "3")
    assert simulation_limit() == 3
    with pytest.raises(ValueError):
        zero_state(4)
    with pytest.raises(ValueError):
        circuit_unitary(Circuit(2))
