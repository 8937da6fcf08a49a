import math

import numpy as np
import pytest

from qcwb.ansatz import uccsd_circuit, uccsd_excitations
from qcwb.circuit import Block, Circuit, Gate
from qcwb.metrics import compile_metrics, layered_depth, lower, lower_gate, rz_t_cost
from qcwb.operators import PauliSum
from qcwb.synthesis import qpe_circuit
from qcwb.statevector import circuit_unitary

from dense import equal_up_to_phase, random_circuit


def test_single_cnot():
    m = compile_metrics(Circuit(2, [Gate("CNOT", (0, 1))]))
    assert (m.depth, m.two_qubit_count, m.gate_count) == (1, 1, 1)
    assert m.t_count is None


def test_crz_lowering_pattern_and_unitary():
    g = Gate("CRZ", (0, 1), 0.9)
    low = lower_gate(g)
    assert [p.name for p in low] == ["RZ", "CNOT", "RZ", "CNOT"]
    assert sorted(p.angle for p in low if p.name == "RZ") == pytest.approx([-0.45, 0.45])
    np.testing.assert_allclose(circuit_unitary(Circuit(2, low)), circuit_unitary(Circuit(2, [g])),
                               atol=1e-12)


@pytest.mark.parametrize("gate", [Gate("CPHASE", (1, 0), 0.7), Gate("SWAP", (0, 1)), Gate("PHASE", (1,), 0.4)])
def test_lowering_preserves_unitary_up_to_phase(gate):
    assert equal_up_to_phase(circuit_unitary(Circuit(2, lower_gate(gate))),
                             circuit_unitary(Circuit(2, [gate])), atol=1e-12)


def test_lower_random_circuit(rng):
    c = random_circuit(4, 50, rng)
    low = lower(c)
    assert {g.name for g in low.gates()} <= {"H", "X", "S", "SDG", "CNOT", "RZ"}
    assert equal_up_to_phase(circuit_unitary(low), circuit_unitary(c))


@pytest.mark.parametrize("angle,cost", [(0.0, 0), (math.pi / 2, 0), (math.pi, 0), (math.pi / 4, 1),
                                        (-3 * math.pi / 4, 1), (0.1, math.ceil(3 * math.log2(1e10)))])
def test_rz_t_cost(angle, cost):
    assert rz_t_cost(angle) == cost


def test_rz_t_cost_grows_with_precision():
    assert rz_t_cost(0.1, 1e-3) < rz_t_cost(0.1, 1e-6) < rz_t_cost(0.1, 1e-12)


@pytest.mark.parametrize("basis", ["clifford_rz", "clifford_t"])
def test_blocked_depth_equals_unrolled(basis, rng):
    for _ in range(5):
        body = random_circuit(4, 12, rng)
        c = Circuit(4, [Gate("H", (0,)), Block(body, 7), Block(Circuit(4, [Block(body, 3)]), 2)])
        flat = Circuit(4, list(c.gates()))
        m = compile_metrics(c, basis)
        mf = compile_metrics(flat, basis)
        assert m == mf
        assert m.depth == layered_depth(c, basis)


def test_t_count_totals():
    c = Circuit(1, [Gate("RZ", (0,), 0.1), Gate("RZ", (0,), math.pi / 4), Gate("S", (0,))])
    m = compile_metrics(c, "clifford_t", rz_precision=1e-4)
    assert m.t_count == math.ceil(3 * math.log2(1e4)) + 1
    assert m.depth == math.ceil(3 * math.log2(1e4)) + 1 + 1


def test_unknown_basis():
    with pytest.raises(ValueError):
        compile_metrics(Circuit(1, [Gate("H", (0,))]), "ibm")


def test_empty_circuit():
    assert compile_metrics(Circuit(3)).depth == 0


def test_uccsd_metrics_monotone_over_active_spaces():
    spaces = [(2 * k, k + 1) for k in range(1, 10)] + [(2, 2)]
    spaces = sorted(set(spaces), key=lambda s: s[1])
    rows = []
    for n_e, n_o in spaces:
        ansatz = uccsd_excitations(n_e, n_o)
        c = uccsd_circuit(ansatz, np.full(ansatz.parameter_count, 0.1))
        rows.append(compile_metrics(c, parameter_count=ansatz.parameter_count))
    for a, b in zip(rows, rows[1:]):
        assert b.depth > a.depth and b.two_qubit_count > a.two_qubit_count
        assert b.parameter_count > a.parameter_count


def test_qpe_cnot_doubles_per_ancilla():
    h = PauliSum.from_pairs([(0.1, "XX"), (0.2, "ZI"), (0.05, "YY")])
    counts = [compile_metrics(qpe_circuit(h, a, 2)).two_qubit_count for a in range(3, 11)]
    ratios = [b / a for a, b in zip(counts, counts[1:])]
    assert all(1.8 <= r <= 2.2 for r in ratios[2:])
