"""Measurement budgets and fault-tolerant cost of the algorithms.

The shot planner bounds the standard deviation of the energy estimate by a
target epsilon; a Monte-Carlo run checks that the bound holds. The resource
model then compiles a QPE circuit to Clifford+T and prices it on a surface
code, sweeping the physical error rate and the number of T factories.
"""

from qcwb.fixtures import get_fixture
from qcwb.metrics import compile_metrics
from qcwb.qpe import scale_spectrum
from qcwb.resources import error_rate_sweep, spacetime_frontier
from qcwb.shots import min_shots_grouped, min_shots_uniform, validate_plan
from qcwb.spectrum import ground_state
from qcwb.synthesis import qpe_circuit

eps = 1.6e-3
for name in ("2e2o", "6e4o", "10e6o"):
    h = get_fixture(name).hamiltonian()
    total, per_term = min_shots_uniform(h, eps)
    plan = min_shots_grouped(h, epsilon=eps)
    print(f"{name}: uniform {total:,} shots ({per_term:,} per term), "
          f"grouped {plan.total_shots:,} over {len(plan.groups)} groups")

fx = get_fixture("2e2o")
h = fx.hamiltonian()
_, psi = ground_state(h, fx.n_electrons)
plan = min_shots_grouped(h, epsilon=eps)
print(f"Monte-Carlo std over 200 trials: {validate_plan(psi, h, plan, trials=200, seed=0):.2e} (target {eps})")

fx = get_fixture("6e4o")
hs = scale_spectrum(fx.hamiltonian(), fx.qpe_scale, fx.qpe_shift).operator
metrics = compile_metrics(qpe_circuit(hs, 13, 1, fx.reference()), basis="clifford_t")
print(f"QPE a=13 n=1: depth {metrics.depth:,}, T count {metrics.t_count:,}")

print("p_phys     d   qubits   runtime/s")
for p, est in zip((1e-5, 1e-6, 1e-7, 1e-8), error_rate_sweep(metrics, None, [1e-5, 1e-6, 1e-7, 1e-8])):
    print(f"{p:.0e} {est.code_distance:4d} {est.total_physical_qubits:8,d} {est.runtime_seconds:10.1f}")

print("factories  qubits   runtime/s")
for est in spacetime_frontier(metrics, None, factory_range=range(1, 17, 3)):
    print(f"{est.factories:9d} {est.total_physical_qubits:8,d} {est.runtime_seconds:10.1f}")
