"""Variational ground-state search with a UCCSD ansatz.

Runs exact-mode VQE from a few jittered starting points, then the
incremental study that adds one excitation group at a time, and finally a
short shot-sampled run where every energy is estimated from measurements.
"""

from qcwb.ansatz import uccsd_excitations
from qcwb.fixtures import get_fixture
from qcwb.spectrum import sector_eigenvalues
from qcwb.vqe import VqeConfig, incremental_term_study, run_vqe

fx = get_fixture("6e4o")
h = fx.hamiltonian()
ansatz = uccsd_excitations(fx.n_electrons, fx.n_spatial)
exact = sector_eigenvalues(h, fx.n_electrons)[0]
print(f"{fx.name}: {ansatz.parameter_count} parameters, exact {exact:.6f} Ha")

for seed in range(3):
    res = run_vqe(h, ansatz, VqeConfig(seed=seed, init_scale=0.05))
    print(f"seed {seed}: {res.final_energy:.6f} Ha after {res.iterations} iterations "
          f"({(res.final_energy - exact) * 1e3:.4f} mHa above exact)")

study = incremental_term_study(h, ansatz)
print("energy vs number of excitation groups:")
for k, res in enumerate(study):
    print(f"  k={k:2d}  {res.final_energy:.6f}")

sampled = run_vqe(h, ansatz, VqeConfig(mode="sampled", seed=1, max_iterations=5, shots_epsilon=5e-3))
print(f"sampled run: estimate {sampled.final_energy:.4f}, exact energy of final state {sampled.exact_energy:.6f}")
