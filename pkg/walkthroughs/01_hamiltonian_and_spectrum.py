"""From integrals to a qubit Hamiltonian and its exact spectrum.

Loads the smallest shipped active space, maps it to Pauli strings with the
Jordan-Wigner transformation and diagonalizes it in the two-electron sector.
The ground state is dominated by the Hartree-Fock determinant |0101> with a
doubly excited |1010> admixture, and a threefold triplet sits above it.
"""

import numpy as np

from qcwb.fermion import jw_number_operator
from qcwb.fixtures import get_fixture
from qcwb.spectrum import ground_state, sector_eigenvalues

fx = get_fixture("2e2o")
h = fx.hamiltonian()
print(f"{fx.name}: {len(h)} Pauli terms on {h.width} qubits")
for term in h.terms[:6]:
    print(f"  {term.coeff:+.6f} {term.label}")

# Particle number is a symmetry of every Jordan-Wigner Hamiltonian.
m, n = h.to_matrix(), jw_number_operator(h.width).to_matrix()
print("||[H, N]|| =", np.linalg.norm(m @ n - n @ m))

levels = sector_eigenvalues(h, fx.n_electrons)
print("two-electron levels (Ha):", np.round(levels, 6))

energy, psi = ground_state(h, fx.n_electrons)
weights = np.abs(psi) ** 2
for idx in np.argsort(weights)[::-1][:3]:
    print(f"  |{idx:04b}>  weight {weights[idx]:.4f}")
