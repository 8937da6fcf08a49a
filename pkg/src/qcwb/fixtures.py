"""Shipped example Hamiltonians.

Three CASCI active spaces of ethylene (6-31G, experimental geometry),
generated by ``tools/make_fixtures.py``. Each entry also records QPE
scaling settings that place the relevant spectrum inside ``(0, 1)``:

* ``2e2o`` (4 qubits): ``scale = 1.4`` Ha with ``shift = -78.05`` Ha. The
  first-order Trotter error at this scale is large enough that one or two
  steps miss chemical accuracy and three steps reach it.
* ``6e4o`` (8 qubits): ``scale = 3.91`` Ha, ``shift = -78.2`` Ha; one
  Trotter step with 13 ancillas reaches chemical accuracy.
* ``10e6o`` (12 qubits): ``scale = 6.0`` Ha, ``shift = -78.3`` Ha.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .fermion import MolecularIntegrals, OccupationState, hf_state, jordan_wigner, parse_fcidump
from .operators import PauliSum


@dataclass(frozen=True)
class Fixture:
    name: str
    filename: str
    n_electrons: int
    n_spatial: int
    qpe_scale: float
    qpe_shift: float

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_spatial

    def integrals(self) -> MolecularIntegrals:
        return load_integrals(self.name)

    def hamiltonian(self) -> PauliSum:
        return load_hamiltonian(self.name)

    def reference(self) -> OccupationState:
        return hf_state(self.n_electrons, self.n_spatial)

    def path(self):
        return resources.files("qcwb") / "data" / self.filename


FIXTURES = {
    f.name: f for f in (
        Fixture("2e2o", "ethylene_2e2o.fcidump", 2, 2, 1.4, -78.05),
        Fixture("6e4o", "ethylene_6e4o.fcidump", 6, 4, 3.91, -78.2),
        Fixture("10e6o", "ethylene_10e6o.fcidump", 10, 6, 6.0, -78.3),
    )
}


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; available: {sorted(FIXTURES)}") from None


@lru_cache(maxsize=None)
def load_integrals(name: str) -> MolecularIntegrals:
    f = get_fixture(name)
    return parse_fcidump(f.path().read_text(), source=f.filename)


@lru_cache(maxsize=None)
def load_hamiltonian(name: str) -> PauliSum:
    return jordan_wigner(load_integrals(name))


__all__ = ["Fixture", "FIXTURES", "get_fixture", "load_integrals", "load_hamiltonian"]
