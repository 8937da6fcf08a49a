"""UCCSD ansatz: excitation enumeration, circuits and a fast rotation program.

Each excitation ``T`` (single ``a+_v a_o`` or double
``a+_v1 a+_v2 a_o2 a_o1``) contributes the Hermitian generator
``G = -i (T - T+)`` mapped through Jordan-Wigner. Its Pauli terms commute
and ``G`` has eigenvalues in ``{-1, 0, 1}``, so the single-step product
``prod_k exp(i theta c_k P_k)`` equals ``exp(theta (T - T+))`` exactly.

By default every excitation gets its own parameter. With
``pair_spin=True`` an excitation and its spin-flipped partner share one
parameter group.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from .circuit import Circuit
from .fermion import OccupationState, fermion_operator_to_pauli, hf_state
from .operators import PauliSum
from .synthesis import pauli_exponential_ops, prepare_basis_state


@dataclass(frozen=True)
class Excitation:
    """``occupied -> virtual`` spin-orbital indices (both ascending)."""

    occupied: tuple[int, ...]
    virtual: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.occupied)

    def monomials(self):
        if self.rank == 1:
            (o,), (v,) = self.occupied, self.virtual
            t = [(v, True), (o, False)]
            t_dag = [(o, True), (v, False)]
        elif self.rank == 2:
            (o1, o2), (v1, v2) = self.occupied, self.virtual
            t = [(v1, True), (v2, True), (o2, False), (o1, False)]
            t_dag = [(o1, True), (o2, True), (v2, False), (v1, False)]
        else:
            raise ValueError("only single and double excitations are supported")
        return [(-1j, t), (1j, t_dag)]

    def generator(self, width: int) -> PauliSum:
        """``-i (T - T+)`` as a Pauli sum."""
        return fermion_operator_to_pauli(self.monomials(), width)

    def spin_flipped(self, n_spatial: int) -> "Excitation":
        def flip(q):
            return q + n_spatial if q < n_spatial else q - n_spatial
        return Excitation(tuple(sorted(map(flip, self.occupied))),
                          tuple(sorted(map(flip, self.virtual))))

    def __str__(self):
        return f"{self.occupied}->{self.virtual}"


def _spin(q: int, n_spatial: int) -> int:
    return 0 if q < n_spatial else 1


def uccsd_excitation_list(n_electrons: int, n_spatial: int) -> list[Excitation]:
    """All S_z-conserving singles then doubles from the HF reference, lexicographic."""
    ref = hf_state(n_electrons, n_spatial)
    occ = ref.occupied()
    virt = [q for q in range(2 * n_spatial) if q not in occ]
    if not virt:
        raise ValueError(f"no virtual orbitals: {n_electrons} electrons fill {n_spatial} orbitals")
    if not occ:
        raise ValueError("no electrons to excite")
    singles = [Excitation((o,), (v,)) for o in occ for v in virt
               if _spin(o, n_spatial) == _spin(v, n_spatial)]
    doubles = []
    for o in combinations(occ, 2):
        for v in combinations(virt, 2):
            if sum(_spin(q, n_spatial) for q in o) == sum(_spin(q, n_spatial) for q in v):
                doubles.append(Excitation(o, v))
    return singles + doubles


@dataclass(frozen=True)
class UccsdAnsatz:
    width: int
    reference: OccupationState
    groups: tuple[tuple[Excitation, ...], ...]

    @property
    def parameter_count(self) -> int:
        return len(self.groups)

    @cached_property
    def generators(self) -> tuple[tuple[PauliSum, ...], ...]:
        return tuple(tuple(e.generator(self.width) for e in g) for g in self.groups)

    def group_generator(self, k: int) -> PauliSum:
        terms = [t for gen in self.generators[k] for t in gen.terms]
        return PauliSum(self.width, terms).simplify()

    @cached_property
    def program(self) -> "RotationProgram":
        steps = []
        for k, gens in enumerate(self.generators):
            for gen in gens:
                for t in gen.terms:
                    x, z = t.masks
                    steps.append((k, x, z, t.coeff))
        return RotationProgram(self.width, self.reference.bits, tuple(steps),
                               self.parameter_count)

    def shift_order(self, k: int) -> int:
        """Largest frequency ``R`` of the energy as a function of parameter ``k``."""
        return 2 * len(self.groups[k])

    def truncated(self, k: int) -> "UccsdAnsatz":
        """Ansatz using only the first ``k`` parameter groups."""
        if not 0 <= k <= self.parameter_count:
            raise ValueError(f"k={k} outside 0..{self.parameter_count}")
        return UccsdAnsatz(self.width, self.reference, self.groups[:k])


def uccsd_excitations(n_electrons: int, n_spatial: int, pair_spin: bool = False) -> UccsdAnsatz:
    """UCCSD ansatz over ``n_spatial`` orbitals from the HF reference."""
    excitations = uccsd_excitation_list(n_electrons, n_spatial)
    if not pair_spin:
        groups = tuple((e,) for e in excitations)
    else:
        seen: set[Excitation] = set()
        grouped = []
        for e in excitations:
            if e in seen:
                continue
            partner = e.spin_flipped(n_spatial)
            members = (e,) if partner == e or partner not in excitations else (e, partner)
            seen.update(members)
            grouped.append(members)
        groups = tuple(grouped)
    return UccsdAnsatz(2 * n_spatial, hf_state(n_electrons, n_spatial), groups)


def uccsd_circuit(ansatz: UccsdAnsatz, params: Sequence[float]) -> Circuit:
    """Reference preparation followed by one exponential per generator term."""
    params = np.asarray(params, dtype=float)
    if params.shape != (ansatz.parameter_count,):
        raise ValueError(f"expected {ansatz.parameter_count} parameters, got {params.shape}")
    ops = list(prepare_basis_state(ansatz.reference.bits, ansatz.width).ops)
    for theta, gens in zip(params, ansatz.generators):
        for gen in gens:
            for t in gen.terms:
                ops += pauli_exponential_ops(t, float(theta))[0]
    return Circuit(ansatz.width, ops)


@dataclass(frozen=True)
class RotationProgram:
    """The ansatz as an ordered list of ``exp(i theta_k c P)`` rotations.

    Applying it with :func:`~qcwb.statevector.apply_pauli_rotation` gives the
    same state as simulating :func:`uccsd_circuit` gate by gate.
    """

    width: int
    reference: int
    steps: tuple[tuple[int, int, int, float], ...]   # (parameter, x mask, z mask, coeff)
    n_params: int

    def state(self, params: np.ndarray) -> np.ndarray:
        from .statevector import apply_pauli_rotation, basis_state

        psi = basis_state(self.reference, self.width)
        for k, x, z, c in self.steps:
            angle = params[k] * c
            if angle:
                psi = apply_pauli_rotation(psi, x, z, angle)
        return psi


__all__ = [
    "Excitation", "UccsdAnsatz", "RotationProgram", "uccsd_excitation_list",
    "uccsd_excitations", "uccsd_circuit",
]
