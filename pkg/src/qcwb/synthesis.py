"""Circuit synthesis: Pauli exponentials, Trotter steps, QFT and QPE.

Everything here produces :class:`~qcwb.circuit.Circuit` objects in the
package gate set. The basic building block is the standard parity-ladder
construction for ``exp(i t P)``::

    basis change (H for X, SDG;H for Y) -> CNOT ladder -> RZ(-2t) -> undo

Controlled versions reuse the same basis changes and ladder and only
control the central rotation (``CRZ``); identity terms become a ``PHASE``
on the control qubit, so the controlled circuit is exact including the
global phase of the uncontrolled one.
"""

from __future__ import annotations

import math
from typing import Sequence

from .circuit import Block, Circuit, Gate
from .operators import PauliSum, PauliTerm


def _basis_in(term: PauliTerm, support: Sequence[int]) -> list[Gate]:
    ops = []
    for q in support:
        axis = term.axis(q)
        if axis == "X":
            ops.append(Gate("H", (q,)))
        elif axis == "Y":
            ops += [Gate("SDG", (q,)), Gate("H", (q,))]
    return ops


def _basis_out(term: PauliTerm, support: Sequence[int]) -> list[Gate]:
    ops = []
    for q in support:
        axis = term.axis(q)
        if axis == "X":
            ops.append(Gate("H", (q,)))
        elif axis == "Y":
            ops += [Gate("H", (q,)), Gate("S", (q,))]
    return ops


def pauli_exponential_ops(term: PauliTerm, angle: float, control: int | None = None):
    """Gates for ``exp(i * angle * coeff * P)``, optionally controlled.

    Returns ``(ops, global_phase)``; the phase is nonzero only for an
    uncontrolled identity term.
    """
    theta = angle * term.coeff
    support = term.support()
    if not support:
        if control is None:
            return [], theta
        return [Gate("PHASE", (control,), theta)], 0.0
    ladder = [Gate("CNOT", (a, b)) for a, b in zip(support, support[1:])]
    target = support[-1]
    if control is None:
        core = Gate("RZ", (target,), -2.0 * theta)
    else:
        core = Gate("CRZ", (control, target), -2.0 * theta)
    ops = _basis_in(term, support) + ladder + [core] + ladder[::-1] + _basis_out(term, support)
    return ops, 0.0


def pauli_exponential(term: PauliTerm, angle: float, control: int | None = None,
                      width: int | None = None) -> Circuit:
    """Circuit for ``exp(i * angle * coeff * P)`` (controlled on ``control`` if given)."""
    width = term.width if width is None else width
    ops, phase = pauli_exponential_ops(term, angle, control)
    return Circuit(width, ops, phase)


def trotter_step(h: PauliSum, dt: float, control: int | None = None,
                 width: int | None = None) -> Circuit:
    """One first-order step ``prod_k exp(i dt c_k P_k)`` in the term order of ``h``."""
    width = h.width if width is None else width
    ops, phase = [], 0.0
    for term in h.terms:
        o, p = pauli_exponential_ops(term, dt, control)
        ops += o
        phase += p
    return Circuit(width, ops, phase)


def trotter_circuit(h: PauliSum, time: float, n_steps: int) -> Circuit:
    """First-order Trotter approximation of ``exp(i time H)`` with ``n_steps`` steps."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    step = trotter_step(h, time / n_steps)
    return Circuit(h.width, [Block(step, n_steps)])


def controlled_trotter(h: PauliSum, time: float, n_steps: int, control: int,
                       width: int | None = None, power: int = 1) -> Circuit:
    """Controlled ``(Trotter(time, n_steps))^power``; ``control`` must lie outside ``h``'s qubits."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    width = max(h.width, control + 1) if width is None else width
    if control < h.width:
        raise ValueError("control qubit overlaps the system register")
    step = trotter_step(h, time / n_steps, control=control, width=width)
    return Circuit(width, [Block(step, n_steps * power)])


def qft(n: int) -> Circuit:
    """Quantum Fourier transform ``|x> -> 2^{-n/2} sum_y e^{2 pi i x y / 2^n} |y>``."""
    ops: list[Gate] = []
    for j in reversed(range(n)):
        ops.append(Gate("H", (j,)))
        for k in reversed(range(j)):
            ops.append(Gate("CPHASE", (k, j), math.pi / (1 << (j - k))))
    for j in range(n // 2):
        ops.append(Gate("SWAP", (j, n - 1 - j)))
    return Circuit(n, ops)


def inverse_qft(n: int) -> Circuit:
    return qft(n).inverse()


def prepare_basis_state(bits: int, width: int) -> Circuit:
    return Circuit(width, [Gate("X", (q,)) for q in range(width) if (bits >> q) & 1])


def qpe_circuit(h_scaled: PauliSum, ancilla: int, n_steps: int, reference=0) -> Circuit:
    """Textbook QPE for ``U = exp(2 pi i H_scaled)``.

    System qubits are ``0..s-1`` (prepared in the basis state ``reference``,
    an :class:`~qcwb.fermion.OccupationState` or an integer bitmask);
    ancilla ``k`` sits on qubit ``s + k`` and controls ``U^(2^k)``, each power
    realised as ``2^k * n_steps`` repetitions of the controlled Trotter step.
    After the inverse QFT the ancilla register holds ``x`` with
    ``x / 2^ancilla`` approximating the eigenphase.
    """
    if ancilla < 1:
        raise ValueError("need at least one ancilla qubit")
    s = h_scaled.width
    width = s + ancilla
    reference = getattr(reference, "bits", reference)
    if not 0 <= reference < 1 << s:
        raise ValueError(f"reference {reference} does not fit {s} system qubits")
    ops: list = list(prepare_basis_state(reference, width).ops)
    ops += [Gate("H", (s + k,)) for k in range(ancilla)]
    for k in range(ancilla):
        ops += controlled_trotter(h_scaled, 2 * math.pi, n_steps, control=s + k,
                                  width=width, power=1 << k).ops
    iqft = inverse_qft(ancilla).remap([s + k for k in range(ancilla)], width)
    return Circuit(width, ops + list(iqft.ops))


__all__ = [
    "pauli_exponential", "trotter_step", "trotter_circuit", "controlled_trotter",
    "qft", "inverse_qft", "prepare_basis_state", "qpe_circuit",
]
