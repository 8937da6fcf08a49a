"""Dense state-vector simulation.

States are complex128 arrays of length ``2^n`` (qubit 0 is the
least-significant index bit). The kernels operate in place on a *batch*
of states, shape ``(B, 2^n)``; :func:`apply` is the single-state wrapper.
Batching lets the QPE driver push every column of a unitary through a
circuit in one pass.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import Block, Circuit, Gate
from .operators import PauliSum, pauli_action, popcount_parity

DEFAULT_SIMULATION_LIMIT = 25
_SQRT_HALF = 1.0 / np.sqrt(2.0)


def simulation_limit() -> int:
    """Largest register width simulated densely (``QCWB_DENSE_LIMIT`` overrides)."""
    return int(os.environ.get("QCWB_DENSE_LIMIT", DEFAULT_SIMULATION_LIMIT))


def check_width(width: int) -> None:
    limit = simulation_limit()
    if width > limit:
        raise ValueError(f"register of {width} qubits exceeds the dense simulation limit {limit}")


def zero_state(width: int) -> np.ndarray:
    check_width(width)
    psi = np.zeros(1 << width, dtype=complex)
    psi[0] = 1.0
    return psi


def basis_state(bits: int, width: int) -> np.ndarray:
    psi = zero_state(width)
    psi[0] = 0.0
    psi[bits] = 1.0
    return psi


def init_state(occ, width: int | None = None) -> np.ndarray:
    """Basis state of an :class:`~qcwb.fermion.OccupationState`."""
    width = occ.n_qubits if width is None else width
    if width != occ.n_qubits:
        raise ValueError(f"occupation over {occ.n_qubits} qubits does not match width {width}")
    return basis_state(occ.bits, width)


def _view1(batch: np.ndarray, width: int, q: int) -> np.ndarray:
    return batch.reshape(batch.shape[0], 1 << (width - q - 1), 2, 1 << q)


def _view2(batch: np.ndarray, width: int, a: int, b: int):
    """Return the view plus the axis indices of qubits ``a`` and ``b``."""
    hi, lo = max(a, b), min(a, b)
    v = batch.reshape(batch.shape[0], 1 << (width - hi - 1), 2, 1 << (hi - lo - 1), 2, 1 << lo)
    return v, (2 if a == hi else 4), (2 if b == hi else 4)


def _slice(axis: int, value: int, other: int | None = None, other_value: int | None = None):
    idx = [slice(None)] * 6
    idx[axis] = value
    if other is not None:
        idx[other] = other_value
    return tuple(idx)


def apply_gate(batch: np.ndarray, width: int, g: Gate) -> None:
    """Apply ``g`` in place to every row of ``batch``."""
    name = g.name
    if name in ("H", "X", "S", "SDG", "RZ", "PHASE"):
        v = _view1(batch, width, g.qubits[0])
        v0, v1 = v[:, :, 0, :], v[:, :, 1, :]
        if name == "H":
            a = (v0 + v1) * _SQRT_HALF
            v1[...] = (v0 - v1) * _SQRT_HALF
            v0[...] = a
        elif name == "X":
            tmp = v0.copy()
            v0[...] = v1
            v1[...] = tmp
        elif name == "S":
            v1 *= 1j
        elif name == "SDG":
            v1 *= -1j
        elif name == "RZ":
            v0 *= np.exp(-0.5j * g.angle)
            v1 *= np.exp(0.5j * g.angle)
        else:
            v1 *= np.exp(1j * g.angle)
        return
    c, t = g.qubits
    v, ac, at = _view2(batch, width, c, t)
    if name == "CNOT":
        lo, hi = v[_slice(ac, 1, at, 0)], v[_slice(ac, 1, at, 1)]
        tmp = lo.copy()
        lo[...] = hi
        hi[...] = tmp
    elif name == "CRZ":
        v[_slice(ac, 1, at, 0)] *= np.exp(-0.5j * g.angle)
        v[_slice(ac, 1, at, 1)] *= np.exp(0.5j * g.angle)
    elif name == "CPHASE":
        v[_slice(ac, 1, at, 1)] *= np.exp(1j * g.angle)
    elif name == "SWAP":
        lo, hi = v[_slice(ac, 0, at, 1)], v[_slice(ac, 1, at, 0)]
        tmp = lo.copy()
        lo[...] = hi
        hi[...] = tmp
    else:  # pragma: no cover - Gate validates names
        raise ValueError(name)


def apply_circuit_batch(batch: np.ndarray, circuit: Circuit, include_phase: bool = True) -> None:
    """Run ``circuit`` in place on each row of a ``(B, 2^n)`` batch."""
    if batch.shape[-1] != 1 << circuit.width:
        raise ValueError(f"state of length {batch.shape[-1]} does not match width {circuit.width}")
    _run_ops(batch, circuit)
    if include_phase:
        phase = circuit.total_global_phase()
        if phase:
            batch *= np.exp(1j * phase)


def _run_ops(batch: np.ndarray, circuit: Circuit) -> None:
    for op in circuit.ops:
        if isinstance(op, Gate):
            apply_gate(batch, circuit.width, op)
        else:
            for _ in range(op.repeat):
                _run_ops(batch, op.body)


def apply(circuit: Circuit, state: np.ndarray | None = None) -> np.ndarray:
    """Return ``circuit |state>`` (default ``|0...0>``); the input is not modified."""
    check_width(circuit.width)
    psi = zero_state(circuit.width) if state is None else np.array(state, dtype=complex)
    batch = psi.reshape(1, -1)
    apply_circuit_batch(batch, circuit)
    return batch[0]


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of ``circuit`` (column ``j`` is the image of ``|j>``)."""
    check_width(2 * circuit.width)
    batch = np.eye(1 << circuit.width, dtype=complex)
    apply_circuit_batch(batch, circuit)
    return batch.T.copy()


@lru_cache(maxsize=4096)
def _pauli_action_cached(x: int, z: int, width: int):
    return pauli_action(x, z, width)


def apply_pauli_rotation(psi: np.ndarray, x: int, z: int, angle: float) -> np.ndarray:
    """Return ``exp(i angle P) psi`` for the Pauli string with masks ``(x, z)``."""
    width = psi.shape[-1].bit_length() - 1
    perm, phase = _pauli_action_cached(x, z, width)
    p_psi = np.empty_like(psi)
    p_psi[..., perm] = phase * psi
    return np.cos(angle) * psi + 1j * np.sin(angle) * p_psi


def norm_check(psi: np.ndarray, tol: float = 1e-10) -> None:
    err = abs(np.vdot(psi, psi).real - 1.0)
    if err > tol:
        raise ValueError(f"state norm deviates from 1 by {err:.3g}")


def expectation(state: np.ndarray, h: PauliSum) -> float:
    """``<psi|H|psi>`` for a Hermitian real-coefficient ``H``."""
    if state.shape[-1] != 1 << h.width:
        raise ValueError("state length does not match operator width")
    return float(np.real(h._compiled.expectation(state)))


def probabilities(state: np.ndarray) -> np.ndarray:
    p = (state.conj() * state).real
    return p / p.sum()


def marginal(probs: np.ndarray, qubits: list[int]) -> np.ndarray:
    """Distribution over ``qubits`` (``qubits[k]`` becomes bit ``k`` of the outcome)."""
    width = probs.shape[0].bit_length() - 1
    idx = np.arange(probs.shape[0])
    out_idx = np.zeros_like(idx)
    for k, q in enumerate(qubits):
        if not 0 <= q < width:
            raise ValueError(f"qubit {q} outside register of width {width}")
        out_idx |= ((idx >> q) & 1) << k
    return np.bincount(out_idx, weights=probs, minlength=1 << len(qubits))


def sample(state: np.ndarray, qubits: list[int] | None = None, shots: int = 1024,
           seed: int | np.random.SeedSequence | None = 0) -> dict[str, int]:
    """Histogram of ``shots`` computational-basis measurements of ``qubits``.

    Keys are bitstrings with ``qubits[0]`` as the rightmost character.
    """
    width = state.shape[-1].bit_length() - 1
    qubits = list(range(width)) if qubits is None else list(qubits)
    if not qubits:
        raise ValueError("no qubits to measure")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = marginal(probabilities(state), qubits)
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    fmt = f"0{len(qubits)}b"
    return {format(i, fmt): int(c) for i, c in enumerate(counts) if c}


# ---------------------------------------------------------------------------
# Sampled expectation values
# ---------------------------------------------------------------------------

def basis_rotation(axes: dict[int, str], width: int) -> Circuit:
    """Circuit mapping the eigenbasis of the given per-qubit axes to Z."""
    ops = []
    for q in sorted(axes):
        if axes[q] == "X":
            ops.append(Gate("H", (q,)))
        elif axes[q] == "Y":
            ops += [Gate("SDG", (q,)), Gate("H", (q,))]
    return Circuit(width, ops)


def group_axes(terms) -> dict[int, str]:
    """Common per-qubit axis of a qubit-wise commuting family of terms."""
    axes: dict[int, str] = {}
    for t in terms:
        for q in t.support():
            a = t.axis(q)
            if axes.setdefault(q, a) != a:
                raise ValueError(f"terms disagree on qubit {q}: not qubit-wise commuting")
    return axes


@dataclass
class SampledEstimate:
    estimate: float
    std: float
    shots: int


class GroupSampler:
    """Precomputed per-group outcome distributions for repeated sampling.

    For each measurement group the state is rotated once into the group's
    shared eigenbasis; every basis outcome ``i`` then has a fixed value
    ``v(i) = sum_k c_k (-1)^{parity(i & support_k)}``, so a run of ``n``
    shots is one multinomial draw over ``2^n`` outcomes.
    """

    def __init__(self, state: np.ndarray, h: PauliSum, groups, shots_per_group):
        self.width = h.width
        h = h.simplify()
        self.offset = h.identity_coeff()
        body = h.without_identity()
        idx = np.arange(1 << h.width)
        self.probs, self.values, self.shots = [], [], []
        for group, n in zip(groups, shots_per_group):
            terms = [body.terms[i] for i in group]
            rot = basis_rotation(group_axes(terms), h.width)
            psi = apply(rot, state)
            vals = np.zeros(1 << h.width)
            for t in terms:
                x, z = t.masks
                vals += t.coeff * (1.0 - 2.0 * popcount_parity(idx & (x | z)))
            self.probs.append(probabilities(psi))
            self.values.append(vals)
            self.shots.append(int(n))

    def exact(self) -> float:
        return self.offset + sum(float(p @ v) for p, v in zip(self.probs, self.values))

    def run(self, seed) -> SampledEstimate:
        root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        children = root.spawn(len(self.probs))
        est, var = self.offset, 0.0
        for ss, p, v, n in zip(children, self.probs, self.values, self.shots):
            counts = np.random.default_rng(ss).multinomial(n, p)
            seen = np.flatnonzero(counts)
            c, vals = counts[seen], v[seen]
            mean = float(c @ vals) / n
            est += mean
            if seen.size > 1:
                var += float(c @ (vals - mean) ** 2) / (n - 1) / n
        return SampledEstimate(est, float(np.sqrt(var)), int(sum(self.shots)))


def expectation_sampled(state: np.ndarray, h: PauliSum, plan, seed=0) -> SampledEstimate:
    """Shot-noise estimate of ``<H>`` following a measurement plan.

    ``plan`` supplies ``groups`` (indices into the non-identity terms of
    ``h``) and ``shots`` per group; see :mod:`qcwb.shots`. The returned
    ``std`` combines per-group sample variances (independent groups).
    """
    from .shots import check_plan

    check_plan(h, plan)
    return GroupSampler(state, h, plan.groups, plan.shots).run(seed)


__all__ = [
    "apply", "apply_gate", "apply_circuit_batch", "circuit_unitary", "apply_pauli_rotation",
    "expectation", "expectation_sampled", "sample", "probabilities", "marginal",
    "zero_state", "basis_state", "init_state", "basis_rotation", "GroupSampler", "SampledEstimate",
    "simulation_limit",
]
