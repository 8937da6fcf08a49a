"""Lowering to hardware-style gate sets and circuit cost metrics.

Two target bases are supported:

``clifford_rz``
    {H, X, S, SDG, CNOT, RZ}. ``CRZ`` lowers to two CNOTs and two RZs,
    ``CPHASE`` to two CNOTs and three RZs (up to a global phase),
    ``PHASE`` to a single RZ and ``SWAP`` to three CNOTs.
``clifford_t``
    The same lowering, after which each RZ is charged a T-count: 0 for
    Clifford angles (multiples of pi/2), 1 for odd multiples of pi/4 and
    ``ceil(c * log2(1/delta))`` otherwise (``delta`` is the per-rotation
    synthesis precision, ``c = 3`` by default, the usual scaling of
    Clifford+T rotation synthesis). In the depth calculation a synthesized
    RZ occupies as many layers as it has T gates (minimum 1).

Depth is ASAP layering: every gate starts as soon as all its qubits are
free. Because that rule is a max-plus linear map on the vector of
per-qubit "free at" times, a repeated block is handled by max-plus
matrix powers, so QPE circuits with millions of gates are costed
without unrolling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .circuit import Block, Circuit, Gate

BASES = ("clifford_rz", "clifford_t")
DEFAULT_RZ_PRECISION = 1e-10
T_COST_PREFACTOR = 3.0
_ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class CircuitMetrics:
    basis: str
    width: int
    depth: int
    gate_count: int
    two_qubit_count: int
    rz_count: int
    t_count: int | None = None
    parameter_count: int = 0

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def lower_gate(g: Gate) -> list[Gate]:
    """Rewrite one gate in the Clifford+RZ basis (equal up to global phase)."""
    name = g.name
    if name in ("H", "X", "S", "SDG", "CNOT", "RZ"):
        return [g]
    if name == "PHASE":
        return [Gate("RZ", g.qubits, g.angle)]
    c, t = g.qubits if len(g.qubits) == 2 else (None, None)
    if name == "CRZ":
        half = g.angle / 2
        return [Gate("RZ", (t,), half), Gate("CNOT", (c, t)),
                Gate("RZ", (t,), -half), Gate("CNOT", (c, t))]
    if name == "CPHASE":
        return [Gate("RZ", (c,), g.angle / 2)] + lower_gate(Gate("CRZ", (c, t), g.angle))
    if name == "SWAP":
        return [Gate("CNOT", (c, t)), Gate("CNOT", (t, c)), Gate("CNOT", (c, t))]
    raise ValueError(f"cannot lower {name}")  # pragma: no cover


def lower(circuit: Circuit) -> Circuit:
    """Clifford+RZ version of ``circuit`` (blocks preserved)."""
    ops = []
    for op in circuit.ops:
        if isinstance(op, Gate):
            ops += lower_gate(op)
        else:
            ops.append(Block(lower(op.body), op.repeat))
    return Circuit(circuit.width, ops, circuit.global_phase)


def rz_t_cost(angle: float, precision: float = DEFAULT_RZ_PRECISION,
              prefactor: float = T_COST_PREFACTOR) -> int:
    """T gates needed to implement ``RZ(angle)`` to within ``precision``."""
    quarter = angle / (math.pi / 4)
    k = round(quarter)
    if abs(quarter - k) < _ANGLE_TOL:
        return 0 if k % 2 == 0 else 1
    if not 0 < precision < 1:
        raise ValueError("rotation precision must lie in (0, 1)")
    return math.ceil(prefactor * math.log2(1.0 / precision))


# ---------------------------------------------------------------------------
# max-plus depth
# ---------------------------------------------------------------------------

_NEG = -np.inf


class _Tally:
    __slots__ = ("gates", "two_q", "rz", "t")

    def __init__(self):
        self.gates = self.two_q = self.rz = self.t = 0

    def add(self, other: "_Tally", times: int = 1):
        self.gates += times * other.gates
        self.two_q += times * other.two_q
        self.rz += times * other.rz
        self.t += times * other.t


def _maxplus_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``(a (x) b)[i, j] = max_k a[i, k] + b[k, j]``."""
    return np.max(a[:, :, None] + b[None, :, :], axis=1)


def _maxplus_power(m: np.ndarray, n: int) -> np.ndarray:
    result = np.full_like(m, _NEG)
    np.fill_diagonal(result, 0.0)
    base = m
    while n:
        if n & 1:
            result = _maxplus_mul(base, result)
        n >>= 1
        if n:
            base = _maxplus_mul(base, base)
    return result


class _Analyzer:
    def __init__(self, width: int, basis: str, precision: float):
        if basis not in BASES:
            raise ValueError(f"unknown basis {basis!r}; expected one of {BASES}")
        self.width = width
        self.t_basis = basis == "clifford_t"
        self.precision = precision
        self._cache: dict[int, tuple[np.ndarray, _Tally]] = {}

    def _primitive(self, g: Gate) -> Iterator[tuple[tuple[int, ...], int, Gate]]:
        for p in lower_gate(g):
            duration = 1
            if p.name == "RZ" and self.t_basis:
                duration = max(1, rz_t_cost(p.angle, self.precision))
            yield p.qubits, duration, p

    def analyze(self, circuit: Circuit) -> tuple[np.ndarray, _Tally]:
        key = id(circuit)
        if key in self._cache:
            return self._cache[key]
        # m[q, p]: longest weighted path from the input of qubit p to the output of q.
        m = np.full((self.width, self.width), _NEG)
        np.fill_diagonal(m, 0.0)
        tally = _Tally()
        for op in circuit.ops:
            if isinstance(op, Gate):
                for qubits, duration, p in self._primitive(op):
                    row = m[list(qubits)].max(axis=0) + duration
                    m[list(qubits)] = row
                    tally.gates += 1
                    if len(qubits) == 2:
                        tally.two_q += 1
                    if p.name == "RZ":
                        tally.rz += 1
                        if self.t_basis:
                            tally.t += rz_t_cost(p.angle, self.precision)
            else:
                if op.repeat == 0:
                    continue
                body_m, body_tally = self.analyze(op.body)
                m = _maxplus_mul(_maxplus_power(body_m, op.repeat), m)
                tally.add(body_tally, op.repeat)
        self._cache[key] = (m, tally)
        return m, tally


def compile_metrics(circuit: Circuit, basis: str = "clifford_rz",
                    rz_precision: float = DEFAULT_RZ_PRECISION,
                    parameter_count: int = 0) -> CircuitMetrics:
    """Depth and gate counts of ``circuit`` after lowering to ``basis``.

    ``t_count`` is reported only for ``clifford_t``. ``parameter_count``
    is passed through for variational circuits.
    """
    if circuit.width == 0:
        return CircuitMetrics(basis, 0, 0, 0, 0, 0, 0 if basis == "clifford_t" else None,
                              parameter_count)
    analyzer = _Analyzer(circuit.width, basis, rz_precision)
    m, tally = analyzer.analyze(circuit)
    depth = int(max(m.max(), 0.0))
    return CircuitMetrics(
        basis=basis, width=circuit.width, depth=depth, gate_count=tally.gates,
        two_qubit_count=tally.two_q, rz_count=tally.rz,
        t_count=tally.t if basis == "clifford_t" else None,
        parameter_count=parameter_count,
    )


def layered_depth(circuit: Circuit, basis: str = "clifford_rz",
                  rz_precision: float = DEFAULT_RZ_PRECISION) -> int:
    """Reference ASAP depth by explicit unrolling (for testing small circuits)."""
    analyzer = _Analyzer(circuit.width, basis, rz_precision)
    free = [0] * circuit.width
    for g in circuit.gates():
        for qubits, duration, _ in analyzer._primitive(g):
            start = max(free[q] for q in qubits)
            for q in qubits:
                free[q] = start + duration
    return max(free, default=0)


__all__ = [
    "CircuitMetrics", "compile_metrics", "lower", "lower_gate", "rz_t_cost",
    "layered_depth", "BASES",
]
