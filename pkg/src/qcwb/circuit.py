"""Gate-level circuit IR.

A :class:`Circuit` is an ordered sequence of :class:`Gate` records and
:class:`Block` records. A block repeats a sub-circuit a fixed number of
times; this keeps QPE circuits (thousands of repetitions of a controlled
Trotter step) small in memory while metrics and simulation still see the
fully unrolled gate sequence.

Angles are in radians. ``RZ(t) = diag(e^{-it/2}, e^{it/2})`` and
``PHASE(t) = diag(1, e^{it})``; ``CRZ``/``CPHASE`` are their controlled
forms with the control listed first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

ONE_QUBIT = {"H", "X", "S", "SDG", "RZ", "PHASE"}
TWO_QUBIT = {"CNOT", "CRZ", "CPHASE", "SWAP"}
PARAMETRIC = {"RZ", "PHASE", "CRZ", "CPHASE"}
GATE_NAMES = ONE_QUBIT | TWO_QUBIT

_SELF_INVERSE = {"H", "X", "CNOT", "SWAP"}
_INVERSE_NAME = {"S": "SDG", "SDG": "S"}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.name not in GATE_NAMES:
            raise ValueError(f"unknown gate {self.name!r}")
        arity = 1 if self.name in ONE_QUBIT else 2
        if len(self.qubits) != arity:
            raise ValueError(f"{self.name} acts on {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.name} needs two distinct qubits, got {self.qubits}")
        if (self.name in PARAMETRIC) != (self.angle is not None):
            raise ValueError(f"{self.name}: angle {'required' if self.name in PARAMETRIC else 'not allowed'}")
        if self.angle is not None:
            if not math.isfinite(self.angle):
                raise ValueError(f"{self.name}: non-finite angle {self.angle!r}")
            object.__setattr__(self, "angle", float(self.angle))

    def inverse(self) -> "Gate":
        if self.name in _SELF_INVERSE:
            return self
        if self.name in _INVERSE_NAME:
            return Gate(_INVERSE_NAME[self.name], self.qubits)
        return Gate(self.name, self.qubits, -self.angle)

    def remap(self, mapping: Sequence[int]) -> "Gate":
        return Gate(self.name, tuple(mapping[q] for q in self.qubits), self.angle)

    def to_text(self) -> str:
        args = [str(q) for q in self.qubits]
        if self.angle is not None:
            args.append(repr(self.angle))
        return f"{self.name} {','.join(args)}"


@dataclass(frozen=True)
class Block:
    body: "Circuit"
    repeat: int

    def __post_init__(self):
        if self.repeat < 0:
            raise ValueError("repeat count must be non-negative")


Op = Union[Gate, Block]


@dataclass(frozen=True)
class Circuit:
    width: int
    ops: tuple[Op, ...] = field(default=())
    global_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            if isinstance(op, Gate):
                if max(op.qubits) >= self.width or min(op.qubits) < 0:
                    raise ValueError(f"{op.to_text()} outside register of width {self.width}")
            elif isinstance(op, Block):
                if op.body.width != self.width:
                    raise ValueError("block width differs from circuit width")
            else:
                raise TypeError(f"unsupported op {op!r}")
        if not math.isfinite(self.global_phase):
            raise ValueError("non-finite global phase")
        object.__setattr__(self, "global_phase", float(self.global_phase))

    def gates(self) -> Iterator[Gate]:
        """Fully unrolled gate sequence (may be very long for QPE circuits)."""
        for op in self.ops:
            if isinstance(op, Gate):
                yield op
            else:
                for _ in range(op.repeat):
                    yield from op.body.gates()

    def gate_count(self) -> int:
        return sum(1 if isinstance(op, Gate) else op.repeat * op.body.gate_count()
                   for op in self.ops)

    def total_global_phase(self) -> float:
        total = self.global_phase
        for op in self.ops:
            if isinstance(op, Block):
                total += op.repeat * op.body.total_global_phase()
        return total

    def inverse(self) -> "Circuit":
        ops = []
        for op in reversed(self.ops):
            if isinstance(op, Gate):
                ops.append(op.inverse())
            else:
                ops.append(Block(op.body.inverse(), op.repeat))
        return Circuit(self.width, ops, -self.global_phase)

    def remap(self, mapping: Sequence[int], width: int) -> "Circuit":
        """Relabel qubit ``q`` as ``mapping[q]`` inside a register of ``width``."""
        ops = []
        for op in self.ops:
            if isinstance(op, Gate):
                ops.append(op.remap(mapping))
            else:
                ops.append(Block(op.body.remap(mapping, width), op.repeat))
        return Circuit(width, ops, self.global_phase)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise ValueError("width mismatch")
        return Circuit(self.width, self.ops + other.ops, self.global_phase + other.global_phase)

    def repeated(self, count: int) -> "Circuit":
        return Circuit(self.width, [Block(self, count)])

    def to_text(self) -> str:
        lines = [f"WIDTH {self.width}"]
        _emit(self, lines, "")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        lines = [(i, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines(), 1)]
        lines = [(i, ln) for i, ln in lines if ln]
        if not lines or not lines[0][1].startswith("WIDTH"):
            raise ValueError("line 1: circuit text must start with 'WIDTH <n>'")
        width = int(lines[0][1].split()[1])
        circuit, rest = _parse_ops(lines[1:], width)
        if rest:
            raise ValueError(f"line {rest[0][0]}: unmatched END")
        return circuit


def _emit(c: Circuit, lines: list[str], indent: str):
    if c.global_phase:
        lines.append(f"{indent}GPHASE {c.global_phase!r}")
    for op in c.ops:
        if isinstance(op, Gate):
            lines.append(indent + op.to_text())
        else:
            lines.append(f"{indent}REPEAT {op.repeat}")
            _emit(op.body, lines, indent + "  ")
            lines.append(f"{indent}END")


def _parse_ops(lines, width):
    ops: list[Op] = []
    phase = 0.0
    while lines:
        lineno, line = lines[0]
        head, _, args = line.partition(" ")
        if head == "END":
            return Circuit(width, ops, phase), lines
        lines = lines[1:]
        try:
            if head == "GPHASE":
                phase += float(args)
            elif head == "REPEAT":
                body, lines = _parse_ops(lines, width)
                if not lines:
                    raise ValueError("REPEAT without END")
                lines = lines[1:]
                ops.append(Block(body, int(args)))
            else:
                parts = [p for p in args.replace(" ", "").split(",") if p]
                n_q = 1 if head in ONE_QUBIT else 2
                qubits = tuple(int(p) for p in parts[:n_q])
                angle = float(parts[n_q]) if len(parts) > n_q else None
                ops.append(Gate(head, qubits, angle))
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return Circuit(width, ops, phase), []
