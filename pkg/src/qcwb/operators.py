"""Pauli-string algebra.

Labels are written in ket order: the rightmost character acts on qubit 0,
so ``"XZ"`` is ``X`` on qubit 1 and ``Z`` on qubit 0. This matches the
bitstring convention used everywhere else in the package (qubit 0 is the
least-significant bit) and makes ``to_matrix`` a plain left-to-right
Kronecker product of the label characters.

Internally every string is also held in symplectic form ``(x, z)``: two
integer bitmasks with ``X -> (1, 0)``, ``Z -> (0, 1)``, ``Y -> (1, 1)``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

DROP_TOLERANCE = 1e-12
DENSE_MATRIX_LIMIT = 14

_AXES = "IXYZ"


def _label_to_masks(label: str) -> tuple[int, int]:
    x = z = 0
    for pos, ch in enumerate(reversed(label)):
        if ch == "X":
            x |= 1 << pos
        elif ch == "Z":
            z |= 1 << pos
        elif ch == "Y":
            x |= 1 << pos
            z |= 1 << pos
        elif ch != "I":
            raise ValueError(f"invalid Pauli axis {ch!r} in {label!r}")
    return x, z


def masks_to_label(x: int, z: int, width: int) -> str:
    return "".join(
        "IXZY"[((x >> pos) & 1) | (((z >> pos) & 1) << 1)] for pos in range(width - 1, -1, -1))


@dataclass(frozen=True)
class PauliTerm:
    """A real-weighted Pauli string."""

    label: str
    coeff: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.coeff):
            raise ValueError(f"non-finite coefficient {self.coeff!r}")
        object.__setattr__(self, "coeff", float(self.coeff))
        _label_to_masks(self.label)

    @property
    def width(self) -> int:
        return len(self.label)

    @cached_property
    def masks(self) -> tuple[int, int]:
        return _label_to_masks(self.label)

    @property
    def is_identity(self) -> bool:
        return set(self.label) <= {"I"}

    def axis(self, qubit: int) -> str:
        """Single-qubit Pauli acting on ``qubit``."""
        return self.label[self.width - 1 - qubit]

    def support(self) -> list[int]:
        """Qubits carrying a non-identity axis, ascending."""
        return [q for q in range(self.width) if self.axis(q) != "I"]

    def __str__(self):
        return f"{self.coeff!r} {self.label}"


def _check_widths(a: PauliTerm, b: PauliTerm):
    if a.width != b.width:
        raise ValueError(f"width mismatch: {a.width} vs {b.width}")


def commutes(a: PauliTerm, b: PauliTerm) -> bool:
    """True iff the two strings anticommute on an even number of qubits."""
    _check_widths(a, b)
    (xa, za), (xb, zb) = a.masks, b.masks
    return ((xa & zb) ^ (za & xb)).bit_count() % 2 == 0


def qubitwise_commutes(a: PauliTerm, b: PauliTerm) -> bool:
    """True iff on every qubit the axes agree or one of them is ``I``."""
    _check_widths(a, b)
    (xa, za), (xb, zb) = a.masks, b.masks
    both = (xa | za) & (xb | zb)
    return ((xa ^ xb) | (za ^ zb)) & both == 0


@dataclass(frozen=True)
class PauliSum:
    """Weighted sum of Pauli strings over a fixed register width.

    Construction does not merge duplicates; call :meth:`simplify` for the
    canonical form.
    """

    width: int
    terms: tuple[PauliTerm, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.width < 0:
            raise ValueError("width must be non-negative")
        for t in self.terms:
            if t.width != self.width:
                raise ValueError(
                    f"term {t.label!r} has width {t.width}, sum has width {self.width}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, str]], width: int | None = None) -> "PauliSum":
        terms = [PauliTerm(label, c) for c, label in pairs]
        if width is None:
            if not terms:
                raise ValueError("cannot infer width of an empty sum")
            width = terms[0].width
        return cls(width, terms)

    @classmethod
    def identity(cls, width: int, coeff: float = 1.0) -> "PauliSum":
        return cls(width, [PauliTerm("I" * width, coeff)])

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[PauliTerm]:
        return iter(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.width != self.width:
            raise ValueError("width mismatch")
        return PauliSum(self.width, self.terms + other.terms)

    def __mul__(self, scalar: float) -> "PauliSum":
        return PauliSum(self.width, [PauliTerm(t.label, t.coeff * scalar) for t in self.terms])

    __rmul__ = __mul__

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([t.coeff for t in self.terms])

    def identity_coeff(self) -> float:
        return sum(t.coeff for t in self.terms if t.is_identity)

    def without_identity(self) -> "PauliSum":
        return PauliSum(self.width, [t for t in self.terms if not t.is_identity])

    def simplify(self, tol: float = DROP_TOLERANCE) -> "PauliSum":
        return simplify(self, tol)

    def to_matrix(self, limit: int | None = None) -> np.ndarray:
        return to_matrix(self, limit)

    def to_text(self) -> str:
        return "".join(f"{t.coeff!r} {t.label}\n" for t in self.terms)

    @classmethod
    def from_text(cls, text: str, source: str = "<text>") -> "PauliSum":
        """Parse ``<coeff> <label>`` lines; blank lines and ``#`` comments are skipped.

        Errors name ``source:line``.
        """
        pairs, width = [], None
        for lineno, line in enumerate(text.splitlines(), 1):
            where = f"{source}:{lineno}"
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{where}: expected '<coeff> <axes>', got {line!r}")
            try:
                coeff = float(parts[0])
            except ValueError:
                raise ValueError(f"{where}: bad coefficient {parts[0]!r}") from None
            label = parts[1]
            if width is None:
                width = len(label)
            elif len(label) != width:
                raise ValueError(f"{where}: term width {len(label)} differs from {width}")
            try:
                PauliTerm(label, coeff)
            except ValueError as exc:
                raise ValueError(f"{where}: {exc}") from None
            pairs.append((coeff, label))
        return cls.from_pairs(pairs)

    @cached_property
    def _compiled(self) -> "_CompiledSum":
        return _CompiledSum(self)


def simplify(s: PauliSum, tol: float = DROP_TOLERANCE) -> PauliSum:
    """Merge duplicate labels, drop tiny coefficients, sort canonically.

    Canonical order is lexicographic on labels with ``I < X < Y < Z``.
    """
    acc: dict[str, float] = defaultdict(float)
    for t in s.terms:
        acc[t.label] += t.coeff
    kept = [PauliTerm(label, c) for label, c in sorted(acc.items()) if abs(c) >= tol]
    return PauliSum(s.width, kept)


def popcount_parity(values: np.ndarray) -> np.ndarray:
    """Parity (0/1) of the population count of each element."""
    return (np.bitwise_count(values) & 1).astype(np.int8)


def pauli_action(x: int, z: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    """Column action of a Pauli string: ``P|i> = phase[i] |i ^ x>``."""
    idx = np.arange(1 << width, dtype=np.int64)
    sign = 1.0 - 2.0 * popcount_parity(idx & z)
    phase = (1j ** ((x & z).bit_count() % 4)) * sign
    return idx ^ x, phase


def to_matrix(s: PauliSum, limit: int | None = None) -> np.ndarray:
    """Dense ``2^w x 2^w`` matrix; qubit 0 is the least-significant factor."""
    limit = DENSE_MATRIX_LIMIT if limit is None else limit
    if s.width > limit:
        raise ValueError(f"width {s.width} exceeds dense limit {limit}")
    dim = 1 << s.width
    mat = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for t in s.terms:
        rows, phase = pauli_action(*t.masks, s.width)
        mat[rows, cols] += t.coeff * phase
    return mat


@dataclass(frozen=True)
class TermPartition:
    groups: tuple[tuple[int, ...], ...]
    mode: str

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    def sizes(self) -> list[int]:
        return [len(g) for g in self.groups]


_COMMUTE_TESTS = {"qubitwise": qubitwise_commutes, "general": commutes}


def group_commuting(s: PauliSum, mode: str = "qubitwise") -> TermPartition:
    """Greedy first-fit coloring of the non-commutation graph.

    Terms are visited in the order they appear in ``s`` (canonical order
    after :func:`simplify`), each one joining the first group it commutes
    with entirely.
    """
    try:
        test = _COMMUTE_TESTS[mode]
    except KeyError:
        raise ValueError(f"unknown grouping mode {mode!r}") from None
    groups: list[list[int]] = []
    for i, term in enumerate(s.terms):
        for g in groups:
            if all(test(term, s.terms[j]) for j in g):
                g.append(i)
                break
        else:
            groups.append([i])
    return TermPartition(tuple(tuple(g) for g in groups), mode)


def validate_partition(s: PauliSum, partition: TermPartition) -> None:
    """Raise ``ValueError`` unless ``partition`` is a valid commuting cover of ``s``."""
    seen = sorted(i for g in partition.groups for i in g)
    if seen != list(range(len(s))):
        raise ValueError("partition does not cover every term exactly once")
    test = _COMMUTE_TESTS[partition.mode]
    for g in partition.groups:
        for a in range(len(g)):
            for b in range(a + 1, len(g)):
                if not test(s.terms[g[a]], s.terms[g[b]]):
                    raise ValueError(
                        f"terms {g[a]} and {g[b]} do not commute ({partition.mode})")


class _CompiledSum:
    """Terms bucketed by X-mask for matrix-free expectation values.

    For each distinct ``x`` the bucket holds a weight vector ``w`` with
    ``(H psi)[i ^ x] += w[i] psi[i]`` summed over every term sharing ``x``.
    """

    def __init__(self, s: PauliSum):
        self.width = s.width
        dim = 1 << s.width
        idx = np.arange(dim, dtype=np.int64)
        buckets: dict[int, np.ndarray] = {}
        for t in s.terms:
            x, z = t.masks
            sign = 1.0 - 2.0 * popcount_parity(idx & z)
            w = t.coeff * (1j ** ((x & z).bit_count() % 4)) * sign
            if x in buckets:
                buckets[x] = buckets[x] + w
            else:
                buckets[x] = w.astype(complex)
        self.diagonal = buckets.pop(0, np.zeros(dim, dtype=complex)).real.copy()
        self.offdiag = [(x, idx ^ x, w) for x, w in sorted(buckets.items())]

    def expectation(self, psi: np.ndarray) -> complex:
        val = np.dot(self.diagonal, (psi.conj() * psi).real)
        for _, perm, w in self.offdiag:
            val += np.vdot(psi[perm], w * psi)
        return val

    def matvec(self, psi: np.ndarray) -> np.ndarray:
        out = self.diagonal * psi
        for _, perm, w in self.offdiag:
            out[perm] += w * psi
        return out


def random_pauli_sum(width: int, n_terms: int, rng: np.random.Generator) -> PauliSum:
    """Random real-coefficient sum, handy for property tests."""
    labels = ["".join(rng.choice(list(_AXES), size=width)) for _ in range(n_terms)]
    coeffs = rng.normal(size=n_terms)
    return PauliSum(width, [PauliTerm(l, c) for l, c in zip(labels, coeffs)])


__all__ = [
    "PauliTerm", "PauliSum", "TermPartition", "commutes", "qubitwise_commutes",
    "simplify", "to_matrix", "group_commuting", "validate_partition",
    "masks_to_label", "pauli_action", "random_pauli_sum",
]
