"""Minimum-shot calculus for energy estimation.

For a Pauli observable ``A`` the single-shot variance is ``1 - <A>^2 <= 1``,
so bounding the standard deviation of ``<A>`` by ``eps`` needs
``N >= 1/eps^2`` shots. For ``E = sum_i c_i <P_i>`` over ``m`` terms
measured independently with ``n`` shots each, ``Var(E) <= sum c_i^2 / n``
and ``n = ceil(sum c_i^2 / eps^2)`` (``N = n m``). With ``l`` groups of
simultaneously measurable terms, giving group ``G_j``
``n_j = ceil(|G_j| l max_{i in G_j} c_i^2 / eps^2)`` shots bounds
``Var(E) <= sum_j |G_j| max c^2 / n_j <= eps^2`` in the worst case.

Identity terms have zero variance and never consume shots.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .operators import PauliSum, TermPartition, group_commuting, validate_partition


def _ceil(value: Fraction) -> int:
    """Exact ceiling of a rational."""
    return -((-value.numerator) // value.denominator)


def _inverse_eps2(epsilon: float) -> Fraction:
    """``1/eps^2`` in exact arithmetic, reading ``eps`` at its decimal value.

    ``1.6e-3`` is taken as 16/10000 rather than its binary approximation, so
    that ``1/eps^2`` is exactly 390625 instead of 390624.99999...
    """
    return 1 / Fraction(repr(float(epsilon))) ** 2


def _square(c: float) -> Fraction:
    return Fraction(float(c)) ** 2


def _check_epsilon(epsilon: float):
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be a positive number, got {epsilon!r}")


def min_shots_single(epsilon: float) -> int:
    """``ceil(1/eps^2)`` shots for one Pauli observable."""
    _check_epsilon(epsilon)
    return _ceil(_inverse_eps2(epsilon))


def _non_identity_coefficients(coefficients) -> np.ndarray:
    if isinstance(coefficients, PauliSum):
        return coefficients.simplify().without_identity().coefficients
    return np.asarray(list(coefficients), dtype=float)


def min_shots_uniform(coefficients, epsilon: float) -> tuple[int, int]:
    """``(N, n)`` for equal per-term allocation.

    ``coefficients`` is either a :class:`PauliSum` (its identity term is
    dropped) or a sequence of non-identity coefficients.
    """
    _check_epsilon(epsilon)
    c = _non_identity_coefficients(coefficients)
    if c.size == 0:
        raise ValueError("need at least one non-identity coefficient")
    n = max(1, _ceil(sum(map(_square, c)) * _inverse_eps2(epsilon)))
    return n * c.size, n


@dataclass(frozen=True)
class ShotPlan:
    terms: PauliSum                 # non-identity terms the plan measures
    partition: TermPartition
    shots: tuple[int, ...]          # n_j per group
    epsilon: float

    @property
    def groups(self) -> tuple[tuple[int, ...], ...]:
        return self.partition.groups

    @property
    def per_group_shots(self) -> tuple[int, ...]:
        return self.shots

    @property
    def total_shots(self) -> int:
        return int(sum(self.shots))

    def variance_bound(self) -> float:
        """Worst-case ``sum_j |G_j| max c^2 / n_j``."""
        c = self.terms.coefficients
        return float(sum(len(g) * max(c[i] ** 2 for i in g) / n
                         for g, n in zip(self.groups, self.shots)))

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "mode": self.partition.mode,
            "n_terms": len(self.terms),
            "n_groups": self.partition.n_groups,
            "total_shots": self.total_shots,
            "groups": [
                {"terms": [self.terms.terms[i].label for i in g], "shots": n}
                for g, n in zip(self.groups, self.shots)
            ],
        }


def min_shots_grouped(h: PauliSum, partition: TermPartition | None = None,
                      epsilon: float = 1.6e-3, mode: str = "qubitwise") -> ShotPlan:
    """Grouped allocation over the non-identity terms of ``h``.

    ``partition`` indexes the terms of ``h.simplify().without_identity()``;
    when omitted, a greedy ``mode`` grouping of those terms is used.
    """
    _check_epsilon(epsilon)
    terms = h.simplify().without_identity()
    if partition is None:
        partition = group_commuting(terms, mode)
    validate_partition(terms, partition)
    c2 = [_square(c) for c in terms.coefficients]
    l = partition.n_groups
    inv = _inverse_eps2(epsilon)
    shots = tuple(max(1, _ceil(len(g) * l * max(c2[i] for i in g) * inv))
                  for g in partition.groups)
    return ShotPlan(terms, partition, shots, epsilon)


def min_shots_ungrouped(h: PauliSum, epsilon: float) -> int:
    """Total shots when every term is measured on its own (uniform rule)."""
    return min_shots_uniform(h, epsilon)[0]


def validate_plan(state: np.ndarray, h: PauliSum, plan: ShotPlan, trials: int = 200,
                  seed: int = 0) -> float:
    """Empirical standard deviation of ``trials`` sampled energy estimates."""
    from .statevector import GroupSampler

    if plan.partition.mode != "qubitwise":
        raise ValueError("sampled validation needs qubit-wise commuting groups")
    if trials < 2:
        raise ValueError("need at least two trials")
    check_plan(h, plan)
    sampler = GroupSampler(state, h, plan.groups, plan.shots)
    seeds = np.random.SeedSequence(seed).spawn(trials)
    estimates = [sampler.run(s).estimate for s in seeds]
    return float(statistics.stdev(estimates))   # exact: identical estimates give 0.0


def check_plan(h: PauliSum, plan: ShotPlan) -> None:
    """Raise unless ``plan`` covers exactly the non-identity terms of ``h``."""
    body = h.simplify().without_identity()
    if [t.label for t in body.terms] != [t.label for t in plan.terms.terms]:
        raise ValueError("shot plan does not match the Hamiltonian's non-identity terms")


__all__ = [
    "ShotPlan", "min_shots_single", "min_shots_uniform", "min_shots_grouped",
    "min_shots_ungrouped", "validate_plan", "check_plan",
]
