"""Variational quantum eigensolver on the UCCSD ansatz.

Energies are evaluated on the state-vector engine through the ansatz's
rotation program (equivalent to simulating :func:`~qcwb.ansatz.uccsd_circuit`).
In exact mode the gradient comes from the general parameter-shift rule;
in sampled mode energies are shot-noise estimates under a grouped
measurement plan and gradients are central differences of those estimates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .ansatz import UccsdAnsatz
from .operators import PauliSum
from .optimize import minimize
from .shots import ShotPlan, min_shots_grouped
from .statevector import GroupSampler, apply_pauli_rotation, basis_state, expectation

CLIFFORD_GRID = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)
MAX_GRID_POINTS = 4 ** 8


@dataclass(frozen=True)
class VqeConfig:
    max_iterations: int = 100
    tolerance: float = 1e-5
    mode: str = "exact"
    shots_epsilon: float = 1.6e-3
    seed: int = 0
    optimizer: str = "sqp_like"
    init_scale: float = 0.0
    fd_step: float = math.pi / 8

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.optimizer not in ("sqp_like", "nelder_mead"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class VqeResult:
    final_energy: float
    parameters: np.ndarray
    energy_trace: list[float]
    evaluations: int
    converged: bool
    iterations: int = 0
    exact_energy: float | None = None   # exact energy at the final parameters
    parameter_groups: int = 0

    def as_dict(self) -> dict:
        return {
            "final_energy": self.final_energy,
            "exact_energy": self.exact_energy,
            "parameters": [float(p) for p in self.parameters],
            "energy_trace": [float(e) for e in self.energy_trace],
            "evaluations": self.evaluations,
            "iterations": self.iterations,
            "converged": self.converged,
            "parameter_groups": self.parameter_groups,
        }


def shift_points(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Shifts and weights of the equidistant parameter-shift rule.

    For ``f(theta)`` a trigonometric polynomial of degree ``order`` (integer
    frequencies up to ``R``)::

        f'(theta) = sum_{mu=1}^{2R} f(theta + x_mu) (-1)^(mu-1) / (4R sin^2(x_mu/2)),
        x_mu = (2 mu - 1) pi / (2R).
    """
    mu = np.arange(1, 2 * order + 1)
    x = (2 * mu - 1) * np.pi / (2 * order)
    w = (-1.0) ** (mu - 1) / (4 * order * np.sin(x / 2) ** 2)
    return x, w


class EnergyObjective:
    """``E(theta) = <psi(theta)|H|psi(theta)>`` with cached program structure."""

    def __init__(self, h: PauliSum, ansatz: UccsdAnsatz):
        if h.width != ansatz.width:
            raise ValueError(f"Hamiltonian width {h.width} != ansatz width {ansatz.width}")
        self.h = h.simplify()
        self.ansatz = ansatz
        program = ansatz.program
        self.reference = program.reference
        self.n_params = program.n_params
        # per-parameter slices of the rotation list (steps are ordered by parameter)
        self._steps = [[] for _ in range(self.n_params)]
        for k, x, z, c in program.steps:
            self._steps[k].append((x, z, c))
        self.evaluations = 0

    def _apply_group(self, psi: np.ndarray, k: int, theta: float) -> np.ndarray:
        if theta == 0.0:
            return psi
        for x, z, c in self._steps[k]:
            psi = apply_pauli_rotation(psi, x, z, theta * c)
        return psi

    def state(self, params, start: int = 0, psi: np.ndarray | None = None) -> np.ndarray:
        if psi is None:
            psi = basis_state(self.reference, self.h.width)
        for k in range(start, self.n_params):
            psi = self._apply_group(psi, k, float(params[k]))
        return psi

    def energy(self, params) -> float:
        params = self._check(params)
        self.evaluations += 1
        return expectation(self.state(params), self.h)

    def gradient(self, params) -> np.ndarray:
        """Exact gradient via the parameter-shift rule.

        Prefix states are reused: each shifted evaluation restarts from
        the state just before the shifted group.
        """
        params = self._check(params)
        grad = np.zeros(self.n_params)
        prefix = basis_state(self.reference, self.h.width)
        for k in range(self.n_params):
            shifts, weights = shift_points(self.ansatz.shift_order(k))
            for s, w in zip(shifts, weights):
                psi = self._apply_group(prefix, k, float(params[k]) + s)
                psi = self.state(params, start=k + 1, psi=psi)
                grad[k] += w * expectation(psi, self.h)
                self.evaluations += 1
            prefix = self._apply_group(prefix, k, float(params[k]))
        return grad

    def _check(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got shape {params.shape}")
        return params


class SampledObjective:
    """Shot-noise energy estimates; each call draws from a fresh child seed."""

    def __init__(self, exact: EnergyObjective, plan: ShotPlan, seed: int):
        self.exact = exact
        self.plan = plan
        self._seeds = np.random.SeedSequence(seed)
        self.evaluations = 0

    def energy(self, params) -> float:
        params = self.exact._check(params)
        (child,) = self._seeds.spawn(1)
        self.evaluations += 1
        sampler = GroupSampler(self.exact.state(params), self.exact.h,
                               self.plan.groups, self.plan.shots)
        return sampler.run(child).estimate

    def gradient(self, params, step: float) -> np.ndarray:
        params = self.exact._check(params)
        grad = np.zeros_like(params)
        for k in range(params.size):
            e = np.zeros_like(params)
            e[k] = step
            grad[k] = (self.energy(params + e) - self.energy(params - e)) / (2 * step)
        return grad


def initial_parameters(ansatz: UccsdAnsatz, cfg: VqeConfig) -> np.ndarray:
    x0 = np.zeros(ansatz.parameter_count)
    if cfg.init_scale:
        x0 += cfg.init_scale * np.random.default_rng(cfg.seed).normal(size=x0.size)
    return x0


def run_vqe(h: PauliSum, ansatz: UccsdAnsatz, cfg: VqeConfig = VqeConfig(),
            initial=None) -> VqeResult:
    """Minimize the ansatz energy from the HF point (or ``initial``)."""
    exact = EnergyObjective(h, ansatz)
    x0 = initial_parameters(ansatz, cfg) if initial is None else np.asarray(initial, float)
    if cfg.mode == "exact":
        objective, gradient, counter = exact.energy, exact.gradient, exact
    else:
        plan = min_shots_grouped(exact.h, epsilon=cfg.shots_epsilon, mode="qubitwise")
        sampled = SampledObjective(exact, plan, cfg.seed)
        objective = sampled.energy
        gradient = lambda p: sampled.gradient(p, cfg.fd_step)  # noqa: E731
        counter = sampled
    res = minimize(objective, x0, gradient=gradient if cfg.optimizer == "sqp_like" else None,
                   max_iter=cfg.max_iterations, tol=cfg.tolerance, method=cfg.optimizer)
    return VqeResult(
        final_energy=res.fun, parameters=res.x, energy_trace=res.trace,
        evaluations=counter.evaluations, converged=res.converged, iterations=res.iterations,
        exact_energy=expectation(exact.state(res.x), exact.h),
        parameter_groups=ansatz.parameter_count,
    )


def incremental_term_study(h: PauliSum, ansatz: UccsdAnsatz,
                           cfg: VqeConfig = VqeConfig(), prefixes=None) -> list[VqeResult]:
    """One VQE run per prefix of the parameter groups, ``k = 0 .. G``.

    ``prefixes`` restricts the study to selected ``k`` (in the given order).
    """
    ks = range(ansatz.parameter_count + 1) if prefixes is None else prefixes
    return [run_vqe(h, ansatz.truncated(k), cfg) for k in ks]


@dataclass
class WarmStartResult:
    best_params: np.ndarray
    best_energy: float
    reference_energy: float
    points_evaluated: int
    exhaustive: bool

    def as_dict(self) -> dict:
        return {
            "best_params": [float(p) for p in self.best_params],
            "best_energy": self.best_energy,
            "reference_energy": self.reference_energy,
            "improvement": self.reference_energy - self.best_energy,
            "points_evaluated": self.points_evaluated,
            "exhaustive": self.exhaustive,
        }


def clifford_warm_start(h: PauliSum, ansatz: UccsdAnsatz, grid_values=CLIFFORD_GRID,
                        max_points: int = MAX_GRID_POINTS, seed: int = 0) -> WarmStartResult:
    """Best energy over a grid of parameter values.

    With the default values ``{0, pi/2, pi, 3pi/2}`` every excitation maps
    the reference to a signed basis state, so each grid point prepares a
    stabilizer state. The grid is exhaustive when it has at most
    ``max_points`` points; otherwise a seeded random subset of that size is
    evaluated (the all-zero point is always included). Ties keep the
    earlier point, so the reference wins unless strictly improved upon.
    """
    values = np.asarray(sorted(set(float(v) for v in grid_values)), dtype=float)
    if values.size == 0:
        raise ValueError("empty grid")
    obj = EnergyObjective(h, ansatz)
    g = ansatz.parameter_count
    zero_idx = np.flatnonzero(values == 0.0)
    start = np.zeros(g) if zero_idx.size else np.full(g, values[0])
    reference_energy = obj.energy(np.zeros(g))
    exhaustive = values.size ** g <= max_points
    if exhaustive:
        points = (np.array(p) for p in itertools.product(values, repeat=g))
    else:
        rng = np.random.default_rng(seed)
        points = itertools.chain(
            [start], (values[rng.integers(values.size, size=g)] for _ in range(max_points - 1)))
    best_params, best_energy, count = None, math.inf, 0
    for p in points:
        e = obj.energy(p)
        count += 1
        if e < best_energy - 1e-12:
            best_params, best_energy = p.copy(), e
    return WarmStartResult(best_params, best_energy, reference_energy, count, exhaustive)


@dataclass
class CoefficientHistogram:
    counts: np.ndarray
    edges: np.ndarray
    mean: float
    std: float
    n_terms: int

    def as_dict(self) -> dict:
        return {"counts": [int(c) for c in self.counts], "edges": [float(e) for e in self.edges],
                "mean": self.mean, "std": self.std, "n_terms": self.n_terms}


def coefficient_histogram(h: PauliSum, bins: int = 20) -> CoefficientHistogram:
    """Histogram of ``|c_i|`` over non-identity terms with a moment-matched Gaussian."""
    body = h.simplify().without_identity()
    if len(body) == 0:
        raise ValueError("no non-identity terms")
    values = np.abs(body.coefficients)
    n_bins = 1 if np.ptp(values) == 0 else bins
    counts, edges = np.histogram(values, bins=n_bins)
    return CoefficientHistogram(counts, edges, float(values.mean()), float(values.std()), values.size)


__all__ = [
    "VqeConfig", "VqeResult", "EnergyObjective", "run_vqe", "incremental_term_study",
    "clifford_warm_start", "WarmStartResult", "coefficient_histogram", "CoefficientHistogram",
    "shift_points",
]
