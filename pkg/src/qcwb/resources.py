"""Surface-code resource model.

A small, fully explicit stand-in for a fault-tolerant resource estimator.
Every constant lives in :class:`PhysicalParams` and is echoed into each
report.

Model
-----
* Logical error per operation at odd code distance ``d``:
  ``A (p / p_th)^((d + 1) / 2)``. The distance is the smallest odd
  ``d >= 3`` meeting the per-operation budget
  ``target_error / (depth * logical_qubits + t_count)``.
* One logical cycle takes ``d`` rounds of (gate + measurement), i.e.
  ``d * (gate_time + measure_time)``.
* Each logical qubit is a patch of ``2 d^2`` physical qubits.
* T states come from single-level 15-to-1 distillation factories. A
  factory occupies ``factory_patches`` patches (``factory_patches * 2 d^2``
  qubits) and emits one T state every ``factory_cycles`` logical cycles.
  Output T-state error is ``35 p^3`` (reported, not enforced).
* Runtime is ``max(depth * cycle, t_count * factory_cycles * cycle / factories)``:
  the circuit either waits for its own layers or for T states.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

from .metrics import CircuitMetrics

NS = 1e-9


@dataclass(frozen=True)
class PhysicalParams:
    gate_time_ns: float = 50.0
    measure_time_ns: float = 100.0
    p_phys: float = 1e-4
    p_threshold: float = 1e-2
    prefactor: float = 0.1           # A in A (p/p_th)^((d+1)/2)
    target_error: float = 1e-3       # total failure budget of the computation
    patch_factor: float = 2.0        # physical qubits per logical qubit = patch_factor * d^2
    factory_patches: int = 16        # footprint of one 15-to-1 factory, in patches
    factory_cycles: int = 11         # logical cycles per distilled T state
    distillation_coeff: float = 35.0  # 15-to-1 output error = coeff * p^3

    def __post_init__(self):
        if self.gate_time_ns <= 0 or self.measure_time_ns <= 0:
            raise ValueError("operation times must be positive")
        if not 0 < self.p_phys < self.p_threshold:
            raise ValueError(
                f"p_phys={self.p_phys} must lie in (0, p_threshold={self.p_threshold})")
        if not 0 < self.target_error < 1:
            raise ValueError("target_error must lie in (0, 1)")
        if self.prefactor <= 0 or self.factory_patches < 1 or self.factory_cycles < 1:
            raise ValueError("model constants must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ResourceEstimate:
    code_distance: int
    logical_cycle_ns: float
    logical_qubits: int
    algorithmic_qubits: int
    factories: int
    t_factory_qubits: int
    total_physical_qubits: int
    runtime_seconds: float
    circuit_limited_seconds: float
    t_limited_seconds: float
    budget_per_op: float
    logical_error_per_op: float
    t_state_error: float
    p_phys: float

    @property
    def t_limited(self) -> bool:
        return self.t_limited_seconds > self.circuit_limited_seconds

    def as_dict(self) -> dict:
        d = asdict(self)
        d["t_limited"] = self.t_limited
        return d


def naive_runtime(metrics: CircuitMetrics, params: PhysicalParams = PhysicalParams()) -> float:
    """Seconds for one shot: ``depth`` gate layers plus one measurement layer."""
    if metrics.depth < 0:
        raise ValueError("negative depth")
    return (metrics.depth * params.gate_time_ns + params.measure_time_ns) * NS


def logical_error_rate(d: int, p_phys: float, prefactor: float, p_threshold: float) -> float:
    return prefactor * (p_phys / p_threshold) ** ((d + 1) / 2)


_RELATIVE_SLACK = 1e-12
_MAX_DISTANCE = 10_001


def code_distance(p_phys: float, budget: float, prefactor: float = 0.1,
                  p_threshold: float = 1e-2) -> int:
    """Smallest odd ``d >= 3`` with ``A (p/p_th)^((d+1)/2) <= budget``.

    Comparisons allow a relative slack of 1e-12 so that budgets hit exactly
    by the formula (e.g. ``A * 1e-4`` at ``p = p_th / 100``) are not pushed
    to the next distance by rounding.
    """
    if not 0 < p_phys < p_threshold:
        raise ValueError(f"p_phys={p_phys} is not below the threshold {p_threshold}")
    if not 0 < budget < 1:
        raise ValueError("budget must lie in (0, 1)")
    d = 3
    while logical_error_rate(d, p_phys, prefactor, p_threshold) > budget * (1 + _RELATIVE_SLACK):
        d += 2
        if d > _MAX_DISTANCE:
            raise ValueError("no code distance meets the budget")
    return d


def estimate(metrics: CircuitMetrics, logical_qubits: int | None = None,
             params: PhysicalParams = PhysicalParams(), factories: int = 1) -> ResourceEstimate:
    """Physical footprint and runtime of a Clifford+T compiled circuit."""
    if metrics.t_count is None:
        raise ValueError("metrics lack a T-count; compile with basis='clifford_t'")
    if factories < 1:
        raise ValueError("need at least one T factory")
    n_log = metrics.width if logical_qubits is None else logical_qubits
    if n_log < 1:
        raise ValueError("need at least one logical qubit")
    ops = metrics.depth * n_log + metrics.t_count
    budget = params.target_error / max(ops, 1)
    d = code_distance(params.p_phys, budget, params.prefactor, params.p_threshold)
    cycle_ns = d * (params.gate_time_ns + params.measure_time_ns)
    patch = params.patch_factor * d * d
    algorithmic = int(round(n_log * patch))
    if metrics.t_count:
        factory_qubits = int(round(factories * params.factory_patches * patch))
        t_limited = metrics.t_count * params.factory_cycles * cycle_ns * NS / factories
    else:
        factory_qubits, t_limited = 0, 0.0
    circuit_limited = metrics.depth * cycle_ns * NS
    return ResourceEstimate(
        code_distance=d, logical_cycle_ns=cycle_ns, logical_qubits=n_log,
        algorithmic_qubits=algorithmic, factories=factories if metrics.t_count else 0,
        t_factory_qubits=factory_qubits, total_physical_qubits=algorithmic + factory_qubits,
        runtime_seconds=max(circuit_limited, t_limited),
        circuit_limited_seconds=circuit_limited, t_limited_seconds=t_limited,
        budget_per_op=budget,
        logical_error_per_op=logical_error_rate(d, params.p_phys, params.prefactor,
                                                params.p_threshold),
        t_state_error=params.distillation_coeff * params.p_phys ** 3,
        p_phys=params.p_phys,
    )


def error_rate_sweep(metrics: CircuitMetrics, logical_qubits: int | None, p_list,
                     params: PhysicalParams = PhysicalParams(),
                     factories: int = 1) -> list[ResourceEstimate]:
    """One estimate per physical error rate, in the order given."""
    return [estimate(metrics, logical_qubits, replace(params, p_phys=float(p)), factories)
            for p in p_list]


def spacetime_frontier(metrics: CircuitMetrics, logical_qubits: int | None,
                       params: PhysicalParams = PhysicalParams(),
                       factory_range=range(1, 17)) -> list[ResourceEstimate]:
    """Estimates for each factory count (more factories: more qubits, less T waiting)."""
    counts = sorted(set(int(f) for f in factory_range))
    if not counts:
        raise ValueError("empty factory range")
    return [estimate(metrics, logical_qubits, params, f) for f in counts]


__all__ = [
    "PhysicalParams", "ResourceEstimate", "naive_runtime", "code_distance", "estimate",
    "error_rate_sweep", "spacetime_frontier", "logical_error_rate",
]
