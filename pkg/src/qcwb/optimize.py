"""Unconstrained minimization for variational loops.

``sqp_like`` is a quasi-Newton (BFGS) method with Armijo backtracking: for
an unconstrained problem an SQP iteration reduces to exactly this. The
accepted objective trace is non-increasing by construction. The
``nelder_mead`` fallback delegates to :func:`scipy.optimize.minimize`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ARMIJO_C1 = 1e-4
MAX_BACKTRACKS = 40
GRADIENT_FLOOR = 1e-10


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    trace: list[float] = field(default_factory=list)
    evaluations: int = 0
    iterations: int = 0
    converged: bool = False


def central_difference(f: Callable[[np.ndarray], float], x: np.ndarray,
                       step: float = 1e-6) -> np.ndarray:
    g = np.zeros_like(x, dtype=float)
    for k in range(x.size):
        e = np.zeros_like(x, dtype=float)
        e[k] = step
        g[k] = (f(x + e) - f(x - e)) / (2 * step)
    return g


class _Counted:
    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return float(self.f(x))


def minimize(objective: Callable[[np.ndarray], float], x0,
             gradient: Callable[[np.ndarray], np.ndarray] | None = None,
             max_iter: int = 100, tol: float = 1e-5,
             method: str = "sqp_like") -> OptimizeResult:
    """Minimize ``objective`` from ``x0``.

    Stops when an accepted step changes the objective by less than ``tol``,
    when the gradient vanishes, or after ``max_iter`` iterations. Without an
    explicit ``gradient``, central differences are used. ``evaluations``
    counts objective calls only.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be > 0")
    f = _Counted(objective)
    x = np.array(x0, dtype=float).ravel()
    fx = f(x)
    if not np.isfinite(fx):
        raise ValueError(f"objective is not finite at the starting point ({fx})")
    if method == "nelder_mead":
        return _nelder_mead(f, x, fx, max_iter, tol)
    if method != "sqp_like":
        raise ValueError(f"unknown optimizer {method!r}")
    grad = gradient if gradient is not None else (lambda v: central_difference(f, v))

    trace = [fx]
    if x.size == 0:
        return OptimizeResult(x, fx, trace, f.calls, 0, True)
    g = np.asarray(grad(x), dtype=float)
    h_inv = np.eye(x.size)
    converged = False
    iterations = 0
    while iterations < max_iter:
        if np.linalg.norm(g) < GRADIENT_FLOOR:
            converged = True
            break
        p = -h_inv @ g
        slope = float(g @ p)
        if slope >= 0:
            h_inv = np.eye(x.size)
            p, slope = -g, -float(g @ g)
        alpha, accepted = 1.0, False
        for _ in range(MAX_BACKTRACKS):
            x_new = x + alpha * p
            f_new = f(x_new)
            if np.isfinite(f_new) and f_new <= fx + ARMIJO_C1 * alpha * slope:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            # No descent along a descent direction: numerically stationary.
            converged = True
            break
        g_new = np.asarray(grad(x_new), dtype=float)
        s, y = x_new - x, g_new - g
        sy = float(s @ y)
        if sy > 1e-12:
            if iterations == 0:
                h_inv = np.eye(x.size) * (sy / float(y @ y))
            rho = 1.0 / sy
            v = np.eye(x.size) - rho * np.outer(s, y)
            h_inv = v @ h_inv @ v.T + rho * np.outer(s, s)
        iterations += 1
        decrease = fx - f_new
        x, fx, g = x_new, f_new, g_new
        trace.append(fx)
        if abs(decrease) < tol:
            converged = True
            break
    return OptimizeResult(x, fx, trace, f.calls, iterations, converged)


def _nelder_mead(f: _Counted, x0: np.ndarray, f0: float, max_iter: int,
                 tol: float) -> OptimizeResult:
    from scipy.optimize import minimize as sp_minimize

    trace = [f0]
    if x0.size == 0:
        return OptimizeResult(x0, f0, trace, f.calls, 0, True)

    def record(intermediate_result):
        trace.append(min(trace[-1], float(intermediate_result.fun)))

    res = sp_minimize(f, x0, method="Nelder-Mead", callback=record,
                      options={"maxiter": max_iter, "fatol": tol, "xatol": 1e-8})
    x, fx = np.asarray(res.x, dtype=float), float(res.fun)
    if fx > f0:  # never report a worse point than the start
        x, fx = x0, f0
    if len(trace) > 1:
        trace[-1] = fx
    elif fx < f0:
        trace.append(fx)
    return OptimizeResult(x, fx, trace, f.calls, int(res.nit), bool(res.success))


__all__ = ["minimize", "OptimizeResult", "central_difference"]
