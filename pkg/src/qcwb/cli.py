"""Command-line entry point: ``qcwb <command> [options]``.

Every command writes one JSON document (``--out`` file or stdout) holding
a ``manifest`` (command, resolved parameters, input digests, seed, tool
version) and a ``result``. Tabular commands can emit CSV instead with
``--csv``; the manifest then goes into ``#`` comment lines at the top.

Exit status: 0 on success, 1 when the computation fails (including
unparseable input), 2 on usage errors (bad flags, missing input file).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .ansatz import uccsd_circuit, uccsd_excitations
from .fermion import FcidumpError, OccupationState, hf_state, jordan_wigner, parse_fcidump
from .fixtures import FIXTURES, get_fixture
from .metrics import BASES, DEFAULT_RZ_PRECISION, compile_metrics
from .operators import PauliSum
from .qpe import QpeConfig, convergence_sweep, run_qpe, scale_spectrum, suggest_scaling
from .resources import PhysicalParams, error_rate_sweep, estimate, spacetime_frontier
from .shots import min_shots_grouped, min_shots_uniform
from .spectrum import diagonalize
from .synthesis import qpe_circuit
from .vqe import (VqeConfig, clifford_warm_start, coefficient_histogram, incremental_term_study,
                  run_vqe)

STOCHASTIC = {"qpe", "vqe", "vqe-terms", "vqe-warmstart"}
# Parameters that never influence results and are left out of the manifest.
_NON_RESULT_ARGS = {"out", "csv", "jobs", "command", "handler", "input", "fixture"}
METRICS_PARAMETER_ANGLE = 0.1


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def int_range(text: str) -> list[int]:
    """``"4..10"`` (inclusive), ``"3"`` or ``"1,2,5"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid range {text!r} (use a..b or a,b,c)") from None


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from None


@dataclass
class Problem:
    hamiltonian: PauliSum
    n_electrons: int | None
    n_spatial: int | None
    digests: dict[str, str]
    fixture: str | None = None

    def reference(self) -> OccupationState:
        if self.n_electrons is None or self.n_spatial is None:
            raise UsageError("this command needs --electrons for Pauli-text input")
        return hf_state(self.n_electrons, self.n_spatial)


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def load_problem(args) -> Problem:
    if getattr(args, "fixture", None):
        f = get_fixture(args.fixture)
        data = f.path().read_bytes()
        return Problem(f.hamiltonian(), f.n_electrons, f.n_spatial,
                       {f"fixture:{f.name}": _digest(data)}, f.name)
    if not getattr(args, "input", None):
        raise UsageError("an input is required: --in FILE or --fixture NAME")
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    data = path.read_bytes()
    text = data.decode()
    digests = {str(path): _digest(data)}
    if text.lstrip().upper().startswith("&FCI"):
        mi = parse_fcidump(text, source=str(path))
        return Problem(jordan_wigner(mi), mi.n_electrons, mi.n_spatial, digests)
    h = PauliSum.from_text(text, source=str(path))
    n_e = getattr(args, "electrons", None)
    n_s = None if n_e is None else h.width // 2
    return Problem(h.simplify(), n_e, n_s, digests)


def _qpe_scaling(args, problem: Problem) -> tuple[float, float]:
    scale, shift = args.scale, args.shift
    if scale is None or shift is None:
        if problem.fixture is not None:
            f = FIXTURES[problem.fixture]
            auto = (f.qpe_scale, f.qpe_shift)
        else:
            auto = suggest_scaling(problem.hamiltonian, problem.n_electrons)
        scale = auto[0] if scale is None else scale
        shift = auto[1] if shift is None else shift
    # record the resolved values so the manifest reproduces the run
    args.scale, args.shift = float(scale), float(shift)
    return args.scale, args.shift


def _physical_params(args) -> PhysicalParams:
    return PhysicalParams(gate_time_ns=args.gate_time, measure_time_ns=args.measure_time,
                          p_phys=args.p_phys, p_threshold=args.p_threshold,
                          prefactor=args.prefactor, target_error=args.target_error)


def _vqe_config(args) -> VqeConfig:
    return VqeConfig(max_iterations=args.max_iter, tolerance=args.tol, mode=args.mode,
                     shots_epsilon=args.epsilon, seed=args.seed, optimizer=args.optimizer,
                     init_scale=args.init_scale)


def _ansatz(args, problem: Problem | None):
    if problem is not None and problem.n_electrons is not None:
        n_e, n_s = problem.n_electrons, problem.n_spatial
    else:
        n_e, n_s = args.electrons, args.orbitals
    if n_e is None or n_s is None:
        raise UsageError("UCCSD needs the active space: give an input or --electrons/--orbitals")
    return uccsd_excitations(n_e, n_s, pair_spin=args.pair_spin)


def _circuit_for(args, problem: Problem | None):
    """Circuit selected by ``--circuit`` and its parameter count."""
    if args.circuit == "uccsd":
        ansatz = _ansatz(args, problem)
        params = np.full(ansatz.parameter_count, METRICS_PARAMETER_ANGLE)
        return uccsd_circuit(ansatz, params), ansatz.parameter_count
    if problem is None:
        raise UsageError("QPE circuits need a Hamiltonian input")
    scale, shift = _qpe_scaling(args, problem)
    hs = scale_spectrum(problem.hamiltonian, scale, shift).operator
    return qpe_circuit(hs, args.ancilla, args.trotter, problem.reference().bits), 0


def _maybe_problem(args) -> Problem | None:
    if getattr(args, "fixture", None) or getattr(args, "input", None):
        return load_problem(args)
    return None


# ---------------------------------------------------------------------------
# commands: each returns (result, rows-or-None)
# ---------------------------------------------------------------------------

def cmd_spectrum(args):
    report = diagonalize(load_problem(args).hamiltonian, threshold=args.threshold)
    rows = [{"index": k, "eigenvalue": float(e)} for k, e in enumerate(report.eigenvalues)]
    return report.as_dict(), rows


def cmd_jw(args):
    h = load_problem(args).hamiltonian
    rows = [{"coeff": t.coeff, "label": t.label} for t in h.terms]
    return {"width": h.width, "n_terms": len(h), "terms": [[t.coeff, t.label] for t in h.terms]}, rows


def cmd_qpe(args):
    problem = load_problem(args)
    scale, shift = _qpe_scaling(args, problem)
    cfg = QpeConfig(ancilla=args.ancilla, trotter_steps=args.trotter, scale=scale, shift=shift,
                    shots=args.shots, seed=args.seed)
    res = run_qpe(problem.hamiltonian, problem.reference(), cfg, method=args.method)
    out = res.as_dict()
    out["reference"] = problem.reference().bitstring()
    rows = [{"x": x, "phase": x / (1 << cfg.ancilla), "probability": float(p)}
            for x, p in enumerate(res.probabilities)]
    return out, rows


def cmd_qpe_sweep(args):
    problem = load_problem(args)
    scale, shift = _qpe_scaling(args, problem)
    res = convergence_sweep(problem.hamiltonian, problem.reference(), args.ancilla, args.trotter,
                            scale, shift, method=args.method, jobs=args.jobs)
    out = res.as_dict()
    out.update(scale=scale, shift=shift)
    rows = [{"n": r.n, "a": r.a, "energy": r.energy, "cnot": r.cnot, "depth": r.depth,
             "in_chem_acc": r.in_chem_acc} for r in res.rows]
    return out, rows


def cmd_vqe(args):
    problem = load_problem(args)
    res = run_vqe(problem.hamiltonian, _ansatz(args, problem), _vqe_config(args))
    rows = [{"iteration": i, "energy": e} for i, e in enumerate(res.energy_trace)]
    return res.as_dict(), rows


def cmd_vqe_terms(args):
    problem = load_problem(args)
    results = incremental_term_study(problem.hamiltonian, _ansatz(args, problem), _vqe_config(args))
    rows = [{"groups": k, "final_energy": r.final_energy, "iterations": r.iterations,
             "converged": r.converged} for k, r in enumerate(results)]
    return {"runs": [r.as_dict() for r in results]}, rows


def cmd_vqe_warmstart(args):
    problem = load_problem(args)
    values = args.grid if args.grid is not None else None
    kwargs = {} if values is None else {"grid_values": values}
    res = clifford_warm_start(problem.hamiltonian, _ansatz(args, problem),
                              max_points=args.max_points, seed=args.seed, **kwargs)
    return res.as_dict(), None


def cmd_coeff_hist(args):
    hist = coefficient_histogram(load_problem(args).hamiltonian, bins=args.bins)
    rows = [{"lo": float(lo), "hi": float(hi), "count": int(c)}
            for lo, hi, c in zip(hist.edges[:-1], hist.edges[1:], hist.counts)]
    return hist.as_dict(), rows


def cmd_shots(args):
    h = load_problem(args).hamiltonian
    total_uniform, per_term = min_shots_uniform(h, args.epsilon)
    out = {"epsilon": args.epsilon,
           "uniform": {"n_terms": len(h.simplify().without_identity()),
                       "shots_per_term": per_term, "total_shots": total_uniform}}
    rows = None
    if args.group != "none":
        plan = min_shots_grouped(h, epsilon=args.epsilon, mode=args.group)
        out["grouped"] = plan.as_dict()
        out["grouped"]["variance_bound"] = plan.variance_bound()
        rows = [{"group": j, "size": len(g), "shots": n}
                for j, (g, n) in enumerate(zip(plan.groups, plan.shots))]
    return out, rows


def cmd_metrics(args):
    circuit, n_params = _circuit_for(args, _maybe_problem(args))
    m = compile_metrics(circuit, args.basis, args.rz_precision, parameter_count=n_params)
    return m.as_dict(), [m.as_dict()]


def _t_metrics(args):
    circuit, n_params = _circuit_for(args, _maybe_problem(args))
    return compile_metrics(circuit, "clifford_t", args.rz_precision, parameter_count=n_params)


def cmd_resources(args):
    params = _physical_params(args)
    m = _t_metrics(args)
    est = estimate(m, args.logical_qubits, params, args.factories)
    return {"params": params.as_dict(), "metrics": m.as_dict(), "estimate": est.as_dict()}, \
        [est.as_dict()]


def cmd_error_sweep(args):
    params = _physical_params(args)
    m = _t_metrics(args)
    rows = [e.as_dict() for e in error_rate_sweep(m, args.logical_qubits, args.p_list, params,
                                                  args.factories)]
    return {"params": params.as_dict(), "metrics": m.as_dict(), "rows": rows}, rows


def cmd_frontier(args):
    params = _physical_params(args)
    m = _t_metrics(args)
    rows = [e.as_dict() for e in spacetime_frontier(m, args.logical_qubits, params,
                                                    args.factory_range)]
    return {"params": params.as_dict(), "metrics": m.as_dict(), "rows": rows}, rows


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_input(p, electrons=True):
    g = p.add_argument_group("input")
    g.add_argument("--in", dest="input", metavar="FILE",
                   help="FCIDUMP file or Pauli-sum text ('<coeff> <label>' lines)")
    g.add_argument("--fixture", choices=sorted(FIXTURES), help="use a shipped fixture")
    if electrons:
        g.add_argument("--electrons", type=int, help="electron count for Pauli-text input")


def _add_output(p):
    p.add_argument("--out", metavar="FILE", help="output file (default: stdout)")
    p.add_argument("--csv", action="store_true", help="write CSV instead of JSON")


def _add_seed(p):
    p.add_argument("--seed", type=int, default=None, help="random seed (default 0)")


def _add_vqe(p):
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--epsilon", type=float, default=1.6e-3, help="shot-noise target (sampled mode)")
    p.add_argument("--optimizer", choices=["sqp_like", "nelder_mead"], default="sqp_like")
    p.add_argument("--init-scale", type=float, default=0.0,
                   help="std of random initial parameters (0 = start at the HF point)")
    p.add_argument("--pair-spin", action="store_true", help="share parameters between spin partners")


def _add_qpe(p, sweep=False):
    if sweep:
        p.add_argument("--ancilla", type=int_range, default=int_range("4..10"))
        p.add_argument("--trotter", type=int_range, default=int_range("1..4"))
    else:
        p.add_argument("--ancilla", type=int, default=10)
        p.add_argument("--trotter", type=int, default=3)
    p.add_argument("--scale", type=float, default=None, help="spectrum scale (Hartree)")
    p.add_argument("--shift", type=float, default=None, help="spectrum shift (Hartree)")


def _add_circuit(p):
    p.add_argument("--circuit", choices=["uccsd", "qpe"], default="qpe")
    p.add_argument("--orbitals", type=int, help="spatial orbitals (UCCSD without input)")
    p.add_argument("--pair-spin", action="store_true")
    p.add_argument("--ancilla", type=int, default=10)
    p.add_argument("--trotter", type=int, default=3)
    p.add_argument("--scale", type=float, default=None)
    p.add_argument("--shift", type=float, default=None)
    p.add_argument("--rz-precision", type=float, default=DEFAULT_RZ_PRECISION)


def _add_physical(p):
    d = PhysicalParams()
    p.add_argument("--gate-time", type=float, default=d.gate_time_ns, help="ns")
    p.add_argument("--measure-time", type=float, default=d.measure_time_ns, help="ns")
    p.add_argument("--p-phys", type=float, default=d.p_phys)
    p.add_argument("--p-threshold", type=float, default=d.p_threshold)
    p.add_argument("--prefactor", type=float, default=d.prefactor)
    p.add_argument("--target-error", type=float, default=d.target_error)
    p.add_argument("--logical-qubits", type=int, default=None,
                   help="logical qubit count (default: circuit width)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcwb", description="Desk-scale quantum chemistry workbench")
    parser.add_argument("--version", action="version", version=f"qcwb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="exact eigendecomposition")
    _add_input(p)
    p.add_argument("--threshold", type=float, default=1e-3)
    _add_output(p)
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("jw", help="Jordan-Wigner qubit Hamiltonian")
    _add_input(p, electrons=False)
    _add_output(p)
    p.set_defaults(handler=cmd_jw)

    p = sub.add_parser("qpe", help="single QPE run")
    _add_input(p)
    _add_qpe(p)
    p.add_argument("--shots", type=int, default=0, help="0 = exact ancilla distribution")
    p.add_argument("--method", choices=["auto", "unitary", "sequential", "circuit"], default="auto")
    _add_seed(p)
    _add_output(p)
    p.set_defaults(handler=cmd_qpe)

    p = sub.add_parser("qpe-sweep", help="QPE convergence over ancilla and Trotter grids")
    _add_input(p)
    _add_qpe(p, sweep=True)
    p.add_argument("--method", choices=["auto", "unitary", "sequential", "circuit"], default="auto")
    p.add_argument("--jobs", type=int, default=1)
    _add_output(p)
    p.set_defaults(handler=cmd_qpe_sweep)

    for name, handler, help_ in (("vqe", cmd_vqe, "VQE with the UCCSD ansatz"),
                                 ("vqe-terms", cmd_vqe_terms, "VQE over growing prefixes of the ansatz")):
        p = sub.add_parser(name, help=help_)
        _add_input(p)
        _add_vqe(p)
        _add_seed(p)
        _add_output(p)
        p.set_defaults(handler=handler)

    p = sub.add_parser("vqe-warmstart", help="best energy over a Clifford parameter grid")
    _add_input(p)
    p.add_argument("--grid", type=float_list, default=None,
                   help="comma-separated parameter values (default 0,pi/2,pi,3pi/2)")
    p.add_argument("--max-points", type=int, default=4 ** 8)
    p.add_argument("--pair-spin", action="store_true")
    _add_seed(p)
    _add_output(p)
    p.set_defaults(handler=cmd_vqe_warmstart)

    p = sub.add_parser("coeff-hist", help="histogram of |coefficients|")
    _add_input(p, electrons=False)
    p.add_argument("--bins", type=int, default=20)
    _add_output(p)
    p.set_defaults(handler=cmd_coeff_hist)

    p = sub.add_parser("shots", help="minimum shots for a target energy std")
    _add_input(p, electrons=False)
    p.add_argument("--epsilon", type=float, default=1.6e-3)
    p.add_argument("--group", choices=["qubitwise", "general", "none"], default="qubitwise")
    _add_output(p)
    p.set_defaults(handler=cmd_shots)

    p = sub.add_parser("metrics", help="circuit metrics")
    _add_input(p)
    _add_circuit(p)
    p.add_argument("--basis", choices=BASES, default="clifford_rz")
    _add_output(p)
    p.set_defaults(handler=cmd_metrics)

    for name, handler, help_ in (("resources", cmd_resources, "surface-code resource estimate"),
                                 ("error-sweep", cmd_error_sweep, "estimates over physical error rates"),
                                 ("frontier", cmd_frontier, "space-time frontier over factory counts")):
        p = sub.add_parser(name, help=help_)
        _add_input(p)
        _add_circuit(p)
        _add_physical(p)
        if name == "error-sweep":
            p.add_argument("--p-list", type=float_list, default=float_list("1e-5,1e-6,1e-7,1e-8"))
        if name == "frontier":
            p.add_argument("--factories", dest="factory_range", type=int_range,
                           default=int_range("1..16"))
        else:
            p.add_argument("--factories", type=int, default=1)
        _add_output(p)
        p.set_defaults(handler=handler)
    return parser


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def build_manifest(args, digests: dict[str, str]) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _NON_RESULT_ARGS}
    return _jsonable({
        "command": args.command,
        "parameters": params,
        "inputs": digests,
        "seed": getattr(args, "seed", None),
        "version": __version__,
    })


def render(manifest: dict, result, rows, as_csv: bool) -> str:
    if not as_csv:
        doc = {"manifest": manifest, "result": _jsonable(result)}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if rows is None:
        raise UsageError("this command has no tabular form; drop --csv")
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\n")
    if isinstance(result, dict) and "params" in result:
        buf.write("# model: " + json.dumps(_jsonable(result["params"]), sort_keys=True) + "\n")
    rows = [_jsonable(r) for r in rows]
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _input_digests(args) -> dict[str, str]:
    if getattr(args, "fixture", None):
        f = get_fixture(args.fixture)
        return {f"fixture:{f.name}": _digest(f.path().read_bytes())}
    if getattr(args, "input", None) and Path(args.input).is_file():
        return {args.input: _digest(Path(args.input).read_bytes())}
    return {}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if args.command in STOCHASTIC and args.seed is None:
        print("warning: --seed not given; using 0", file=sys.stderr)
        args.seed = 0
    if getattr(args, "input", None) and not Path(args.input).is_file():
        print(f"qcwb: error: input file not found: {args.input}", file=sys.stderr)
        return 2
    try:
        result, rows = args.handler(args)
        text = render(build_manifest(args, _input_digests(args)), result, rows, args.csv)
    except UsageError as exc:
        print(f"qcwb: error: {exc}", file=sys.stderr)
        return 2
    except (FcidumpError, ValueError, KeyError, ArithmeticError, MemoryError) as exc:
        print(f"qcwb: error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
