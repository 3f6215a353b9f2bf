"""Command-line interface.

Verbs: ``synthesize`` (run a solver and write a report), ``verify`` (check a
gain), ``grad-check`` (validate analytic derivatives against finite
differences), ``init`` (phase-I starting gain), and ``bench-scale`` (run both
methods over replicated plants and write CSV results).
"""

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import h2cost, io, oracle
from .barrier import eval_barrier
from .exceptions import CompartH2Error, NotSchur, PhaseOneFailed
from .initial import check_start, phase1, rank_one_gain
from .linalg import spectral_radius
from .model import (
    constraint_stack,
    is_compartmental,
    min_slack,
    replicate,
    validate_plant,
)
from .solver import SolverConfig, fipm, kkt_residual, recover_multiplier, sipm

BENCH_HEADER = "N,method,seconds,J,outer_iters,total_inner_iters,final_grad_norm,status"
TRACE_HEADER = "outer_iter,cumulative_seconds"

_CONFIG_FLOATS = ("t0", "mu", "eps1", "eps2", "eps_r", "delta")


def _fmt(x):
    return format(float(x), ".17g")


def _load_config(args):
    """Defaults, overridden by the config file, overridden by explicit flags."""
    values = {}
    if args.config:
        with open(args.config) as fh:
            obj = json.load(fh)
        if not isinstance(obj, dict):
            raise ValueError(f"{args.config}: config file must hold a JSON object")
        known = {f.name for f in dataclasses.fields(SolverConfig)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"{args.config}: unknown config keys {sorted(unknown)}")
        values.update(obj)
    for name in _CONFIG_FLOATS:
        flag = getattr(args, name)
        if flag is not None:
            values[name] = flag
    return SolverConfig(**values)


def _resolve_k0(spec, plant, eps_r):
    if spec.startswith("file:"):
        return io.load_gain(spec[len("file:"):])
    if spec.startswith("rank1:"):
        return rank_one_gain(io.load_vectors(spec[len("rank1:"):]))
    if spec == "phase1":
        try:
            return phase1(plant)
        except PhaseOneFailed as exc:
            best = exc.best_gain
            usable = (
                min_slack(plant, best) + eps_r > 0
                and spectral_radius(plant.A - plant.B @ best) < 1.0
            )
            if usable:
                print(
                    f"warning: phase-I reached slack {exc.best_slack:.3e} "
                    f"(< target {exc.target_slack:g}); using the best gain, "
                    "which is feasible under the relaxation",
                    file=sys.stderr,
                )
                return best
            raise
    raise ValueError(
        f"unrecognized --k0 value {spec!r}; expected file:<path>, phase1, "
        "or rank1:<path>"
    )


def _require_valid_plant(plant, path):
    violations = validate_plant(plant)
    if violations:
        raise CompartH2Error(
            f"{path}: plant violates standing assumptions: "
            + "; ".join(str(v) for v in violations)
        )


def _cmd_synthesize(args):
    plant = io.load_plant(args.plant)
    _require_valid_plant(plant, args.plant)
    cfg = _load_config(args)
    k0 = _resolve_k0(args.k0, plant, cfg.eps_r)
    solver = sipm if args.method == "sipm" else fipm
    report = solver(plant, k0, cfg)
    if args.out:
        io.save_report(report, args.out)
    else:
        json.dump(io.report_to_dict(report), sys.stdout, indent=2)
        print()
    print(
        f"{report.method}: J = {report.objective:.6f}, "
        f"{len(report.trace)} outer iterations, "
        f"converged = {report.converged}",
        file=sys.stderr,
    )
    return 0 if report.converged else 2


def _cmd_verify(args):
    plant = io.load_plant(args.plant)
    gain = io.load_gain(args.gain)
    slack = min_slack(plant, gain)
    radius = spectral_radius(plant.A - plant.B @ gain)
    schur = radius < 1.0
    compartmental = is_compartmental(plant, gain, tol=args.eps_r)
    print(f"schur: {str(schur).lower()} (spectral radius {radius:.6g})")
    print(f"compartmental: {str(compartmental).lower()}")
    if slack > 0:
        print("strictly_feasible: true")
    else:
        stack = constraint_stack(plant, gain)
        offending = [tuple(idx) for idx in np.argwhere(stack <= 0.0)]
        print(f"strictly_feasible: false (offending stack entries: {offending})")
    print(f"min_slack: {_fmt(slack)}")
    if schur:
        print(f"J: {_fmt(h2cost.eval_cost(plant, gain).J)}")
    else:
        print("J: inf (closed loop not Schur)")
    try:
        q = recover_multiplier(plant, gain, args.t, args.eps_r)
        kkt = kkt_residual(plant, gain, q)
        print(f"kkt_stationarity: {_fmt(kkt.stationarity)}")
        print(f"kkt_dual_feasibility: {_fmt(kkt.dual_feasibility)}")
        print(f"kkt_primal_feasibility: {_fmt(kkt.primal_feasibility)}")
        print(f"kkt_complementarity: {_fmt(kkt.complementarity)}")
    except CompartH2Error as exc:
        print(f"kkt: unavailable ({exc})")
    return 0 if (schur and compartmental) else 1


def _rel_err(approx, ref):
    approx = np.asarray(approx, dtype=float)
    ref = np.asarray(ref, dtype=float)
    return float(np.linalg.norm(approx - ref)) / max(1.0, float(np.linalg.norm(ref)))


def _cmd_grad_check(args):
    plant = io.load_plant(args.plant)
    gain = io.load_gain(args.gain)
    t = 1.0

    cache = h2cost.eval_cost(plant, gain)
    grad = h2cost.cost_gradient(plant, gain, cache)
    grad_fd = oracle.fd_gradient(lambda k: h2cost.eval_cost(plant, k).J, gain)
    err_grad = _rel_err(grad, grad_fd)

    hess = h2cost.cost_hessian(plant, gain, cache)
    hess_fd = oracle.fd_jacobian(
        lambda k: h2cost.vec_cost_gradient(plant, k, h2cost.eval_cost(plant, k)),
        gain,
        symmetrize=True,
    )
    err_hess = _rel_err(hess, hess_fd)

    bar = eval_barrier(plant, gain, t, args.eps_r)
    bar_grad_fd = oracle.fd_gradient(
        lambda k: eval_barrier(plant, k, t, args.eps_r).value, gain
    )
    err_bar_grad = _rel_err(bar.grad_matrix, bar_grad_fd)
    bar_hess_fd = oracle.fd_jacobian(
        lambda k: eval_barrier(plant, k, t, args.eps_r).vec_grad,
        gain,
        symmetrize=True,
    )
    err_bar_hess = _rel_err(bar.vec_hessian, bar_hess_fd)

    print(f"cost gradient vs finite differences: {err_grad:.3e}")
    print(f"cost hessian vs finite differences: {err_hess:.3e}")
    print(f"barrier gradient vs finite differences: {err_bar_grad:.3e}")
    print(f"barrier hessian vs finite differences: {err_bar_hess:.3e}")
    worst = max(err_grad, err_hess, err_bar_grad, err_bar_hess)
    print(f"max relative error: {worst:.3e}")
    return 0 if worst <= 1e-4 else 1


def _cmd_init(args):
    plant = io.load_plant(args.plant)
    k_start = None
    if args.k0:
        k_start = _resolve_k0(args.k0, plant, args.eps_r)
    try:
        gain = phase1(plant, k_start, target_slack=args.target_slack)
        usable = True
    except PhaseOneFailed as exc:
        gain = exc.best_gain
        usable = (
            min_slack(plant, gain) + args.eps_r > 0
            and spectral_radius(plant.A - plant.B @ gain) < 1.0
        )
        print(
            f"warning: target slack {args.target_slack:g} unreachable; "
            f"best achievable was {exc.best_slack:.6g}",
            file=sys.stderr,
        )
        if not usable:
            print("error: no usable starting gain found", file=sys.stderr)
            return 1
    check = check_start(plant, gain)
    print(f"min_slack: {_fmt(min_slack(plant, gain))}")
    print(f"strictly_feasible: {str(check.ok).lower()}")
    for reason in check.reasons:
        print(f"  {reason}")
    if args.out:
        io.save_gain(gain, args.out)
        print(f"gain written to {args.out}")
    return 0


def _bench_rows(plant, k0, n_max, mode, cfg, trace_writer):
    rows = []
    for n_copies in range(1, n_max + 1):
        plant_n = replicate(plant, n_copies, mode)
        k0_n = np.kron(np.eye(n_copies), k0)
        for method_name, solver in (("fipm", fipm), ("sipm", sipm)):
            try:
                report = solver(plant_n, k0_n, cfg)
            except CompartH2Error as exc:
                rows.append(f"{n_copies},{method_name},,,,,,error: {exc}")
                continue
            seconds = report.trace[-1].cumulative_seconds
            rows.append(
                ",".join(
                    [
                        str(n_copies),
                        method_name,
                        _fmt(seconds),
                        _fmt(report.objective),
                        str(len(report.trace)),
                        str(report.total_inner_iterations),
                        _fmt(report.jlbf_grad_norm),
                        "ok" if report.converged else "iteration-capped",
                    ]
                )
            )
            trace_writer(n_copies, method_name, report)
    return rows


def _cmd_bench_scale(args):
    plant = io.load_plant(args.plant)
    cfg = _load_config(args)
    k0 = _resolve_k0(args.k0, plant, cfg.eps_r)
    mode = args.mode.replace("-", "_")
    out = args.out
    stem = out[:-4] if out.endswith(".csv") else out

    def trace_writer(n_copies, method_name, report):
        path = f"{stem}_N{n_copies}_{method_name}_trace.csv"
        with open(path, "w") as fh:
            fh.write(TRACE_HEADER + "\n")
            for idx, rec in enumerate(report.trace):
                fh.write(f"{idx},{_fmt(rec.cumulative_seconds)}\n")

    rows = _bench_rows(plant, k0, args.nmax, mode, cfg, trace_writer)
    with open(out, "w") as fh:
        fh.write(BENCH_HEADER + "\n")
        for row in rows:
            fh.write(row + "\n")
    print(f"wrote {len(rows)} result rows to {out}", file=sys.stderr)
    return 0


def _add_config_flags(parser):
    parser.add_argument("--config", help="JSON file with solver configuration")
    parser.add_argument("--t0", type=float, default=None, help="initial barrier weight")
    parser.add_argument("--mu", type=float, default=None, help="barrier growth factor")
    parser.add_argument("--eps1", type=float, default=None, help="inner gradient tolerance")
    parser.add_argument("--eps2", type=float, default=None, help="outer step tolerance")
    parser.add_argument("--eps-r", dest="eps_r", type=float, default=None,
                        help="constraint relaxation")
    parser.add_argument("--delta", type=float, default=None,
                        help="Hessian eigenvalue floor")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="compart-h2",
        description=(
            "H2 state-feedback synthesis keeping the closed loop "
            "compartmental, via log-barrier interior-point methods"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="run a solver and write a report")
    p.add_argument("--plant", required=True)
    p.add_argument("--method", choices=("fipm", "sipm"), required=True)
    p.add_argument("--k0", required=True,
                   help="starting gain: file:<path>, phase1, or rank1:<path>")
    p.add_argument("--out", help="report JSON path (default: stdout)")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("verify", help="check a gain against the constraints")
    p.add_argument("--plant", required=True)
    p.add_argument("--gain", required=True)
    p.add_argument("--t", type=float, default=1048576.0,
                   help="barrier weight for multiplier recovery")
    p.add_argument("--eps-r", dest="eps_r", type=float, default=1e-9)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("grad-check", help="derivatives vs finite differences")
    p.add_argument("--plant", required=True)
    p.add_argument("--gain", required=True)
    p.add_argument("--eps-r", dest="eps_r", type=float, default=1e-9)
    p.set_defaults(func=_cmd_grad_check)

    p = sub.add_parser("init", help="phase-I strictly feasible starting gain")
    p.add_argument("--plant", required=True)
    p.add_argument("--k0", help="optional starting point (file:<path> or rank1:<path>)")
    p.add_argument("--target-slack", type=float, default=1e-3)
    p.add_argument("--eps-r", dest="eps_r", type=float, default=1e-9)
    p.add_argument("--out", help="gain JSON path")
    p.set_defaults(func=_cmd_init)

    p = sub.add_parser("bench-scale", help="scaling benchmark over replicated plants")
    p.add_argument("--plant", required=True)
    p.add_argument("--k0", required=True,
                   help="base starting gain, replicated block-diagonally")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--mode", choices=("blockdiag", "paper-concat"),
                   default="blockdiag")
    p.add_argument("--out", required=True, help="results CSV path")
    _add_config_flags(p)
    p.set_defaults(func=_cmd_bench_scale)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CompartH2Error, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
