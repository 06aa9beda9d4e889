"""Command-line interface.

Subcommands:

* ``solve --config <path> [--seed N] [--lhs-n N] [--out <dir>]`` — run the
  configured solve and write report, trace, and mesh files.
* ``check --config <path>`` — diagnostics only: kernel PSD, Laplacian /
  regularizer checks, and the search-cube bound.
* ``mesh --config <path> --coeffs <report>`` — re-emit mesh files from a
  previously written report.

Exit codes: 0 success, 2 validation error, 3 solver failure.  All
floating-point output carries 17 significant digits.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from ._core import HAVE_COMPILED
from .config import load_config
from .exceptions import ConfigError, MvkError, NumericsError
from .kernels import InputPoint, check_psd, evaluate_section, region_dim
from .solver import SolveReport, delta_bound, multistart_solve, solve_ls
from .objective import gradient_I, learning_functional, residual_H


def fmt(v):
    """Render a float with 17 significant digits."""
    return f"{float(v):.16e}"


def write_report(path, report):
    lines = ["solver report"]
    lines.append(f"seed = {report.seed}")
    lines.append(f"delta = {fmt(report.delta)}")
    lines.append(f"objective = {fmt(report.objective)}")
    lines.append(f"grad_inf = {fmt(report.grad_inf)}")
    lines.append(f"resid_paper_inf = {fmt(report.resid_paper_inf)}")
    lines.append(f"starts_run = {report.starts_run}")
    lines.append(f"admissible_count = {report.admissible_count}")
    lines.append(f"best_start = {report.best_start}")
    lines.append(f"trivial = {report.trivial}")
    lines.append("best_a:")
    for i, v in enumerate(report.best_a):
        lines.append(f"  a[{i}] = {fmt(v)}")
    lines.append("per_start:")
    lines.append("start_index,objective,grad_inf,resid_inf,iters,converged")
    for res in report.per_start:
        lines.append(
            f"{res['start_index']},{fmt(res['objective'])},"
            f"{fmt(res['grad_inf'])},{fmt(res['resid_inf'])},"
            f"{res['iters']},{int(res['converged'])}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_report_coeffs(path):
    """Recover best_a from a report written by write_report."""
    coeffs = []
    in_block = False
    for line in Path(path).read_text().splitlines():
        if line.strip() == "best_a:":
            in_block = True
            continue
        if in_block:
            stripped = line.strip()
            if not stripped.startswith("a["):
                break
            coeffs.append(float(stripped.split("=")[1]))
    if not coeffs:
        raise ConfigError(f"no best_a block found in report {path}")
    return np.asarray(coeffs)


def write_trace(path, report):
    lines = ["start_index,iter,objective,grad_inf"]
    for start_index, trace in enumerate(report.traces):
        for row in trace:
            lines.append(
                f"{start_index},{row['iter']},{fmt(row['objective'])},"
                f"{fmt(row['grad_inf'])}"
            )
    Path(path).write_text("\n".join(lines) + "\n")


def write_meshes(runcfg, best_a, out_dir):
    spec = runcfg.spec
    written = []
    for req in runcfg.outputs.meshes:
        box = runcfg.region_boxes[req.region]
        dx = (
            region_dim(req.region)
            if spec.kernel.kind == "two-region"
            else spec.dims.d[0]
        )
        axes = [np.linspace(lo, hi, req.grid) for lo, hi in box]
        lines = ["coord1,coord2,value"]
        for c1 in axes[0]:
            for c2 in axes[1]:
                x = InputPoint(coords=(c1, c2), region=req.region)
                val = evaluate_section(
                    best_a, spec.points, spec.dims, spec.kernel, x, dx
                )[req.component]
                lines.append(f"{fmt(c1)},{fmt(c2)},{fmt(val)}")
        target = Path(out_dir) / req.filename()
        target.write_text("\n".join(lines) + "\n")
        written.append(target)
    return written


def run(runcfg, out_dir):
    """Dispatch the configured solve and write all output files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = runcfg.spec
    if runcfg.solve.mode == "ls":
        a = solve_ls(spec)
        resid = residual_H(spec, a, "paper-faithful")
        report = SolveReport(
            best_a=a,
            objective=learning_functional(spec, a),
            resid_paper_inf=float(np.max(np.abs(resid))),
            grad_inf=float(np.max(np.abs(gradient_I(spec, a)))),
            delta=0.0,
            starts_run=1,
            admissible_count=1,
            per_start=[
                {
                    "start_index": 0,
                    "objective": learning_functional(spec, a),
                    "grad_inf": float(np.max(np.abs(gradient_I(spec, a)))),
                    "resid_inf": float(np.max(np.abs(resid))),
                    "iters": 0,
                    "converged": True,
                }
            ],
            seed=runcfg.solve.seed,
            best_start=0,
            traces=[
                [
                    {
                        "iter": 0,
                        "objective": learning_functional(spec, a),
                        "grad_inf": float(np.max(np.abs(gradient_I(spec, a)))),
                    }
                ]
            ],
        )
    else:
        report = multistart_solve(spec, runcfg.solve)
    write_report(out_dir / runcfg.outputs.report, report)
    write_trace(out_dir / runcfg.outputs.trace, report)
    write_meshes(runcfg, report.best_a, out_dir)
    return report


def cmd_solve(args):
    runcfg = load_config(args.config)
    solve_cfg = runcfg.solve
    if args.seed is not None:
        solve_cfg = replace(solve_cfg, seed=args.seed)
    if args.lhs_n is not None:
        solve_cfg = replace(solve_cfg, lhs_count=args.lhs_n)
    runcfg = replace(runcfg, solve=solve_cfg)
    out_dir = args.out or "."
    report = run(runcfg, out_dir)
    print(f"objective = {fmt(report.objective)}")
    print(f"resid_paper_inf = {fmt(report.resid_paper_inf)}")
    print(f"grad_inf = {fmt(report.grad_inf)}")
    print(f"admissible = {report.admissible_count}/{report.starts_run}")
    print(f"outputs written to {Path(out_dir).resolve()}")
    return 0


def cmd_check(args):
    runcfg = load_config(args.config)
    spec = runcfg.spec
    gram_psd = check_psd(spec.gram.data, 1e-10)
    print(f"compiled core: {'yes' if HAVE_COMPILED else 'no (numpy fallback)'}")
    print(f"points: {spec.l} labeled + {spec.u} unlabeled, N = {spec.N}")
    print(
        f"gram: min_eig = {fmt(gram_psd['min_eig'])}, "
        f"max_eig = {fmt(gram_psd['max_eig'])}, psd = {gram_psd['is_psd']}"
    )
    m_psd = check_psd(spec.M, 1e-10)
    print(f"regularizer M: min_eig = {fmt(m_psd['min_eig'])}, psd = {m_psd['is_psd']}")
    if spec.loss == "exponential-least-squares":
        db = delta_bound(spec)
        print(f"I(0) = {fmt(db.i_zero)}")
        print(f"lambda_min = {fmt(db.lambda_min)}")
        print(f"delta = {fmt(db.delta)}")
        if db.trivial:
            print("all labels zero: the zero section is optimal")
    return 0


def cmd_mesh(args):
    runcfg = load_config(args.config)
    best_a = read_report_coeffs(args.coeffs)
    if best_a.size != runcfg.spec.N:
        raise ConfigError(
            f"report carries {best_a.size} coefficients, config needs "
            f"{runcfg.spec.N}"
        )
    out_dir = args.out or "."
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    written = write_meshes(runcfg, best_a, out_dir)
    for target in written:
        print(f"wrote {target}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mvksolve",
        description="Operator-valued kernel learning solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run the configured solve")
    p_solve.add_argument("--config", required=True)
    p_solve.add_argument("--seed", type=int, default=None)
    p_solve.add_argument("--lhs-n", type=int, default=None)
    p_solve.add_argument("--out", default=None)
    p_solve.set_defaults(func=cmd_solve)

    p_check = sub.add_parser("check", help="diagnostics only")
    p_check.add_argument("--config", required=True)
    p_check.set_defaults(func=cmd_check)

    p_mesh = sub.add_parser("mesh", help="re-emit meshes from a report")
    p_mesh.add_argument("--config", required=True)
    p_mesh.add_argument("--coeffs", required=True)
    p_mesh.add_argument("--out", default=None)
    p_mesh.set_defaults(func=cmd_mesh)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericsError, MvkError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
