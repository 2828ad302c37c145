"""Command-line front end: solve, sweep, reproduce, action, wavefunction.

Exit codes are a stable contract: 0 success, 1 reproduction failure,
2 usage error, 3 numerical failure.  All outputs are deterministic byte
streams for fixed flags; ``--format json`` echoes the fully resolved
configuration for provenance.  Row fan-out width for sweep/reproduce comes
from the QDOT_THREADS environment variable (default: available parallelism).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import report as report_mod
from .errors import QdotError, TurningPointProximityError
from .model import QuantumNumbers, RadialProblem
from .numerov import DEFAULT_INTERVALS, build_mesh, solve_exact, wavefunction_exact
from .report import (
    ReproductionReport,
    RowResult,
    Tolerances,
    emit,
    render_csv,
    reproduce_table,
    worker_count,
)
from .wkb import (
    MASLOV_OFFSET,
    WkbWavefunction,
    action_closed_form,
    action_quadrature,
    action_quadrature_w,
    solve_wkb,
    wkb_wavefunction_eval,
)

EXIT_OK = 0
EXIT_REPRODUCTION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _write(text: str, output):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config_echo(args, command: str) -> dict:
    cfg = {"command": command}
    for key, value in sorted(vars(args).items()):
        if key in ("func", "command"):
            continue
        cfg[key] = value
    return cfg


def _solver_record(res) -> dict:
    return {
        "E": res.E,
        "node_count": res.node_count,
        "bracket": list(res.bracket),
        "endpoint_residual": res.endpoint_residual,
        "mesh_error_estimate": res.mesh_error_estimate,
        "n_intervals_used": res.n_intervals_used,
    }


def cmd_solve(args) -> int:
    problem = RadialProblem(r0=args.r0, coulomb_strength=args.coulomb, m=args.m)
    qn = QuantumNumbers(n_r=args.nr, m=args.m)
    results = {}
    if args.method in ("wkb", "both"):
        results["wkb"] = solve_wkb(qn, problem)
    if args.method in ("exact", "both"):
        results["exact"] = solve_exact(qn, problem, n_intervals=args.n_intervals)

    rel_diff = None
    if "wkb" in results and "exact" in results:
        rel_diff = abs(results["wkb"].E - results["exact"].E) / results["exact"].E

    if args.format == "json":
        payload = {
            "config": _config_echo(args, "solve"),
            "results": {name: _solver_record(res) for name, res in results.items()},
        }
        if rel_diff is not None:
            payload["results"]["rel_diff"] = rel_diff
        _write(json.dumps(payload, indent=2) + "\n", args.output)
        return EXIT_OK

    lines = [
        f"r0 = {_fmt(args.r0)}",
        f"n_r = {args.nr}",
        f"m = {args.m}",
        f"Z = {_fmt(args.coulomb)}",
        f"method = {args.method}",
    ]
    if "wkb" in results:
        res = results["wkb"]
        lines.append(f"E_wkb = {_fmt(res.E)}")
        lines.append(f"wkb_quantization_residual = {res.endpoint_residual:.3e}")
    if "exact" in results:
        res = results["exact"]
        lines.append(f"E_exact = {_fmt(res.E)}")
        lines.append(f"exact_node_count = {res.node_count}")
        lines.append(f"exact_mesh_error_estimate = {res.mesh_error_estimate:.3e}")
        lines.append(f"exact_n_intervals = {res.n_intervals_used}")
    if rel_diff is not None:
        lines.append(f"rel_diff = {_fmt(rel_diff)}")
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _parse_radii(args) -> list[float]:
    if args.r0_list:
        try:
            radii = [float(tok) for tok in args.r0_list.split(",") if tok.strip()]
        except ValueError as exc:
            raise QdotError(f"bad --r0-list entry: {exc}") from exc
    else:
        try:
            start_s, stop_s, count_s = args.r0_log.split(":")
            start, stop, count = float(start_s), float(stop_s), int(count_s)
        except ValueError as exc:
            raise QdotError(f"--r0-log expects start:stop:count, got {args.r0_log!r}") from exc
        if start <= 0 or stop <= 0 or count < 1:
            raise QdotError("--r0-log needs positive start/stop and count >= 1")
        radii = list(np.geomspace(start, stop, count))
    if not radii or any(r <= 0 for r in radii):
        raise QdotError("sweep radii must be positive")
    return radii


def cmd_sweep(args) -> int:
    radii = _parse_radii(args)

    def run(r0: float) -> RowResult:
        row = RowResult(
            table_id=None, r0=r0, n_r=args.nr, m=args.m, coulomb_strength=args.coulomb
        )
        try:
            problem = RadialProblem(r0=r0, coulomb_strength=args.coulomb, m=args.m)
            qn = QuantumNumbers(n_r=args.nr, m=args.m)
            if args.method in ("wkb", "both"):
                row.e_wkb = solve_wkb(qn, problem).E
            if args.method in ("exact", "both"):
                row.e_exact = solve_exact(qn, problem).E
            if row.e_wkb is not None and row.e_exact is not None:
                row.rel_diff = abs(row.e_wkb - row.e_exact) / row.e_exact
        except (QdotError, ValueError) as exc:
            row.failure = str(exc)
        return row

    workers = worker_count()
    if workers > 1 and len(radii) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, radii))
    else:
        rows = [run(r) for r in radii]

    for row in rows:
        if row.failure:
            print(f"sweep: r0={row.r0:g} failed: {row.failure}", file=sys.stderr)
    sweep_report = ReproductionReport(rows=rows, tolerances=Tolerances())
    _write(render_csv(sweep_report), args.output)
    if all(row.failure for row in rows):
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_reproduce(args) -> int:
    tolerances = Tolerances(wkb=args.tolerance, exact=args.exact_tolerance)
    rep = reproduce_table(
        args.table,
        tolerances,
        coulomb_override=args.coulomb_override,
    )
    data = emit(rep, args.format, args.output)
    if args.output is None:
        sys.stdout.write(data.decode())
    if args.format == "csv" and rep.audit is not None:
        print(f"audit: {rep.audit.statement}", file=sys.stderr)
    return EXIT_OK if rep.all_passed else EXIT_REPRODUCTION


def cmd_action(args) -> int:
    problem = RadialProblem(r0=args.r0, coulomb_strength=args.coulomb, m=args.m)
    a_rho = action_quadrature(args.E, problem)
    a_w = action_quadrature_w(args.E, problem)
    a_cf = action_closed_form(args.E, problem)
    over_pi = a_rho.alpha / math.pi
    nearest = max(0, round(over_pi - MASLOV_OFFSET))
    target = (nearest + MASLOV_OFFSET) * math.pi

    if args.format == "json":
        payload = {
            "config": _config_echo(args, "action"),
            "results": {
                "rho_t": a_rho.turning_point,
                "alpha_quadrature_rho": a_rho.alpha,
                "alpha_quadrature_w": a_w.alpha,
                "alpha_closed_form": a_cf.alpha,
                "alpha_over_pi": over_pi,
                "nearest_n_r": nearest,
                "nearest_target_over_pi": nearest + MASLOV_OFFSET,
                "residual_vs_nearest": a_rho.alpha - target,
            },
        }
        _write(json.dumps(payload, indent=2) + "\n", args.output)
        return EXIT_OK

    lines = [
        f"rho_t = {_fmt(a_rho.turning_point)}",
        f"alpha_quadrature_rho = {a_rho.alpha:.10g}",
        f"alpha_quadrature_w = {a_w.alpha:.10g}",
        f"alpha_closed_form = {a_cf.alpha:.10g}",
        f"alpha_over_pi = {over_pi:.6f}",
        f"nearest_n_r = {nearest} (target alpha/pi = {nearest + MASLOV_OFFSET})",
        f"residual_vs_nearest = {a_rho.alpha - target:.3e}",
    ]
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_wavefunction(args) -> int:
    if args.samples < 2:
        raise QdotError(f"need at least 2 samples, got {args.samples}")
    problem = RadialProblem(r0=args.r0, coulomb_strength=args.coulomb, m=args.m)
    qn = QuantumNumbers(n_r=args.nr, m=args.m)
    lines = []
    if args.method == "exact":
        res = solve_exact(qn, problem, n_intervals=args.n_intervals)
        mesh = build_mesh(problem, res.E, res.n_intervals_used)
        wf = wavefunction_exact(res, mesh, problem)
        idx = np.unique(
            np.round(np.linspace(0, mesh.n_points - 1, args.samples)).astype(int)
        )
        lines.append("r,u,psi")
        for i in idx:
            lines.append(f"{wf.r[i]:.6g},{wf.u[i]:.6g},{wf.psi[i]:.6g}")
    else:
        res = solve_wkb(qn, problem)
        wf = WkbWavefunction(problem=problem, E=res.E)
        rt = wf.turning_point
        radii = [args.r0 * (i + 1) / args.samples for i in range(args.samples)]
        omitted = sum(1 for r in radii if abs(r - rt) < wf.delta)
        lines.append(
            f"# wkb branches at E = {res.E:.6g}; rho_t = {rt:.6g}; "
            f"omitted {omitted} points with |r - rho_t| < {wf.delta:.3g}"
        )
        lines.append("region,r,u,psi")
        for r in radii:
            try:
                u = wkb_wavefunction_eval(wf, r)
            except TurningPointProximityError:
                continue
            region = "I" if r < rt else "II"
            lines.append(f"{region},{r:.6g},{u:.6g},{u / math.sqrt(r):.6g}")
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdot",
        description=(
            "Bound states of an electron in a hard-wall circular dot with a "
            "central point charge (dimensionless units: hbar = 1, 2*mu = 1)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_level_flags(p, with_nr=True):
        p.add_argument("--m", type=int, default=0, help="azimuthal quantum number")
        p.add_argument(
            "--coulomb", type=float, default=1.0,
            help="Coulomb strength Z (1 matches the ground-state reference table, "
                 "2 the excited-state tables)",
        )
        if with_nr:
            p.add_argument("--nr", type=int, default=0, help="radial node count")

    p = sub.add_parser("solve", help="solve one level")
    p.add_argument("--r0", type=float, required=True, help="wall radius")
    add_level_flags(p)
    p.add_argument("--method", choices=("wkb", "exact", "both"), default="both")
    p.add_argument("--format", choices=("md", "json"), default="md")
    p.add_argument("--n-intervals", type=int, default=DEFAULT_INTERVALS)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve one level over a list of radii (CSV)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--r0-list", help="comma-separated radii, e.g. 0.4,0.6,1.0")
    group.add_argument("--r0-log", help="log-spaced radii as start:stop:count")
    add_level_flags(p)
    p.add_argument("--method", choices=("wkb", "exact", "both"), default="both")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="recompute the reference tables and compare")
    p.add_argument("--table", choices=("1", "2", "3", "all"), default="all")
    p.add_argument("--format", choices=("md", "csv", "json"), default="md")
    p.add_argument("--tolerance", type=float, default=report_mod.DEFAULT_WKB_TOL,
                   help="relative tolerance for the WKB column")
    p.add_argument("--exact-tolerance", type=float, default=report_mod.DEFAULT_EXACT_TOL,
                   help="relative tolerance for the exact column")
    p.add_argument("--coulomb-override", type=float, default=None,
                   help="force this Z on every row (unit audit)")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("action", help="inspect the phase integral at fixed energy")
    p.add_argument("--E", type=float, required=True, help="energy")
    p.add_argument("--r0", type=float, required=True, help="wall radius")
    add_level_flags(p, with_nr=False)
    p.add_argument("--format", choices=("md", "json"), default="md")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_action)

    p = sub.add_parser("wavefunction", help="dump a radial wavefunction as CSV")
    p.add_argument("--r0", type=float, required=True, help="wall radius")
    add_level_flags(p)
    p.add_argument("--method", choices=("exact", "wkb"), default="exact")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--n-intervals", type=int, default=DEFAULT_INTERVALS)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_wavefunction)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (QdotError, ValueError) as exc:
        print(f"qdot: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
