"""Command-line interface.

Subcommands: ``solve``, ``cascade``, ``check``, ``verify``, ``taylor`` and
``plot-data``.  Machine-readable output (JSON by default, CSV with
``--format csv``) goes to stdout; a short human summary goes to stderr
unless ``--quiet`` is given.

Output is deterministic: field order is fixed and floats are printed with
17 significant digits, so identical arguments and seed produce
byte-identical output.

Exit codes: 0 success, 1 verification failure (no witness found, or failed
batch cases), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .derivs import DerivEvaluator
from .exprs import ParseError, parse
from .harness import verify_batch
from .jets import DomainError
from .solver import (
    CascadeStageError,
    BoundaryConditionError,
    SolveStatus,
    SolverConfig,
    Witness,
    cascade_solve,
    solve,
)
from .theorems import (
    MvtProblem,
    Theorem,
    ZeroDenominatorError,
    ResidualEvaluator,
    taylor_poly_eval,
    trahan_check,
    trahan_check_general,
)

SCHEMA_VERSION = 1


# -- deterministic serialization ----------------------------------------------


def format_float(value: float) -> str:
    if value != value or value in (float("inf"), float("-inf")):
        return "null"
    return f"{value:.17g}"


def to_json(obj) -> str:
    """JSON with insertion-ordered keys and 17-significant-digit floats."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        inner = ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return ";".join(_csv_cell(v) for v in value)
    return str(value)


def to_csv(fieldnames: list[str], rows: list[dict]) -> str:
    lines = [",".join(fieldnames)]
    for row in rows:
        cells = []
        for name in fieldnames:
            cell = _csv_cell(row.get(name))
            if "," in cell or '"' in cell:
                cell = '"' + cell.replace('"', '""') + '"'
            cells.append(cell)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# -- result shaping -----------------------------------------------------------


def _witness_dict(w: Witness) -> dict:
    return {
        "status": w.status.value,
        "eta": w.eta,
        "residual_at_eta": w.residual_at_eta,
        "bracket": list(w.bracket) if w.bracket else None,
        "iterations": w.iterations,
        "all_roots": list(w.all_roots),
        "boundary_ok": w.boundary_ok,
        "boundary_gap": w.boundary_gap,
        "scale": w.scale,
        "grid_used": w.grid_used,
        "root_policy": w.root_policy,
    }


def _config_dict(cfg: SolverConfig, args) -> dict:
    out = cfg.as_dict()
    out["seed"] = args.seed
    out["format"] = args.format
    return out


def _emit(args, command: str, cfg: SolverConfig, result: dict,
          csv_fields: list[str], csv_rows: list[dict], summary: list[str]) -> None:
    if args.format == "csv":
        sys.stdout.write(to_csv(csv_fields, csv_rows))
    else:
        envelope = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "config": _config_dict(cfg, args),
            "result": result,
        }
        sys.stdout.write(to_json(envelope) + "\n")
    if not args.quiet:
        for line in summary:
            print(line, file=sys.stderr)


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        grid=args.grid,
        solve_tol=args.tol,
        boundary_tol=args.boundary_tol,
        degenerate_tol=args.degenerate_tol,
        max_grid_doublings=args.max_grid_doublings,
    )


# -- subcommands ---------------------------------------------------------------


def _cmd_solve(args) -> int:
    cfg = _solver_config(args)
    problem = MvtProblem(
        Theorem(args.theorem),
        parse(args.f),
        args.a,
        args.b,
        n=args.n,
        g=parse(args.g) if args.g else None,
    )
    witness = solve(problem, cfg)
    result = {
        "theorem": problem.variant.value,
        "f": args.f,
        "g": args.g,
        "a": problem.a,
        "b": problem.b,
        "n": problem.n,
    }
    result.update(_witness_dict(witness))
    row = dict(result)
    row["bracket"] = list(witness.bracket) if witness.bracket else None
    summary = [
        f"{problem.variant.value}: status={witness.status.value}"
        + (f", eta={witness.eta!r}" if witness.eta is not None else "")
    ]
    if not witness.boundary_ok:
        summary.append(
            f"warning: endpoint derivative condition violated "
            f"(gap {witness.boundary_gap!r}); the existence guarantee degrades"
        )
    _emit(args, "solve", cfg, result, list(result.keys()), [row], summary)
    return 0 if witness.status is not SolveStatus.NOT_FOUND else 1


def _cmd_cascade(args) -> int:
    cfg = _solver_config(args)
    cw = cascade_solve(
        parse(args.f), args.a, args.b, args.n,
        unconstrained=args.unconstrained, cfg=cfg,
    )
    result = {
        "f": args.f,
        "a": cw.a,
        "b": cw.b,
        "n": args.n,
        "unconstrained": cw.unconstrained,
        "chain": list(cw.chain),
        "eta": cw.eta,
        "stage_residuals": list(cw.stage_residuals),
        "stage_prev_derivs": list(cw.stage_prev_derivs),
        "identity_residuals": list(cw.identity_residuals),
        "final_residual": cw.final_residual,
        "degenerate_stages": list(cw.degenerate_stages),
        "iterations": cw.iterations,
        "scale": cw.scale,
        "root_policy": cw.root_policy,
    }
    summary = [f"cascade: eta={cw.eta!r}, chain={list(cw.chain)!r}"]
    _emit(args, "cascade", cfg, result, list(result.keys()), [dict(result)], summary)
    return 0


def _cmd_check(args) -> int:
    cfg = _solver_config(args)
    if args.type == "trahan-original":
        report = trahan_check(parse(args.f), args.a, args.b, tol=args.check_tol)
    else:
        report = trahan_check_general(
            parse(args.f), args.a, args.b, args.n, tol=args.check_tol
        )
    result = {
        "type": args.type,
        "f": args.f,
        "a": args.a,
        "b": args.b,
        "n": args.n,
        "left_factor": report.left_factor,
        "right_factor": report.right_factor,
        "product": report.product,
        "m_f": report.m_f,
        "satisfied": report.satisfied,
        "tolerance_used": report.tolerance_used,
    }
    verdict = "satisfied" if report.satisfied else "not satisfied"
    summary = [f"{args.type}: product={report.product!r} -> {verdict}"]
    _emit(args, "check", cfg, result, list(result.keys()), [dict(result)], summary)
    return 0


def _cmd_verify(args) -> int:
    cfg = _solver_config(args)
    report = verify_batch(
        args.count,
        (args.n_min, args.n_max),
        coefficient_range=(args.coeff_lo, args.coeff_hi),
        interval=(args.a, args.b),
        seed=args.seed,
        cfg=cfg,
    )
    case_rows = [
        {
            "index": c.index,
            "n": c.n,
            "degree": c.degree,
            "seed": c.seed,
            "outcome": c.outcome,
            "status": c.status,
            "eta": c.eta,
            "residual_at_eta": c.residual_at_eta,
            "chain": list(c.chain),
            "trahan_original_satisfied": c.trahan_original_satisfied,
            "trahan_general_satisfied": c.trahan_general_satisfied,
            "failures": list(c.failures),
            "error": c.error,
        }
        for c in report.cases
    ]
    result = {
        "count": report.total,
        "n_range": list(report.n_range),
        "passes": report.passes,
        "fails": report.fails,
        "degenerates": report.degenerates,
        "seed": report.seed,
        "cases": case_rows,
    }
    fields = list(case_rows[0].keys()) if case_rows else []
    summary = [
        f"verify: {report.passes} pass, {report.degenerates} degenerate, "
        f"{report.fails} fail out of {report.total}"
    ]
    _emit(args, "verify", cfg, result, fields, case_rows, summary)
    return 0 if report.ok else 1


def _cmd_taylor(args) -> int:
    cfg = _solver_config(args)
    f = parse(args.f)
    values = [
        {"x": x, "value": taylor_poly_eval(f, args.x0, args.n, x)} for x in args.x
    ]
    result = {"f": args.f, "x0": args.x0, "n": args.n, "values": values}
    summary = [f"taylor: degree {args.n} at x0={args.x0!r}, {len(values)} point(s)"]
    _emit(args, "taylor", cfg, result, ["x", "value"], values, summary)
    return 0


def _cmd_plot_data(args) -> int:
    cfg = _solver_config(args)
    f = parse(args.f)
    fev = DerivEvaluator(f)
    problem = MvtProblem(Theorem.FLETT, f, args.a, args.b, n=1)
    rev = ResidualEvaluator(problem)
    fa = fev.value(args.a)
    points = []
    for i in range(args.points):
        x = args.a + (args.b - args.a) * i / (args.points - 1)
        t = fev.taylor_at(x, 1)
        # gap between the tangent line at x, extended back to the left
        # endpoint, and the function value there: zero exactly at a witness
        tangent_gap = fa + t[1] * (x - args.a) - t[0]
        points.append(
            {
                "x": x,
                "f": t[0],
                "flett_residual": rev(x),
                "tangent_gap": tangent_gap,
            }
        )
    result = {"f": args.f, "a": args.a, "b": args.b, "points": points}
    summary = [f"plot-data: {len(points)} samples on [{args.a!r}, {args.b!r}]"]
    _emit(
        args,
        "plot-data",
        cfg,
        result,
        ["x", "f", "flett_residual", "tangent_gap"],
        points,
        summary,
    )
    return 0


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid", type=int, default=1024)
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--boundary-tol", type=float, default=1e-9)
    common.add_argument("--degenerate-tol", type=float, default=1e-11)
    common.add_argument("--max-grid-doublings", type=int, default=7)
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(
        prog="mvtkit",
        description="Locate witness points of Flett-type mean value theorems "
        "and evaluate their sufficient conditions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="locate a witness point")
    p.add_argument("--theorem", required=True, choices=[t.value for t in Theorem])
    p.add_argument("--f", required=True)
    p.add_argument("--g", default=None)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--n", type=int, default=1)
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("cascade", parents=[common], help="run the nested construction")
    p.add_argument("--f", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--unconstrained", action="store_true")
    p.set_defaults(handler=_cmd_cascade)

    p = sub.add_parser("check", parents=[common], help="evaluate a sufficient condition")
    p.add_argument("--type", required=True, choices=("trahan-original", "trahan-general"))
    p.add_argument("--f", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--check-tol", type=float, default=None)
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("verify", parents=[common], help="batch-verify random cases")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--a", type=float, default=-1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--coeff-lo", type=float, default=-1.0)
    p.add_argument("--coeff-hi", type=float, default=1.0)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("taylor", parents=[common], help="evaluate a Taylor polynomial")
    p.add_argument("--f", required=True)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, nargs="+", required=True)
    p.set_defaults(handler=_cmd_taylor)

    p = sub.add_parser(
        "plot-data", parents=[common], help="sample curve, residual and tangent gap"
    )
    p.add_argument("--f", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(handler=_cmd_plot_data)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.grid < 2:
        parser.error("--grid must be at least 2")
    if getattr(args, "points", 2) < 2:
        parser.error("--points must be at least 2")
    if getattr(args, "n", 1) < 1:
        parser.error("--n must be at least 1")
    try:
        return args.handler(args)
    except (
        ParseError,
        DomainError,
        ZeroDenominatorError,
        BoundaryConditionError,
        CascadeStageError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
