"""Command-line front end.

Exit codes: 0 success, 1 the model is infeasible, 2 bad input, 3 an
enumeration guard was exceeded or a cross-check disagreed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import AltplanError, GuardExceeded, Infeasible, InstanceValidationError, SchemaError
from .evaluation import run_pipeline
from .fixture import PUBLISHED_SELECTION, paper_instance
from .formatting import fmt4, text_table
from .instance_io import dump_instance, load_instance, matrix_to_csv, parse_instance
from .model import validate
from .selection import (
    SelectionPlan,
    brute_force_selection,
    plan_from_dict,
    solve_selection,
)
from .sequencing import (
    brute_force_sequencing,
    check_milp_constraints,
    expand_jobs,
    solve_sequencing,
)

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


class CrossCheckFailed(AltplanError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altplan",
        description="Select and sequence accelerated reliability test cases.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, *, needs_instance=True):
        if needs_instance:
            src = p.add_mutually_exclusive_group()
            src.add_argument("--paper", action="store_true",
                             help="use the built-in eight-period reference instance")
            src.add_argument("--instance", type=Path, help="instance JSON document")
        p.add_argument("--out", type=Path, help="write output here instead of stdout")
        p.add_argument("--format", choices=("text", "csv", "json"), default="text")

    def with_plan(p):
        p.add_argument("--plan", help="use a fixed selection instead of solving: 'published' "
                                      "(reference instance only) or a plan JSON from 'select'")

    p = sub.add_parser("paper-instance", help="write the reference instance document")
    common(p, needs_instance=False)
    p.set_defaults(format="json")

    p = sub.add_parser("validate", help="check an instance document")
    common(p)

    p = sub.add_parser("select", help="solve the selection model")
    common(p)
    p.add_argument("--cross-check", action="store_true",
                   help="also run the exhaustive oracle and compare objectives")

    p = sub.add_parser("sequence", help="sequence one period")
    common(p)
    with_plan(p)
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--check-milp", action="store_true",
                   help="verify the schedule against the big-M ordering model")
    p.add_argument("--cross-check", action="store_true",
                   help="also run the exhaustive oracle and compare objectives")

    p = sub.add_parser("evaluate", help="optimised index per period, optionally vs the naive order")
    common(p)
    with_plan(p)
    p.add_argument("--baseline", action="store_true")

    p = sub.add_parser("report", help="full pipeline with every table")
    common(p)
    with_plan(p)
    return parser


def _instance(args):
    if getattr(args, "paper", False):
        return paper_instance()
    if getattr(args, "instance", None) is None:
        raise SchemaError("--instance", "give --instance PATH or --paper")
    return load_instance(args.instance)


def _plan(args, inst):
    choice = getattr(args, "plan", None)
    if choice is None:
        return None
    if choice == "published":
        if not args.paper:
            raise SchemaError("--plan", "'published' is only defined for --paper")
        return SelectionPlan.from_counts(inst, PUBLISHED_SELECTION)
    try:
        doc = json.loads(Path(choice).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError("--plan", str(exc)) from None
    return plan_from_dict(inst, doc)


def _emit(args, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8", newline="\n")


def _cmd_paper_instance(args) -> int:
    inst = paper_instance()
    if args.format == "csv":
        parts = [matrix_to_csv(inst, inst.failures), matrix_to_csv(inst, inst.run_seconds),
                 matrix_to_csv(inst, inst.original_finish)]
        _emit(args, "\n".join(parts))
    else:
        _emit(args, dump_instance(inst))
    return EXIT_OK


def _cmd_validate(args) -> int:
    if args.paper:
        inst = paper_instance()
    elif args.instance is None:
        raise SchemaError("--instance", "give --instance PATH or --paper")
    else:
        try:
            doc = json.loads(Path(args.instance).read_text(encoding="utf-8"))
        except OSError as exc:
            raise SchemaError(str(args.instance), f"cannot read: {exc.strerror or exc}") from None
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"not valid JSON ({exc.msg})") from None
        inst = parse_instance(doc, base_dir=Path(args.instance).parent)
    problems = validate(inst)
    if args.format == "json":
        _emit(args, json.dumps({"valid": not problems,
                                "diagnostics": [vars(d) for d in problems]}, indent=2) + "\n")
    else:
        lines = [str(d) for d in problems] or ["ok"]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_INPUT if problems else EXIT_OK


def _cmd_select(args) -> int:
    inst = _instance(args)
    plan = solve_selection(inst)
    if args.cross_check:
        oracle = brute_force_selection(inst)
        if oracle.objective_exact != plan.objective_exact:
            raise CrossCheckFailed(f"solver {plan.objective} != oracle {oracle.objective}")
    if args.format == "json":
        _emit(args, json.dumps(plan.to_dict(), indent=2) + "\n")
    elif args.format == "csv":
        _emit(args, plan.to_csv())
    else:
        header = ["Test Case"] + [f"Period{j}" for j in plan.period_ids]
        obj = plan.objective_exact
        _emit(args, text_table(header, plan.to_rows())
              + f"Objective: {obj if isinstance(obj, int) else fmt4(obj)}\n")
    return EXIT_OK


def _cmd_sequence(args) -> int:
    inst = _instance(args)
    inst.column(args.period)
    plan = _plan(args, inst) or solve_selection(inst)
    jobs = expand_jobs(inst, plan, args.period)
    schedule = solve_sequencing(jobs)
    if args.cross_check:
        oracle = brute_force_sequencing(jobs)
        if oracle.objective_exact != schedule.objective_exact:
            raise CrossCheckFailed(f"solver {schedule.objective} != oracle {oracle.objective}")
    milp = check_milp_constraints(jobs, schedule) if args.check_milp else None
    if args.format == "json":
        doc = schedule.to_dict()
        if milp is not None:
            doc["milp"] = {"big_m": milp.big_m, "violations": [str(v) for v in milp.violations]}
        _emit(args, json.dumps(doc, indent=2) + "\n")
    elif args.format == "csv":
        _emit(args, schedule.to_csv())
    else:
        text = text_table(["order", f"Period{args.period}", "completion_s"], schedule.to_rows())
        text += f"ObjVal {fmt4(schedule.objective_exact)}\n"
        if schedule.zero_weight:
            text += "zero weight: no failure history in this period\n"
        if milp is not None:
            text += (f"MILP check (M = {milp.big_m}): "
                     + ("all constraints hold" if milp.ok else f"{len(milp.violations)} violations")
                     + "\n")
            text += "".join(f"  {v}\n" for v in milp.violations)
        _emit(args, text)
    if milp is not None and not milp.ok:
        raise CrossCheckFailed("schedule violates the ordering model")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    inst = _instance(args)
    report = run_pipeline(inst, _plan(args, inst))
    header, rows = report.comparison_rows()
    if not args.baseline:
        rows = [rows[1]]
    if args.format == "json":
        doc = [{"period": p.period, "optimized": fmt4(p.optimized.objective_exact),
                **({"baseline": fmt4(p.baseline.objective_exact), "gap": fmt4(p.gap),
                    "flags": list(p.flags)} if args.baseline else {})}
               for p in report.periods]
        _emit(args, json.dumps(doc, indent=2) + "\n")
    elif args.format == "csv":
        _emit(args, "\n".join(",".join(map(str, r)) for r in [header, *rows]) + "\n")
    else:
        _emit(args, text_table(header, rows))
    return EXIT_OK


def _cmd_report(args) -> int:
    inst = _instance(args)
    report = run_pipeline(inst, _plan(args, inst))
    if args.format == "json":
        _emit(args, report.to_json())
    elif args.format == "text":
        _emit(args, report.to_text())
    else:
        tables = report.to_csv_tables()
        if args.out is None:
            sys.stdout.write("\n".join(tables.values()))
        else:
            args.out.mkdir(parents=True, exist_ok=True)
            for name, text in tables.items():
                (args.out / f"{name}.csv").write_text(text, encoding="utf-8", newline="\n")
    return EXIT_OK


_COMMANDS = {
    "paper-instance": _cmd_paper_instance,
    "validate": _cmd_validate,
    "select": _cmd_select,
    "sequence": _cmd_sequence,
    "evaluate": _cmd_evaluate,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except Infeasible as exc:
        print(f"infeasible ({exc.rung}): {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (GuardExceeded, CrossCheckFailed) as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except InstanceValidationError as exc:
        print("invalid instance:", file=sys.stderr)
        for d in exc.diagnostics:
            print(f"  {d}", file=sys.stderr)
        return EXIT_INPUT
    except (AltplanError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
