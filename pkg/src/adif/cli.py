"""Command-line interface.

Subcommands: check (compositional), check-meta (function-enumeration model
checking of prenex sentences), game (independence game), adequacy and laws
(property suites).  Exit codes: 0 true/Eloise/suite-pass, 1 false/Abelard/
suite-fail, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .formulas import parse_formula, print_formula
from .games import game_winner
from .herbrand import model_check
from .hyperteams import Hyperteam, load_hyperteam, trivial_hyperteam
from .semantics import EvalOptions, sat_adif
from .structures import BINARY_EQUALITY, Structure, load_structure
from .suites import Bounds, adequacy_suite, fundamentals_suite


class UsageError(Exception):
    pass


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--structure", metavar="F",
                        help="structure file (default: the binary equality structure)")
    parser.add_argument("--formula", metavar="S", help="formula text")
    parser.add_argument("--formula-file", metavar="F", help="file with the formula text")
    parser.add_argument("--hyperteam", metavar="F", help="hyperteam file")
    parser.add_argument("--flag", choices=("EA", "AE"), default="EA")
    parser.add_argument("--reduce", action="store_true",
                        help="prune hyperteams to inclusion-minimal teams during evaluation")
    parser.add_argument("--max-teams", type=int, default=3, metavar="N")
    parser.add_argument("--max-states", type=int, default=5_000_000, metavar="N")
    parser.add_argument("--seed", type=int, default=7, metavar="N")
    parser.add_argument("--trace", action="store_true", help="emit a sample play trace")
    parser.add_argument("--json", action="store_true", dest="json_mode",
                        help="machine-readable report with stable key order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adif",
        description="Evaluate alternating dependence/independence-friendly "
                    "sentences over finite structures")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("check", "compositional hyperteam evaluation"),
        ("check-meta", "model-check a prenex sentence by function enumeration"),
        ("game", "solve the independence game of a prenex sentence"),
        ("adequacy", "run the first-order/team-semantics adequacy suites"),
        ("laws", "run the fundamental-law property suite"),
    ]:
        _add_common(sub.add_parser(name, help=text))
    return parser


def _load_inputs(args) -> tuple[Structure, "Formula | None"]:
    structure = load_structure(args.structure) if args.structure else BINARY_EQUALITY
    formula = None
    if args.formula and args.formula_file:
        raise UsageError("give either --formula or --formula-file, not both")
    if args.formula:
        formula = parse_formula(args.formula)
    elif args.formula_file:
        with open(args.formula_file, "r", encoding="utf-8") as handle:
            formula = parse_formula(handle.read())
    return structure, formula


def _emit(report: dict, lines: list[str], json_mode: bool) -> None:
    if json_mode:
        print(json.dumps(report, sort_keys=True))
    else:
        print("\n".join(lines))


def _require_formula(formula) -> None:
    if formula is None:
        raise UsageError("a formula is required (--formula or --formula-file)")


def cmd_check(args) -> int:
    structure, formula = _load_inputs(args)
    _require_formula(formula)
    hyperteam = load_hyperteam(args.hyperteam) if args.hyperteam else trivial_hyperteam()
    options = EvalOptions(use_reduce=args.reduce)
    start = time.perf_counter()
    verdict = sat_adif(structure, hyperteam, args.flag, formula, options)
    elapsed = time.perf_counter() - start
    report = {
        "command": "check",
        "formula": print_formula(formula),
        "flag": args.flag,
        "verdict": verdict,
        "seconds": round(elapsed, 6),
    }
    lines = [f"command check",
             f"formula {report['formula']}",
             f"flag {args.flag}",
             f"verdict {'true' if verdict else 'false'}",
             f"seconds {report['seconds']}"]
    _emit(report, lines, args.json_mode)
    return 0 if verdict else 1


def cmd_check_meta(args) -> int:
    structure, formula = _load_inputs(args)
    _require_formula(formula)
    start = time.perf_counter()
    verdict = model_check(structure, formula)
    elapsed = time.perf_counter() - start
    report = {
        "command": "check-meta",
        "formula": print_formula(formula),
        "verdict": verdict,
        "seconds": round(elapsed, 6),
    }
    lines = [f"command check-meta",
             f"formula {report['formula']}",
             f"verdict {'true' if verdict else 'false'}",
             f"seconds {report['seconds']}"]
    _emit(report, lines, args.json_mode)
    return 0 if verdict else 1


def cmd_game(args) -> int:
    structure, formula = _load_inputs(args)
    _require_formula(formula)
    start = time.perf_counter()
    outcome = game_winner(structure, formula, args.max_states)
    elapsed = time.perf_counter() - start
    trace_lines = outcome.sample_trace().lines() if args.trace else []
    report = {
        "command": "game",
        "formula": print_formula(formula),
        "winner": outcome.winner,
        "states": len(outcome.game),
        "seconds": round(elapsed, 6),
    }
    if args.trace:
        report["trace"] = trace_lines
    lines = [f"command game",
             f"formula {report['formula']}",
             f"states {report['states']}",
             f"winner {outcome.winner}",
             f"seconds {report['seconds']}"]
    if args.trace:
        lines.append("trace:")
        lines.extend("  " + t for t in trace_lines)
    _emit(report, lines, args.json_mode)
    return 0 if outcome.winner == "Eloise" else 1


def _suite_to_report(suite, args) -> tuple[dict, list[str], int]:
    report = suite.as_dict()
    lines = suite.lines()
    if suite.total_checked == 0 or all(c.checked == 0 for c in suite.checks):
        report["vacuous"] = True
        lines.append("note: bounds admit no instances; vacuous pass")
    return report, lines, 0 if suite.passed else 1


def cmd_adequacy(args) -> int:
    structure, _ = _load_inputs(args)
    bounds = Bounds(max_teams=args.max_teams)
    suite = adequacy_suite(structure, bounds)
    report, lines, code = _suite_to_report(suite, args)
    _emit(report, lines, args.json_mode)
    return code


def cmd_laws(args) -> int:
    structure, _ = _load_inputs(args)
    bounds = Bounds(max_teams=args.max_teams)
    suite = fundamentals_suite(structure, bounds)
    report, lines, code = _suite_to_report(suite, args)
    _emit(report, lines, args.json_mode)
    return code


_COMMANDS = {
    "check": cmd_check,
    "check-meta": cmd_check_meta,
    "game": cmd_game,
    "adequacy": cmd_adequacy,
    "laws": cmd_laws,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error usage: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # surfaced engine errors with their class name
        print(f"error {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
