"""coopnet command line: validate, evaluate, optimize, rebalance, demo, report.

Exit codes: 0 success, 1 domain errors (violations, no surplus), 2 usage
or parse errors.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .accounting import GoodsFlow, Outcome, check_conservation
from .errors import (
    BadWeights,
    ConstraintViolation,
    CoopnetError,
    InvalidGame,
    InvalidStartFlow,
    NoSurplus,
    ScenarioError,
    TargetSumMismatch,
)
from .model import validate_game
from .optimizer import SearchBounds, brute_force_max_tnv, greedy_improve
from .rebalancer import WeightVector, pareto_rebalance
from .report import write_report_bundle
from .scenario import (
    ScenarioDocument,
    build_shipping_demo,
    dump_scenario,
    format_rational,
    load_scenario,
    render_report,
)

USAGE_ERRORS = (ScenarioError, ConstraintViolation)
DOMAIN_ERRORS = (NoSurplus, BadWeights, TargetSumMismatch, InvalidGame, InvalidStartFlow)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coopnet", description="Business network game solver.")
    parser.add_argument("--format", choices=["text", "structured"], default="text")
    parser.add_argument("--conservation", choices=["disposal", "exact"], default="disposal")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario for structural and conservation defects")
    p.add_argument("file")

    p = sub.add_parser("evaluate", help="report payoffs, TNV, and the identity gap for the baseline")
    p.add_argument("file")

    p = sub.add_parser("optimize", help="search for a TNV-maximizing goods flow")
    p.add_argument("file")
    p.add_argument("--bound", type=int, default=1, help="max units per edge per good")
    p.add_argument("--method", choices=["brute", "greedy"], default="brute")
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--out", help="write the scenario with the found flow as its improved block")

    p = sub.add_parser("rebalance", help="split a TNV surplus so every payoff strictly increases")
    p.add_argument("file")
    p.add_argument("--improved", help="scenario file whose improved block supplies the new flow")
    p.add_argument("--weights", help="comma-separated id=p/q shares (default: uniform)")
    p.add_argument("--out", help="write the rebalanced outcome as the new baseline")

    p = sub.add_parser("demo", help="emit a built-in demo scenario")
    p.add_argument("kind", choices=["shipping"])
    p.add_argument("--params", help="p_c1,p_c2,p_s1,p_s2,v11,v22 (default 10,12,3,5,6,8)")
    p.add_argument("--out", help="write the scenario here instead of stdout")

    p = sub.add_parser("report", help="write a delimited report and figures for the baseline")
    p.add_argument("file")
    p.add_argument("--out-dir", required=True)
    return parser


def _load(path: str) -> ScenarioDocument:
    with open(path, "rb") as fh:
        return load_scenario(fh.read())


def _require_baseline(doc: ScenarioDocument) -> Outcome:
    if doc.baseline is None:
        raise ScenarioError("scenario has no baseline outcome")
    return doc.baseline


def _write_or_print(data: bytes, out: str | None, stdout) -> None:
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        stdout.write(data.decode("utf-8"))


def _parse_weights(game, spec: str) -> WeightVector:
    weights = {}
    for chunk in spec.split(","):
        if "=" not in chunk:
            raise BadWeights(f"bad weight entry {chunk!r}, expected id=p/q")
        cid, _, value = chunk.partition("=")
        try:
            weights[cid.strip()] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise BadWeights(f"bad weight for {cid!r}: {exc}") from None
    return WeightVector(weights)


def _cmd_validate(args, stdout) -> int:
    doc = _load(args.file)
    problems = [str(d) for d in validate_game(doc.game)]
    if doc.baseline is not None:
        problems += [str(v) for v in check_conservation(doc.baseline, mode=args.conservation)]
    for line in problems:
        stdout.write(line + "\n")
    if problems:
        return 1
    stdout.write("ok\n")
    return 0


def _cmd_evaluate(args, stdout) -> int:
    doc = _load(args.file)
    outcome = _require_baseline(doc)
    stdout.write(render_report(outcome, format=args.format, mode=args.conservation).decode("utf-8"))
    return 1 if check_conservation(outcome, mode=args.conservation) else 0


def _cmd_optimize(args, stdout) -> int:
    doc = _load(args.file)
    bounds = SearchBounds(max_units_per_edge=args.bound)
    if args.method == "brute":
        result = brute_force_max_tnv(doc.game, bounds)
    else:
        start = doc.baseline.goods if doc.baseline is not None else (doc.improved or GoodsFlow.empty())
        result = greedy_improve(doc.game, start, bounds, max_iters=args.max_iters)
    stdout.write(f"TNV = {format_rational(result.tnv)} (visited {result.visited} flows)\n")
    for (a, b), vec in sorted(result.flow.internal.items()):
        stdout.write(f"{a} -> {b}: " + " ".join(f"{g}:{n}" for g, n in vec.items()) + "\n")
    for cid, vec in sorted(result.flow.external_sales.items()):
        stdout.write(f"{cid} -> sink: " + " ".join(f"{g}:{n}" for g, n in vec.items()) + "\n")
    if args.out:
        out_doc = ScenarioDocument(
            game=doc.game,
            baseline=doc.baseline,
            improved=result.flow,
            metadata=doc.metadata,
            version=doc.version,
        )
        _write_or_print(dump_scenario(out_doc), args.out, stdout)
    return 0


def _cmd_rebalance(args, stdout) -> int:
    doc = _load(args.file)
    baseline = _require_baseline(doc)
    improved = doc.improved
    if args.improved:
        improved = _load(args.improved).improved
    if improved is None:
        raise ScenarioError("no improved goods flow: pass --improved or add an improved block")
    weights = _parse_weights(doc.game, args.weights) if args.weights else None
    value = pareto_rebalance(doc.game, baseline, improved, weights)
    outcome = Outcome(game=doc.game, goods=improved, value=value)
    stdout.write(render_report(outcome, format=args.format, mode=args.conservation).decode("utf-8"))
    if args.out:
        out_doc = ScenarioDocument(
            game=doc.game, baseline=outcome, metadata=doc.metadata, version=doc.version
        )
        with open(args.out, "wb") as fh:
            fh.write(dump_scenario(out_doc))
    return 0


def _cmd_demo(args, stdout) -> int:
    params = (10, 12, 3, 5, 6, 8)
    if args.params:
        parts = [p.strip() for p in args.params.split(",")]
        if len(parts) != 6:
            raise ScenarioError("--params needs exactly six rationals")
        params = tuple(Fraction(p) for p in parts)
    doc = build_shipping_demo(*params)
    _write_or_print(dump_scenario(doc), args.out, stdout)
    return 0


def _cmd_report(args, stdout) -> int:
    doc = _load(args.file)
    outcome = _require_baseline(doc)
    for path in write_report_bundle(outcome, args.out_dir, mode=args.conservation):
        stdout.write(path + "\n")
    return 1 if check_conservation(outcome, mode=args.conservation) else 0


_COMMANDS = {
    "validate": _cmd_validate,
    "evaluate": _cmd_evaluate,
    "optimize": _cmd_optimize,
    "rebalance": _cmd_rebalance,
    "demo": _cmd_demo,
    "report": _cmd_report,
}


def run_cli(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args, stdout)
    except USAGE_ERRORS as exc:
        stderr.write(f"coopnet: {exc}\n")
        return 2
    except DOMAIN_ERRORS as exc:
        stderr.write(f"coopnet: {exc}\n")
        return 1
    except FileNotFoundError as exc:
        stderr.write(f"coopnet: {exc}\n")
        return 2
    except (ValueError, ZeroDivisionError) as exc:
        stderr.write(f"coopnet: {exc}\n")
        return 2
    except CoopnetError as exc:
        stderr.write(f"coopnet: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
