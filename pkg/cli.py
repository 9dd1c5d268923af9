"""
Potential Workbench CLI
Command dispatch for derive, gb, dim, canon, iso, brace and reproduce. Every command
writes one JSON document to stdout; logs go to stderr.
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from brace import (
    FiniteTruss,
    associated_graded,
    check_brace,
    check_filtration,
    check_truss,
    distributivity_series,
    load_brace_file,
    pre_lie_defect,
)
from classify import classify_potential
from errors import InvalidInputError, WorkbenchError
from expr_parser import parse_field_label, parse_poly, parse_relations
from isotest import Strategy, distinguish
from nc_core import MonomialOrder, OrderMode
from potential import DerivativeMode, Potential, relations_of
from quotient import StructureTable, dimension_of
from reproduce import SUITES, run_suite
from rewrite import complete, oracle_dimension, unresolved_ambiguities
from settings import WorkbenchSettings, load_settings, set_settings

logger = logging.getLogger(__name__)


def emit(document: Dict[str, Any]) -> None:
    """Deterministic JSON on stdout."""
    sys.stdout.write(json.dumps(document, sort_keys=True, indent=2, default=str) + "\n")


def _potential(args: argparse.Namespace, settings: WorkbenchSettings) -> Potential:
    cap = args.cap if getattr(args, "cap", None) is not None else settings.default_cap
    field = parse_field_label(getattr(args, "field", None) or "QQ")
    mode = DerivativeMode(getattr(args, "mode", None) or DerivativeMode.SIMPLE)
    return Potential(parse_poly(args.potential, field, cap), mode)


def cmd_derive(args: argparse.Namespace, settings: WorkbenchSettings) -> Dict[str, Any]:
    F = _potential(args, settings)
    rx, ry = relations_of(F)
    return {"potential": F.render(), "mode": F.derivative_mode.value, "field": F.field.label,
            "relations": [rx.render(), ry.render()]}


def cmd_gb(args: argparse.Namespace, settings: WorkbenchSettings) -> Dict[str, Any]:
    cap = args.cap if args.cap is not None else settings.default_cap
    field = parse_field_label(args.field or "QQ")
    if bool(args.potential) == bool(args.relations):
        raise InvalidInputError("gb needs exactly one of --potential or --relations")
    if args.potential:
        rels: List[Any] = list(relations_of(Potential(parse_poly(args.potential, field, cap))))
    else:
        rels = parse_relations(args.relations, field, cap)
    order = MonomialOrder(args.order, OrderMode(args.order_mode))
    G = complete(rels, order, cap, args.workers, settings)
    record = G.to_record()
    record["unresolved"] = len(unresolved_ambiguities(G))
    return record


def cmd_dim(args: argparse.Namespace, settings: WorkbenchSettings) -> Dict[str, Any]:
    F = _potential(args, settings)
    rels = relations_of(F)
    order = MonomialOrder(args.order)
    Q = dimension_of(rels, F.cap, order, args.workers, settings)
    result = Q.to_json(include_table=args.table) if args.table else Q.summary()
    result["potential"] = F.render()
    result["mode"] = F.derivative_mode.value
    if args.oracle:
        cap = min(Q.system.cap, settings.oracle_max_cap)
        oracle = oracle_dimension(rels, cap, F.field, settings)
        engine = (list(Q.hilbert) + ([] if Q.finite else list(Q.uncertified_counts)) + [0] * (cap + 1))[: cap + 1]
        result["oracle"] = {"cap": cap, "counts": oracle, "agrees": oracle == engine}
        if oracle != engine:
            logger.warning(f"Oracle disagrees with the rewrite engine: {oracle} vs {engine}")
    return result


def cmd_canon(args: argparse.Namespace, settings: WorkbenchSettings) -> Dict[str, Any]:
    F = _potential(args, settings)
    return classify_potential(F, F.cap, args.workers, settings).to_dict()


def _load_table(path: str, field_label: Optional[str]) -> StructureTable:
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"Cannot read algebra file {path}: {e}")
    field = parse_field_label(field_label) if field_label else None
    return StructureTable.from_json(data, field)


def cmd_iso(args: argparse.Namespace, settings: WorkbenchSettings) -> Dict[str, Any]:
    A, B = _load_table(args.a, args.field), _load_table(args.b, args.field)
    return distinguish(A, B, strategy=Strategy(args.strategy), workers=args.workers, settings=settings).to_dict()


def cmd_brace(args: argparse.Namespace, settings: WorkbenchSettings) -> Dict[str, Any]:
    B, chain = load_brace_file(args.input)
    result: Dict[str, Any] = {"action": args.action, "order": B.order, "truss": isinstance(B, FiniteTruss)}
    if args.action == "check":
        verdict = check_truss(B) if isinstance(B, FiniteTruss) else check_brace(B)
        result["axioms"] = verdict.to_dict()
        result["filtration"] = check_filtration(B, chain).to_dict()
    elif args.action == "graded":
        result["graded"] = associated_graded(B, chain).to_dict()
    elif args.action == "prelie":
        result["prelie"] = pre_lie_defect(associated_graded(B, chain)).to_dict()
    else:
        if not args.series_args:
            raise InvalidInputError("series needs --series-args a,b,c,N")
        try:
            a, b, c, N = (int(v) for v in args.series_args.split(","))
        except ValueError:
            raise InvalidInputError(f"--series-args must be four integers, got {args.series_args!r}")
        if not all(0 <= v < B.order for v in (a, b, c)) or N < 0:
            raise InvalidInputError(f"series arguments out of range for order {B.order}")
        result["series"] = distributivity_series(B, a, b, c, N).to_dict()
    return result


def cmd_reproduce(args: argparse.Namespace, settings: WorkbenchSettings) -> Dict[str, Any]:
    return run_suite(args.theorem, args.workers, args.seed, settings).to_dict()


COMMANDS = {
    "derive": cmd_derive,
    "gb": cmd_gb,
    "dim": cmd_dim,
    "canon": cmd_canon,
    "iso": cmd_iso,
    "brace": cmd_brace,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="potential-workbench",
        description="Gröbner bases, dimensions, canonical forms and isomorphism tests for two-generator potential algebras",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--workers", type=int, default=None, help="Worker threads")
    parser.add_argument("--seed", type=int, default=0, help="Seed for randomized test data")
    parser.add_argument("--log-level", default=None, help="Logging level")
    parser.add_argument("--config", "-c", default=None, help="Config file path")
    sub = parser.add_subparsers(dest="command", required=True)

    derive = sub.add_parser("derive", help="Relations of a potential")
    derive.add_argument("--potential", required=True)
    derive.add_argument("--mode", choices=[m.value for m in DerivativeMode], default="simple")
    derive.add_argument("--field", default=None)
    derive.add_argument("--cap", type=int, default=None)

    gb = sub.add_parser("gb", help="Truncated Gröbner basis")
    gb.add_argument("--potential", default=None)
    gb.add_argument("--relations", default=None)
    gb.add_argument("--order", choices=["xy", "yx"], default="xy")
    gb.add_argument("--mode", dest="order_mode", choices=[m.value for m in OrderMode], default="local")
    gb.add_argument("--field", default=None)
    gb.add_argument("--cap", type=int, default=None)

    dim = sub.add_parser("dim", help="Hilbert function and dimension")
    dim.add_argument("--potential", required=True)
    dim.add_argument("--cap", type=int, default=None)
    dim.add_argument("--order", choices=["xy", "yx"], default="xy")
    dim.add_argument("--mode", choices=[m.value for m in DerivativeMode], default="simple")
    dim.add_argument("--field", default=None)
    dim.add_argument("--oracle", action="store_true", help="Cross-check against linear algebra")
    dim.add_argument("--table", action="store_true", help="Include basis and multiplication table")

    canon = sub.add_parser("canon", help="Classify a potential")
    canon.add_argument("--potential", required=True)
    canon.add_argument("--cap", type=int, default=None)

    iso = sub.add_parser("iso", help="Compare two finite algebras")
    iso.add_argument("--a", required=True)
    iso.add_argument("--b", required=True)
    iso.add_argument("--field", default=None)
    iso.add_argument("--strategy", choices=[s.value for s in Strategy], default="auto")

    brace = sub.add_parser("brace", help="Brace and truss checks")
    brace.add_argument("action", choices=["check", "graded", "prelie", "series"])
    brace.add_argument("--input", required=True)
    brace.add_argument("--series-args", default=None)

    reproduce = sub.add_parser("reproduce", help="Run an acceptance suite")
    reproduce.add_argument("--theorem", required=True, choices=sorted(SUITES))
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse, configure, dispatch; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        overrides = {k: v for k, v in (("workers", args.workers), ("log_level", args.log_level)) if v is not None}
        settings = load_settings(args.config, **overrides)
        set_settings(settings)
        logging.basicConfig(level=settings.log_level, stream=sys.stderr, force=True)
        emit(COMMANDS[args.command](args, settings))
    except WorkbenchError as e:
        logger.error(f"{type(e).__name__}: {e}")
        emit({"error": str(e), "type": type(e).__name__})
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
