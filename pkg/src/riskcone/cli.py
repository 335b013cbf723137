"""Command line entry point ``riskcone``.

Reports go to stdout as JSON lines.  Exit codes: 0 every verdict passed,
1 some verdict failed, 2 bad input, 3 a task ran out of budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Iterable, Optional

from . import corpus, scenario
from .cones import DEFAULT_BUDGET
from .errors import InputError, SchemaError

EXIT_INPUT = 2


def _emit(reports: Iterable[dict]) -> int:
    seen = []
    for report in reports:
        print(scenario.dumps(report), flush=True)
        seen.append(report)
    return scenario.exit_code(seen)


def _input_error(exc: Exception) -> int:
    doc = {"error": str(exc) if not isinstance(exc, SchemaError) else exc.message}
    if isinstance(exc, SchemaError):
        doc["pointer"] = exc.pointer
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    return EXIT_INPUT


def _single_task(args, task: dict) -> int:
    doc = corpus.resolve(args.file)
    if not isinstance(doc, dict):
        raise SchemaError("", "scenario must be a JSON object")
    doc = dict(doc)
    doc["tasks"] = [task]
    scen = scenario.load(doc)
    return _emit(scenario.run_scenario(scen, args.budget, replay=not args.no_replay))


def _assets(args):
    if getattr(args, "finite_strong", False):
        return "finite_strong"
    return args.assets


def _task(op: str, **fields) -> dict:
    task = {"id": op, "op": op}
    task.update({k: v for k, v in fields.items() if v is not None})
    return task


def cmd_run(args) -> int:
    scen = scenario.load_file(args.file)
    return _emit(scenario.run_scenario(scen, args.budget, args.filter, replay=not args.no_replay))


def cmd_corpus(args) -> int:
    if args.list:
        for name in corpus.bundled_names():
            print(name)
        return 0
    return _emit(corpus.run_corpus(args.filter, args.budget, args.perturb, replay=not args.no_replay))


def cmd_rho(args) -> int:
    return _single_task(args, _task("rho", claim=args.claim, t=args.t, numeraire=args.numeraire))


def cmd_numeraire(args) -> int:
    return _single_task(args, _task("numeraire_check", asset=args.asset))


def cmd_equiv(args) -> int:
    return _single_task(args, _task("equiv_check", assets=args.assets))


def cmd_represent(args) -> int:
    return _single_task(args, _task("represent", assets=_assets(args), eta=args.eta))


def cmd_b_eta(args) -> int:
    return _single_task(args, _task("b_eta", assets=_assets(args), eta=args.eta))


def cmd_t_cones(args) -> int:
    return _single_task(args, _task("t_cones", assets=_assets(args)))


def cmd_stability(args) -> int:
    if args.verify_witness:
        with open(args.verify_witness, encoding="utf-8") as fh:
            witness = json.load(fh)
        if isinstance(witness, dict) and "witness" in witness and "t" not in witness:
            witness = witness["witness"]
        return _single_task(args, _task("verify_witness", assets=_assets(args), witness=witness))
    if args.eta is None:
        raise InputError("stability needs --eta (or --verify-witness)")
    return _single_task(args, _task("stability", assets=_assets(args), eta=args.eta, budget=args.search_budget))


def cmd_market(args) -> int:
    op = "market_" + args.action
    eps = args.eps
    if args.action in ("augment", "verify") and eps is None:
        raise InputError(f"market {args.action} needs --eps")
    return _single_task(args, _task(op, eps=eps))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="riskcone", description="Exact checks for polyhedral coherent risk measures.")
    parser.add_argument("--schema", action="store_true", help="print the scenario JSON schema and exit")
    sub = parser.add_subparsers(dest="command")

    def add(name, fn, help_text, with_file=True, leading=None):
        p = sub.add_parser(name, help=help_text)
        if leading:
            p.add_argument(leading[0], choices=leading[1])
        if with_file:
            p.add_argument("file", help="scenario JSON (bundled examples may be named directly, e.g. ex5_4.json)")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="generator budget for cone conversions")
        p.add_argument("--no-replay", action="store_true", help="omit replay blocks from reports")
        p.set_defaults(func=fn)
        return p

    p = add("run", cmd_run, "run every task of a scenario")
    p.add_argument("--filter", help="only tasks with this id or id prefix")

    p = add("corpus", cmd_corpus, "run the bundled example corpus", with_file=False)
    p.add_argument("--filter", help="only fixtures of one example, e.g. 5.4")
    p.add_argument("--perturb", action="store_true", help="testing mode: alter every expectation so it must fail")
    p.add_argument("--list", action="store_true", help="list bundled scenarios")

    p = add("rho", cmd_rho, "conditional risk of a named claim")
    p.add_argument("--claim", required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--numeraire", help="asset used as numeraire")

    p = add("numeraire-check", cmd_numeraire, "is an asset a numeraire")
    p.add_argument("--asset", required=True)

    p = add("equiv-check", cmd_equiv, "are two numeraires equivalent")
    p.add_argument("--assets", nargs=2, required=True)

    for name, fn, text in (
        ("represent", cmd_represent, "does the portfolio cone decompose"),
        ("b-eta", cmd_b_eta, "eta-decomposition of the portfolio cone"),
        ("t-cones", cmd_t_cones, "per-atom cone profile"),
        ("stability", cmd_stability, "m-stability verdict, witness or witness check"),
    ):
        p = add(name, fn, text)
        p.add_argument("--assets", nargs="+", help="asset names; default all, first must be the unit")
        p.add_argument("--finite-strong", action="store_true", help="use the assets 1 and 1 + 1_w for every state w")
        if name in ("represent", "b-eta"):
            p.add_argument("--eta", type=int, choices=(0, 1), required=True)
        if name == "stability":
            p.add_argument("--eta", type=int, choices=(0, 1))
            p.add_argument("--search-budget", type=int, help="node budget of the witness search")
            p.add_argument("--verify-witness", metavar="FILE", help="check a witness JSON instead of searching")

    p = add("market", cmd_market, "bid-ask market checks", leading=("action", ("validate", "cpp", "augment", "verify")))
    p.add_argument("--eps", help="enlargement epsilon in (0, 1), e.g. 1/10")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        print(json.dumps(scenario.SCHEMA, indent=2, sort_keys=True))
        return 0
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); stay quiet
        sys.stdout = open(os.devnull, "w")
        return 0
    except (InputError, OSError, json.JSONDecodeError, ValueError) as exc:
        return _input_error(exc)


if __name__ == "__main__":
    sys.exit(main())
