"""Command-line front end.

One structured-text report goes to stdout; diagnostics go to stderr.
Exit codes: 0 success (including a negative threshold answer),
1 validation violations, 2 input errors, 3 undefined or unsupported
computations.  Reports are byte-identical across repeated runs for the
same inputs and options.
"""

import argparse
import hashlib
import sys

from . import diagram as dg
from . import el
from . import evidence as ev
from . import fixtures as fx
from . import optimizer as opt
from ._format import format_float as fmt
from .contextual import TRUE, parse_formula, prob_subsumption, restrict
from .el import ParseError, parse_concept
from .kbfile import KBLoadError, load_kb_document

PROB_TOL = "1e-09"


class _InputError(Exception):
    pass


class _Unsupported(Exception):
    pass


def _digest(path):
    with open(path, "rb") as handle:
        return hashlib.sha256(handle.read()).hexdigest()


def _report(argv, path, lines, tolerance=None):
    out = [f"command: {' '.join(argv)}"]
    if path is not None:
        out.append(f"input: {path} sha256={_digest(path)}")
    if tolerance:
        out.append(f"tolerance: abs={tolerance}")
    out.append("result:")
    out.extend(f"  {line}" for line in lines)
    print("\n".join(out))


def _load(path, forgetful):
    try:
        doc = load_kb_document(path, forgetful=forgetful)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    except (KBLoadError, ParseError, ValueError) as exc:
        raise _InputError(f"{path}: {exc}") from exc
    return doc


def _valid_doc(path, forgetful):
    doc = _load(path, forgetful)
    violations = doc.kb.validate()
    if violations:
        details = "; ".join(str(v) for v in violations)
        raise _InputError(f"{path}: knowledge base is not valid: {details}")
    return doc


def _concept(text):
    try:
        return parse_concept(text)
    except ParseError as exc:
        raise _InputError(f"bad concept {text!r}: {exc}") from exc


def _formula(text):
    try:
        return parse_formula(text)
    except ParseError as exc:
        raise _InputError(f"bad context {text!r}: {exc}") from exc


def _strategy(doc, name, forgetful=False):
    try:
        strategy = doc.strategy(name)
    except KBLoadError as exc:
        raise _InputError(str(exc)) from exc
    problems = dg.validate_strategy(doc.kb.diagram, strategy, forgetful=forgetful)
    if problems:
        details = "; ".join(str(v) for v in problems)
        raise _InputError(f"strategy {name!r} is not valid: {details}")
    return strategy


def _strategy_lines(strategy):
    lines = ["strategy:"]
    for d in sorted(strategy.locals):
        local = strategy.locals[d]
        scope = ",".join(local.scope) if local.scope else "-"
        lines.append(f"  {d} (scope {scope}):")
        for key in sorted(local.table):
            lines.append(f'    "{key}": {fmt(local.table[key])}')
    return lines


def _conditional_json(result):
    worlds = ", ".join(f'"{b}"' for b in sorted(result.included_worlds))
    return (
        "{"
        + f'"value": {fmt(result.value)}, '
        + f'"evidence_probability": {fmt(result.evidence_probability)}, '
        + f'"included_worlds": [{worlds}]'
        + "}"
    )


def _cmd_validate(args, argv):
    doc = _load(args.path, args.forgetful)
    violations = doc.kb.validate()
    if not violations:
        _report(argv, args.path, ["ok"])
        return 0
    lines = ["violations:"] + [f"  - {v}" for v in violations]
    _report(argv, args.path, lines)
    return 1


def _cmd_fixtures(args, argv):
    try:
        filename = fx.fixture_filename(args.name)
    except KeyError as exc:
        raise _InputError(str(exc.args[0])) from exc
    out_path = args.out or filename
    try:
        fx.write_fixture(args.name, out_path)
    except OSError as exc:
        raise _InputError(f"cannot write {out_path}: {exc}") from exc
    _report(argv, None, [f"wrote: {out_path}"])
    return 0


def _cmd_query(args, argv):
    doc = _valid_doc(args.path, args.forgetful)
    kb = doc.kb
    sub = args.subcommand

    if sub == "subsume":
        try:
            world = kb.diagram.world(args.world)
        except ValueError as exc:
            raise _InputError(str(exc)) from exc
        held = el.is_subsumed(restrict(kb.vtbox, world), _concept(args.lhs), _concept(args.rhs))
        _report(argv, args.path, [f"subsumed: {str(held).lower()}"])
        return 0

    if sub == "prob-subsume":
        strategy = _strategy(doc, args.strategy, args.forgetful)
        context = _formula(args.context) if args.context else TRUE
        p = prob_subsumption(
            kb,
            strategy,
            _concept(args.lhs),
            _concept(args.rhs),
            context=context,
            threads=args.threads,
        )
        _report(argv, args.path, [f"probability: {fmt(p)}"], tolerance=PROB_TOL)
        return 0

    if sub == "expected-cost":
        strategy = _strategy(doc, args.strategy, args.forgetful)
        dist = dg.cost_distribution(kb.diagram, strategy)
        lines = [f"expected_cost: {fmt(dg.expected_cost(kb.diagram, strategy))}"]
        lines.append("distribution:")
        lines.extend(f"  {fmt(r)}: {fmt(p)}" for r, p in sorted(dist.items()))
        _report(argv, args.path, lines, tolerance=PROB_TOL)
        return 0

    if sub == "cond-cost":
        strategy = _strategy(doc, args.strategy, args.forgetful)
        query = ev.EvidenceQuery(_concept(args.lhs), _concept(args.rhs))
        bound = (
            ev.optimistic_expected_cost
            if args.mode == "opt"
            else ev.pessimistic_expected_cost
        )
        result = bound(kb, strategy, query)
        _report(
            argv,
            args.path,
            [f"conditional: {_conditional_json(result)}"],
            tolerance=PROB_TOL,
        )
        return 0

    if sub == "worlds":
        strategy = _strategy(doc, args.strategy, args.forgetful)
        lines = ["worlds:"]
        for world in kb.diagram.worlds():
            p = dg.joint_probability(kb.diagram, strategy, world)
            c = dg.cost_of_valuation(kb.diagram, world)
            lines.append(
                f"  - {kb.diagram.bits(world)} probability={fmt(p)} cost={fmt(c)}"
            )
        _report(argv, args.path, lines)
        return 0

    if sub == "optimize":
        if args.lp:
            if args.evidence:
                raise _Unsupported(
                    "evidence-conditioned optimization is only supported for "
                    "pure strategies (use --pure)"
                )
            result = opt.optimal_mixed_strategy(kb, fully_mixed=args.fully_mixed)
            lines = [f"value: {fmt(result.value)}", f"kind: {result.kind}"]
            if result.epsilon:
                lines.append(f"epsilon: {fmt(result.epsilon)}")
            lines.extend(_strategy_lines(result.strategy))
            _report(argv, args.path, lines, tolerance="1e-07")
            return 0
        objective = "expected"
        query = None
        if args.evidence:
            objective = (
                "dominant-optimistic" if args.mode == "opt" else "dominant-pessimistic"
            )
            query = ev.EvidenceQuery(
                _concept(args.evidence[0]), _concept(args.evidence[1])
            )
        result = opt.optimal_pure_strategy(
            kb,
            objective=objective,
            evidence=query,
            direction=args.direction,
            forgetful=args.forgetful,
        )
        lines = [f"value: {fmt(result.value)}", f"kind: {result.kind}"]
        lines.extend(_strategy_lines(result.strategy))
        _report(argv, args.path, lines, tolerance=PROB_TOL)
        return 0

    if sub == "decide":
        if args.problem in ("d-dom-opt", "d-dom-pes"):
            if not args.evidence:
                raise _InputError(f"--problem {args.problem} needs --evidence C D")
            query = ev.EvidenceQuery(
                _concept(args.evidence[0]), _concept(args.evidence[1])
            )
            objective = (
                "dominant-optimistic"
                if args.problem == "d-dom-opt"
                else "dominant-pessimistic"
            )
            result = opt.optimal_pure_strategy(
                kb, objective=objective, evidence=query, forgetful=args.forgetful
            )
        else:
            direction = "min" if args.problem == "d-opt" else "max"
            result = opt.optimal_pure_strategy(
                kb, direction=direction, forgetful=args.forgetful
            )
        answer = opt.decide_threshold(result, args.bound, args.problem)
        _report(
            argv,
            args.path,
            [
                f"answer: {str(answer).lower()}",
                f"problem: {args.problem}",
                f"bound: {fmt(args.bound)}",
                f"optimum: {fmt(result.value)}",
            ],
        )
        return 0

    if sub == "export-game-tree":
        tree = opt.build_game_tree(kb.diagram)
        sys.stdout.write(opt.export_game_tree_dot(tree))
        return 0

    raise _InputError(f"unknown query subcommand {sub!r}")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cider",
        description="Contextual influence-diagram expected-cost reasoner",
    )
    parser.add_argument("--threads", type=int, default=1, help="world-enumeration workers")
    parser.add_argument(
        "--forgetful",
        action="store_true",
        help="condition strategies on direct parents instead of the influence set",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p_validate = commands.add_parser("validate", help="check a KB document")
    p_validate.add_argument("path")

    p_fixtures = commands.add_parser("fixtures", help="write a bundled example")
    p_fixtures.add_argument("name")
    p_fixtures.add_argument("--out", default=None)

    p_query = commands.add_parser("query", help="run a query against a KB document")
    p_query.add_argument("path")
    subs = p_query.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("subsume", help="contextual subsumption in one world")
    p.add_argument("--world", required=True)
    p.add_argument("lhs")
    p.add_argument("rhs")

    p = subs.add_parser("prob-subsume", help="probability of a contextual inclusion")
    p.add_argument("--strategy", required=True)
    p.add_argument("--context", default=None)
    p.add_argument("lhs")
    p.add_argument("rhs")

    p = subs.add_parser("expected-cost", help="cost distribution and expectation")
    p.add_argument("--strategy", required=True)

    p = subs.add_parser("cond-cost", help="conditional expected-cost bound")
    p.add_argument("--strategy", required=True)
    p.add_argument("--mode", choices=("opt", "pes"), required=True)
    p.add_argument("lhs")
    p.add_argument("rhs")

    p = subs.add_parser("optimize", help="best pure strategy or LP optimum")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pure", action="store_true")
    group.add_argument("--lp", action="store_true")
    p.add_argument("--evidence", nargs=2, metavar=("C", "D"), default=None)
    p.add_argument("--mode", choices=("opt", "pes"), default="opt")
    p.add_argument("--direction", choices=("min", "max"), default="min")
    p.add_argument("--fully-mixed", type=float, default=None)

    p = subs.add_parser("decide", help="threshold decision problems")
    p.add_argument(
        "--problem",
        choices=("d-opt", "d-pes", "d-dom-opt", "d-dom-pes"),
        required=True,
    )
    p.add_argument("--bound", type=float, required=True)
    p.add_argument("--evidence", nargs=2, metavar=("C", "D"), default=None)

    p = subs.add_parser("worlds", help="world probabilities and costs")
    p.add_argument("--strategy", required=True)

    subs.add_parser("export-game-tree", help="DOT rendering of the game tree")
    return parser


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args, argv)
        if args.command == "fixtures":
            return _cmd_fixtures(args, argv)
        return _cmd_query(args, argv)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _Unsupported as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return 3
    except (
        ev.UndefinedConditionalError,
        opt.EnumerationCapError,
        opt.InfeasibleEpsilonError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
