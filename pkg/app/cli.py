"""
dualgraph command-line interface.

Decision commands exit 0 for yes, 1 for no and 2 for errors. Graph arguments
are file paths, ``-`` for stdin, or ``fixture:<name>`` for the fixture corpus.
"""

import argparse
import asyncio
import json
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

from app.analyzers.graph_core import SerreGraph, betti, core, isomorphism, validate
from app.analyzers.modifications import certify, random_modifications, replay, verify
from app.analyzers.resolution import apply_script, link_is_tree
from app.analyzers.topo import equivalent, homeomorphic, realization_summary, reduce
from app.analyzers.valuations import (
    IteratedOrderSpec,
    eval_iterated,
    eval_monomial,
    maximal_ideal,
    pi_of_iterated,
    pi_of_monomial,
    retract_to_skeleton,
)
from app.core.config import settings
from app.core.errors import DualGraphError, MalformedCertificateError
from app.models.schemas import DecisionReport
from app.services.acceptance import AcceptanceSuite
from app.services.fixtures import FixtureCorpus
from app.services.graph_io import (
    LoadedGraph,
    dump_certificate,
    format_modification,
    format_value,
    load_certificate,
    parse_blowup_script,
    parse_graph,
    parse_modification_script,
    parse_polynomial,
    parse_rational,
    parse_weights,
    serialize_config,
    serialize_graph_text,
)

logger = logging.getLogger("app.cli")

FIXTURE_PREFIX = "fixture:"
EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


class _Context:
    def __init__(self, args: argparse.Namespace) -> None:
        self.args = args
        self.json = args.report == "json"
        self.seed = settings.DEFAULT_SEED if args.seed is None else args.seed
        self.corpus = FixtureCorpus(args.fixtures_dir)

    def read_text(self, source: str) -> str:
        if source == "-":
            return sys.stdin.read()
        return Path(source).read_text(encoding="utf-8")

    def load(self, source: str) -> LoadedGraph:
        if source.startswith(FIXTURE_PREFIX):
            return self.corpus.get(source[len(FIXTURE_PREFIX):]).loaded
        return parse_graph(self.read_text(source))

    def graph(self, source: str) -> SerreGraph:
        return self.load(source).graph

    def emit(self, report: DecisionReport, text: str | None = None) -> None:
        if self.json:
            print(report.model_dump_json(indent=2))
        elif text is not None:
            print(text, end="" if text.endswith("\n") else "\n")
        elif report.answer is not None:
            print("yes" if report.answer else "no")

    def decide(self, command: str, answer: bool, details: dict[str, Any] | None = None) -> int:
        self.emit(DecisionReport(command=command, answer=answer, details=details or {}))
        return EXIT_YES if answer else EXIT_NO


# Graph commands


def cmd_validate(ctx: _Context) -> int:
    loaded = ctx.load(ctx.args.graph)
    violations = validate(loaded.graph)
    report = DecisionReport(
        command="validate",
        answer=not violations,
        details={"violations": violations, "dual_graph": loaded.config is not None},
    )
    ctx.emit(report, "ok\n" if not violations else "\n".join(violations) + "\n")
    return EXIT_YES if not violations else EXIT_NO


def cmd_core(ctx: _Context) -> int:
    c = core(ctx.graph(ctx.args.graph))
    text = "# empty core: the graph is a tree\n" if c is None else serialize_graph_text(c)
    ctx.emit(DecisionReport(command="core", details={"tree": c is None, "core": None if c is None else text}), text)
    return EXIT_YES


def cmd_betti(ctx: _Context) -> int:
    value = betti(ctx.graph(ctx.args.graph))
    ctx.emit(DecisionReport(command="betti", details={"betti": value}), str(value))
    return EXIT_YES


def cmd_reduce(ctx: _Context) -> int:
    g = ctx.graph(ctx.args.graph)
    reduced = serialize_graph_text(reduce(g).graph)
    summary = realization_summary(g)
    text = reduced + "".join(f"# {key}: {value}\n" for key, value in summary.model_dump().items())
    ctx.emit(DecisionReport(command="reduce", details={"graph": reduced, "summary": summary.model_dump()}), text)
    return EXIT_YES


def cmd_iso(ctx: _Context) -> int:
    phi = isomorphism(ctx.graph(ctx.args.first), ctx.graph(ctx.args.second))
    details = {} if phi is None else {"vertices": dict(phi.vertices), "darts": dict(phi.darts)}
    return ctx.decide("iso", phi is not None, details)


def cmd_homeo(ctx: _Context) -> int:
    return ctx.decide("homeo", homeomorphic(ctx.graph(ctx.args.first), ctx.graph(ctx.args.second)))


def cmd_equiv(ctx: _Context) -> int:
    g1, g2 = ctx.graph(ctx.args.first), ctx.graph(ctx.args.second)
    return ctx.decide("equiv", equivalent(g1, g2), {"betti": [betti(g1), betti(g2)]})


def cmd_certify(ctx: _Context) -> int:
    cert = certify(ctx.graph(ctx.args.first), ctx.graph(ctx.args.second))
    if cert is None:
        ctx.emit(DecisionReport(command="certify", answer=False), "no: the graphs are not equivalent")
        return EXIT_NO
    document = dump_certificate(cert)
    if ctx.args.output is not None:
        ctx.args.output.write_text(document + "\n", encoding="utf-8")
        ctx.emit(
            DecisionReport(command="certify", answer=True, details={"length": cert.length, "output": str(ctx.args.output)}),
            f"certificate with {cert.length} steps written to {ctx.args.output}",
        )
    else:
        print(document)
    return EXIT_YES


def cmd_verify(ctx: _Context) -> int:
    g1, g2 = ctx.graph(ctx.args.first), ctx.graph(ctx.args.second)
    cert = load_certificate(ctx.read_text(ctx.args.certificate))
    return ctx.decide("verify", verify(g1, g2, cert))


def cmd_modify(ctx: _Context) -> int:
    g = ctx.graph(ctx.args.graph)
    if ctx.args.random is not None:
        result, steps = random_modifications(g, ctx.args.random, ctx.seed)
    else:
        if ctx.args.script is None:
            raise DualGraphError("modify needs a script file or --random N")
        steps = parse_modification_script(ctx.read_text(ctx.args.script))
        result = replay(g, steps)
    text = serialize_graph_text(result)
    script = [format_modification(s) for s in steps]
    if not ctx.json and ctx.args.random is not None:
        text = "".join(f"# {line}\n" for line in script) + text
    ctx.emit(DecisionReport(command="modify", details={"graph": text, "steps": script}), text)
    return EXIT_YES


def cmd_blowup(ctx: _Context) -> int:
    start = ctx.load(ctx.args.graph).require_config() if ctx.args.graph else None
    cfg = apply_script(start, parse_blowup_script(ctx.read_text(ctx.args.script)))
    text = serialize_config(cfg)
    ctx.emit(
        DecisionReport(
            command="blowup",
            answer=link_is_tree(cfg),
            details={"graph": text, "multiplicity": dict(cfg.multiplicity)},
        ),
        text,
    )
    return EXIT_YES


# Valuation commands


def _order(ctx: _Context) -> IteratedOrderSpec:
    order = tuple(int(i) - 1 for i in ctx.args.order.split(","))
    arity = ctx.args.arity if ctx.args.arity is not None else len(order)
    return IteratedOrderSpec(order, arity)


def _value(ctx: _Context, command: str, value: object) -> int:
    text = format_value(value)
    ctx.emit(DecisionReport(command=command, details={"value": text}), text)
    return EXIT_YES


def cmd_val_eval(ctx: _Context) -> int:
    if ctx.args.weights:
        beta = parse_weights(ctx.args.weights.split(","))
        return _value(ctx, "val-eval", eval_monomial(beta, parse_polynomial(ctx.args.polynomial, beta.arity)))
    spec = _order(ctx)
    return _value(ctx, "val-eval", eval_iterated(spec, parse_polynomial(ctx.args.polynomial, spec.arity)))


def cmd_val_pi(ctx: _Context) -> int:
    if ctx.args.weights:
        beta = parse_weights(ctx.args.weights.split(","))
        f = parse_polynomial(ctx.args.polynomial, beta.arity)
        gens = [parse_polynomial(g, beta.arity) for g in ctx.args.ideal] if ctx.args.ideal else maximal_ideal(beta.arity)
        return _value(ctx, "val-pi", pi_of_monomial(beta, f, gens))
    spec = _order(ctx)
    return _value(ctx, "val-pi", pi_of_iterated(spec, parse_polynomial(ctx.args.polynomial, spec.arity)))


def cmd_val_retract(ctx: _Context) -> int:
    t = retract_to_skeleton(
        ctx.args.b1, ctx.args.b2, parse_rational(ctx.args.s1), parse_rational(ctx.args.s2)
    )
    return _value(ctx, "val-retract", t)


# Corpus and service


def cmd_corpus_check(ctx: _Context) -> int:
    suite = AcceptanceSuite(ctx.corpus, ctx.seed)
    report = asyncio.run(suite.run(ctx.args.only or None))
    if ctx.json:
        print(report.model_dump_json(indent=2))
    else:
        for result in report.results:
            status = "PASS" if result.passed else "FAIL"
            print(f"{status} {result.name} ({result.checked} checks, {result.seconds:.2f}s)")
            for failure in result.failures:
                print(f"    {failure}")
        print("all criteria passed" if report.passed else "some criteria failed")
    return EXIT_YES if report.passed else EXIT_NO


def cmd_fixtures(ctx: _Context) -> int:
    groups = ctx.corpus.groups
    if ctx.json:
        print(json.dumps({g: [f.name for f in fixtures] for g, fixtures in groups.items()}, indent=2))
    else:
        for group, fixtures in groups.items():
            print(f"{group}: {' '.join(f.name for f in fixtures)}")
    return EXIT_YES


def cmd_serve(ctx: _Context) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=ctx.args.host, port=ctx.args.port, reload=settings.DEBUG)
    return EXIT_YES


# Parser


def _pair(sub: argparse._SubParsersAction, name: str, handler: Callable[[_Context], int], help_text: str) -> argparse.ArgumentParser:
    parser = sub.add_parser(name, help=help_text)
    parser.add_argument("first")
    parser.add_argument("second")
    parser.set_defaults(handler=handler)
    return parser


def _valuation_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("polynomial", help="e.g. '3/2*x1^2*x3 - x2'")
    family = parser.add_mutually_exclusive_group(required=True)
    family.add_argument("--weights", help="monomial valuation weights, comma separated rationals")
    family.add_argument("--order", help="iterated valuation stage order, comma separated 1-based indices")
    parser.add_argument("--arity", type=int, help="number of variables for --order (default: its length)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualgraph",
        description="Equivalence of resolution dual graphs, blow-up calculus and valuations.",
    )
    parser.add_argument("--report", choices=["text", "json"], default="text")
    parser.add_argument("--seed", type=int, help=f"seed for randomized commands (default {settings.DEFAULT_SEED})")
    parser.add_argument("--log-level", default=None, help="logging level, logs go to stderr")
    parser.add_argument("--fixtures-dir", type=Path, default=None)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    for name, handler, help_text in (
        ("validate", cmd_validate, "check the Serre graph invariants"),
        ("core", cmd_core, "print the core (empty for trees)"),
        ("betti", cmd_betti, "print the first Betti number"),
        ("reduce", cmd_reduce, "print the reduced form"),
    ):
        single = sub.add_parser(name, help=help_text)
        single.add_argument("graph")
        single.set_defaults(handler=handler)

    _pair(sub, "iso", cmd_iso, "are the graphs isomorphic")
    _pair(sub, "homeo", cmd_homeo, "are the realizations homeomorphic")
    _pair(sub, "equiv", cmd_equiv, "are the graphs equivalent")
    certify_parser = _pair(sub, "certify", cmd_certify, "certificate of equivalence")
    certify_parser.add_argument("-o", "--output", type=Path)
    verify_parser = _pair(sub, "verify", cmd_verify, "check a certificate")
    verify_parser.add_argument("certificate")

    modify = sub.add_parser("modify", help="apply a modification script")
    modify.add_argument("graph")
    modify.add_argument("script", nargs="?")
    modify.add_argument("--random", type=int, metavar="N", help="apply N random modifications instead")
    modify.set_defaults(handler=cmd_modify)

    blowup = sub.add_parser("blowup", help="apply a free/satellite blow-up script")
    blowup.add_argument("script")
    blowup.add_argument("--graph", help="weighted dual graph to start from (default: one curve, b=1)")
    blowup.set_defaults(handler=cmd_blowup)

    val_eval = sub.add_parser("val-eval", help="evaluate a monomial or iterated valuation")
    _valuation_options(val_eval)
    val_eval.set_defaults(handler=cmd_val_eval)

    val_pi = sub.add_parser("val-pi", help="value of the normalized image under pi")
    _valuation_options(val_pi)
    val_pi.add_argument("--ideal", action="append", help="generator of the ideal (default: the maximal ideal)")
    val_pi.set_defaults(handler=cmd_val_pi)

    val_retract = sub.add_parser("val-retract", help="skeleton parameter of normalized values on an edge")
    val_retract.add_argument("b1", type=int)
    val_retract.add_argument("b2", type=int)
    val_retract.add_argument("s1")
    val_retract.add_argument("s2")
    val_retract.set_defaults(handler=cmd_val_retract)

    corpus = sub.add_parser("corpus-check", help="run the acceptance suite")
    corpus.add_argument("--only", action="append", help="run only this criterion (repeatable)")
    corpus.set_defaults(handler=cmd_corpus_check)

    fixtures = sub.add_parser("fixtures", help="list the fixture corpus")
    fixtures.set_defaults(handler=cmd_fixtures)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=cmd_serve)
    return parser


def _configure_logging(level: str | None) -> None:
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_YES if e.code in (0, None) else EXIT_ERROR
    _configure_logging(args.log_level)
    logger.debug("running %s", args.command)
    try:
        return int(args.handler(_Context(args)))
    except MalformedCertificateError as e:
        print(f"error: malformed certificate: {e}", file=sys.stderr)
    except (DualGraphError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
