"""
Graph, certificate, script and polynomial formats
"""

import json
import logging
import re
import shlex
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from pydantic import ValidationError
from sympy import QQ, Float, Integer, Poly, Rational, Symbol
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from app.analyzers.graph_core import (
    DartId,
    GraphIsomorphism,
    SerreGraph,
    edge_name,
    edges,
    from_edges,
    sorted_ids,
)
from app.analyzers.modifications import (
    EquivalenceCertificate,
    Expansion,
    IsomorphismStep,
    Modification,
    Subdivision,
)
from app.analyzers.polynomial import Polynomial, generators
from app.analyzers.resolution import BlowupStep, DivisorConfig, FreeBlowup, SatelliteBlowup
from app.analyzers.valuations import LexValue, Weights
from app.core.errors import (
    CertificateSyntaxError,
    DartNamingError,
    DualGraphInvariantError,
    DuplicateIdentifierError,
    GraphSyntaxError,
    InvalidWeightsError,
    PolynomialSyntaxError,
    ScriptSyntaxError,
)
from app.models.schemas import (
    CertificateDocument,
    EdgeDecl,
    ExpandStep,
    GraphDocument,
    MappingDocument,
    RelabelStep,
    SubdivideStep,
    VertexDecl,
)

logger = logging.getLogger(__name__)

TEXT_HEADER = "dualgraph 1"
IDENTIFIER = re.compile(r"^[A-Za-z0-9_]+$")


@dataclass(frozen=True)
class LoadedGraph:
    """A parsed graph; ``config`` is set when it is also a valid weighted dual graph"""

    graph: SerreGraph
    config: DivisorConfig | None
    multiplicity: Mapping[str, int] | None

    def require_config(self) -> DivisorConfig:
        if self.config is not None:
            return self.config
        if self.multiplicity is None:
            raise DualGraphInvariantError("every vertex needs a multiplicity b=<int>")
        return DivisorConfig(self.graph, self.multiplicity)


class _GraphBuilder:
    """Collects declarations and reports problems against their line numbers"""

    def __init__(self) -> None:
        self.labels: dict[str, str | None] = {}
        self.multiplicity: dict[str, int | None] = {}
        self.edges: list[tuple[str, str, str]] = []
        self.edge_lines: dict[str, int] = {}

    def _identifier(self, line: int, kind: str, ident: str) -> str:
        if not IDENTIFIER.match(ident):
            raise GraphSyntaxError(line, f"invalid {kind} identifier {ident!r}")
        return ident

    def vertex(self, line: int, ident: str, label: str | None, b: int | None) -> None:
        self._identifier(line, "vertex", ident)
        if ident in self.labels:
            raise DuplicateIdentifierError(line, f"vertex {ident} declared twice")
        if b is not None and b < 1:
            raise GraphSyntaxError(line, f"multiplicity of {ident} must be at least 1")
        self.labels[ident] = label
        self.multiplicity[ident] = b

    def edge(self, line: int, ident: str, u: str, v: str) -> None:
        self._identifier(line, "edge", ident)
        if ident in self.edge_lines:
            raise DuplicateIdentifierError(line, f"edge {ident} declared twice")
        self.edge_lines[ident] = line
        self.edges.append((ident, u, v))

    def finish(self) -> LoadedGraph:
        for ident, u, v in self.edges:
            for endpoint in (u, v):
                if endpoint not in self.labels:
                    raise GraphSyntaxError(self.edge_lines[ident], f"edge {ident}: unknown vertex {endpoint}")
        graph = from_edges(self.labels, self.edges)
        multiplicity = None
        config = None
        if self.labels and all(b is not None for b in self.multiplicity.values()):
            multiplicity = {v: b for v, b in self.multiplicity.items() if b is not None}
            try:
                config = DivisorConfig(graph, multiplicity)
            except DualGraphInvariantError as e:
                logger.debug("weighted graph is not a dual graph: %s", e)
        return LoadedGraph(graph, config, multiplicity)


# Graph text format


def _significant_lines(text: str) -> Iterable[tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def parse_graph_text(text: str) -> LoadedGraph:
    builder = _GraphBuilder()
    for number, raw in enumerate(text.splitlines(), start=1):
        # quoted labels may contain '#'
        try:
            fields = shlex.split(raw, comments=True)
        except ValueError as e:
            raise GraphSyntaxError(number, str(e)) from e
        if not fields or fields == TEXT_HEADER.split():
            continue
        kind, args = fields[0], fields[1:]
        if kind == "v":
            if not args:
                raise GraphSyntaxError(number, "vertex declaration needs an identifier")
            label: str | None = None
            b: int | None = None
            for attribute in args[1:]:
                key, sep, value = attribute.partition("=")
                if not sep or key not in ("label", "b"):
                    raise GraphSyntaxError(number, f"unknown vertex attribute {attribute!r}")
                if key == "label":
                    label = value
                else:
                    try:
                        b = int(value)
                    except ValueError as e:
                        raise GraphSyntaxError(number, f"multiplicity {value!r} is not an integer") from e
            builder.vertex(number, args[0], label, b)
        elif kind == "e":
            if len(args) != 3:
                raise GraphSyntaxError(number, "edge declaration is 'e <id> <u> <v>'")
            builder.edge(number, *args)
        elif kind == "dualgraph":
            raise GraphSyntaxError(number, f"unsupported format version {' '.join(args)}")
        else:
            raise GraphSyntaxError(number, f"unknown declaration {kind!r}")
    return builder.finish()


def parse_graph_document(doc: GraphDocument) -> LoadedGraph:
    """Declarations are numbered in document order, vertices first"""
    builder = _GraphBuilder()
    for number, vertex in enumerate(doc.vertices, start=1):
        builder.vertex(number, vertex.id, vertex.label, vertex.multiplicity)
    for number, edge in enumerate(doc.edges, start=len(doc.vertices) + 1):
        builder.edge(number, edge.id, edge.u, edge.v)
    return builder.finish()


def parse_graph_json(text: str) -> LoadedGraph:
    try:
        doc = GraphDocument.model_validate_json(text)
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(p) for p in error["loc"])
        raise GraphSyntaxError(1, f"invalid graph document at {where or 'top level'}: {error['msg']}") from e
    return parse_graph_document(doc)


def parse_graph(text: str) -> LoadedGraph:
    """Parse either format; json documents start with '{'"""
    if text.lstrip().startswith("{"):
        return parse_graph_json(text)
    return parse_graph_text(text)


def read_graph(path: Path) -> LoadedGraph:
    return parse_graph(path.read_text(encoding="utf-8"))


def _edge_declarations(g: SerreGraph) -> list[tuple[str, str, str]]:
    declared = []
    for d, r in edges(g):
        ident = edge_name(d)
        if (d, r) != (f"{ident}+", f"{ident}-"):
            raise DartNamingError(f"darts {d}, {r} do not follow the <edge>+/<edge>- naming")
        declared.append((ident, g.endpoint[d], g.endpoint[r]))
    return declared


def graph_to_document(g: SerreGraph, multiplicity: Mapping[str, int] | None = None) -> GraphDocument:
    return GraphDocument(
        vertices=[
            VertexDecl(id=v, label=g.vertices[v], multiplicity=multiplicity.get(v) if multiplicity else None)
            for v in g.vertex_ids
        ],
        edges=[EdgeDecl(id=ident, u=u, v=v) for ident, u, v in _edge_declarations(g)],
    )


def serialize_graph_text(g: SerreGraph, multiplicity: Mapping[str, int] | None = None) -> str:
    lines = [TEXT_HEADER]
    for v in g.vertex_ids:
        parts = ["v", v]
        label = g.vertices[v]
        if label is not None:
            parts.append(shlex.quote(f"label={label}"))
        if multiplicity and v in multiplicity:
            parts.append(f"b={multiplicity[v]}")
        lines.append(" ".join(parts))
    lines.extend(f"e {ident} {u} {v}" for ident, u, v in _edge_declarations(g))
    return "\n".join(lines) + "\n"


def serialize_graph_json(g: SerreGraph, multiplicity: Mapping[str, int] | None = None) -> str:
    return graph_to_document(g, multiplicity).model_dump_json(indent=2, exclude_none=True)


def serialize_config(cfg: DivisorConfig) -> str:
    return serialize_graph_text(cfg.graph, cfg.multiplicity)


# Certificates


def _reverse_dart(dart: DartId) -> DartId:
    ident = edge_name(dart)
    if dart == f"{ident}+":
        return f"{ident}-"
    if dart == f"{ident}-":
        return f"{ident}+"
    raise CertificateSyntaxError(f"dart {dart!r} must end in '+' or '-'")


def _mapping_document(mapping: GraphIsomorphism) -> MappingDocument:
    return MappingDocument(
        vertices={v: mapping.vertices[v] for v in sorted_ids(mapping.vertices)},
        darts={d: mapping.darts[d] for d in sorted_ids(mapping.darts)},
    )


def _step_document(step: Modification) -> ExpandStep | SubdivideStep | RelabelStep:
    if isinstance(step, Expansion):
        return ExpandStep(at=step.at, new_vertex=step.new_vertex, edge=step.edge)
    if isinstance(step, Subdivision):
        return SubdivideStep(dart=step.edge[0], new_vertex=step.new_vertex, edges=step.new_edges)
    mapping = _mapping_document(step.relabeling)
    return RelabelStep(vertices=mapping.vertices, darts=mapping.darts)


def _step(doc: ExpandStep | SubdivideStep | RelabelStep) -> Modification:
    if isinstance(doc, ExpandStep):
        return Expansion(doc.at, doc.new_vertex, doc.edge)
    if isinstance(doc, SubdivideStep):
        return Subdivision((doc.dart, _reverse_dart(doc.dart)), doc.new_vertex, doc.edges)
    return IsomorphismStep(GraphIsomorphism(vertices=doc.vertices, darts=doc.darts))


def certificate_to_document(cert: EquivalenceCertificate) -> CertificateDocument:
    return CertificateDocument(
        seq1=[_step_document(s) for s in cert.seq1],
        seq2=[_step_document(s) for s in cert.seq2],
        final_iso=_mapping_document(cert.final_iso),
    )


def certificate_from_document(doc: CertificateDocument) -> EquivalenceCertificate:
    return EquivalenceCertificate(
        seq1=tuple(_step(s) for s in doc.seq1),
        seq2=tuple(_step(s) for s in doc.seq2),
        final_iso=GraphIsomorphism(vertices=doc.final_iso.vertices, darts=doc.final_iso.darts),
    )


def dump_certificate(cert: EquivalenceCertificate) -> str:
    return certificate_to_document(cert).model_dump_json(indent=2)


def load_certificate(text: str) -> EquivalenceCertificate:
    try:
        doc = CertificateDocument.model_validate_json(text)
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(p) for p in error["loc"])
        raise CertificateSyntaxError(f"invalid certificate at {where or 'top level'}: {error['msg']}") from e
    return certificate_from_document(doc)


# Scripts


def format_modification(step: Modification) -> str:
    if isinstance(step, Expansion):
        return f"expand {step.at} {step.new_vertex} {step.edge}"
    if isinstance(step, Subdivision):
        return f"subdivide {step.edge[0]} {step.new_vertex} {step.new_edges[0]} {step.new_edges[1]}"
    return "relabel " + json.dumps(_mapping_document(step.relabeling).model_dump(), sort_keys=True)


def parse_modification_script(text: str) -> list[Modification]:
    steps: list[Modification] = []
    for number, line in _significant_lines(text):
        op, *args = line.split()
        if op == "relabel":
            mapping_json = line.split(maxsplit=1)[1] if args else ""
            try:
                mapping = MappingDocument.model_validate_json(mapping_json)
            except ValidationError as e:
                raise ScriptSyntaxError(number, f"relabel needs a JSON mapping: {e.errors()[0]['msg']}") from e
            steps.append(IsomorphismStep(GraphIsomorphism(vertices=mapping.vertices, darts=mapping.darts)))
        elif op == "expand" and len(args) == 3:
            steps.append(Expansion(*args))
        elif op == "subdivide" and len(args) == 4:
            dart, new_vertex, e1, e2 = args
            try:
                steps.append(Subdivision((dart, _reverse_dart(dart)), new_vertex, (e1, e2)))
            except CertificateSyntaxError as e:
                raise ScriptSyntaxError(number, str(e)) from e
        elif op in ("expand", "subdivide"):
            raise ScriptSyntaxError(number, f"wrong number of arguments for {op}")
        else:
            raise ScriptSyntaxError(number, f"unknown modification {op!r}")
    return steps


def parse_blowup_script(text: str) -> list[BlowupStep]:
    steps: list[BlowupStep] = []
    for number, line in _significant_lines(text):
        op, *args = line.split()
        if op == "free" and len(args) == 1:
            steps.append(FreeBlowup(args[0]))
        elif op == "satellite" and len(args) == 2:
            steps.append(SatelliteBlowup(*args))
        elif op in ("free", "satellite"):
            raise ScriptSyntaxError(number, f"wrong number of arguments for {op}")
        else:
            raise ScriptSyntaxError(number, f"unknown blow-up {op!r}")
    return steps


# Polynomials and numbers

_POLYNOMIAL_CHARS = re.compile(r"^[0-9xz+\-*/^() .]*$")
_VARIABLE = re.compile(r"[xz](\d+)")
_TRANSFORMS = (*standard_transformations, convert_xor)
_GLOBALS = {"Integer": Integer, "Rational": Rational, "Float": Float, "Symbol": Symbol}


def parse_polynomial(text: str, arity: int | None = None) -> Polynomial:
    """
    Parse a sum of terms such as ``3/2*x1^2*x3 - x2``.

    Variables are x1..xd (z1..zd is accepted as a synonym); coefficients are
    rationals written p/q. The arity defaults to the largest variable index.
    """
    if not text.strip():
        raise PolynomialSyntaxError("empty polynomial")
    if not _POLYNOMIAL_CHARS.match(text):
        raise PolynomialSyntaxError(f"unexpected characters in {text!r}")
    indices = [int(i) for i in _VARIABLE.findall(text)]
    if any(i < 1 for i in indices):
        raise PolynomialSyntaxError("variables are numbered from 1")
    largest = max(indices, default=1)
    if arity is None:
        arity = largest
    elif largest > arity:
        raise PolynomialSyntaxError(f"variable index {largest} exceeds arity {arity}")
    gens = generators(arity)
    names = {f"{prefix}{i + 1}": x for i, x in enumerate(gens) for prefix in ("x", "z")}
    try:
        expr = parse_expr(text, local_dict=names, global_dict=_GLOBALS, transformations=_TRANSFORMS)
        poly = Poly(expr, *gens, domain=QQ)
    except Exception as e:
        raise PolynomialSyntaxError(f"cannot read {text!r} as a polynomial: {e}") from e
    return Polynomial(poly)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise PolynomialSyntaxError(f"{text!r} is not a rational number") from e


def parse_weights(items: Iterable[str]) -> Weights:
    try:
        beta = tuple(Fraction(item.strip()) for item in items)
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidWeightsError(f"weights must be rationals p/q: {e}") from e
    return Weights(beta)


def format_value(value: object) -> str:
    """+inf for infinity, p/q for rationals, tuples for lexicographic values"""
    if isinstance(value, LexValue):
        return str(value)
    if value == float("inf"):
        return "+inf"
    return str(value)
