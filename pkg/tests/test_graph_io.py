"""
Tests for the graph, certificate, script and polynomial formats.
"""

from fractions import Fraction

import pytest

from app.analyzers.graph_core import GraphIsomorphism, SerreGraph, from_edges, isomorphism
from app.analyzers.modifications import (
    Expansion,
    IsomorphismStep,
    Subdivision,
    certify,
    random_modifications,
    replay,
    verify,
)
from app.analyzers.resolution import FreeBlowup, SatelliteBlowup, apply_script
from app.analyzers.valuations import INFINITY, LexValue
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
from app.services.graph_io import (
    dump_certificate,
    format_modification,
    format_value,
    load_certificate,
    parse_blowup_script,
    parse_graph,
    parse_graph_json,
    parse_graph_text,
    parse_modification_script,
    parse_polynomial,
    parse_rational,
    parse_weights,
    serialize_config,
    serialize_graph_json,
    serialize_graph_text,
)


class TestGraphText:
    def test_triangle(self, triangle_text: str, triangle: SerreGraph):
        loaded = parse_graph_text(triangle_text)
        assert loaded.graph == triangle
        assert loaded.config is None
        assert loaded.multiplicity is None

    def test_header_is_optional(self, square_text: str, square: SerreGraph):
        assert parse_graph_text(square_text).graph == square

    def test_comments_and_blank_lines(self):
        loaded = parse_graph_text("# a point\n\nv o   # the only vertex\n")
        assert list(loaded.graph.vertices) == ["o"]

    def test_labels_and_multiplicities(self):
        loaded = parse_graph_text('v a "label=E one" b=2\nv b b=1\ne 1 a b\n')
        assert loaded.graph.label("a") == "E one"
        assert dict(loaded.require_config().multiplicity) == {"a": 2, "b": 1}

    def test_weighted_but_not_a_dual_graph(self):
        loaded = parse_graph_text("v a b=1\ne 1 a a\n")
        assert loaded.config is None
        with pytest.raises(DualGraphInvariantError):
            loaded.require_config()

    def test_unweighted_has_no_config(self, triangle_text: str):
        with pytest.raises(DualGraphInvariantError, match="multiplicity"):
            parse_graph_text(triangle_text).require_config()

    def test_duplicate_vertex_line(self):
        with pytest.raises(DuplicateIdentifierError) as info:
            parse_graph_text("v a\nv b\nv a\n")
        assert info.value.line == 3

    def test_duplicate_edge(self):
        with pytest.raises(DuplicateIdentifierError):
            parse_graph_text("v a\nv b\ne 1 a b\ne 1 b a\n")

    def test_dangling_endpoint_reports_edge_line(self):
        with pytest.raises(GraphSyntaxError) as info:
            parse_graph_text("v a\ne 1 a b\nv c\n")
        assert info.value.line == 2
        assert "unknown vertex b" in str(info.value)

    @pytest.mark.parametrize(
        "text",
        [
            "w a\n",
            "v\n",
            "v a colour=red\n",
            "v a b=two\n",
            "v a b=0\n",
            "v a-b\n",
            "v a\ne 1 a\n",
            "dualgraph 2\n",
            'v "a\n',
        ],
    )
    def test_syntax_errors(self, text: str):
        with pytest.raises(GraphSyntaxError):
            parse_graph_text(text)

    def test_serialize_round_trip(self, triangle_with_pendant: SerreGraph):
        text = serialize_graph_text(triangle_with_pendant)
        assert text.startswith("dualgraph 1\n")
        assert parse_graph_text(text).graph == triangle_with_pendant

    def test_labels_with_hash_round_trip(self):
        g = from_edges({"a": "C#3 curve", "b": "#", "c": None}, [("1", "a", "b"), ("2", "b", "c")])
        text = serialize_graph_text(g)
        assert parse_graph_text(text).graph == g
        assert parse_graph_text(text + "# trailing comment\n").graph == g

    def test_serialize_config(self):
        cfg = apply_script(None, [FreeBlowup("E0"), SatelliteBlowup("E0", "E1")])
        text = serialize_config(cfg)
        assert "v E2 b=2" in text
        assert parse_graph_text(text).require_config() == cfg

    def test_serialize_needs_edge_naming(self):
        g = SerreGraph({"a": None}, {"p": "q", "q": "p"}, {"p": "a", "q": "a"})
        with pytest.raises(DartNamingError):
            serialize_graph_text(g)


class TestGraphJson:
    def test_round_trip(self, theta: SerreGraph):
        text = serialize_graph_json(theta)
        assert parse_graph(text).graph == theta

    def test_multiplicities(self, path_text: str):
        loaded = parse_graph(path_text)
        text = serialize_graph_json(loaded.graph, loaded.multiplicity)
        assert parse_graph_json(text).require_config() == loaded.require_config()

    def test_invalid_document(self):
        with pytest.raises(GraphSyntaxError, match="vertices"):
            parse_graph_json('{"vertices": [{"id": "bad id"}]}')

    def test_not_json(self):
        with pytest.raises(GraphSyntaxError):
            parse_graph("{ not json")

    def test_dangling_endpoint(self):
        with pytest.raises(GraphSyntaxError, match="unknown vertex"):
            parse_graph_json('{"vertices": [{"id": "a"}], "edges": [{"id": "1", "u": "a", "v": "b"}]}')


class TestCertificates:
    def test_round_trip_verifies(self, triangle_with_pendant: SerreGraph, square: SerreGraph):
        cert = certify(triangle_with_pendant, square)
        assert cert is not None
        loaded = load_certificate(dump_certificate(cert))
        assert loaded == cert
        assert verify(triangle_with_pendant, square, loaded)

    def test_relabel_steps_survive(self, theta: SerreGraph):
        g, steps = random_modifications(theta, 10, seed=5)
        cert = certify(theta, g)
        assert cert is not None
        assert verify(theta, g, load_certificate(dump_certificate(cert)))
        assert len(steps) == 10

    def test_invalid_json(self):
        with pytest.raises(CertificateSyntaxError):
            load_certificate("[]")

    def test_unknown_step(self):
        with pytest.raises(CertificateSyntaxError, match="seq1"):
            load_certificate('{"seq1": [{"op": "contract"}]}')

    def test_bad_dart_name(self):
        with pytest.raises(CertificateSyntaxError, match="must end in"):
            load_certificate('{"seq1": [{"op": "subdivide", "dart": "e1", "new_vertex": "n", "edges": ["a", "b"]}]}')


class TestScripts:
    def test_modification_script(self):
        steps = parse_modification_script("expand a n0 m0\n# split\nsubdivide 1- n1 m1 m2\n")
        assert steps == [Expansion("a", "n0", "m0"), Subdivision(("1-", "1+"), "n1", ("m1", "m2"))]
        assert [format_modification(s) for s in steps] == ["expand a n0 m0", "subdivide 1- n1 m1 m2"]

    def test_modification_script_errors(self):
        with pytest.raises(ScriptSyntaxError) as info:
            parse_modification_script("expand a n0 m0\nexpand a\n")
        assert info.value.line == 2
        with pytest.raises(ScriptSyntaxError):
            parse_modification_script("contract a b\n")
        with pytest.raises(ScriptSyntaxError):
            parse_modification_script("subdivide 1 n m1 m2\n")
        with pytest.raises(ScriptSyntaxError):
            parse_modification_script("relabel\n")
        with pytest.raises(ScriptSyntaxError):
            parse_modification_script('relabel {"vertices": [1]}\n')

    def test_relabel_line(self):
        steps = parse_modification_script('relabel {"darts": {"1+": "7+"}, "vertices": {"a": "x"}}\n')
        assert steps == [IsomorphismStep(GraphIsomorphism(vertices={"a": "x"}, darts={"1+": "7+"}))]

    @pytest.mark.parametrize("seed", range(40))
    def test_random_script_replays(self, triangle: SerreGraph, seed: int):
        modified, steps = random_modifications(triangle, 8, seed=seed)
        script = "\n".join(format_modification(s) for s in steps) + "\n"
        parsed = parse_modification_script(script)
        assert parsed == steps
        assert replay(triangle, parsed) == modified

    def test_blowup_script(self):
        steps = parse_blowup_script("free E0\nsatellite E0 E1\n")
        assert steps == [FreeBlowup("E0"), SatelliteBlowup("E0", "E1")]

    def test_blowup_script_errors(self):
        with pytest.raises(ScriptSyntaxError):
            parse_blowup_script("free\n")
        with pytest.raises(ScriptSyntaxError):
            parse_blowup_script("explode E0\n")


class TestPolynomials:
    def test_terms(self):
        p = parse_polynomial("3/2*x1^2*x3 - x2")
        assert p.arity == 3
        assert p.terms() == {(2, 0, 1): Fraction(3, 2), (0, 1, 0): -1}

    def test_z_synonym(self):
        assert parse_polynomial("z1*z2") == parse_polynomial("x1*x2")

    def test_explicit_arity(self):
        assert parse_polynomial("x1", arity=3).arity == 3
        with pytest.raises(PolynomialSyntaxError):
            parse_polynomial("x4", arity=3)

    def test_constant(self):
        assert parse_polynomial("7", arity=2).terms() == {(0, 0): 7}

    @pytest.mark.parametrize("text", ["", "x1 + y", "__import__('os')", "x0", "1/x1", "x1 +* 2"])
    def test_rejected(self, text: str):
        with pytest.raises(PolynomialSyntaxError):
            parse_polynomial(text)


class TestNumbers:
    def test_rational(self):
        assert parse_rational(" 3/4 ") == Fraction(3, 4)
        with pytest.raises(PolynomialSyntaxError):
            parse_rational("1/0")

    def test_weights(self):
        assert parse_weights(["1", "1/2"]).beta == (Fraction(1), Fraction(1, 2))
        with pytest.raises(InvalidWeightsError):
            parse_weights(["a"])
        with pytest.raises(InvalidWeightsError):
            parse_weights(["-1"])

    def test_format_value(self):
        assert format_value(INFINITY) == "+inf"
        assert format_value(Fraction(3, 2)) == "3/2"
        assert format_value(LexValue.of(0, 1)) == "(0, 1)"


def test_isomorphic_after_parse(triangle_text: str):
    """Parsing is insensitive to declaration order."""
    shuffled = "e 3 c a\nv c\ne 1 a b\nv b\nv a\ne 2 b c\n"
    assert isomorphism(parse_graph(triangle_text).graph, parse_graph(shuffled).graph) is not None
    assert parse_graph(shuffled).graph == from_edges(["a", "b", "c"], [("1", "a", "b"), ("2", "b", "c"), ("3", "c", "a")])
