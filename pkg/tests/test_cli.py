"""
Golden tests for the dualgraph command line: every decision agrees with the library call.
"""

import json
from pathlib import Path

import pytest

from app.analyzers.topo import equivalent
from app.cli import EXIT_ERROR, EXIT_NO, EXIT_YES, run
from app.services.fixtures import FixtureCorpus


@pytest.fixture
def write(tmp_path: Path):
    def _write(name: str, content: str) -> str:
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return str(path)

    return _write


class TestGraphCommands:
    def test_validate_ok(self, write, triangle_text: str, capsys):
        assert run(["validate", write("t.dg", triangle_text)]) == EXIT_YES
        assert capsys.readouterr().out == "ok\n"

    def test_validate_reports_as_json(self, write, path_text: str, capsys):
        assert run(["--report", "json", "validate", write("p.dg", path_text)]) == EXIT_YES
        report = json.loads(capsys.readouterr().out)
        assert report["answer"] is True
        assert report["details"]["dual_graph"] is True

    def test_syntax_error_exits_2(self, write, capsys):
        assert run(["validate", write("bad.dg", "v a\nv a\n")]) == EXIT_ERROR
        assert "line 2" in capsys.readouterr().err

    def test_missing_file(self, capsys):
        assert run(["betti", "no-such-file.dg"]) == EXIT_ERROR
        assert capsys.readouterr().err.startswith("error:")

    def test_betti(self, capsys):
        assert run(["betti", "fixture:theta"]) == EXIT_YES
        assert capsys.readouterr().out.strip() == "2"

    def test_core_of_tree(self, capsys):
        assert run(["core", "fixture:tree-d4"]) == EXIT_YES
        assert "empty core" in capsys.readouterr().out

    def test_core_of_dumbbell(self, capsys):
        assert run(["--report", "json", "core", "fixture:dumbbell"]) == EXIT_YES
        report = json.loads(capsys.readouterr().out)
        assert report["details"]["tree"] is False

    def test_reduce_cycle(self, capsys):
        assert run(["reduce", "fixture:cycle-7"]) == EXIT_YES
        out = capsys.readouterr().out
        assert "v r0" in out
        assert "e s0 r0 r0" in out
        assert "# betti: 1" in out

    def test_unknown_fixture(self, capsys):
        assert run(["betti", "fixture:nope"]) == EXIT_ERROR
        assert "nope" in capsys.readouterr().err

    def test_stdin(self, monkeypatch, triangle_text: str, capsys):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO(triangle_text))
        assert run(["betti", "-"]) == EXIT_YES
        assert capsys.readouterr().out.strip() == "1"


class TestDecisions:
    def test_trees_are_equivalent(self, capsys):
        assert run(["equiv", "fixture:tree-e6", "fixture:tree-e8"]) == EXIT_YES
        assert capsys.readouterr().out.strip() == "yes"

    def test_stricter_pair(self, capsys):
        assert run(["equiv", "fixture:shared-vertex", "fixture:shared-side"]) == EXIT_NO
        assert capsys.readouterr().out.strip() == "no"

    def test_homeo_and_iso(self):
        assert run(["homeo", "fixture:cycle-3", "fixture:cycle-7"]) == EXIT_YES
        assert run(["iso", "fixture:cycle-3", "fixture:cycle-7"]) == EXIT_NO
        assert run(["iso", "fixture:k23", "fixture:k23"]) == EXIT_YES

    def test_iso_reports_witness(self, capsys):
        run(["--report", "json", "iso", "fixture:cycle-4", "fixture:cycle-4"])
        report = json.loads(capsys.readouterr().out)
        assert report["details"]["vertices"] == {f"c{i}": f"c{i}" for i in range(1, 5)}

    def test_golden_against_library(self):
        corpus = FixtureCorpus()
        fixtures = corpus.all()
        for first in fixtures:
            for second in fixtures:
                expected = equivalent(first.loaded.graph, second.loaded.graph)
                code = run(["equiv", f"fixture:{first.name}", f"fixture:{second.name}"])
                assert code == (EXIT_YES if expected else EXIT_NO), (first.name, second.name)


class TestCertificates:
    def test_certify_then_verify(self, tmp_path: Path, capsys):
        cert = tmp_path / "cert.json"
        assert run(["certify", "fixture:cycle-3", "fixture:cycle-6", "-o", str(cert)]) == EXIT_YES
        assert run(["verify", "fixture:cycle-3", "fixture:cycle-6", str(cert)]) == EXIT_YES
        assert "written to" in capsys.readouterr().out

    def test_certify_to_stdout(self, capsys):
        assert run(["certify", "fixture:tree-a4", "fixture:point"]) == EXIT_YES
        document = json.loads(capsys.readouterr().out)
        assert document["format"] == "dualgraph-certificate/1"

    def test_certify_refuses(self):
        assert run(["certify", "fixture:theta", "fixture:two-squares"]) == EXIT_NO

    def test_verify_rejects_wrong_iso(self, write, capsys):
        path = write("cert.json", '{"final_iso": {"vertices": {}, "darts": {}}}')
        assert run(["verify", "fixture:cycle-3", "fixture:cycle-3", path]) == EXIT_NO

    def test_verify_malformed(self, write, capsys):
        path = write("cert.json", '{"seq1": [{"op": "expand", "at": "zz", "new_vertex": "n", "edge": "m"}]}')
        assert run(["verify", "fixture:cycle-3", "fixture:cycle-3", path]) == EXIT_ERROR
        assert "malformed certificate" in capsys.readouterr().err


class TestModify:
    def test_script(self, write, triangle_text: str, capsys):
        graph = write("t.dg", triangle_text)
        script = write("s.txt", "expand a n0 m0\nsubdivide 1+ n1 m1 m2\n")
        assert run(["modify", graph, script]) == EXIT_YES
        out = capsys.readouterr().out
        assert "v n0" in out and "v n1" in out
        assert "e 1 " not in out

    def test_random_is_reproducible(self, capsys):
        run(["--seed", "11", "modify", "fixture:theta", "--random", "5"])
        first = capsys.readouterr().out
        run(["--seed", "11", "modify", "fixture:theta", "--random", "5"])
        assert capsys.readouterr().out == first

    @pytest.mark.parametrize("seed", [0, 3, 17])
    def test_random_script_replays(self, write, capsys, seed: int):
        run(["--seed", str(seed), "--report", "json", "modify", "fixture:theta", "--random", "12"])
        generated = json.loads(capsys.readouterr().out)["details"]
        script = write("s.txt", "\n".join(generated["steps"]) + "\n")
        assert run(["--report", "json", "modify", "fixture:theta", script]) == EXIT_YES
        replayed = json.loads(capsys.readouterr().out)["details"]
        assert replayed["graph"] == generated["graph"]

    def test_needs_script_or_random(self, capsys):
        assert run(["modify", "fixture:theta"]) == EXIT_ERROR


class TestBlowup:
    def test_worked_example(self, write, capsys):
        script = write("b.txt", "free E0\nsatellite E0 E1\n")
        assert run(["blowup", script]) == EXIT_YES
        out = capsys.readouterr().out
        assert "v E2 b=2" in out

    def test_from_fixture(self, write, capsys):
        script = write("b.txt", "satellite E0 E2\n")
        assert run(["--report", "json", "blowup", script, "--graph", "fixture:plane-blowups"]) == EXIT_YES
        report = json.loads(capsys.readouterr().out)
        assert report["details"]["multiplicity"]["E3"] == 3

    def test_unweighted_start(self, write):
        script = write("b.txt", "free a\n")
        assert run(["blowup", script, "--graph", "fixture:cycle-3"]) == EXIT_ERROR


class TestValuations:
    def test_monomial(self, capsys):
        assert run(["val-eval", "x1^2 + x2*x3", "--weights", "1,1/2,1/2"]) == EXIT_YES
        assert capsys.readouterr().out.strip() == "1"

    def test_zero_is_infinite(self, capsys):
        run(["val-eval", "x1 - x1", "--weights", "1,1"])
        assert capsys.readouterr().out.strip() == "+inf"

    def test_iterated(self, capsys):
        assert run(["val-eval", "x1 + x2^2", "--order", "2,1,3", "--arity", "3"]) == EXIT_YES
        assert capsys.readouterr().out.strip() == "(0, 1, 0)"

    def test_pi_swapped_orders(self, capsys):
        run(["val-pi", "x3^4 + x1*x2", "--order", "1,2,3"])
        first = capsys.readouterr().out
        run(["val-pi", "x3^4 + x1*x2", "--order", "2,1,3"])
        assert capsys.readouterr().out == first == "4\n"

    def test_pi_center_not_maximal(self, capsys):
        assert run(["val-pi", "x1", "--order", "1,2", "--arity", "3"]) == EXIT_ERROR

    def test_pi_monomial(self, capsys):
        run(["val-pi", "x1*x2", "--weights", "2,4"])
        assert capsys.readouterr().out.strip() == "3"

    def test_retract(self, capsys):
        assert run(["val-retract", "1", "2", "1/3", "1/3"]) == EXIT_YES
        assert capsys.readouterr().out.strip() == "1/3"

    def test_retract_unnormalized(self, capsys):
        assert run(["val-retract", "1", "1", "1", "1"]) == EXIT_ERROR

    def test_bad_polynomial(self, capsys):
        assert run(["val-eval", "x1 +* 2", "--weights", "1"]) == EXIT_ERROR


class TestMisc:
    def test_fixtures_listing(self, capsys):
        assert run(["fixtures"]) == EXIT_YES
        out = capsys.readouterr().out
        assert "stricter: shared-vertex shared-side dumbbell" in out

    def test_usage_error(self, capsys):
        assert run(["frobnicate"]) == EXIT_ERROR

    def test_help(self, capsys):
        assert run(["--help"]) == EXIT_YES

    def test_corpus_check_single_criterion(self, capsys):
        assert run(["corpus-check", "--only", "stricter-trio"]) == EXIT_YES
        assert "PASS stricter-trio" in capsys.readouterr().out
