import json

import pytest

from sheafmorse import io
from sheafmorse.cli import run
from sheafmorse.facets import ConormalPoint1D, ConstructibleOpen, all_constructible_opens, standard_complex
from sheafmorse.facets import subdivide_1d
from sheafmorse.microsheaf import (PosetModule, arc_indicator, constant_sheaf, local_system, local_system_module,
                                   resolve_module, skyscraper)
from sheafmorse.twisted import representable
from sheafmorse.zchain import CohomologyReport


@pytest.fixture
def cli(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("SHEAFMORSE_WORKSPACE", raising=False)

    def call(*argv):
        code = run(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    return call


def _json(out):
    return json.loads(out)


def test_example_then_hom(cli):
    assert cli("example", "circle:3")[0] == 0
    code, out, _ = cli("hom", "P:ab", "P:a", "--format", "json")
    assert code == 0
    assert _json(out) == {"degrees": [{"n": 0, "rank": 1, "torsion": []}]}
    code, out, _ = cli("hom", "P:ab", "P:a")
    assert out == "degree 0: rank 1\n"


def test_sections_of_constant_on_circle(cli):
    code, out, _ = cli("sections", "ALL", "CONST", "--complex", "circle:3", "--format", "json")
    assert code == 0
    assert [(d["n"], d["rank"]) for d in _json(out)["degrees"]] == [(0, 1), (1, 1)]


def test_quotient_level_zero_is_hom(cli):
    cli("example", "path:3")
    for a, b in (("P:1|2", "P:1"), ("IND:ARC:1:3", "CONST"), ("SKY:2", "CONST")):
        _, want, _ = cli("hom", a, b, "--format", "json")
        code, got, _ = cli("quotient-hom", "--level", "0", a, b, "--format", "json")
        assert code == 0
        g = _json(got)
        assert g.pop("level") == 0
        assert g == _json(want)


def test_microsupport_and_casting_commands(cli):
    cli("example", "circle:4")
    code, out, _ = cli("microsupport", "IND:ARC:a:c", "--format", "json")
    assert _json(out) == {"points": [["a", "-"], ["c", "+"]]}
    code, out, _ = cli("check-casting", "CAST:b:+", "--format", "json")
    assert _json(out) == {"valid": True, "problems": []}
    code, out, _ = cli("check-casting", "CAST:b:+", "--stop", "a:+", "--format", "json")
    assert _json(out)["valid"] is False
    code, out, _ = cli("microstalk", "CAST:b:+", "IND:ARC:d:b", "--format", "json")
    assert code == 0 and _json(out)["degrees"]
    code, out, _ = cli("morse", "CAST:b:+", "--format", "json")
    assert code == 0 and "generators" in _json(out)


def test_peel_and_tower(cli):
    cli("example", "path:2")
    code, out, _ = cli("peel", "CONST", "--format", "json")
    rep = _json(out)
    assert rep["generated"] is True and rep["residual_size"] == 0 and len(rep["steps"]) == 3
    code, out, _ = cli("tower", "P:1|2", "--max-iter", "8", "--format", "json")
    assert code == 0 and _json(out)["stabilized"] is True


def test_independence_command(cli):
    code, out, _ = cli("independence", "CAST:2:+", "CAST:2:+:2", "--level", "2", "--complex", "path:3",
                       "--stop", "2:+", "--format", "json")
    assert code == 0
    assert _json(out) == {"verdict": "isomorphic_at_level_N", "level": 2}


def test_resolve_and_refine(cli, tmp_path):
    cli("example", "circle:3")
    K = standard_complex("circle", 3)
    M = local_system_module(K, -1)
    (tmp_path / "m.json").write_text(io.dumps(io.module_to_json(M)))
    code, out, _ = cli("resolve", "m.json", "--format", "json")
    assert code == 0 and _json(out) == resolve_module(M).to_json()
    code, out, _ = cli("refine", "SUBDIVIDE", "P:a", "--format", "json")
    data = _json(out)
    K2 = io.complex_from_json(data["complex"])
    assert len(K2.vertices) == 6
    io.twisted_from_json(K2.poset, data["object"])
    _, r = subdivide_1d(K)
    (tmp_path / "r.json").write_text(io.dumps(io.refinement_to_json(r)))
    code, out2, _ = cli("refine", "r.json", "P:a", "--format", "json")
    assert out2 == out


def test_workspace_from_environment(cli, tmp_path, monkeypatch):
    monkeypatch.setenv("SHEAFMORSE_WORKSPACE", str(tmp_path / "ws.json"))
    cli("example", "path:2")
    assert (tmp_path / "ws.json").exists()
    assert cli("hom", "P:1", "P:1")[0] == 0


# -- exit codes ----------------------------------------------------------------


def test_parse_errors_exit_1(cli, tmp_path):
    assert cli("frobnicate")[0] == 1
    assert cli("hom", "P:a")[0] == 1
    assert cli("hom", "P:a", "P:a")[0] == 1  # no workspace
    (tmp_path / "bad.json").write_text('{"strata": [["a"],\n  oops]}')
    code, _, err = cli("sections", "bad.json", "CONST", "--complex", "circle:3")
    assert code == 1 and "line 2 column 3" in err
    (tmp_path / "noint.json").write_text('{"generators": [{"stratum": ["a"], "degree": "x"}]}')
    code, _, err = cli("hom", "noint.json", "CONST", "--complex", "circle:3")
    assert code == 1 and "degree" in err


def test_validation_errors_exit_2(cli, tmp_path):
    (tmp_path / "U.json").write_text(json.dumps({"strata": [["a"]]}))
    code, _, err = cli("sections", "U.json", "CONST", "--complex", "circle:3")
    assert code == 2
    assert "'a'" in err and "'a|b'" in err
    assert cli("hom", "P:zz", "P:a", "--complex", "circle:3")[0] == 2
    (tmp_path / "d2.json").write_text(json.dumps({"generators": [
        {"stratum": ["a", "b"], "degree": 0}, {"stratum": ["a"], "degree": 1}, {"stratum": ["a"], "degree": 2}],
        "differential": [[1, 0, 1], [2, 1, 1]]}))
    assert cli("hom", "d2.json", "CONST", "--complex", "circle:3")[0] == 2


def test_resource_ceiling_exits_3(cli):
    code, _, err = cli("quotient-hom", "--level", "6", "P:ab", "P:ab", "--complex", "circle:3", "--max-bar", "50")
    assert code == 3 and "exceeds" in err


# -- formats ---------------------------------------------------------------------

K3 = standard_complex("circle", 3)
FIXTURE_OBJECTS = [constant_sheaf(K3.poset), skyscraper(K3.poset, ("a",)), local_system(K3, -1),
                   arc_indicator(K3, "a", "c"), representable(K3.poset, ("a", "b"))]


@pytest.mark.parametrize("k", range(len(FIXTURE_OBJECTS)))
def test_twisted_round_trip(k):
    F = FIXTURE_OBJECTS[k]
    text = io.dumps(io.twisted_to_json(F))
    G = io.twisted_from_json(K3.poset, io.load_json_text(text))
    assert io.dumps(io.twisted_to_json(G)) == text
    assert (G.strata, G.degrees, G.differential) == (F.strata, F.degrees, F.differential)


def test_other_round_trips():
    P = K3.poset
    for U in all_constructible_opens(P):
        assert io.open_from_json(P, io.load_json_text(io.dumps(U.to_json()))) == U
    for M in (local_system_module(K3, 2), PosetModule.indicator(ConstructibleOpen.star(P, ("a",)))):
        back = io.module_from_json(P, io.load_json_text(io.dumps(io.module_to_json(M))))
        assert io.module_to_json(back) == io.module_to_json(M)
    r = CohomologyReport({0: (1, (2, 4)), 2: (3, ())}, level=1)
    assert io.report_from_json(io.load_json_text(io.dumps(r.to_json()))) == r
    stop = frozenset({ConormalPoint1D("a", "+"), ConormalPoint1D("b", "-")})
    assert io.stop_from_json(io.load_json_text(io.dumps(io.stop_to_json(stop)))) == stop
    ws = io.Workspace(K3, {"x": {"strata": [["a", "b"]]}}, stop)
    back = io.Workspace.from_json(io.load_json_text(io.dumps(ws.to_json())))
    assert back.complex == ws.complex and back.objects == ws.objects and back.stop == ws.stop
    assert io.complex_from_json(io.load_json_text(io.dumps(K3.to_json()))) == K3


def test_reports_are_canonical_and_deterministic(cli, tmp_path):
    F = local_system(K3, -1).to_json()
    shuffled = dict(F, differential=list(reversed(F["differential"])))
    (tmp_path / "f.json").write_text(json.dumps(F))
    (tmp_path / "g.json").write_text(json.dumps(shuffled))
    outs = [cli("sections", "ALL", name, "--complex", "circle:3", "--format", "json")[1]
            for name in ("f.json", "g.json", "f.json")]
    assert outs[0] == outs[1] == outs[2]


def test_selftest(cli):
    code, out, _ = cli("selftest")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 12 and all(line.startswith("[PASS]") for line in lines)
