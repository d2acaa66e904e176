import json

from zerolaw import __version__
from zerolaw.cli import main
from zerolaw.report import csv_text, dumps, envelope, svg_plot
from zerolaw.structures import Structure


def run(argv):
    try:
        return main(argv)
    except SystemExit as e:
        return e.code


def test_sample_writes_graph(tmp_path, capsys):
    out = tmp_path / "o"
    assert run(["sample", "--profile", "caseA", "--alpha", "0.5", "--n", "64", "--seed", "7",
                "--out", str(out)]) == 0
    path = out / "sample_caseA_n64_seed7.json"
    obj = json.loads(path.read_text())
    M = Structure.from_json_obj(obj)
    assert M.check_invariants() and all(i < j for i, j in obj["edges"])
    assert obj["version"] == __version__ and obj["config"]["seed"] == 7
    first = path.read_bytes()
    assert run(["sample", "--alpha", "0.5", "--n", "64", "--seed", "7", "--out", str(out)]) == 0
    assert path.read_bytes() == first
    assert "edges=" in capsys.readouterr().out


def test_sample_single_vertex(tmp_path):
    assert run(["sample", "--alpha", "0.5", "--n", "1", "--seed", "0", "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "sample_caseA_n1_seed0.json").read_text())
    assert obj["edges"] == []


def test_seed_is_required(tmp_path, capsys):
    assert run(["sample", "--alpha", "0.5", "--n", "4", "--out", str(tmp_path)]) == 2
    assert "--seed" in capsys.readouterr().err


def test_near_rational_warning(tmp_path, capsys):
    run(["sample", "--alpha", "0.5", "--n", "4", "--seed", "1", "--out", str(tmp_path)])
    assert "1/2" in capsys.readouterr().err
    run(["sample", "--alpha", "0.41421356", "--n", "4", "--seed", "1", "--out", str(tmp_path)])
    assert "warning" not in capsys.readouterr().err


def test_eval(tmp_path, capsys):
    g = tmp_path / "k3.txt"
    g.write_text("1 2\n2 3\n1 3\n")
    f = tmp_path / "f.txt"
    f.write_text("forall x. forall y. (!x=y -> E(x,y))\n# comment\nexists x. !x=x\n")
    assert run(["eval", "--graph", str(g), "--formula-file", str(f)]) == 0
    assert capsys.readouterr().out.splitlines() == ["1: true", "3: false"]
    gj = tmp_path / "k3.json"
    gj.write_text(Structure.complete(3).to_json())
    assert run(["eval", "--graph", str(gj), "--formula-file", str(f)]) == 0


def test_eval_errors(tmp_path, capsys):
    g = tmp_path / "k3.txt"
    g.write_text("1 2\n")
    bad = tmp_path / "bad.txt"
    bad.write_text("x=x\n(E(x,y) & )\n")
    assert run(["eval", "--graph", str(g), "--formula-file", str(bad)]) == 2
    assert "line 2, column 11" in capsys.readouterr().err
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    assert run(["eval", "--graph", str(g), "--formula-file", str(empty)]) == 0
    assert capsys.readouterr().out == ""
    assert run(["eval", "--graph", str(tmp_path / "missing"), "--formula-file", str(empty)]) == 1


def test_series_tautology(tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("forall x. x=x\n")
    assert run(["series", "--alpha", "0.3", "--seed", "1", "--formula-file", str(f),
                "--ngrid", "2,4,8,16", "--trials", "10", "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "series.json").read_text())
    res = obj["result"][0]
    assert [e["phat"] for e in res["entries"]] == [1.0] * 4
    assert res["verdict"]["verdict"] == "zero-one-like"
    csv = (tmp_path / "series.csv").read_text()
    assert csv.startswith(f"# zerolaw {__version__}\n# config: ")
    svg = (tmp_path / "series.svg").read_text()
    assert svg.startswith("<svg") and "config" in svg and 'width="800"' in svg


def test_ef(tmp_path, capsys):
    assert run(["ef", "K3", "K4", "--d", "4", "--check-game", "--out", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip().endswith("not equivalent")
    assert run(["ef", "K3", "K4", "--d", "3", "--out", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip().endswith("equivalent")


def test_classify_and_scans(tmp_path, capsys):
    common = ["--alpha", "0.3", "--seed", "2", "--trials", "3", "--out", str(tmp_path)]
    assert run(["classify", "--ngrid", "64,128,256", *common]) == 0
    rep = json.loads((tmp_path / "classify.json").read_text())["result"]
    assert "slope" in rep and rep["verdict"] in ("i-like", "s-like", "inconclusive")
    for kind in ("closure-size", "empty-closure", "weakly-nice"):
        assert run(["scan", "--kind", kind, "--ngrid", "32,64", *common]) == 0
        assert json.loads((tmp_path / "scan.json").read_text())["config"]["kind"] == kind


def test_custom_and_sparsified_profiles(tmp_path):
    assert run(["sample", "--profile", "custom", "--probs", "1,0,0", "--n", "5", "--seed", "0",
                "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "sample_custom_n5_seed0.json").read_text())
    assert obj["edges"] == [[1, 2], [2, 3], [3, 4], [4, 5]]
    assert run(["sample", "--profile", "sparsified", "--alpha", "0.3", "--indices", "2,5",
                "--n", "8", "--seed", "0", "--out", str(tmp_path)]) == 0
    obj = json.loads((tmp_path / "sample_sparsified_n8_seed0.json").read_text())
    assert all(j - i in (2, 5) for i, j in obj["edges"])
    assert run(["sample", "--profile", "custom", "--n", "5", "--seed", "0",
                "--out", str(tmp_path)]) == 2


def test_amalgam(tmp_path, capsys):
    assert run(["amalgam", "--base", "K1", "--d", "1", "--max-side", "3", "--out", str(tmp_path)]) == 0
    assert "single-valued" in capsys.readouterr().out
    assert (tmp_path / "amalgam.csv").read_text().count("\n") > 3


def test_catalog_file(tmp_path):
    from zerolaw.closure import common_neighbor_catalog

    cat = tmp_path / "cat.json"
    cat.write_text(common_neighbor_catalog(k_max=3).to_json())
    assert run(["scan", "--kind", "closure-size", "--catalog", str(cat), "--alpha", "0.5",
                "--seed", "1", "--ngrid", "16,32", "--trials", "2", "--out", str(tmp_path)]) == 0
    cfg = json.loads((tmp_path / "scan.json").read_text())["config"]
    assert cfg["catalog_json"]["entries"]


def test_report_helpers_are_deterministic():
    cfg = {"b": 1, "a": [1, 2]}
    assert dumps(envelope(cfg, {"x": 0.1})) == dumps(envelope(dict(reversed(cfg.items())), {"x": 0.1}))
    text = csv_text(cfg, ["n", "v"], [[1, 0.5], [2, 1 / 3]])
    assert text.splitlines()[1] == '# config: {"a": [1, 2], "b": 1}'
    svg = svg_plot([{"label": "a", "x": [1, 10], "y": [0, 1], "lo": [0, 0.5], "hi": [0.1, 1]}],
                   "t", "y", cfg)
    assert svg == svg_plot([{"label": "a", "x": [1, 10], "y": [0, 1], "lo": [0, 0.5],
                             "hi": [0.1, 1]}], "t", "y", cfg)
