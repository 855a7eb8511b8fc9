import csv
import json
import subprocess
import sys

import pytest

from egoclique.cli import main
from egoclique.designs import uis
from egoclique.graph import Graph, GraphFormatError, sample_from_draws
from egoclique.io import (parse_composition, format_composition, read_census, read_egonet_sample,
                          write_census, write_egonet_sample)
from egoclique.cliques import census

from conftest import G6_EDGES, G6_SEX


@pytest.fixture
def g6_file(tmp_path):
    p = tmp_path / "g6.txt"
    p.write_text("# G6\n" + "".join(f"{a}\t{b}\n" for a, b in G6_EDGES))
    return p


@pytest.fixture
def g6_attr_file(tmp_path):
    p = tmp_path / "sex.csv"
    p.write_text("node_id,attribute\n" + "".join(f"{k},{v}\n" for k, v in sorted(G6_SEX.items())))
    return p


def write_lines(path, *objs):
    path.write_text("".join(json.dumps(o) + "\n" for o in objs))
    return path


def test_read_one_triangle_record(tmp_path):
    p = write_lines(tmp_path / "s.jsonl", {"n_prime": 1, "design": None, "labeled": True},
                    {"ego": 1, "neighbors": [2, 3], "edges": [[2, 3]]})
    s = read_egonet_sample(p)
    assert s.n == 1 and s.labeled
    assert s.egonets[0].edge_set() == {(1, 2), (1, 3), (2, 3)}


def test_header_n_prime_kept_with_fewer_records(tmp_path):
    recs = [{"ego": k, "neighbors": [], "edges": []} for k in (1, 2, 3)]
    s = read_egonet_sample(write_lines(tmp_path / "s.jsonl", {"n_prime": 5, "labeled": True}, *recs))
    assert (s.n, s.n_prime) == (3, 5)
    assert s.multiplicity is None


def test_duplicates_collapse_and_counts(tmp_path, caplog):
    p = write_lines(tmp_path / "s.jsonl", {"n_prime": 3},
                    {"ego": 1, "neighbors": [], "edges": []}, {"ego": 1, "neighbors": [], "edges": []},
                    {"ego": 2, "neighbors": [], "edges": []})
    s = read_egonet_sample(p)
    assert (s.n, s.n_prime) == (2, 3)
    assert s.multiplicity == {1: 2, 2: 1}
    assert "duplicate ego" in caplog.text


def test_mixed_records_rejected(tmp_path):
    p = write_lines(tmp_path / "s.jsonl", {"n_prime": 2},
                    {"ego": 1, "neighbors": [2], "edges": []}, {"ego": 5, "size": 2, "edges": [[1, 2]]})
    with pytest.raises(GraphFormatError, match="mixed"):
        read_egonet_sample(p)


def test_bad_edge_rejected(tmp_path):
    p = write_lines(tmp_path / "s.jsonl", {"n_prime": 1}, {"ego": 1, "neighbors": [2], "edges": [[2, 7]]})
    with pytest.raises(ValueError):
        read_egonet_sample(p)


@pytest.mark.parametrize("labeled", [True, False])
@pytest.mark.parametrize("draws", [[0, 3, 4], [0, 0, 5, 2]])
def test_roundtrip(tmp_path, labeled, draws):
    g = Graph.from_edges(G6_EDGES, attributes=G6_SEX)
    s = sample_from_draws(g, draws, uis(6, len(draws), replacement=len(set(draws)) < len(draws)), labeled)
    write_egonet_sample(s, tmp_path / "s.jsonl")
    back = read_egonet_sample(tmp_path / "s.jsonl")
    assert back.egonets == s.egonets
    assert (back.n_prime, back.multiplicity, back.category_labels) == (s.n_prime, s.multiplicity, s.category_labels)
    assert back.design == s.design


def test_census_csv_roundtrip(tmp_path):
    g = Graph.from_edges(G6_EDGES, attributes=G6_SEX)
    c = census(g)
    write_census(c, tmp_path / "o.csv", tmp_path / "u.csv")
    back = read_census(tmp_path / "o.csv", tmp_path / "u.csv")
    assert back.order_counts == c.order_counts and back.composition_counts == c.composition_counts
    assert parse_composition(format_composition((2, 0, 1))) == (2, 0, 1)


# command line

def test_cli_census(g6_file, g6_attr_file, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["census", "--edges", str(g6_file), "--attributes", str(g6_attr_file), "--out", str(out)]) == 0
    rows = list(csv.reader(open(out / "census_order.csv")))
    assert rows == [["order", "count"], ["2", "1"], ["3", "2"]]
    comp = dict(csv.reader(open(out / "census_composition.csv")))
    assert comp == {"composition": "count", "0|2": "1", "2|1": "2"}
    m = json.loads((out / "manifest.json").read_text())
    assert m["command"] == "census" and m["total_cliques"] == 3 and "version" in m
    assert "3,2" in capsys.readouterr().out


def test_cli_estimate_from_graph(g6_file, tmp_path):
    out = tmp_path / "o"
    argv = ["estimate", "--edges", str(g6_file), "--draws", "6", "--out", str(out), "--workers", "1"]
    assert main(argv + ["--estimator", "cc"]) == 0
    est = json.loads((out / "estimates.json").read_text())["estimates"]
    assert {e["target"]: e["value"] for e in est} == pytest.approx({2: 1.0, 3: 2.0})
    assert main(argv + ["--unlabeled", "--estimator", "cc"]) == 2


def test_cli_estimate_from_egonets_needs_N(tmp_path):
    p = write_lines(tmp_path / "s.jsonl", {"n_prime": 1, "labeled": True},
                    {"ego": 1, "neighbors": [2, 3], "edges": [[2, 3]]})
    assert main(["estimate", "--egonets", str(p), "--out", str(tmp_path)]) == 2
    assert main(["estimate", "--egonets", str(p), "--N", "4", "--draws", "1", "--design", "uis",
                 "--estimator", "cds", "--out", str(tmp_path), "--workers", "1"]) == 0
    est = json.loads((tmp_path / "estimates.json").read_text())["estimates"]
    assert est[0]["target"] == 3 and est[0]["value"] == pytest.approx(4 / 3)


def test_cli_estimate_compositions(g6_file, g6_attr_file, tmp_path):
    assert main(["estimate", "--edges", str(g6_file), "--attributes", str(g6_attr_file), "--draws", "6",
                 "--compositions", "--out", str(tmp_path), "--workers", "1"]) == 0
    est = json.loads((tmp_path / "estimates.json").read_text())
    comps = {e["composition"]: e["value"] for e in est["estimates"] if "composition" in e}
    assert comps == pytest.approx({"0|2": 1.0, "2|1": 2.0})
    assert est["categories"] == ["F", "M"]


def test_cli_proportional_wis(g6_file, tmp_path):
    assert main(["estimate", "--edges", str(g6_file), "--design", "wis", "--replacement", "with",
                 "--weights", "degree", "--proportional", "--draws", "4", "--estimator", "cds",
                 "--out", str(tmp_path), "--workers", "1"]) == 0
    est = json.loads((tmp_path / "estimates.json").read_text())["estimates"]
    assert all(e["estimator"] == "CDS_GHT" for e in est)


def test_cli_exit_codes(g6_file, tmp_path):
    assert main(["census", "--edges", str(tmp_path / "missing.txt"), "--out", str(tmp_path)]) == 5
    assert main(["census", "--edges", str(g6_file), "--budget", "1", "--out", str(tmp_path)]) == 4
    # weighted without replacement has no inclusion-probability formula
    assert main(["estimate", "--edges", str(g6_file), "--design", "wis", "--weights", "degree",
                 "--draws", "2", "--out", str(tmp_path), "--workers", "1"]) == 3
    assert main(["estimate", "--edges", str(g6_file), "--design", "wis", "--draws", "2",
                 "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["census"])
    assert exc.value.code == 2


def test_cli_recommend(g6_file, tmp_path):
    assert main(["recommend", "--edges", str(g6_file), "--draws", "6", "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "recommendation.json").read_text())
    assert res["recommended"] == "cc" and res["metrics"]["avg_edge_count"] == pytest.approx(20 / 7)


def test_cli_sweep_and_plot(g6_file, tmp_path, monkeypatch):
    monkeypatch.setenv("EGOCLIQUE_WORKERS", "1")
    outs = []
    for w in ("1", "3"):
        out = tmp_path / f"w{w}"
        assert main(["sweep", "--edges", str(g6_file), "--sizes", "2,4", "--replications", "12",
                     "--seed", "7", "--workers", w, "--out", str(out)]) == 0
        outs.append(out)
    assert (outs[0] / "report.json").read_bytes() == (outs[1] / "report.json").read_bytes()
    assert (outs[0] / "report.csv").read_bytes() == (outs[1] / "report.csv").read_bytes()
    assert main(["plot", "--report", str(outs[0] / "report.json"), "--out", str(tmp_path / "p.svg")]) == 0
    assert (tmp_path / "p.svg").exists()


def test_cli_sweep_precomputed_truth(g6_file, tmp_path):
    (tmp_path / "truth.csv").write_text("order,count\n2,1\n3,2\n")
    assert main(["sweep", "--edges", str(g6_file), "--sizes", "6", "--replications", "2", "--workers", "1",
                 "--truth", str(tmp_path / "truth.csv"), "--budget", "1", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["summary"]["6"]["nmae"]["cc"]["median"] == 0


def test_console_script_version():
    r = subprocess.run([sys.executable, "-m", "egoclique.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()

