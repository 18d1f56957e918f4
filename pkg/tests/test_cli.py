import csv
import json

import pytest

from ngpart.cli import main, verify_cut
from ngpart.generate import grid_graph
from ngpart.graph import write_metis
from ngpart.partition import read_partition


@pytest.fixture
def grid_file(tmp_path):
    path = tmp_path / "grid.graph"
    assert main(["generate", "grid", "4", "4", "-o", str(path)]) == 0
    return path


def test_partition_grid(grid_file, tmp_path, capsys):
    out = tmp_path / "grid.part"
    assert main(["partition", "--graph", str(grid_file), "--k", "2", "--output", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 16 and set(lines) == {"0", "1"}
    record = json.loads(capsys.readouterr().out)
    assert record["cut"] == record["verified_cut"] == 4


def test_default_output_name(grid_file):
    assert main(["partition", "--graph", str(grid_file), "--k", "2", "--preset", "fast"]) == 0
    blocks = read_partition(f"{grid_file}.part.2")
    assert len(blocks) == 16


def test_stats_file_appends(grid_file, tmp_path):
    stats = tmp_path / "stats.jsonl"
    for seed in ("1", "2"):
        main(["partition", "--graph", str(grid_file), "--k", "2", "--seed", seed,
              "--stats", str(stats), "--preset", "fast"])
    assert len(stats.read_text().splitlines()) == 2


@pytest.mark.parametrize("extra", [["--epsilon", "0"], ["--k", "0"], ["--k", "17"]])
def test_bad_arguments_exit_1(grid_file, extra, capsys):
    args = ["partition", "--graph", str(grid_file), "--k", "2"]
    if extra[0] == "--k":
        args = args[:-2]
    assert main(args + extra) == 1
    assert capsys.readouterr().err


def test_missing_and_malformed_graph(tmp_path):
    assert main(["partition", "--graph", str(tmp_path / "nope"), "--k", "2"]) == 1
    bad = tmp_path / "bad.graph"
    bad.write_text("3 1\n2\n1\n")
    assert main(["partition", "--graph", str(bad), "--k", "2"]) == 1


def test_bench_rows(tmp_path):
    write_metis(grid_graph(6, 6), tmp_path / "a.graph")
    write_metis(grid_graph(5, 8), tmp_path / "b.graph")
    manifest = tmp_path / "m.txt"
    manifest.write_text("# two instances\na.graph 2\nb.graph 2\n")
    out, summary = tmp_path / "out.csv", tmp_path / "summary.json"
    code = main(["bench", str(manifest), "--repetitions", "2", "--preset", "fast",
                 "--output", str(out), "--summary", str(summary)])
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0][:4] == ["instance", "k", "seed", "cut"]
    body = rows[1:]
    assert len(body) == 7
    data = [r for r in body if r[2] not in ("mean",)]
    assert len(data) == 4
    assert sum(r[2] == "mean" and r[0] != "geomean" for r in body) == 2
    assert body[-1][0] == "geomean"
    s = json.loads(summary.read_text())
    assert len(s["instances"]) == 2 and s["geomean"]["best"] > 0


def test_bench_empty_manifest(tmp_path):
    manifest = tmp_path / "m.txt"
    manifest.write_text("# nothing here\n\n")
    assert main(["bench", str(manifest)]) == 1


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.graph", tmp_path / "b.graph"
    main(["generate", "rgg", "9", "--seed", "5", "-o", str(a)])
    main(["generate", "rgg", "9", "--seed", "5", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_verify_cut_matches(grid_file):
    g = grid_graph(4, 4)
    assert verify_cut(g, [v % 4 // 2 for v in range(16)]) == 4
