import csv
import json

import pytest

from orbitgauge import cli
from orbitgauge.lattice import GaugeField, Lattice, field_io_read, field_io_write


def run(*argv):
    return cli.main([str(a) for a in argv])


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0], list(csv.reader(lines[1:]))


def config_hash(path):
    first = path.read_text().splitlines()[0]
    if first.startswith("{"):
        return json.loads(first)["config_hash"]
    return first.rsplit("config-hash: ", 1)[1].strip()


@pytest.fixture
def sample(tmp_path):
    path = tmp_path / "u.field"
    assert run("sample", "--n1", 3, "--n2", 3, "--seed", 4, "-o", path) == 0
    return path


def test_sample_is_deterministic(tmp_path, sample):
    again = tmp_path / "again.field"
    other = tmp_path / "other.field"
    run("sample", "--n1", 3, "--n2", 3, "--seed", 4, "-o", again)
    run("sample", "--n1", 3, "--n2", 3, "--seed", 5, "-o", other)
    assert sample.read_bytes() == again.read_bytes()
    assert field_io_read(sample).links.tolist() != field_io_read(other).links.tolist()


def test_bad_extent_and_threads(tmp_path, monkeypatch):
    assert run("sample", "--n1", 1, "--n2", 3, "-o", tmp_path / "x") == 64
    monkeypatch.setenv("ORBITGAUGE_THREADS", "0")
    assert run("sample", "-o", tmp_path / "x") == 64
    monkeypatch.setenv("ORBITGAUGE_THREADS", "two")
    assert run("sample", "-o", tmp_path / "x") == 64
    monkeypatch.setenv("ORBITGAUGE_THREADS", "1")
    assert run("sample", "-o", tmp_path / "x") == 0


def test_unknown_subcommand():
    assert run("frobnicate") == 64


def test_gauge_fix(tmp_path, sample):
    out, rep = tmp_path / "fixed.field", tmp_path / "rep.jsonl"
    assert run("gauge-fix", "--input", sample, "-o", out, "--report", rep) == 0
    records = [json.loads(line) for line in rep.read_text().splitlines()]
    assert records[0]["command"] == "gauge-fix" and records[1]["singular"] is False
    ident = tmp_path / "id.field"
    field_io_write(ident, GaugeField.identity(Lattice(3, 3)))
    assert run("gauge-fix", "--input", ident, "-o", out) == 2


def test_malformed_input(tmp_path):
    bad = tmp_path / "bad.field"
    bad.write_text("orbitgauge v1 2 2\n0 0 1 2 0 0 0\n")
    assert run("gauge-fix", "--input", bad, "-o", tmp_path / "o") == 65
    assert run("gauge-fix", "--input", tmp_path / "missing", "-o", tmp_path / "o") == 65


def test_dist(tmp_path, sample):
    out = tmp_path / "d.csv"
    assert run("dist", sample, "-o", out, "--restarts", 1) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "pair,i,j,rho,iterations,converged"
    assert float(lines[2].split(",")[3]) <= 1e-6
    other = tmp_path / "v.field"
    run("sample", "--seed", 9, "-o", other)
    assert run("dist", sample, other, "-o", out, "--tol", 1e-300, "--max-sweeps", 2, "--restarts", 0) == 3


def test_invmetric_and_metric(tmp_path):
    field = tmp_path / "u.field"
    run("sample", "--n1", 2, "--n2", 2, "--seed", 1, "-o", field)
    out, rep = tmp_path / "g.csv", tmp_path / "r.jsonl"
    assert run("invmetric", "--input", field, "-o", out, "--report", rep) == 0
    _, rows = read_csv(out)
    assert rows[0] == ["coordinate", "(1,0,2):alpha"] and len(rows) == 2
    assert float(rows[1][1]) == pytest.approx(4.0)
    assert run("metric", "--input", field, "-o", out, "--report", rep) == 0
    assert json.loads(rep.read_text().splitlines()[1])["ok"] is True
    ident = tmp_path / "id.field"
    field_io_write(ident, GaugeField.identity(Lattice(3, 3)))
    assert run("invmetric", "--input", ident, "-o", out) == 2


def test_lb_apply(tmp_path, sample):
    out = tmp_path / "lb.jsonl"
    assert run("lb-apply", "--input", sample, "--function", "plaquette:1,1", "-o", out) == 0
    rec = json.loads(out.read_text().splitlines()[1])
    assert rec["gap"] <= 1e-5 * max(1.0, abs(rec["direct"]))
    assert run("lb-apply", "--input", sample, "--function", "plaquette:2,2", "-o", out) == 64


def test_geodesic(tmp_path):
    out = tmp_path / "geo.csv"
    assert run("geodesic", "--n1", 2, "--n2", 3, "--steps", 20, "-o", out) == 0
    _, rows = read_csv(out)
    assert rows[0][:3] == ["t", "flag_next", "(1,0,2):alpha"] and len(rows[0]) == 6
    assert len(rows) == 1 + 21


def test_config_file_and_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# settings\nn1 = 2\nn2 = 4\nseed = 3\n")
    a, b = tmp_path / "a.field", tmp_path / "b.field"
    assert run("sample", "--config", conf, "-o", a) == 0
    assert field_io_read(a).lattice == Lattice(2, 4)
    assert run("sample", "--config", conf, "--n2", 2, "-o", b) == 0
    assert field_io_read(b).lattice == Lattice(2, 2)
    assert config_hash(a) != config_hash(b)
    conf.write_text("colour = blue\n")
    assert run("sample", "--config", conf, "-o", a) == 64


def test_every_output_carries_the_hash(tmp_path, sample):
    outputs = {
        "gauge-fix": (["--input", sample, "-o", tmp_path / "f.field", "--report", tmp_path / "f.jsonl"],
                      ["f.field", "f.jsonl"]),
        "dist": ([sample, "-o", tmp_path / "d.csv", "--restarts", 0], ["d.csv"]),
        "metric": (["--input", sample, "-o", tmp_path / "m.csv", "--report", tmp_path / "m.jsonl"],
                   ["m.csv", "m.jsonl"]),
        "geodesic": (["--steps", 5, "-o", tmp_path / "g.csv"], ["g.csv"]),
    }
    for command, (args, files) in outputs.items():
        assert run(command, *args) == 0
        for name in files:
            text = (tmp_path / name).read_text()
            assert "config-hash: " in text.splitlines()[0] or '"config_hash"' in text.splitlines()[0]
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".") or p.suffix == ".tmp"]


def test_reruns_are_byte_identical(tmp_path, sample):
    first, second = tmp_path / "1.csv", tmp_path / "2.csv"
    run("metric", "--input", sample, "-o", first)
    run("metric", "--input", sample, "-o", second)
    assert first.read_bytes() == second.read_bytes()


def test_check_with_injected_fault(tmp_path, capsys):
    out = tmp_path / "check.jsonl"
    assert run("check", "--criteria", "2", "-o", out) == 0
    assert run("check", "--criteria", "2", "--inject-fault", "tree", "-o", out) == 1
    assert json.loads(out.read_text().splitlines()[1])["passed"] is False
    assert run("check", "--criteria", "12") == 64
