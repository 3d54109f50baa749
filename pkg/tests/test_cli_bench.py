import csv
import io

import pytest

from larsengine.asp import NonStratified, stratify
from larsengine.bench import CSV_FIELDS, benchmark, check_stratified, write_csv
from larsengine.cli import main
from larsengine.scenarios import generate, scenario_a_program, scenario_b_program
from larsengine.static import lars_to_asp


def test_scenario_generation_is_seeded():
    for setup in ("A1", "A2", "B1", "B2"):
        _, s1 = generate(setup[0], setup, 5, 30, 4)
        _, s2 = generate(setup[0], setup, 5, 30, 4)
        _, s3 = generate(setup[0], setup, 5, 30, 5)
        assert s1 == s2 and len(s1) == 30
        assert s1 != s3


def test_scenario_a_holds_modes():
    _, sched = generate("A", "A1", 3, 12, 1)
    assert all(len(x) == 1 and 0 <= x[0].args[0] <= 30 for x in sched)


def test_stratification_of_scenarios():
    assert isinstance(stratify(lars_to_asp(scenario_a_program("A1", 5), 0)), dict)
    assert isinstance(stratify(lars_to_asp(scenario_b_program(5), 0)), NonStratified)
    with pytest.raises(ValueError):
        check_stratified(scenario_b_program(5))


def test_benchmark_report_and_csv():
    rep = benchmark("A1", "incremental", 3, 10, runs=1, warmup=0)
    assert rep.ticks == 19  # ten time increments plus nine further signals
    assert rep.t_total >= rep.t_init > 0
    buf = io.StringIO()
    write_csv([rep], buf)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert tuple(rows[0]) == CSV_FIELDS and rows[0]["strategy"] == "incremental"
    with pytest.raises(ValueError):
        benchmark("A1", "incremental", 3, 10, runs=0)


def test_cli_streams_models(tmp_path, capsys):
    prog = tmp_path / "diamond.lars"
    prog.write_text("b(X) :- [2 t] <> a(X).\n")
    sig = tmp_path / "diamond.stream"
    sig.write_text("5 a(y)\n")
    assert main(["--program", str(prog), "--strategy", "incremental", "--input", str(sig), "--until", "7"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[-1] == "@7 model: b(y)"
    assert out[5] == "@5 model: a(y) b(y)"


def test_cli_usage_and_errors(tmp_path, capsys):
    assert main([]) == 2
    bad = tmp_path / "bad.lars"
    bad.write_text("b :- [2 x] <> a.\n")
    assert main(["--program", str(bad)]) == 1
    assert "line 1" in capsys.readouterr().err


def test_cli_dump_encoding(tmp_path, capsys):
    prog = tmp_path / "p.lars"
    prog.write_text("b(X) :- [2 t] <> a(X).\n")
    assert main(["--program", str(prog), "--dump-encoding", "--until", "7"]) == 0
    out = capsys.readouterr().out
    assert "now(7)." in out


def test_cli_bench_csv(tmp_path):
    out = tmp_path / "r.csv"
    rc = main(["--bench", "A", "--setup", "A2", "--window", "3", "--timepoints", "8", "--runs", "1", "--warmup", "0", "--csv", str(out)])
    assert rc == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["strategy"] for r in rows] == ["oneshot", "incremental"]
