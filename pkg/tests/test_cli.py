"""End-to-end CLI tests via main(argv)."""

import pytest

from regsim.cli import main

CONFIG = """
[scenario]
algorithm = erato
topology = series
n_servers = 3
quorums = majority
n_readers = 1
n_writers = 1
[workload]
scheme = fixed
read_interval = 0.2
write_interval = 0.2
ops_per_client = 2
"""

GRID = """
[grid]
algorithm = erato, ohsam
seeds = 1
[scenario]
topology = series
n_servers = 3
quorums = majority
n_readers = 1
[workload]
read_interval = 0.2
write_interval = 0.2
ops_per_client = 1
"""


@pytest.fixture
def config_file(tmp_path):
    p = tmp_path / "scenario.ini"
    p.write_text(CONFIG)
    return p


def test_run_ok(config_file, tmp_path, capsys) -> None:
    code = main(["run", str(config_file), "--out-dir", str(tmp_path / "out"), "--seed", "3"])
    out = capsys.readouterr().out
    assert code == 0
    assert "scenario: erato on series" in out
    assert "seed 3" in out
    assert "atomicity: ok" in out
    assert (tmp_path / "out" / "trace.log").exists()
    assert (tmp_path / "out" / "results.csv").exists()
    assert (tmp_path / "out" / "verdict.txt").exists()


def test_run_bad_config(tmp_path, capsys) -> None:
    p = tmp_path / "bad.ini"
    p.write_text(CONFIG.replace("n_writers = 1", "n_writers = 2"))
    code = main(["run", str(p)])
    assert code == 2
    assert "SWMR requires one writer" in capsys.readouterr().err


def test_run_liveness_cap(config_file, capsys) -> None:
    code = main(["run", str(config_file), "--cap-seconds", "0.01"])
    assert code == 4
    assert "liveness" in capsys.readouterr().err


def test_check_ok_and_violation(config_file, tmp_path, capsys) -> None:
    out = tmp_path / "out"
    assert main(["run", str(config_file), "--out-dir", str(out)]) == 0
    capsys.readouterr()
    assert main(["check", str(out / "trace.log")]) == 0
    assert "atomicity: ok" in capsys.readouterr().out

    # Rewrite the last read response to return the initial tag: a write
    # has long completed by then, so the checker must object.
    lines = (out / "trace.log").read_text().splitlines()
    for i in range(len(lines) - 1, -1, -1):
        parts = lines[i].split("\t")
        if parts[0] == "res" and parts[2].startswith("r"):
            parts[5], parts[6], parts[7] = "0", "0", ""
            lines[i] = "\t".join(parts)
            break
    # The first read already returned the write's tag, so the rewound
    # response shows up as a read-read inversion.
    stale = tmp_path / "stale.log"
    stale.write_text("\n".join(lines) + "\n")
    assert main(["check", str(stale)]) == 3
    assert "VIOLATED (A1)" in capsys.readouterr().err


def test_check_incomplete_trace(config_file, tmp_path, capsys) -> None:
    out = tmp_path / "capped"
    main(["run", str(config_file), "--cap-seconds", "0.01", "--out-dir", str(out)])
    capsys.readouterr()
    assert main(["check", str(out / "trace.log")]) == 4
    assert "pending" in capsys.readouterr().err


def test_sweep_and_report(tmp_path, capsys) -> None:
    grid = tmp_path / "grid.ini"
    grid.write_text(GRID)
    out = tmp_path / "sweep"
    assert main(["sweep", str(grid), "--out-dir", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "sweep: 2 runs" in printed
    assert (out / "aggregate.csv").exists()

    cell_csvs = sorted(str(p) for p in out.glob("*_series_*.csv"))
    assert len(cell_csvs) == 2
    assert main(["report", *cell_csvs]) == 0
    report = capsys.readouterr().out
    assert "erato" in report and "ohsam" in report
    assert "read" in report and "write" in report

    # The aggregate file has a different schema and must be refused, not
    # misparsed.
    assert main(["report", str(out / "aggregate.csv")]) == 2
    assert "not a per-operation csv" in capsys.readouterr().err


def test_report_empty(tmp_path, capsys) -> None:
    p = tmp_path / "empty.csv"
    from regsim.harness import CSV_HEADER

    p.write_text(CSV_HEADER + "\n")
    assert main(["report", str(p)]) == 0
    assert "no operations" in capsys.readouterr().err
