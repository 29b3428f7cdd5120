import csv
import io
import json
import subprocess
import sys

import pytest

from pickleball_markov.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_summary_certain_rallies(capsys):
    code, out, _ = run(capsys, "summary", "--system", "side-out", "--n", "11", "--pa", "1", "--pb", "1")
    record = json.loads(out)
    assert code == 0
    assert record["absorb_prob_A"]["exact"] == "1/1"
    assert record["mean_duration"]["exact"] == "11/1"
    assert record["duration_variance"]["exact"] == "0/1"


def test_summary_coin(capsys):
    code, out, _ = run(capsys, "summary", "--system", "modified-rally", "--n", "7",
                       "--pa", "0.45", "--pb", "0.45", "--first", "coin", "--digits", "6")
    record = json.loads(out)
    assert record["win_prob_A"]["exact"] == "1/2"
    assert len(record["sd_duration"].split(".")[1]) == 6


def test_advantage_point_value(capsys):
    code, out, _ = run(capsys, "advantage", "--system", "modified-rally", "--n", "21",
                       "--pa", "44/100", "--pb", "0.44", "--digits", "7")
    assert json.loads(out)["value"]["decimal"] == "-0.0137951"


def test_advantage_csv(capsys):
    code, out, _ = run(capsys, "advantage", "--system", "side-out", "--n", "11",
                       "--pa", "0.4", "--pb", "0.4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["scientific"] == "-2.16088e-11"
    assert rows[0]["sign"] == "-1"


def test_zeros_small(capsys):
    code, out, _ = run(capsys, "zeros", "--system", "modified-rally", "--n", "7", "--step", "1/16")
    record = json.loads(out)
    assert record["count"] == 1
    assert record["roots"][0]["root"] == "0.500000"


def test_extremum_small(capsys):
    code, out, _ = run(capsys, "extremum", "--system", "side-out", "--n", "5", "--mode", "min",
                       "--region", "0.1,0.9,0.1,0.9,0,2", "--grid-step", "1/8", "--point-tol", "1/100")
    record = json.loads(out)
    assert code == 0 and record["mode"] == "min"
    assert "e" in record["value"]["scientific"]


def test_figure_6_table(capsys):
    code, out, _ = run(capsys, "figure", "--id", "6", "--points", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 2 * 9 * 3
    assert {r["system"] for r in rows} == {"side-out-11", "modified-rally-21"}


def test_figure_sign_grid(capsys):
    code, out, _ = run(capsys, "figure", "--id", "3", "--grid", "4", "--format", "json")
    record = json.loads(out)
    assert len(record["rows"]) == 9
    assert record["columns"][:3] == ["system", "p_A", "p_B"]


def test_figure_diagonal(capsys):
    code, out, _ = run(capsys, "figure", "--id", "5", "--points", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4 * 2
    last = [r for r in rows if r["x"] == "1.000000"]
    assert all(r["advantage"] == "1.00000e+00" for r in last)


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "--system", "side-out", "--n", "11",
                       "--pa", "1", "--pb", "1", "--games", "10", "--seed", "0", "--advantage")
    assert json.loads(out)["advantage_estimate"] == 1.0


def test_oracle_check(capsys):
    code, out, _ = run(capsys, "oracle-check", "--form", "F11_FULL", "--points", "3")
    record = json.loads(out)
    assert code == 0 and record["failed"] == 0 and record["passed"] == 3


def test_dump(capsys):
    code, out, _ = run(capsys, "dump", "--system", "side-out", "--n", "4", "--pa", "1/2", "--pb", "1/3")
    assert "3-4-3 WIN_B 1/3" in out.splitlines()


def test_degenerate_is_exit_1(capsys):
    code, out, err = run(capsys, "summary", "--system", "side-out", "--n", "11", "--pa", "0", "--pb", "0")
    assert code == 1 and out == ""
    assert json.loads(err)["error"] == "DegenerateChainError"


def test_domain_error_is_exit_1(capsys):
    code, _, err = run(capsys, "advantage", "--system", "side-out", "--n", "3", "--pa", "0.5", "--pb", "0.5")
    assert code == 1
    assert "at least 4" in json.loads(err)["message"]


@pytest.mark.parametrize("argv", [
    ["summary", "--system", "tennis", "--n", "11", "--pa", "1", "--pb", "1"],
    ["summary", "--system", "side-out", "--n", "11", "--pa", "x", "--pb", "1"],
    ["figure", "--id", "9"],
    [],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pickleball_markov", "advantage", "--system", "hybrid-rally",
         "--n", "21", "--pa", "1", "--pb", "1"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(proc.stdout)["value"]["exact"] == "1/1"
