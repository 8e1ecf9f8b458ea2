"""The command-line harness, driven in-process through ``main``."""

import io
import math

import pytest

from expsampling.cli import EXIT_MISMATCH, EXIT_PASS, EXIT_USAGE, main
from expsampling.io import read_csv


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(*argv):
    code, out, err = run(*argv)
    assert code == EXIT_PASS, err
    return read_csv(out)


@pytest.mark.parametrize("table_id, t_limit", [(1, 2.75), (2, 2.25), (3, 1.25)])
def test_tables(table_id, t_limit):
    table = rows("table", str(table_id))
    assert [float(r["w"]) for r in table] == [5, 10, 20, 50, 100, 200]
    assert all(float(r["predicted_limit"]) == t_limit for r in table)


def test_table_one_values():
    table = rows("table", "1")
    assert float(table[0]["value"]) == pytest.approx(3.0036, abs=1e-3)
    assert float(table[-1]["abs_diff"]) < 6e-3


def test_unknown_table_is_usage_error():
    assert run("table", "4")[0] == EXIT_USAGE


def test_figure_one_kernel_vanishes_at_one():
    points = rows("figure", "1")
    assert len(points) == 2001
    assert float(points[1000]["t"]) == 1.0 and float(points[1000]["chi"]) == 0.0


def test_figure_two_near_continuity_point():
    points = rows("figure", "2")
    assert list(points[0]) == ["t", "f", "S_5f"] and len(points) == 2000
    near = min(points, key=lambda r: abs(float(r["t"]) - 2.0))
    assert float(near["f"]) == 3.0
    assert float(near["S_5f"]) == pytest.approx(3.0, abs=0.3)


def test_figure_three_columns():
    points = rows("figure", "3", "--w", "20")
    assert list(points[0]) == ["t", "f", "S_20f"]


def test_jump_at_seven_halves():
    table = rows("jump", "--t", "7/2")
    assert {r["alignment"] for r in table} == {"nonaligned"}
    for r in table:
        assert float(r["value"]) == pytest.approx(2.25, abs=1e-6)
        assert r["kernel-id"] == "paper-combo" and r["signal-id"] == "three-jump"


def test_jump_defaults_to_breakpoints():
    table = rows("jump", "--w", "50")
    assert [float(r["t"]) for r in table] == [1.5, 3.5, 5.5]


def test_diverge_b2():
    code, out, err = run("diverge", "--kernel", "bspline2")
    assert code == EXIT_PASS
    table = read_csv(out)
    last = {r["sequence"]: float(r["value"]) for r in table if r["m"] == "40"}
    assert abs(last["aligned"] - last["offset"]) == pytest.approx(0.5, abs=1e-3)
    assert "no limit" in err


def test_diverge_reference_kernel_agrees():
    code, _, err = run("diverge")
    assert code == EXIT_PASS and "subsequences agree" in err


def test_kernel_check_pass_and_fail():
    code, out, _ = run("kernel-check")
    assert code == EXIT_PASS and "pass = true" in out
    code, out, err = run("kernel-check", "--kernel", "bspline2")
    assert code == EXIT_MISMATCH and "alpha_estimate = non-constant" in out


def test_kernel_check_jackson_reports_chi_one():
    code, out, err = run("kernel-check", "--kernel", "jackson")
    assert code == EXIT_MISMATCH
    assert "half_line_hypothesis = false" in out
    assert "chi(1) != 0" in err and "warning:" in err


def test_rate():
    table = rows("rate", "--w", "10,100")
    assert [r["pass"] for r in table] == ["true", "true"]
    assert float(table[1]["empirical"]) <= float(table[1]["bound"])


def test_roundoff_zero_xi():
    table = rows("roundoff", "--xi", "0")
    assert float(table[0]["empirical"]) == 0.0 and table[0]["pass"] == "true"


def test_roundoff_adversarial_is_tight():
    table = rows("roundoff", "--kernel", "bspline2", "--signal", "linear", "--mode", "adversarial")
    assert float(table[0]["empirical"]) / float(table[0]["bound"]) >= 0.999


def test_jitter_rejected_is_reported():
    code, _, err = run("jitter", "--signal", "three-jump", "--rho", "0.05")
    assert code == EXIT_MISMATCH and "JitterRejected" in err and "k=" in err


def test_out_file(tmp_path):
    path = tmp_path / "t1.csv"
    code, out, _ = run("table", "1", "--out", str(path))
    assert code == EXIT_PASS and out == ""
    assert path.read_text().startswith("w,value,predicted_limit,abs_diff\n")


def test_dump_config_reproduces_run(tmp_path):
    argv = ["roundoff", "--kernel", "bspline3", "--w", "20,40", "--seed", "9", "--trials", "3"]
    code, dumped, _ = run(*argv, "--dump-config")
    assert code == EXIT_PASS
    path = tmp_path / "run.ini"
    path.write_text(dumped)
    assert run(*argv)[1] == run("roundoff", "--config", str(path))[1]


def test_flags_override_config(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[experiment]\nw = 5\n")
    table = rows("jump", "--config", str(path), "--w", "10", "--t", "3/2")
    assert [float(r["w"]) for r in table] == [10.0]


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    [],
    ["table", "1", "--kernel", "bspline(0)"],
    ["rate", "--w", "a,b"],
    ["rate", "--config", "/nonexistent/run.ini"],
    ["jump", "--signal", "unknown"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == EXIT_USAGE


def test_config_error_has_line(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[experiment]\nw = 5\nseed = x\n")
    code, _, err = run("rate", "--config", str(path))
    assert code == EXIT_USAGE and "line 3" in err


def test_domain_error_exits_one():
    code, _, err = run("rate", "--nu", "1.5")
    assert code == EXIT_MISMATCH and "nu" in err


def test_same_seed_same_bytes():
    first = run("jitter", "--seed", "5", "--trials", "4")[1]
    assert first == run("jitter", "--seed", "5", "--trials", "4")[1]
    assert not math.isnan(float(read_csv(first)[0]["empirical"]))
