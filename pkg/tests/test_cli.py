import math
from pathlib import Path

import pytest

from trapcorr.cli import main
from trapcorr.rk import FEHLBERG7, format_tableau

DATA = Path(__file__).parent / "data"

SIN_ARGS = ["--f", "sin(x)", "--a", "1", "--b", "10", "--x0", "5", "--h", "0.01"]


def stderr_lines(capsys):
    return [ln for ln in capsys.readouterr().err.splitlines() if ln]


# ------------------------------------------------------------- success

def test_integrate_writes_csv(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code = main(["integrate", *SIN_ARGS, "--out", str(out)])
    assert code == 0
    assert capsys.readouterr().err == ""
    lines = out.read_text().splitlines()
    assert lines[0] == "x,xi,trapezium,error_term,corrected,reference,residual"
    assert len(lines) == 902
    last = lines[-1].split(",")
    assert float(last[0]) == 10.0
    assert abs(float(last[4]) - (math.cos(1.0) - math.cos(10.0))) < 1e-9


def test_integrate_to_stdout(capsys):
    code = main(["integrate", "--f", "sin(x)", "--a", "1", "--b", "2",
                 "--x0", "1.5", "--h", "0.01"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("x,xi,trapezium")
    assert out.endswith("\n")


def test_xi_curve_columns(tmp_path):
    out = tmp_path / "xi.csv"
    code = main(["xi-curve", *SIN_ARGS, "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,xi"
    assert lines[1] == "1,"


def test_default_x0_is_midpoint(capsys):
    code = main(["integrate", "--f", "sin(x)", "--a", "1", "--b", "9",
                 "--h", "0.01"])
    assert code == 0
    out = capsys.readouterr().out
    assert any(line.startswith("5,") for line in out.splitlines())


def test_order_test_reports_declared_order(capsys):
    assert main(["order-test"]) == 0
    out = capsys.readouterr().out
    assert "declared order 7" in out
    assert "7.0" in out  # measured slope


def test_tableau_check_builtin(capsys):
    assert main(["tableau-check"]) == 0
    out = capsys.readouterr().out
    assert "11 stages" in out
    assert out.rstrip().endswith("OK")


def test_tableau_check_file(tmp_path, capsys):
    path = tmp_path / "f7.tab"
    path.write_text(format_tableau(FEHLBERG7), encoding="ascii")
    assert main(["tableau-check", "--tableau", str(path)]) == 0


def test_verbose_notes(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code = main(["integrate", *SIN_ARGS, "--out", str(out), "-v"])
    assert code == 0
    err = capsys.readouterr().err
    assert "[curve]" in err and "rows" in err


# ------------------------------------------------------------ help text

def test_no_args_prints_help(capsys):
    assert main([]) == 0
    assert "usage: trapcorr" in capsys.readouterr().out


def test_main_help_golden(capsys):
    assert main(["--help"]) == 0
    assert capsys.readouterr().out == (DATA / "help_main.txt").read_text()


def test_integrate_help_golden(capsys):
    assert main(["integrate", "--help"]) == 0
    assert capsys.readouterr().out == (DATA / "help_integrate.txt").read_text()


# ------------------------------------------------------- error mapping

def test_expression_syntax_error_exit_2(capsys):
    code = main(["integrate", "--f", "2+*x", "--a", "1", "--b", "10",
                 "--x0", "5", "--h", "0.01"])
    assert code == 2
    lines = stderr_lines(capsys)
    assert len(lines) == 1
    assert "[parse]" in lines[0] and "offset 2" in lines[0]


def test_unknown_flag_exit_2(capsys):
    code = main(["integrate", "--frobnicate", "1"])
    assert code == 2
    lines = stderr_lines(capsys)
    assert len(lines) == 1
    assert "[args]" in lines[0]


def test_singular_denominator_exit_3_and_shift_remedy(tmp_path, capsys):
    base = ["integrate", "--f", "x^2", "--a", "0", "--b", "4", "--x0", "2",
            "--h", "0.01"]
    code = main(base)
    assert code == 3
    lines = stderr_lines(capsys)
    assert len(lines) == 1
    assert "[ode]" in lines[0]
    assert "--shift-D 1" in lines[0]

    out = tmp_path / "sq.csv"
    code = main(base + ["--shift-D", "1", "--out", str(out)])
    assert code == 0
    last = out.read_text().splitlines()[-1].split(",")
    assert abs(float(last[4]) - 64.0 / 3.0) < 1e-10


def test_no_root_exit_4(capsys):
    # default root tolerance is far below the ~1e4-magnitude residual
    # noise of this integrand, so the bootstrap cannot certify its root
    code = main(["integrate", "--f", "x^2*(sin(x)*ln(2+x)-100*x)",
                 "--a", "1", "--b", "10", "--x0", "5", "--h", "0.01",
                 "--ref-tol", "1e-9"])
    assert code == 4
    lines = stderr_lines(capsys)
    assert len(lines) == 1
    assert "[init]" in lines[0]


def test_exotic_runs_with_scaled_tolerances(tmp_path):
    out = tmp_path / "exotic.csv"
    code = main(["integrate", "--f", "x^2*(sin(x)*ln(2+x)-100*x)",
                 "--a", "1", "--b", "10", "--x0", "5", "--h", "0.01",
                 "--ref-tol", "1e-9", "--root-tol", "1e-8",
                 "--out", str(out)])
    assert code == 0


@pytest.mark.parametrize("args", [
    ["--f", "sin(x)", "--a", "10", "--b", "1", "--x0", "5", "--h", "0.01"],
    ["--f", "sin(x)", "--a", "1", "--b", "10", "--x0", "11", "--h", "0.01"],
    ["--f", "sin(x)", "--a", "1", "--b", "10", "--x0", "5", "--h", "2"],
    ["--f", "sin(x)", "--a", "1", "--b", "10", "--x0", "1.05", "--h", "0.01"],
])
def test_invalid_configuration_exit_5(args, capsys):
    code = main(["integrate", *args])
    assert code == 5
    lines = stderr_lines(capsys)
    assert len(lines) == 1
    assert "[config]" in lines[0]


def test_domain_error_exit_5(capsys):
    code = main(["integrate", "--f", "ln(x-2)", "--a", "1", "--b", "10",
                 "--x0", "5", "--h", "0.01"])
    assert code == 5
    assert len(stderr_lines(capsys)) == 1


def test_unwritable_output_exit_6(capsys):
    code = main(["integrate", *SIN_ARGS, "--out", "/nonexistent-dir/x.csv"])
    assert code == 6
    lines = stderr_lines(capsys)
    assert len(lines) == 1
    assert "[output]" in lines[0]


def test_missing_tableau_file_exit_6(capsys):
    code = main(["integrate", *SIN_ARGS, "--tableau", "/nonexistent.tab"])
    assert code == 6
    assert len(stderr_lines(capsys)) == 1


def test_close_seed_warning(capsys):
    code = main(["integrate", "--f", "sin(x)", "--a", "1", "--b", "2",
                 "--x0", "1.3", "--h", "0.01"])
    assert code == 0
    err = capsys.readouterr().err
    assert "warning" in err and "[config]" in err
