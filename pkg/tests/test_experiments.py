import numpy as np
import pytest

from src.cli.experiments import main, slopes
from src.cli.tables import read_errors, read_iterations


def test_run_writes_the_iteration_table(tmp_path, capsys):
    assert main(["run", "--test", "1", "--n", "4", "--out", str(tmp_path)]) == 0
    path = tmp_path / "test1-n4.txt"
    records = read_iterations(path)
    assert path.read_text().startswith("k residual damping\n")
    assert 1 <= len(records) <= 18
    assert records[-1].residual <= 1e-10
    assert all(r.residual > 0 for r in records)
    assert "l_inf" in capsys.readouterr().out


def test_run_is_reproducible(tmp_path):
    for out in ("a", "b"):
        assert main(["run", "--test", "2", "--n", "2", "--out", str(tmp_path / out)]) == 0
    assert (tmp_path / "a" / "test2-n2.txt").read_bytes() == (tmp_path / "b" / "test2-n2.txt").read_bytes()


def test_invalid_test_id_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(["run", "--test", "9", "--n", "4", "--out", str(tmp_path)])
    assert excinfo.value.code == 2


def test_invalid_n_fails(tmp_path):
    assert main(["run", "--test", "1", "--n", "5", "--out", str(tmp_path)]) == 1
    assert not any(tmp_path.iterdir())


def test_iteration_limit_fails(tmp_path):
    assert main(["run", "--test", "1", "--n", "4", "--max-iter", "1", "--tol", "1e-14", "--out", str(tmp_path)]) == 1


def test_sweep(tmp_path, capsys):
    assert main(["sweep", "--test", "1", "--n-list", "4", "2", "--out", str(tmp_path)]) == 0
    table = read_errors(tmp_path / "test1.txt")
    assert list(table["N"]) == [9, 25]
    assert (tmp_path / "test1-n2.txt").exists()
    assert (tmp_path / "test1-n4.txt").exists()
    out = capsys.readouterr().out
    assert "Linfty slope" in out and "L1 slope" in out


def test_rates(tmp_path, capsys):
    path = tmp_path / "test1.txt"
    path.write_text("N Linfty L2 L1\n10 1 1 1\n1000 0.1 0.1 0.1\n")
    assert main(["rates", str(path)]) == 0
    out = capsys.readouterr().out
    assert out.count("-0.500") == 3


def test_rates_of_a_single_row(tmp_path):
    path = tmp_path / "test1.txt"
    path.write_text("N Linfty L2 L1\n10 1 1 1\n")
    assert main(["rates", str(path)]) == 1


def test_rates_of_a_missing_file(tmp_path):
    assert main(["rates", str(tmp_path / "missing.txt")]) == 1


def test_slopes_round_trip_a_written_table(tmp_path):
    main(["sweep", "--test", "2", "--n-list", "2", "4", "--out", str(tmp_path)])
    rates = slopes(read_errors(tmp_path / "test2.txt"))
    assert set(rates) == {"Linfty", "L2", "L1"}
    assert all(np.isfinite(rate) for rate in rates.values())


def test_grid(tmp_path):
    assert main(["grid", "--test", "5", "--n", "4", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "grid5-n4.txt").read_text().splitlines()
    assert lines[0] == "x y weight"
    assert len(lines) == 26


def test_diagnostics(capsys):
    assert main(["diagnostics", "--test", "1", "--n", "4"]) == 0
    out = capsys.readouterr().out
    assert "R_lower" in out and "r_upper" in out and "N          25" in out


@pytest.mark.slow
def test_sweep_in_parallel_matches_serial(tmp_path):
    args = ["sweep", "--test", "3", "--n-list", "2", "4", "8"]
    assert main(args + ["--out", str(tmp_path / "serial")]) == 0
    assert main(args + ["--threads", "2", "--out", str(tmp_path / "parallel")]) == 0
    serial = read_errors(tmp_path / "serial" / "test3.txt")
    parallel = read_errors(tmp_path / "parallel" / "test3.txt")
    assert serial.equals(parallel)
