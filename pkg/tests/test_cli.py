import json

import numpy as np
import pandas as pd
import pytest

from main import EXIT_OK, EXIT_USAGE, main
from src.geometry import write_points_csv


@pytest.fixture
def point_files(tmp_path):
    rng = np.random.default_rng(11)
    first, second = tmp_path / "x1.csv", tmp_path / "x2.csv"
    write_points_csv(rng.standard_normal((10, 2)), first)
    write_points_csv(rng.standard_normal((12, 2)) + 0.5, second)
    return first, second


def test_test_command_prints_report(point_files, capsys):
    first, second = point_files
    args = ["test", str(first), str(second), "--lambda", "1.0", "--permutations", "50", "--seed", "3"]
    assert main(["--workers", "1", *args]) == EXIT_OK
    serial = capsys.readouterr().out
    report = json.loads(serial)
    assert report["test_name"] == "fr-smooth"
    assert report["lambda"] == 1.0
    assert (report["n1"], report["n2"]) == (10, 12)
    assert "t_stat" in report and "p_normal" in report

    assert main(["--workers", "4", *args]) == EXIT_OK
    assert capsys.readouterr().out == serial


def test_classical_report_omits_smoothing_fields(point_files, capsys):
    first, second = point_files
    assert main(["test", str(first), str(second), "--test", "fr", "--permutations", "20"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert "lambda" not in report and "t_stat" not in report


def test_missing_file_is_usage_error(point_files, tmp_path, capsys):
    missing = tmp_path / "missing.csv"
    assert main(["test", str(point_files[0]), str(missing)]) == EXIT_USAGE
    assert "missing.csv" in capsys.readouterr().err


def test_dimension_mismatch_is_usage_error(point_files, tmp_path, capsys):
    wide = tmp_path / "wide.csv"
    write_points_csv(np.zeros((5, 3)) + np.arange(5)[:, None], wide)
    assert main(["test", str(point_files[0]), str(wide), "--permutations", "10"]) == EXIT_USAGE


def test_gamma_with_bandwidth_is_usage_error(point_files, capsys):
    first, second = point_files
    argv = ["test", str(first), str(second), "--test", "mmd", "--gamma", "0.5", "--bandwidth", "1.0"]
    assert main(argv) == EXIT_USAGE
    assert "gamma" in capsys.readouterr().err


def test_unknown_test_name_exits_from_parser(point_files):
    with pytest.raises(SystemExit) as info:
        main(["test", str(point_files[0]), str(point_files[1]), "--test", "wald-wolfowitz"])
    assert info.value.code == 2


def test_learn_writes_reproducible_outputs(tmp_path):
    argv = ["learn", "--steps", "3", "--batch", "16", "--lr", "0.01", "--eval-batches", "1"]
    assert main([*argv, "--output-dir", str(tmp_path / "a")]) == EXIT_OK
    assert main([*argv, "--output-dir", str(tmp_path / "b")]) == EXIT_OK
    for name in ["samples.csv", "loss.csv", "generator.json", "evaluation.json", "scatter.svg", "loss.svg"]:
        assert (tmp_path / "a" / name).is_file()
    assert (tmp_path / "a" / "scatter.svg").read_bytes() == (tmp_path / "b" / "scatter.svg").read_bytes()
    assert len(pd.read_csv(tmp_path / "a" / "loss.csv")) == 3
    generator = json.loads((tmp_path / "a" / "generator.json").read_text())
    assert generator["architecture"] == "affine"


def test_power_and_diagnostics_write_tables(tmp_path):
    argv = ["power", "--dims", "2", "--n", "8", "--trials", "2", "--tests", "fr", "mmd",
            "--permutations", "9", "--output-dir", str(tmp_path)]
    assert main(argv) == EXIT_OK
    table = pd.read_csv(tmp_path / "power.csv")
    assert table["test"].tolist() == ["fr", "mmd"]
    assert (tmp_path / "power.svg").is_file()

    argv = ["diagnostics", "--n", "12", "--lambdas", "1.0", "--replicates", "2", "--permutations", "10",
            "--output-dir", str(tmp_path)]
    assert main(argv) == EXIT_OK
    assert len(pd.read_csv(tmp_path / "diagnostics_summary.csv")) == 1
    assert len(pd.read_csv(tmp_path / "diagnostics_pairs.csv")) == 2


def test_mnist_subcommand_is_not_offered():
    with pytest.raises(SystemExit) as info:
        main(["mnist"])
    assert info.value.code == 2
