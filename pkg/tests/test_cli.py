"""
Тесты командной строки.
"""

import pytest

from app.cli import build_parser, run_cli
from app.cli.handlers.common import AOA_COMPARISON_COLUMNS
from app.services.arrivals_service import parse_bellhop_arrivals
from app.services.csv_service import parse_csv, read_csv
from app.services.fitting_service import FIT_COLUMNS


async def test_trace_is_reproducible(tmp_path):
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert await run_cli(["trace", "--out", str(first)]) == 0
    assert await run_cli(["trace", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    header, rows = read_csv(first)
    assert header[0] == "aoa_rad"
    assert len(rows) == 17
    # первая строка - прямой луч
    assert rows[0][1][3:] == ["0", "0"]


async def test_trace_arrivals_format(capsys):
    assert await run_cli(["trace", "--format", "arr"]) == 0
    table = parse_bellhop_arrivals(capsys.readouterr().out)
    assert len(table.rays()) == 17


async def test_invalid_config_exits_with_error(write_config, capsys):
    path = write_config("scenario.range_m = -1\n")
    assert await run_cli(["trace", "--config", str(path)]) == 1
    assert capsys.readouterr().out == ""


async def test_missing_arrivals_file(tmp_path):
    assert await run_cli(["parse-arrivals", "--arrivals", str(tmp_path / "absent.arr")]) == 1


async def test_parse_arrivals(fixtures_dir, capsys):
    assert await run_cli(["parse-arrivals", "--arrivals", str(fixtures_dir / "two_ranges.arr")]) == 0
    header, rows = parse_csv(capsys.readouterr().out)
    assert header[:3] == ["tx_index", "rx_depth_index", "rx_range_index"]
    assert [fields[2] for _, fields in rows] == ["0", "0", "0", "1", "1"]


async def test_malformed_arrivals_exit_code(fixtures_dir):
    assert await run_cli(["parse-arrivals", "--arrivals", str(fixtures_dir / "short_record.arr")]) == 1


async def test_fit_from_points(fixtures_dir, capsys):
    assert await run_cli(["fit", "--points", str(fixtures_dir / "points_synthetic.csv")]) == 0
    header, rows = parse_csv(capsys.readouterr().out)
    assert tuple(header) == FIT_COLUMNS
    values = dict(zip(header, rows[0][1]))
    assert float(values["lambda"]) == pytest.approx(1e-3, rel=1e-6)
    assert values["converged"] == "true"


async def test_capacity_small_run(tmp_path):
    out = tmp_path / "capacity.csv"
    assert await run_cli(["capacity", "--trials", "500", "--seed", "3", "--out", str(out)]) == 0
    text = out.read_text(encoding="utf-8")
    assert "# seed: 3" in text
    assert "# trials: 500" in text
    header, rows = parse_csv(text)
    values = dict(zip(header, rows[0][1]))
    assert float(values["c_mc_vector"]) > float(values["c_mc_siso"])
    assert int(values["n_paths"]) == 17


async def test_sweep_without_axis_fails():
    assert await run_cli(["sweep", "--trials", "100"]) == 1


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
    with pytest.raises(SystemExit):
        build_parser().parse_args(["fit", "--points", "a.csv", "--arrivals", "b.arr"])


async def test_invalid_utf8_arrivals_exit_code(tmp_path):
    path = tmp_path / "broken.arr"
    path.write_bytes(b"'2D'\n\xff5000.0\n")
    assert await run_cli(["parse-arrivals", "--arrivals", str(path)]) == 1


async def test_compare_aoa_models_table(write_config, capsys):
    path = write_config("capacity.snr_reference = path\ncapacity.snr_db_values = 10\nchannel.n_rays = 5\n")
    argv = ["compare", "--aoa-models", "--config", str(path), "--trials", "500", "--seed", "1"]
    assert await run_cli(argv) == 0
    text = capsys.readouterr().out
    assert "# aoa_spread: matched variance" in text
    header, rows = parse_csv(text)
    assert tuple(header) == AOA_COMPARISON_COLUMNS
    values = dict(zip(header, rows[0][1]))
    assert float(values["snr_db"]) == 10.0
    assert int(values["n_paths"]) == 5


async def test_truncated_model_leaves_closed_bound_empty(write_config, tmp_path):
    path = write_config("channel.aoa_model = gaussian\nchannel.n_rays = 3\n")
    out = tmp_path / "capacity.csv"
    assert await run_cli(["capacity", "--config", str(path), "--trials", "300", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    values = dict(zip(header, rows[0][1]))
    assert values["c_ub_closed"] == ""
    assert float(values["c_ub_quadrature"]) > 0.0
