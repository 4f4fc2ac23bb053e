import csv
import io
import json
import os

import pytest

from secure_rdi import commands
from secure_rdi.errors import UsageError
from secure_rdi.commands import EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, \
    RunConfig, execute, reload_report, reproduce_figure, run

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")

SIMPLE_PMF = {
    "axes": [{"name": "X", "size": 2}, {"name": "Y", "size": 2},
             {"name": "Z", "size": 2}],
    "probs": [0.32, 0.08, 0.02, 0.08, 0.08, 0.02, 0.08, 0.32],
}


def load_config(name, **overrides):
    with open(os.path.join(CONFIGS, name)) as f:
        data = json.load(f)
    data.update(overrides)
    return data


def read_rows(path):
    with open(path) as f:
        return list(csv.DictReader(f))


def test_sweep_erased_hamming(tmp_path):
    result = run(load_config("erased_hamming.json"), str(tmp_path))
    assert result.status == EXIT_OK
    assert sorted(os.listdir(str(tmp_path))) == ["erased-Y-hamming.csv",
                                                 "sweep.json"]
    rows = read_rows(str(tmp_path / "erased-Y-hamming.csv"))
    assert len(rows) == 11
    assert float(rows[0]["Delta"]) == pytest.approx(0.278072, abs=1e-6)
    for row in rows:
        if float(row["D"]) >= 0.4:
            assert float(row["Delta"]) == pytest.approx(0.029049, abs=1e-6)
            assert float(row["R"]) == 0.0
    assert not result.result.violations


def test_gaussian_point(tmp_path):
    result = run(load_config("gaussian_point.json"), str(tmp_path))
    assert result.status == EXIT_OK
    rows = read_rows(str(tmp_path / "gaussian-W-Z-X-Y.csv"))
    assert len(rows) == 1
    assert list(rows[0]) == ["D", "R", "Delta", "Rh"]
    values = [float(rows[0][k]) for k in ("D", "R", "Delta", "Rh")]
    assert values == pytest.approx([0.5, 0.292481, 0.292481, 0.5], abs=1e-6)


def test_helper_rate_sweep():
    result = execute(load_config("helper_logloss.json"))
    curve, = result.curves
    assert curve.key == "R_h"
    assert curve.keys() == [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    assert curve.points[0].Delta == pytest.approx(0.7, abs=1e-9)


def test_decreasing_grid_writes_nothing(tmp_path, mocker):
    writer = mocker.spy(commands, "write_artifacts")
    out = tmp_path / "out"
    result = run(load_config("erased_hamming.json", D_grid=[0.2, 0.1]),
                 str(out))
    assert result.status == EXIT_USAGE
    assert "strictly increasing" in result.message
    assert not writer.called
    assert not out.exists()


def test_infeasible_distortion(tmp_path):
    config = {"command": "region", "pmf": SIMPLE_PMF, "D": 0.1,
              "distortion": {"matrix": [[0.5, 1.0], [1.0, 0.5]]}}
    result = run(config, str(tmp_path))
    assert result.status == EXIT_INFEASIBLE
    assert os.listdir(str(tmp_path)) == []


@pytest.mark.parametrize("overrides", [
    {"command": "teleport"},
    {"D": 0.1, "D_grid": None, "erasure": {"case": "erased-Y-hamming"},
     "pmf": SIMPLE_PMF},
    {"workers": 0},
    {"log_level": "LOUD"},
    {"variables": {"q": "Q"}},
    {"bogus": 1},
])
def test_invalid_config(overrides):
    data = load_config("erased_hamming.json", **overrides)
    data = {k: v for k, v in data.items() if v is not None}
    with pytest.raises(UsageError):
        RunConfig.from_dict(data)


def test_stochastic_command_needs_seed():
    config = load_config("lemma_bsc.json")
    del config["seed"]
    assert run(config).status == EXIT_USAGE


def test_region_rejects_grid():
    config = load_config("erased_hamming.json", command="region")
    with pytest.raises(UsageError):
        execute(config)


def test_region_helper_rate_mismatch():
    config = {"command": "region", "D": 0.1, "R_h": 0.2,
              "erasure": {"case": "erased-Y-hamming"}}
    with pytest.raises(UsageError):
        execute(config)


def test_region_pmf_open(tmp_path):
    config = {"command": "region", "pmf": SIMPLE_PMF, "D": 0.1,
              "output": str(tmp_path)}
    result = run(config)
    assert result.status == EXIT_OK
    point, = result.result.curves[0].points
    assert point.R >= 0.0
    assert os.path.exists(str(tmp_path / "pmf-open.csv"))


def test_lemma_csv_identical_for_same_seed(tmp_path):
    config = load_config("lemma_bsc.json")
    config["parameters"].update(n=6, codebooks=2)
    first, second = tmp_path / "a", tmp_path / "b"
    assert run(config, str(first)).status == EXIT_OK
    assert run(config, str(second)).status == EXIT_OK
    assert (first / "lemma.csv").read_bytes() == \
        (second / "lemma.csv").read_bytes()
    rows = read_rows(str(first / "lemma.csv"))
    assert len(rows) == 12
    for row in rows:
        assert float(row["delta"]) >= 0.0
        assert float(row["slack"]) == pytest.approx(
            float(row["bound"]) - float(row["value"]), abs=1e-9)
        if float(row["R_K"]) == 0.0:
            assert float(row["delta"]) == pytest.approx(0.0, abs=1e-12)


def test_codeword_lemma_needs_rate():
    config = load_config("lemma_bsc.json")
    config["parameters"].update(lemma="codeword")
    with pytest.raises(UsageError):
        execute(config)


def test_simulate_small(tmp_path):
    config = load_config("simulate_bsc.json")
    config["parameters"].update(n=2, trials=200, codebooks=2)
    result = run(config, str(tmp_path))
    assert result.status == EXIT_OK
    rows = read_rows(str(tmp_path / "simulation.csv"))
    assert [int(row["seed"]) for row in rows] == [1, 2]
    assert all(float(row["leakage"]) >= 0.0 for row in rows)
    report = json.loads((tmp_path / "simulate.json").read_text())
    assert len(report["details"]["reports"]) == 2


def test_simulate_block_too_long():
    config = load_config("simulate_bsc.json")
    config["parameters"].update(n=7)
    assert run(config).status == EXIT_USAGE


def test_reload_report(tmp_path):
    result = run(load_config("erased_hamming.json"), str(tmp_path))
    curves = reload_report(str(tmp_path / "sweep.json"))
    for old, new in zip(result.result.curves, curves):
        assert len(old.points) == len(new.points)
        assert all(a.close_to(b) for a, b in zip(old.points, new.points))


def test_reload_missing_report(tmp_path):
    with pytest.raises(UsageError):
        reload_report(str(tmp_path / "missing.json"))


@pytest.mark.parametrize("figure, names", [
    ("fig3", ["erased-Y-hamming", "logloss-open"]),
    ("fig4", ["double-erasure-hamming", "erased-Z-hamming",
              "logloss-closed"]),
])
def test_reproduce_figure(tmp_path, figure, names):
    result = reproduce_figure(figure, str(tmp_path))
    assert sorted(c.name for c in result.curves) == names
    assert not result.violations
    files = sorted(os.listdir(str(tmp_path)))
    assert files == sorted(["%s.csv" % n for n in names] +
                           ["reproduce.json", "plot_%s.py" % figure])
    for name in names:
        assert len(read_rows(str(tmp_path / ("%s.csv" % name)))) == 101
    plot = (tmp_path / ("plot_%s.py" % figure)).read_text()
    assert "matplotlib" in plot
    curves = reload_report(str(tmp_path / "reproduce.json"))
    assert len(curves) == len(names)


def test_fig4_floor():
    result = reproduce_figure("fig4")
    for curve in result.curves:
        assert min(p.Delta for p in curve.points) == \
            pytest.approx(0.2, abs=1e-12)


def test_curve_csv_header_without_helper():
    result = execute(load_config("erased_hamming.json",
                                 D_grid=[0.0, 0.4]))
    text = result.curves[0].to_csv()
    header = next(csv.reader(io.StringIO(text)))
    assert header == ["D", "R", "Delta"]
