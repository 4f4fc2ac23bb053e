import math

import numpy
import pytest

from secure_rdi.errors import UsageError
from secure_rdi.core.probability import binary_entropy, entropy, \
    mutual_information
from secure_rdi.core.regions import FLOOR, KEY
from secure_rdi.core.closed_forms import CASES, FIGURES, \
    GaussianChainParams, erasure_region, erasure_source, figure_curves, \
    figure_grid, gaussian_region, open_equivalent_double_erasure

HALF_LOG_1_5 = 0.5 * math.log2(1.5)


def test_erased_y_lossless_point():
    point = erasure_region("erased-Y-hamming", D=0.0)
    assert point.R == pytest.approx(0.8, abs=1e-12)
    assert point.Delta == pytest.approx(0.278072, abs=1e-6)
    assert point.branch == KEY


def test_erased_y_rate_crosses_zero_at_half_erasure():
    assert erasure_region("erased-Y-hamming", D=0.4).R == 0.0
    assert erasure_region("erased-Y-hamming", D=0.39).R > 0.0
    assert erasure_region("erased-Y-hamming", D=0.4).Delta == \
        pytest.approx(0.029049, abs=1e-6)


def test_logloss_open_example():
    point = erasure_region("logloss-open", D=0.3)
    assert point.R == pytest.approx(0.5, abs=1e-12)
    assert point.Delta == pytest.approx(0.029049, abs=1e-6)
    assert point.branch == FLOOR


def test_erased_z_example():
    point = erasure_region("erased-Z-hamming", D=0.2)
    second = 0.2 + 0.8 * (1.0 - binary_entropy(0.25)) - \
        0.8 * binary_entropy(0.9)
    assert point.Delta == pytest.approx(max(0.2, second), abs=1e-9)


def test_double_erasure_lossless():
    point = erasure_region("double-erasure-hamming", D=0.0)
    assert point.R == pytest.approx(0.72, abs=1e-12)


def test_logloss_closed_lossless():
    point = erasure_region("logloss-closed", D=0.0)
    assert point.R == pytest.approx(0.72, abs=1e-12)
    assert point.Delta == pytest.approx(
        0.2 + 0.72 - binary_entropy(0.9), abs=1e-9)


def test_helper_logloss_zero_rate_helper():
    source = erasure_source("helper-logloss")
    point = erasure_region("helper-logloss", D=0.2, R_h=0.0)
    expected = mutual_information(source, "X", "W") + \
        entropy(source, "X", "Z") - 0.2
    assert point.Delta == pytest.approx(expected, abs=1e-12)
    assert point.Delta == pytest.approx(0.7, abs=1e-12)


def test_helper_large_rate_floor():
    point = erasure_region("helper-erased-hamming", D=0.1, R_h=5.0)
    assert point.Delta == pytest.approx(0.1, abs=1e-12)
    assert point.branch == FLOOR


@pytest.mark.parametrize("case", sorted(CASES))
def test_delta_never_below_floor(case):
    R_h = 0.2 if case.startswith("helper") else None
    source = erasure_source(case)
    spy = "W" if R_h is not None else "Z"
    floor = mutual_information(source, "X", spy)
    for D in (0.0, 0.1, 0.3, 0.6):
        assert erasure_region(case, D=D, R_h=R_h).Delta >= floor - 1e-12


@pytest.mark.parametrize("case, params, R_h", [
    ("erased-Y-hamming", {"p_ey": 0.9}, None),
    ("erased-Y-hamming", {"p_e": 1.5}, None),
    ("erased-Y-hamming", {}, 0.1),
    ("helper-logloss", {}, None),
    ("helper-logloss", {}, -0.1),
    ("no-such-case", {}, None),
])
def test_case_parameter_mismatch(case, params, R_h):
    with pytest.raises(UsageError):
        erasure_region(case, params, 0.1, R_h)


def test_open_equivalent_double_erasure_rates():
    for D in (0.0, 0.1, 0.3):
        open_point = open_equivalent_double_erasure({}, D)
        closed_point = erasure_region("double-erasure-hamming", D=D)
        assert open_point.R == pytest.approx(closed_point.R, abs=1e-9)
        assert open_point.Delta >= 0.2 - 1e-12


def test_gaussian_example():
    point = gaussian_region(GaussianChainParams(), 0.5, 0.5)
    assert point.R == pytest.approx(0.292481, abs=1e-6)
    assert point.R == pytest.approx(HALF_LOG_1_5, abs=1e-12)
    assert point.Delta == pytest.approx(0.292481, abs=1e-6)
    assert point.notes["helper_noise_variance"] == pytest.approx(2.0)
    assert point.notes["encoder_noise_variance"] == pytest.approx(1.5)


def test_gaussian_unlimited_helper_limit():
    point = gaussian_region(GaussianChainParams(), 50.0, 0.25)
    assert point.R == pytest.approx(0.5 * math.log2(0.5 / 0.25), abs=1e-9)


def test_gaussian_boundary_distortion():
    point = gaussian_region(GaussianChainParams(), 0.0, 1.0)
    assert point.R == 0.0
    assert point.saturated


def test_gaussian_rate_decreases_in_helper_rate():
    params = GaussianChainParams()
    rates = [gaussian_region(params, R_h, 0.25).R
             for R_h in (0.0, 0.25, 0.5, 1.0)]
    assert all(b < a for a, b in zip(rates, rates[1:]))


@pytest.mark.parametrize("R_h, D, branch", [
    (0.0, 0.25, KEY),
    (1.0, 0.5, FLOOR),
])
def test_gaussian_floor_branch(R_h, D, branch):
    point = gaussian_region(GaussianChainParams(), R_h, D)
    assert point.branch == branch
    if branch == FLOOR:
        assert point.Delta == pytest.approx(HALF_LOG_1_5, abs=1e-12)


def test_gaussian_other_ordering():
    params = GaussianChainParams(ordering="X-Z-W-Y")
    point = gaussian_region(params, 0.2, 0.25)
    assert point.R == pytest.approx(0.5, abs=1e-12)
    assert point.Delta == pytest.approx(HALF_LOG_1_5 + 0.5 - 0.2, abs=1e-12)


@pytest.mark.parametrize("kwargs", [
    {"var_a": 0.0},
    {"ordering": "Y-X-Z-W"},
    {"ordering": "X-Z-W-Y", "var_w": 1.0},
    {"var_q": 1.0},
])
def test_gaussian_params_validation(kwargs):
    with pytest.raises(UsageError):
        GaussianChainParams(**kwargs)


def test_gaussian_nonpositive_distortion():
    with pytest.raises(UsageError):
        gaussian_region(GaussianChainParams(), 0.5, 0.0)


def test_figure_grid():
    grid = figure_grid()
    assert len(grid) == 101
    assert grid[0] == 0.0 and grid[-1] == pytest.approx(0.8)


@pytest.mark.parametrize("figure", sorted(FIGURES))
def test_figure_curves_match_region_evaluators(figure):
    curves = figure_curves(figure)
    assert len(curves) == len(FIGURES[figure])
    for case, params in FIGURES[figure]:
        points = [erasure_region(case, params, D) for D in curves[case]["D"]]
        numpy.testing.assert_allclose([p.R for p in points],
                                      curves[case]["R"], atol=1e-9)
        numpy.testing.assert_allclose([p.Delta for p in points],
                                      curves[case]["Delta"], atol=1e-9)


def test_fig3_values():
    curves = figure_curves("fig3")
    hamming = curves["erased-Y-hamming"]
    assert hamming["Delta"][0] == pytest.approx(0.278072, abs=1e-6)
    high = hamming["D"] >= 0.4
    numpy.testing.assert_allclose(hamming["Delta"][high], 0.029049,
                                  atol=1e-6)


def test_fig4_floor():
    curves = figure_curves("fig4")
    assert len(curves) == 3
    for curve in curves.values():
        assert curve["Delta"].min() == pytest.approx(0.2, abs=1e-12)
        assert numpy.all(numpy.diff(curve["Delta"]) <= 1e-12)


def test_unknown_figure():
    with pytest.raises(UsageError):
        figure_curves("fig9")
