"""Reproduction of the reference tradeoff figures as CSV curves."""

import logging

import numpy

from secure_rdi.errors import UsageError
from secure_rdi.core.closed_forms import FIGURES, erasure_region, \
    figure_curves, figure_grid
from secure_rdi.commands.base import CommandResult, RDICurve, \
    curve_metadata, write_artifacts

__all__ = ["reproduce_figure", "reproduce_from_config", "FIGURE_POINTS",
           "FORMULA_TOL"]

FIGURE_POINTS = 101
REPRODUCE_KEYS = ("command", "figure", "points", "output", "log_level")
FORMULA_TOL = 1e-9

_log = logging.getLogger("secure_rdi.commands.reproduce")

PLOT_STUB = '''"""Plot the {figure} curves written next to this script."""

import csv
import os
import sys

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CURVES = {curves!r}


def load(name):
    with open(os.path.join(HERE, name + ".csv")) as f:
        rows = list(csv.DictReader(f))
    return [float(r["D"]) for r in rows], [float(r["Delta"]) for r in rows]


def main():
    for name in CURVES:
        D, Delta = load(name)
        plt.plot(D, Delta, label=name)
    plt.xlabel("D")
    plt.ylabel("Delta (bits)")
    plt.legend()
    plt.savefig(os.path.join(HERE, "{figure}.pdf"))


if __name__ == "__main__":
    sys.exit(main())
'''


class FigureResult(CommandResult):

    def __init__(self, figure, curves, details):
        CommandResult.__init__(self, "reproduce", None, curves,
                               details=details)
        self.figure = figure

    def files(self):
        files = CommandResult.files(self)
        files["plot_%s.py" % self.figure] = PLOT_STUB.format(
            figure=self.figure, curves=[c.name for c in self.curves])
        return files


def reproduce_figure(figure, output_dir=None, points=FIGURE_POINTS):
    """
    Evaluate every curve of ``figure`` through the region evaluators,
    compare it with the direct formulas and write the CSVs when
    ``output_dir`` is given.
    """
    grid = figure_grid(points)
    expected = figure_curves(figure, grid)
    curves, kinks, problems = [], {}, []
    for case, params in FIGURES[figure]:
        curve = RDICurve(case, [erasure_region(case, params, D)
                                for D in grid],
                         curve_metadata(case, params))
        reference = expected[case]
        for field in ("R", "Delta"):
            got = numpy.array([getattr(p, field) for p in curve.points])
            gap = float(numpy.max(numpy.abs(got - reference[field])))
            if gap > FORMULA_TOL:
                problems.append("%s: %s differs from the direct formula by "
                                "%.3g" % (case, field, gap))
        kinks[case] = curve.kinks()
        _log.info("%s: %d points, %d kink(s)", case, len(curve.points),
                  kinks[case])
        curves.append(curve)
    result = FigureResult(figure, curves, {"figure": figure,
                                           "points": points, "kinks": kinks})
    for problem in problems:
        result.flag(problem)
    if output_dir is not None:
        write_artifacts(result.files(), output_dir)
    return result


def reproduce_from_config(data):
    """``reproduce_figure`` driven by a config document."""
    unknown = set(data) - set(REPRODUCE_KEYS)
    if unknown:
        raise UsageError("unknown reproduce keys %s" % sorted(unknown))
    figure = data.get("figure")
    if figure not in FIGURES:
        raise UsageError("unknown figure %r (use one of %s)"
                         % (figure, ", ".join(sorted(FIGURES))))
    points = data.get("points", FIGURE_POINTS)
    if not isinstance(points, int) or isinstance(points, bool) or points < 2:
        raise UsageError("points must be an integer >= 2, got %r" % points)
    return reproduce_figure(figure, data.get("output", "."), points)
