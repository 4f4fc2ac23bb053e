"""
Closed-form R.D.I. regions: erased side information, log-loss and the
two quadratic Gaussian helper chains.
"""

import logging
import math

import numpy

from secure_rdi.config import Type, Description, DefaultValue, \
    fill_properties
from secure_rdi.errors import UsageError
from secure_rdi.core.probability import Alphabet, ConditionalPMF, \
    JointPMF, binary_entropy, entropy, make_erasure_source, \
    mutual_information
from secure_rdi.core.regions import RDIPoint, FLOOR, KEY, \
    region_open_markov
from secure_rdi.core.solvers import DistortionSpec, RDSolverConfig, \
    rd_erased_hamming

__all__ = ["GaussianChainParams", "erasure_region", "gaussian_region",
           "figure_curves", "open_equivalent_double_erasure",
           "erasure_source", "CASES", "FIGURES"]

_log = logging.getLogger("secure_rdi.closed_forms")

_p_x = {Type: [float], DefaultValue: [0.5, 0.5],
        Description: 'Source pmf of X'}
_p_e = {Type: float, DefaultValue: 0.8,
        Description: 'Erasure probability of the side information'}
_p_ey = {Type: float, DefaultValue: 0.9,
         Description: 'Erasure probability of Y'}
_p_ez = {Type: float, DefaultValue: 0.8,
         Description: 'Erasure probability of Z'}
_p_w = {Type: float, DefaultValue: 0.5,
        Description: 'Extra erasure probability of W given Z'}

ERASED_Y_HAMMING = "erased-Y-hamming"
LOGLOSS_OPEN = "logloss-open"
ERASED_Z_HAMMING = "erased-Z-hamming"
DOUBLE_ERASURE_HAMMING = "double-erasure-hamming"
LOGLOSS_CLOSED = "logloss-closed"
HELPER_ERASED_HAMMING = "helper-erased-hamming"
HELPER_LOGLOSS = "helper-logloss"

_z_given_y = {Type: [[float]], DefaultValue: [[1, 0], [0, 1], [0.5, 0.5]],
              Description: 'Rows p(z | y) for y in X and the erasure'}
_y_given_z = {Type: [[float]], DefaultValue: [[1, 0], [0, 1], [0.9, 0.1]],
              Description: 'Rows p(y | z) for z in X and the erasure'}

CASES = {
    ERASED_Y_HAMMING: {'p_x': _p_x, 'p_e': _p_e, 'z_given_y': _z_given_y},
    LOGLOSS_OPEN: {'p_x': _p_x, 'p_e': _p_e, 'z_given_y': _z_given_y},
    ERASED_Z_HAMMING: {'p_x': _p_x, 'p_e': _p_e, 'y_given_z': _y_given_z},
    DOUBLE_ERASURE_HAMMING: {'p_x': _p_x, 'p_ey': _p_ey, 'p_ez': _p_ez},
    LOGLOSS_CLOSED: {'p_x': _p_x, 'p_ey': _p_ey, 'p_ez': _p_ez},
    HELPER_ERASED_HAMMING: {'p_x': _p_x, 'p_e': _p_e, 'p_w': _p_w},
    HELPER_LOGLOSS: {'p_x': _p_x, 'p_e': _p_e, 'p_w': _p_w},
}
HELPER_CASES = (HELPER_ERASED_HAMMING, HELPER_LOGLOSS)
LOGLOSS_CASES = (LOGLOSS_OPEN, LOGLOSS_CLOSED, HELPER_LOGLOSS)


def _case_params(case, params):
    if case not in CASES:
        raise UsageError("unknown closed-form case %r (use one of %s)"
                         % (case, ", ".join(sorted(CASES))))
    values = fill_properties(CASES[case], params, case)
    for name in ('p_e', 'p_ey', 'p_ez', 'p_w'):
        if name in values and not 0.0 <= values[name] <= 1.0:
            raise UsageError("%s: %s must be in [0, 1]" % (case, name))
    return values


def _channel(given, given_alphabet, name, rows, size):
    rows = numpy.asarray(rows, dtype=float)
    if rows.shape[0] != given_alphabet.size:
        raise UsageError("channel to %s needs %d rows, got %d"
                         % (name, given_alphabet.size, rows.shape[0]))
    return ConditionalPMF.from_matrix(given, given_alphabet, name,
                                      Alphabet(size or rows.shape[1]), rows)


def _erase_again(source, of, p, name):
    """``name``: the erased axis ``of`` with non-erasures erased w.p. p."""
    alphabet = source.alphabet(of)
    k = alphabet.size - 1
    rows = numpy.zeros((k + 1, k + 1))
    rows[:k, :k] = (1.0 - p) * numpy.eye(k)
    rows[:k, k] = p
    rows[k, k] = 1.0
    return source.extend(ConditionalPMF.from_matrix(of, alphabet, name,
                                                    alphabet, rows))


def erasure_source(case, params=None):
    """Joint pmf of the source model behind a closed-form case."""
    values = _case_params(case, params)
    source = JointPMF.from_vector("X", values['p_x'])
    if case in (ERASED_Y_HAMMING, LOGLOSS_OPEN):
        source = make_erasure_source(source, values['p_e'], "X", "Y")
        return source.extend(_channel("Y", source.alphabet("Y"), "Z",
                                      values['z_given_y'], None))
    if case == ERASED_Z_HAMMING:
        source = make_erasure_source(source, values['p_e'], "X", "Z")
        return source.extend(_channel("Z", source.alphabet("Z"), "Y",
                                      values['y_given_z'], None))
    if case in (DOUBLE_ERASURE_HAMMING, LOGLOSS_CLOSED):
        source = make_erasure_source(source, values['p_ey'], "X", "Y")
        return make_erasure_source(source, values['p_ez'], "X", "Z")
    source = make_erasure_source(source, values['p_e'], "X", "Z")
    return _erase_again(source, "Z", values['p_w'], "W")


def _erased_rate(p_x, p_e, D):
    return rd_erased_hamming(numpy.asarray(p_x, dtype=float), p_e, D).rate


def erasure_region(case, params=None, D=0.0, R_h=None):
    """
    Exact region of a closed-form case at distortion D (and helper rate).

    Leakage is max{floor, floor + R(D) - deduction}, where the floor is
    the eavesdropper's information about X and the deduction is the key
    the legitimate side information (or the helper) supplies.
    """
    values = _case_params(case, params)
    if D < 0:
        raise UsageError("distortion must be >= 0, got %g" % D)
    if case in HELPER_CASES:
        if R_h is None or R_h < 0:
            raise UsageError("%s needs a helper rate R_h >= 0" % case)
    elif R_h is not None:
        raise UsageError("%s has no helper link, R_h must be omitted" % case)
    source = erasure_source(case, params)
    p_x = values['p_x']

    if case in (ERASED_Y_HAMMING, LOGLOSS_OPEN):
        if case == LOGLOSS_OPEN:
            R = max(entropy(source, "X", "Y") - D, 0.0)
        else:
            R = _erased_rate(p_x, values['p_e'], D)
        floor = mutual_information(source, "X", "Z")
        deduction = entropy(source, "Y", ("X", "Z"))
    elif case in (ERASED_Z_HAMMING, DOUBLE_ERASURE_HAMMING, LOGLOSS_CLOSED):
        if case == LOGLOSS_CLOSED:
            R = max(entropy(source, "X", ("Y", "Z")) - D, 0.0)
        elif case == ERASED_Z_HAMMING:
            R = _erased_rate(p_x, values['p_e'], D)
        else:
            R = _erased_rate(p_x, values['p_ey'] * values['p_ez'], D)
        floor = mutual_information(source, "X", "Z")
        deduction = entropy(source, "Y", ("X", "Z"))
    else:
        if case == HELPER_LOGLOSS:
            R = max(entropy(source, "X", "Z") - D, 0.0)
        else:
            R = _erased_rate(p_x, values['p_e'], D)
        floor = mutual_information(source, "X", "W")
        deduction = R_h

    second = floor + R - deduction
    Delta, branch = (second, KEY) if second > floor else (floor, FLOOR)
    return RDIPoint(R, D, Delta, R_h=R_h, key_rate=min(R, deduction),
                    branch=branch, saturated=R <= 0.0 and D > 0,
                    notes={"case": case})


def open_equivalent_double_erasure(params, D):
    """
    Open-switch region for the single erasure Y~ of X with probability
    p_ey * p_ez, Z erased with p_ez and X - Y~ - Z.

    Rates coincide with the double-erasure case; leakage differs since
    H(Y~|X,Z) is generally not H(Y|X).
    """
    values = _case_params(DOUBLE_ERASURE_HAMMING, params)
    q = values['p_ey'] * values['p_ez']
    source = make_erasure_source(JointPMF.from_vector("X", values['p_x']),
                                 q, "X", "Y~")
    extra = 0.0 if q >= 1.0 else (values['p_ez'] - q) / (1.0 - q)
    source = _erase_again(source, "Y~", extra, "Z")
    return region_open_markov(source, DistortionSpec.hamming(), D,
                              RDSolverConfig(), "X", "Y~", "Z")


class GaussianChainParams(object):
    """
    Jointly Gaussian helper chains.

    ``W-Z-X-Y``: Z = W + A, X = Z + B, Y = X + C.
    ``X-Z-W-Y``: Z = X + A, W = Z + B, Y = W + C.
    """

    W_Z_X_Y = "W-Z-X-Y"
    X_Z_W_Y = "X-Z-W-Y"

    gaussian_properties = {
        'ordering': {Type: str, DefaultValue: W_Z_X_Y,
                     Description: 'Chain ordering, W-Z-X-Y or X-Z-W-Y'},
        'var_w': {Type: float, Description: 'Variance of W (W-Z-X-Y)'},
        'var_x': {Type: float, Description: 'Variance of X (X-Z-W-Y)'},
        'var_a': {Type: float, DefaultValue: 1.0,
                  Description: 'Variance of A'},
        'var_b': {Type: float, DefaultValue: 1.0,
                  Description: 'Variance of B'},
        'var_c': {Type: float, DefaultValue: 1.0,
                  Description: 'Variance of C'},
    }

    def __init__(self, **kwargs):
        values = fill_properties(self.gaussian_properties, kwargs, "gaussian")
        ordering = values['ordering']
        if ordering not in (self.W_Z_X_Y, self.X_Z_W_Y):
            raise UsageError("unknown Gaussian ordering %r" % ordering)
        head = 'var_w' if ordering == self.W_Z_X_Y else 'var_x'
        other = 'var_x' if head == 'var_w' else 'var_w'
        if values[other] is not None:
            raise UsageError("%s is not a parameter of ordering %s"
                             % (other, ordering))
        if values[head] is None:
            values[head] = 1.0
        for name in (head, 'var_a', 'var_b', 'var_c'):
            if not values[name] > 0:
                raise UsageError("%s must be > 0, got %r"
                                 % (name, values[name]))
        self.__dict__.update(values)

    @classmethod
    def from_dict(cls, data):
        return cls(**(data or {}))

    def to_json(self):
        return {name: getattr(self, name) for name in self.gaussian_properties
                if getattr(self, name) is not None}

    def __repr__(self):
        return "GaussianChainParams(%s)" % ", ".join(
            "%s=%r" % item for item in sorted(self.to_json().items()))


def _half_log2(ratio):
    return 0.5 * math.log2(ratio)


def gaussian_region(params, R_h, D):
    """
    Quadratic Gaussian helper region in bits.

    For W-Z-X-Y the notes carry the achievability construction: helper
    noise variance (U_h = Y + N_h) and encoder noise variance (V = X + N_e).
    """
    if D <= 0:
        raise UsageError("Gaussian distortion must be > 0, got %g" % D)
    if R_h < 0:
        raise UsageError("helper rate must be >= 0, got %g" % R_h)
    notes = {"ordering": params.ordering}
    if params.ordering == GaussianChainParams.W_Z_X_Y:
        b, c = params.var_b, params.var_c
        residual = b * (1.0 - b / (b + c) * (1.0 - 2.0 ** (-2.0 * R_h)))
        rate = _half_log2(residual / D)
        floor = _half_log2((params.var_w + params.var_a + b) /
                           (params.var_a + b))
        second = floor + _half_log2(b / D) - R_h
        notes["conditional_variance"] = residual
        notes["helper_noise_variance"] = (b + c) / (2.0 ** (2.0 * R_h) - 1.0) \
            if R_h > 0 else None
        notes["encoder_noise_variance"] = residual * D / (residual - D) \
            if D < residual else None
    else:
        x, a = params.var_x, params.var_a
        rate = _half_log2(x * a / ((x + a) * D))
        floor = _half_log2((x + a + params.var_b) / (a + params.var_b))
        second = floor + rate - R_h
    R = max(rate, 0.0)
    saturated = rate <= 0.0
    if saturated:
        _log.debug("Gaussian rate saturates at D=%g, R_h=%g", D, R_h)
    Delta, branch = (second, KEY) if second > floor else (floor, FLOOR)
    return RDIPoint(R, D, Delta, R_h=R_h, branch=branch,
                    saturated=saturated, notes=notes)


FIGURES = {
    "fig3": [(ERASED_Y_HAMMING, {}), (LOGLOSS_OPEN, {})],
    "fig4": [(ERASED_Z_HAMMING, {}), (DOUBLE_ERASURE_HAMMING, {}),
             (LOGLOSS_CLOSED, {})],
}


def figure_grid(points=101):
    return numpy.linspace(0.0, 0.8, points)


def _h2(p):
    return numpy.array([binary_entropy(v) for v in numpy.atleast_1d(p)])


def _erased_law(q, D):
    """q (1 - H2(D/q)) below D = q/2, zero above."""
    D = numpy.asarray(D, dtype=float)
    inside = D <= q / 2.0
    return numpy.where(inside, q * (1.0 - _h2(numpy.minimum(D / q, 0.5))),
                       0.0)


def figure_curves(figure, grid=None):
    """
    Reference tradeoff curves by their direct Bernoulli(1/2) formulas.

    Returns a dict mapping each case to ``{"D", "R", "Delta"}`` arrays.
    """
    if figure not in FIGURES:
        raise UsageError("unknown figure %r (use %s)"
                         % (figure, ", ".join(sorted(FIGURES))))
    D = figure_grid() if grid is None else numpy.asarray(grid, dtype=float)
    curves = {}
    if figure == "fig3":
        p_e = 0.8
        floor = 1.0 - binary_entropy(p_e / 2.0)
        deduction = (1.0 - p_e / 2.0) * \
            binary_entropy(0.5 * p_e / (1.0 - p_e / 2.0))
        rates = {ERASED_Y_HAMMING: _erased_law(p_e, D),
                 LOGLOSS_OPEN: numpy.maximum(p_e - D, 0.0)}
    else:
        p_e, p_ey, p_ez = 0.8, 0.9, 0.8
        q = p_ey * p_ez
        rates = {ERASED_Z_HAMMING: _erased_law(p_e, D),
                 DOUBLE_ERASURE_HAMMING: _erased_law(q, D),
                 LOGLOSS_CLOSED: numpy.maximum(q - D, 0.0)}
        floor = 1.0 - p_ez
        deductions = {ERASED_Z_HAMMING: p_e * binary_entropy(0.9),
                      DOUBLE_ERASURE_HAMMING: binary_entropy(p_ey),
                      LOGLOSS_CLOSED: binary_entropy(p_ey)}
    for case, _ in FIGURES[figure]:
        R = rates[case]
        cut = deduction if figure == "fig3" else deductions[case]
        curves[case] = {"D": D.copy(), "R": R,
                        "Delta": numpy.maximum(floor, floor + R - cut)}
    return curves
