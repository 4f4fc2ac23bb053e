"""
R.D.I. region evaluators.

Every evaluator is a formula over an explicit joint pmf: the source,
optionally extended with auxiliary channels. Searching over auxiliaries
belongs to ``secure_rdi.core.solvers``.

Variable arguments ``x``, ``y``, ``z`` and ``w`` name the source, the
legitimate side information, the eavesdropper side information and the
helper-setting eavesdropper observation. Each may be a group of axes.
"""

import logging

import numpy

from secure_rdi.errors import PreconditionError, UsageError
from secure_rdi.core.probability import Alphabet, ConditionalPMF, \
    as_names, check_markov, entropy, mutual_information
from secure_rdi.core.solvers import DistortionSpec, RDSolverConfig, \
    bayes_reconstruction, check_si_equality, helper_aux_optimize, rd_si_enc

__all__ = ["AuxChannelSet", "RDIPoint", "KeyRates", "KeyConstraint",
           "HelperPoint", "expected_distortion", "outer_bound_open",
           "inner_bound_open", "region_open_markov", "inner_bound_closed",
           "outer_bound_closed", "region_closed", "helper_inner_bound",
           "region_helper_logloss", "region_helper_degraded"]

U, V, U_H = "U", "V", "U_h"
FLOOR, KEY = "floor", "key"
NEG_TOL = 1e-9

_log = logging.getLogger("secure_rdi.regions")


def _nonnegative(name, value):
    if value is None:
        return None
    value = float(value)
    if value < -NEG_TOL or numpy.isnan(value):
        raise UsageError("%s must be >= 0, got %g" % (name, value))
    return max(value, 0.0)


class RDIPoint(object):
    """
    One (R_h, R, D, Delta) tuple.

    ``branch`` names the active arm of the leakage maximum: ``floor`` when
    Delta sits at the eavesdropper's own information, ``key`` otherwise.
    """

    def __init__(self, R, D, Delta, R_h=None, key_rate=None, branch=FLOOR,
                 saturated=False, notes=None):
        self.R = _nonnegative("R", R)
        self.D = _nonnegative("D", D)
        self.Delta = _nonnegative("Delta", Delta)
        self.R_h = _nonnegative("R_h", R_h)
        self.key_rate = _nonnegative("key rate", key_rate)
        self.branch = branch
        self.saturated = saturated
        self.notes = dict(notes or {})

    def row(self, with_helper=False):
        values = [self.D, self.R, self.Delta]
        if with_helper:
            values.append(self.R_h)
        return values

    def to_json(self):
        data = {"R": self.R, "D": self.D, "Delta": self.Delta,
                "branch": self.branch, "saturated": self.saturated}
        if self.R_h is not None:
            data["R_h"] = self.R_h
        if self.key_rate is not None:
            data["key_rate"] = self.key_rate
        if self.notes:
            data["notes"] = self.notes
        return data

    @classmethod
    def from_json(cls, data):
        return cls(data["R"], data["D"], data["Delta"], data.get("R_h"),
                   data.get("key_rate"), data.get("branch", FLOOR),
                   data.get("saturated", False), data.get("notes"))

    def close_to(self, other, tol=1e-9):
        return (abs(self.R - other.R) <= tol and
                abs(self.D - other.D) <= tol and
                abs(self.Delta - other.Delta) <= tol)

    def __repr__(self):
        helper = "" if self.R_h is None else "R_h=%.6g, " % self.R_h
        return "RDIPoint(%sR=%.6g, D=%.6g, Delta=%.6g, %s)" % (
            helper, self.R, self.D, self.Delta, self.branch)


class KeyRates(object):
    """Secret-key rates of the helper scheme: R_K from U_h, R_K' pure."""

    def __init__(self, R_K, R_K_prime):
        self.R_K = _nonnegative("R_K", R_K)
        self.R_K_prime = _nonnegative("R_K'", R_K_prime)

    @property
    def total(self):
        return self.R_K + self.R_K_prime

    def to_json(self):
        return {"R_K": self.R_K, "R_K_prime": self.R_K_prime}

    def __repr__(self):
        return "KeyRates(R_K=%.6g, R_K'=%.6g)" % (self.R_K, self.R_K_prime)


class KeyConstraint(object):
    """``value <= cap`` with its slack ``cap - value``."""

    def __init__(self, name, value, cap, tol=1e-12):
        self.name = name
        self.value = value
        self.cap = cap
        self.slack = cap - value
        self.satisfied = self.slack >= -tol

    def to_json(self):
        return {"name": self.name, "value": self.value, "cap": self.cap,
                "slack": self.slack, "satisfied": self.satisfied}

    def __repr__(self):
        return "KeyConstraint(%s: %.6g <= %.6g, %s)" % (
            self.name, self.value, self.cap,
            "ok" if self.satisfied else "violated")


class HelperPoint(object):
    """Helper inner-bound evaluation: the point plus every key constraint."""

    def __init__(self, point, keys, R_h_required, constraints):
        self.point = point
        self.keys = keys
        self.R_h_required = R_h_required
        self.constraints = list(constraints)

    @property
    def feasible(self):
        return all(c.satisfied for c in self.constraints)

    def constraint(self, name):
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self):
        data = self.point.to_json()
        data.update(keys=self.keys.to_json(), R_h_required=self.R_h_required,
                    feasible=self.feasible,
                    constraints=[c.to_json() for c in self.constraints])
        return data

    def __repr__(self):
        return "HelperPoint(%r, feasible=%s)" % (self.point, self.feasible)


def _source_axes(source, names):
    return [(name, source.alphabet(name)) for name in as_names(names)]


class AuxChannelSet(object):
    """
    Auxiliaries of a coding scheme.

    Args:
        uv: channel with outputs ``U`` and ``V``, given source axes (and
            ``U_h`` in the helper setting)
        uh: optional helper channel with output ``U_h`` given Y
        reconstruction: optional table of reconstruction indices over the
            flattened decoder inputs of the evaluator. Without it the
            Bayes rule is used.
    """

    def __init__(self, uv, uh=None, reconstruction=None):
        if uv.output_names != (U, V):
            raise UsageError("auxiliary channel outputs must be (%s, %s), "
                             "got %s" % (U, V, uv.output_names))
        if uh is not None and uh.output_names != (U_H,):
            raise UsageError("helper channel output must be %s" % U_H)
        self.uv = uv
        self.uh = uh
        self.reconstruction = None if reconstruction is None \
            else numpy.asarray(reconstruction, dtype=int).ravel()

    @classmethod
    def empty(cls, source, x="X", y="Y", helper=False):
        """U = V = (U_h =) constant."""
        if helper:
            uh = ConditionalPMF.constant(_source_axes(source, y), U_H)
            given = _source_axes(source, x) + list(uh.outputs)
        else:
            uh = None
            given = _source_axes(source, as_names(x) + as_names(y))
        shape = tuple(a.size for _, a in given) + (1, 1)
        uv = ConditionalPMF(given, [(U, Alphabet(1, ["-"])),
                                    (V, Alphabet(1, ["-"]))],
                            numpy.ones(shape))
        return cls(uv, uh)

    @classmethod
    def from_v(cls, channel, uh=None, reconstruction=None):
        """U constant, V given by a single-output ``channel``."""
        if len(channel.outputs) != 1:
            raise UsageError("V channel must have exactly one output")
        alphabet = channel.outputs[0][1]
        probs = channel.probs.reshape(channel.given_shape +
                                      (1, alphabet.size))
        uv = ConditionalPMF(channel.given, [(U, Alphabet(1, ["-"])),
                                            (V, alphabet)], probs, tol=1e-9)
        return cls(uv, uh, reconstruction)

    def joint(self, source, allowed):
        """Source extended by the auxiliaries, inputs checked."""
        joint = source
        if self.uh is not None:
            joint = joint.extend(self.uh)
        stray = set(self.uv.given_names) - set(allowed)
        if stray:
            raise UsageError("auxiliary channel may only depend on %s, "
                             "not %s" % (", ".join(allowed),
                                         ", ".join(sorted(stray))))
        return joint.extend(self.uv)

    def to_json(self):
        data = {"uv": self.uv.to_json()}
        if self.uh is not None:
            data["uh"] = self.uh.to_json()
        if self.reconstruction is not None:
            data["reconstruction"] = self.reconstruction.tolist()
        return data

    @classmethod
    def from_json(cls, data):
        uh = data.get("uh")
        return cls(ConditionalPMF.from_json(data["uv"]),
                   None if uh is None else ConditionalPMF.from_json(uh),
                   data.get("reconstruction"))

    def __repr__(self):
        return "AuxChannelSet(U[%d], V[%d]%s)" % (
            self.uv.output_shape[0], self.uv.output_shape[1],
            "" if self.uh is None else ", U_h[%d]" % self.uh.output_shape[0])


def expected_distortion(joint, dist, x, decoder, table):
    """Expected distortion of x_hat(decoder inputs)."""
    if dist.is_log_loss:
        return entropy(joint, x, decoder)
    p_xc = joint.grouped(x, decoder)
    d = dist.matrix_for(p_xc.shape[0])
    if table is None:
        table = bayes_reconstruction(p_xc, d)
    elif table.size != p_xc.shape[1]:
        raise UsageError("reconstruction covers %d decoder inputs, %s needs "
                         "%d" % (table.size, ",".join(decoder),
                                 p_xc.shape[1]))
    elif table.min() < 0 or table.max() >= d.shape[1]:
        raise UsageError("reconstruction index outside the reproduction "
                         "alphabet")
    return float(numpy.einsum("xc,xc->", p_xc, d[:, table]))


def _check_chain(pmf, *elements, **kwargs):
    """PreconditionError unless the chain holds; empty elements dropped."""
    tol = kwargs.get("tol", 1e-9)
    chain = [as_names(e) for e in elements if as_names(e)]
    if len(chain) < 3:
        return
    report = check_markov(pmf, chain, tol)
    if not report:
        _log.error("Markov chain %s fails, max violation %.3g",
                   " - ".join(",".join(e) for e in chain),
                   report.max_violation)
        raise PreconditionError(
            "Markov chain %s does not hold (max violation %.3g at link %s)"
            % (" - ".join(",".join(e) for e in chain), report.max_violation,
               report.worst_link))


def _max_branch(floor, candidate):
    if candidate > floor:
        return candidate, KEY
    return floor, FLOOR


def _names(x, y, z):
    return as_names(x), as_names(y), as_names(z)


def outer_bound_open(source, aux, dist=None, x="X", y="Y", z="Z"):
    """
    Leakage lower bound with the eavesdropper side information Z kept
    away from the decoder. Decoder inputs: (Y, U, V).
    """
    dist = dist or DistortionSpec.hamming()
    x, y, z = _names(x, y, z)
    joint = aux.joint(source, x + y)
    uv = (U, V)
    R = mutual_information(joint, x, uv, y)
    floor = mutual_information(joint, x, z)
    candidate = (mutual_information(joint, x, z + uv) +
                 mutual_information(joint, V, z, U) -
                 mutual_information(joint, V, y, U) -
                 entropy(joint, y, uv + x + z))
    Delta, branch = _max_branch(floor, candidate)
    D = expected_distortion(joint, dist, x, y + uv, aux.reconstruction)
    return RDIPoint(R, D, Delta, branch=branch)


def _inner(source, aux, dist, x, y, z, decoder_z, scramble_both):
    joint = aux.joint(source, x + y)
    u, v = ((), (U, V)) if scramble_both else ((U,), (V,))
    si = y + decoder_z
    R = mutual_information(joint, x, u + v, si)
    description = mutual_information(joint, v, x, u + si)
    key = min(description, entropy(joint, y, u + v + x + z))
    floor = mutual_information(joint, x, z + u)
    Delta = floor + description - key
    D = expected_distortion(joint, dist, x, si + (U, V), aux.reconstruction)
    branch = KEY if Delta > floor + 1e-12 else FLOOR
    return RDIPoint(R, D, Delta, key_rate=key, branch=branch)


def inner_bound_open(source, aux, dist=None, x="X", y="Y", z="Z",
                     scramble_both=False):
    """
    Achievable point with the key drawn from Y and scrambling V:
    R_K = min{I(V;X|U,Y), H(Y|U,V,X,Z)}.

    ``scramble_both`` folds U into V so that the key covers both
    description layers.
    """
    dist = dist or DistortionSpec.hamming()
    x, y, z = _names(x, y, z)
    return _inner(source, aux, dist, x, y, z, (), scramble_both)


def inner_bound_closed(source, aux, dist=None, x="X", y="Y", z="Z",
                       scramble_both=False):
    """As ``inner_bound_open`` with Z also at the decoder."""
    dist = dist or DistortionSpec.hamming()
    x, y, z = _names(x, y, z)
    return _inner(source, aux, dist, x, y, z, z, scramble_both)


def outer_bound_closed(source, aux, dist=None, x="X", y="Y", z="Z"):
    """Leakage lower bound with Z at the decoder; (U, V) act as one V."""
    dist = dist or DistortionSpec.hamming()
    x, y, z = _names(x, y, z)
    joint = aux.joint(source, x + y)
    uv = (U, V)
    R = mutual_information(joint, x, uv, y + z)
    floor = mutual_information(joint, x, z)
    Delta, branch = _max_branch(floor, floor + R - entropy(joint, y, x + z))
    D = expected_distortion(joint, dist, x, y + z + uv, aux.reconstruction)
    return RDIPoint(R, D, Delta, branch=branch)


def _keyed_region(source, R, D, floor, conditional, notes=None):
    Delta, branch = _max_branch(floor, floor + R - conditional)
    return RDIPoint(R, D, Delta, key_rate=min(R, conditional), branch=branch,
                    saturated=R <= 0.0 and D > 0, notes=notes)


def _equality_guard(source, dist, D, cfg, x, si):
    report = check_si_equality(source, dist, [D], cfg, x, si)
    if not report.verdict:
        raise PreconditionError(
            "side information at the encoder lowers the rate at D=%g "
            "(gap %.3g)" % (D, report.max_gap))


def region_open_markov(source, dist, D, cfg=None, x="X", y="Y", z="Z",
                       check_equality=False, markov_tol=1e-9):
    """
    Exact region when X - Y - Z holds and encoder side information does
    not help: R = R_SI-Enc(D), Delta = max{I(X;Z), I(X;Z) + R - H(Y|X,Z)}.

    Components of Z that are also part of Y are dropped from the chain
    test, so a super side information (Y, Z) is accepted.
    """
    cfg = cfg or RDSolverConfig()
    x, y, z = _names(x, y, z)
    _check_chain(source, x, y, tuple(n for n in z if n not in y),
                 tol=markov_tol)
    if check_equality:
        _equality_guard(source, dist, D, cfg, x[0], y)
    R = rd_si_enc(source, dist, D, cfg, x[0] if len(x) == 1 else x, y)
    return _keyed_region(source, R, D, mutual_information(source, x, z),
                         entropy(source, y, x + z))


def region_closed(source, dist, D, cfg=None, x="X", y="Y", z="Z",
                  check_equality=False):
    """
    Exact region with Z at the decoder when encoder side information does
    not help for the pair (Y, Z).
    """
    cfg = cfg or RDSolverConfig()
    x, y, z = _names(x, y, z)
    if check_equality:
        _equality_guard(source, dist, D, cfg, x[0], y + z)
    R = rd_si_enc(source, dist, D, cfg, x[0] if len(x) == 1 else x, y + z)
    return _keyed_region(source, R, D, mutual_information(source, x, z),
                         entropy(source, y, x + z))


def _default_keys(R_h, required, cap_key, cap_sum):
    pure = max(0.0, min(R_h - required, cap_sum))
    return KeyRates(max(0.0, min(cap_key, cap_sum - pure)), pure)


def helper_inner_bound(source, aux, R_h, keys=None, dist=None, x="X",
                       y="Y", z="Z", w="W", markov_tol=1e-9):
    """
    Achievable point of the rate-limited helper scheme.

    The helper describes Y by U_h; its key R_K comes from binning U_h and
    R_K' is uniform randomness on the helper link. Without ``keys`` the
    largest feasible pair is used, R_K' first.

    Returns:
        HelperPoint with every key constraint and its slack
    """
    dist = dist or DistortionSpec.hamming()
    x, y, z = _names(x, y, z)
    w = as_names(w)
    R_h = _nonnegative("R_h", R_h)
    if aux.uh is None:
        raise UsageError("helper setting needs a U_h channel")
    stray = set(aux.uh.given_names) - set(y)
    if stray:
        raise UsageError("U_h may only depend on %s" % ", ".join(y))
    joint = aux.joint(source, x + (U_H,))
    uv = (U, V)
    _check_chain(joint, (U_H,), y, x + z + w, tol=markov_tol)
    _check_chain(joint, uv, x + (U_H,), y + z + w, tol=markov_tol)
    _check_chain(joint, uv + (U_H,), x + y, w + z, tol=markov_tol)

    required = max(mutual_information(joint, U_H, y, z),
                   mutual_information(joint, U_H, y, x))
    R = mutual_information(joint, x, uv, z + (U_H,))
    cap_key = (mutual_information(joint, U_H, y) -
               mutual_information(joint, U_H, x + w + uv))
    cap_sum = mutual_information(joint, x, V, z + (U_H, U))
    if keys is None:
        keys = _default_keys(R_h, required, cap_key, cap_sum)
    constraints = [
        KeyConstraint("R_h", required, R_h),
        KeyConstraint("R_K", keys.R_K, cap_key),
        KeyConstraint("R_K'", keys.R_K_prime, R_h - required),
        KeyConstraint("R_K+R_K'", keys.total, cap_sum),
    ]
    floor = mutual_information(joint, x, w + (U,))
    Delta = (floor + cap_sum +
             mutual_information(joint, uv, U_H, x + y) +
             mutual_information(joint, U, U_H, x + y) - keys.total)
    D = expected_distortion(joint, dist, x, z + (U_H,) + uv,
                            aux.reconstruction)
    point = RDIPoint(R, D, max(Delta, 0.0), R_h=R_h, key_rate=keys.total,
                     branch=KEY if Delta > floor + 1e-12 else FLOOR)
    for c in constraints:
        if not c.satisfied:
            _log.warning("helper constraint %s violated by %.3g", c.name,
                         -c.slack)
    return HelperPoint(point, keys, required, constraints)


def region_helper_logloss(source, R_h, D, cfg=None, x="X", y="Y", z="Z",
                          w="W", markov_tol=1e-9):
    """
    Log-loss helper region for Y - X - Z - W:
    R = [min H(X|U_h,Z) - D]^+ over I(U_h;Y|Z) <= R_h and
    Delta = max{I(X;W), I(X;W) + H(X|Z) - D - R_h}.
    """
    cfg = cfg or RDSolverConfig()
    x, y, z = _names(x, y, z)
    w = as_names(w)
    R_h = _nonnegative("R_h", R_h)
    D = _nonnegative("D", D)
    _check_chain(source, y, x, z, w, tol=markov_tol)
    helper = helper_aux_optimize(source, R_h, cfg, x, y, z)
    R = max(helper.objective - D, 0.0)
    floor = mutual_information(source, x, w)
    Delta, branch = _max_branch(floor,
                                floor + entropy(source, x, z) - D - R_h)
    return RDIPoint(R, D, Delta, R_h=R_h, branch=branch,
                    saturated=R <= 0.0 and D > 0,
                    notes={"helper_rate": helper.rate,
                           "H(X|U_h,Z)": helper.objective})


def region_helper_degraded(source, dist, R_h, D, cfg=None, x="X", y="Y",
                           z="Z", w="W", check_equality=False,
                           markov_tol=1e-9):
    """
    Region for Y - W - Z - X: the helper only supplies key,
    Delta = max{I(X;W), I(X;W) + R_SI-Enc(D) - R_h}.
    """
    cfg = cfg or RDSolverConfig()
    x, y, z = _names(x, y, z)
    w = as_names(w)
    R_h = _nonnegative("R_h", R_h)
    _check_chain(source, y, w, z, x, tol=markov_tol)
    if check_equality:
        _equality_guard(source, dist, D, cfg, x[0], z)
    R = rd_si_enc(source, dist, D, cfg, x[0] if len(x) == 1 else x, z)
    floor = mutual_information(source, x, w)
    Delta, branch = _max_branch(floor, floor + R - R_h)
    return RDIPoint(R, D, Delta, R_h=R_h, key_rate=min(R, R_h),
                    branch=branch, saturated=R <= 0.0 and D > 0,
                    notes={"R_h_min": 0.0})
