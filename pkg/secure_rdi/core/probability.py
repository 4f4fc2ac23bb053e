"""
Finite-alphabet probability containers and exact information measures.

Every quantity is in bits. Arrays are dense over the product alphabet and
read-only once a container is built, so containers can be shared freely
between threads.
"""

import json
import logging
import math

import numpy
from scipy.special import entr

from secure_rdi.errors import CapacityError, UsageError

__all__ = ["Alphabet", "JointPMF", "ConditionalPMF", "MarkovReport",
           "entropy", "mutual_information", "binary_entropy",
           "check_markov", "make_erasure_source", "as_names", "entropy_bits",
           "MAX_CELLS"]

MAX_CELLS = 10 ** 8
PROB_TOL = 1e-12
ERASURE_LABEL = "e"

_LN2 = math.log(2.0)
_log = logging.getLogger("secure_rdi.probability")


def as_names(variables):
    """Normalize a variable set given as a name, None or an iterable."""
    if variables is None:
        return ()
    if isinstance(variables, str):
        return (variables,)
    names = []
    for item in variables:
        names.extend(as_names(item))
    return tuple(names)


def check_capacity(what, cells, limit=MAX_CELLS):
    if cells > limit:
        raise CapacityError(what, cells, limit)


def _frozen(array):
    array = numpy.array(array, dtype=float)
    array.setflags(write=False)
    return array


def entropy_bits(array):
    # fsum keeps the accumulation exact regardless of summation order
    return math.fsum(entr(numpy.asarray(array, dtype=float)).ravel()) / _LN2


class Alphabet(object):
    """Finite symbol set of a random variable."""

    def __init__(self, size, labels=None):
        size = int(size)
        if size < 1:
            raise UsageError("alphabet size must be >= 1, got %d" % size)
        if labels is None:
            labels = tuple(str(i) for i in range(size))
        labels = tuple(str(label) for label in labels)
        if len(labels) != size:
            raise UsageError("alphabet of size %d got %d labels"
                             % (size, len(labels)))
        if len(set(labels)) != size:
            raise UsageError("alphabet labels must be distinct: %s"
                             % (labels,))
        self._size = size
        self._labels = labels

    @property
    def size(self):
        return self._size

    @property
    def labels(self):
        return self._labels

    def index(self, label):
        try:
            return self._labels.index(str(label))
        except ValueError:
            raise UsageError("unknown symbol %r" % (label,))

    def to_json(self):
        return {"size": self._size, "labels": list(self._labels)}

    def __eq__(self, other):
        return (isinstance(other, Alphabet) and self._size == other._size
                and self._labels == other._labels)

    def __hash__(self):
        return hash(self._labels)

    def __repr__(self):
        return "Alphabet(%d, %s)" % (self._size, list(self._labels))


def _as_axes(axes):
    result = []
    for name, alphabet in axes:
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(alphabet)
        result.append((str(name), alphabet))
    names = [name for name, _ in result]
    if len(set(names)) != len(names):
        raise UsageError("axis names must be distinct: %s" % names)
    return tuple(result)


class JointPMF(object):
    """Joint pmf over named finite-alphabet axes."""

    def __init__(self, axes, probs, tol=PROB_TOL):
        self._axes = _as_axes(axes)
        shape = tuple(alphabet.size for _, alphabet in self._axes)
        check_capacity("joint pmf", int(numpy.prod(shape, dtype=float)))
        probs = numpy.asarray(probs, dtype=float)
        if probs.size != int(numpy.prod(shape)):
            raise UsageError("pmf over %s needs %d entries, got %d"
                             % (self.names, int(numpy.prod(shape)),
                                probs.size))
        probs = probs.reshape(shape)
        if not numpy.all(numpy.isfinite(probs)):
            raise UsageError("pmf entries must be finite")
        if probs.min() < -tol:
            raise UsageError("pmf has a negative entry %g" % probs.min())
        total = math.fsum(probs.ravel())
        if abs(total - 1.0) > tol:
            raise UsageError("pmf sums to %.15g, not 1" % total)
        self._probs = _frozen(numpy.clip(probs, 0.0, None))

    @classmethod
    def from_vector(cls, name, probs, labels=None):
        probs = numpy.asarray(probs, dtype=float).ravel()
        return cls([(name, Alphabet(probs.size, labels))], probs)

    @classmethod
    def product(cls, *pmfs):
        """Joint pmf of independent components."""
        axes = []
        probs = numpy.ones(())
        for pmf in pmfs:
            axes.extend(pmf.axes)
            probs = numpy.multiply.outer(probs, pmf.probs)
        return cls(axes, probs)

    @property
    def axes(self):
        return self._axes

    @property
    def names(self):
        return tuple(name for name, _ in self._axes)

    @property
    def shape(self):
        return self._probs.shape

    @property
    def probs(self):
        return self._probs

    def alphabet(self, name):
        return self._axes[self.axis(name)][1]

    def axis(self, name):
        for index, (axis_name, _) in enumerate(self._axes):
            if axis_name == name:
                return index
        raise UsageError("unknown variable %r (known: %s)"
                         % (name, ", ".join(self.names)))

    def has(self, names):
        return all(name in self.names for name in as_names(names))

    def array(self, names):
        """Marginal array over ``names``, axes in the order given."""
        names = as_names(names)
        if len(set(names)) != len(names):
            raise UsageError("repeated variable in %s" % (names,))
        indices = [self.axis(name) for name in names]
        rest = tuple(i for i in range(len(self._axes)) if i not in indices)
        marginal = self._probs.sum(axis=rest) if rest else self._probs
        kept = sorted(indices)
        return numpy.transpose(marginal, [kept.index(i) for i in indices])

    def grouped(self, *groups):
        """Marginal array with each group of names flattened to one axis."""
        groups = [as_names(group) for group in groups]
        flat = [name for group in groups for name in group]
        array = self.array(flat)
        sizes = [int(numpy.prod([self.alphabet(n).size for n in group]))
                 for group in groups]
        return array.reshape(sizes)

    def marginal(self, names):
        names = as_names(names)
        axes = [(name, self.alphabet(name)) for name in names]
        return JointPMF(axes, self.array(names))

    def reorder(self, names):
        names = as_names(names)
        if sorted(names) != sorted(self.names):
            raise UsageError("reorder needs every axis exactly once")
        return self.marginal(names)

    def conditional(self, outputs, given):
        """p(outputs | given); zero-probability slices become uniform."""
        outputs, given = as_names(outputs), as_names(given)
        joint = self.array(given + outputs)
        g_shape = joint.shape[:len(given)]
        o_shape = joint.shape[len(given):]
        flat = joint.reshape(int(numpy.prod(g_shape)), -1)
        mass = flat.sum(axis=1)
        empty = mass <= 0.0
        cond = numpy.empty_like(flat)
        cond[~empty] = flat[~empty] / mass[~empty, None]
        cond[empty] = 1.0 / flat.shape[1]
        if empty.any():
            _log.warning("p(%s | %s): %d zero-probability slices set uniform",
                         ",".join(outputs), ",".join(given), empty.sum())
        return ConditionalPMF(
            [(n, self.alphabet(n)) for n in given],
            [(n, self.alphabet(n)) for n in outputs],
            cond.reshape(g_shape + o_shape),
            degenerate_slices=int(empty.sum()))

    def extend(self, channel):
        """Joint pmf of self followed by ``channel``."""
        for name, alphabet in channel.given:
            if self.alphabet(name).size != alphabet.size:
                raise UsageError("channel input %r has size %d, pmf has %d"
                                 % (name, alphabet.size,
                                    self.alphabet(name).size))
        for name in channel.output_names:
            if name in self.names:
                raise UsageError("variable %r already present" % name)
        given_idx = [self.axis(name) for name in channel.given_names]
        order = list(numpy.argsort(given_idx))
        n_out = len(channel.output_names)
        cp = numpy.transpose(
            channel.probs,
            order + list(range(len(given_idx), len(given_idx) + n_out)))
        bshape = [1] * len(self.shape) + list(channel.output_shape)
        for i in given_idx:
            bshape[i] = self.shape[i]
        probs = (self._probs.reshape(self.shape + (1,) * n_out)
                 * cp.reshape(bshape))
        return JointPMF(list(self._axes) + list(channel.outputs), probs,
                        tol=1e-9)

    def to_json(self):
        return {"axes": [dict(name=name, **alphabet.to_json())
                         for name, alphabet in self._axes],
                "probs": [float(p) for p in self._probs.ravel()]}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        try:
            axes = [(axis["name"], Alphabet(axis["size"], axis.get("labels")))
                    for axis in data["axes"]]
            return cls(axes, data["probs"])
        except (KeyError, TypeError) as e:
            raise UsageError("malformed pmf document: %s" % e)

    def __repr__(self):
        return "JointPMF(%s)" % ", ".join(
            "%s[%d]" % (name, alphabet.size) for name, alphabet in self._axes)


class ConditionalPMF(object):
    """Channel p(outputs | given); every conditioning slice is a pmf."""

    def __init__(self, given, outputs, probs, tol=PROB_TOL,
                 degenerate_slices=0):
        self._given = _as_axes(given)
        self._outputs = _as_axes(outputs)
        if set(self.given_names) & set(self.output_names):
            raise UsageError("channel inputs and outputs overlap")
        shape = self.given_shape + self.output_shape
        check_capacity("conditional pmf", int(numpy.prod(shape, dtype=float)))
        probs = numpy.asarray(probs, dtype=float)
        if probs.size != int(numpy.prod(shape)):
            raise UsageError("channel %s|%s needs %d entries, got %d"
                             % (self.output_names, self.given_names,
                                int(numpy.prod(shape)), probs.size))
        probs = probs.reshape(shape)
        if probs.min() < -tol:
            raise UsageError("channel has a negative entry %g" % probs.min())
        sums = probs.reshape(int(numpy.prod(self.given_shape)), -1).sum(axis=1)
        if numpy.max(numpy.abs(sums - 1.0)) > max(tol, 1e-12):
            raise UsageError("channel slice sums deviate from 1 by %g"
                             % numpy.max(numpy.abs(sums - 1.0)))
        self._probs = _frozen(numpy.clip(probs, 0.0, None))
        self.degenerate_slices = degenerate_slices

    @classmethod
    def from_matrix(cls, given, given_alphabet, output, output_alphabet,
                    matrix):
        return cls([(given, given_alphabet)], [(output, output_alphabet)],
                   matrix)

    @classmethod
    def deterministic(cls, given, outputs, table):
        """Channel whose flat output index is ``table[given indices]``."""
        given, outputs = _as_axes(given), _as_axes(outputs)
        g_shape = tuple(a.size for _, a in given)
        o_size = int(numpy.prod([a.size for _, a in outputs]))
        table = numpy.asarray(table, dtype=int).reshape(g_shape)
        probs = numpy.zeros(g_shape + (o_size,))
        numpy.put_along_axis(probs, table[..., None], 1.0, axis=-1)
        return cls(given, outputs,
                   probs.reshape(g_shape + tuple(a.size for _, a in outputs)))

    @classmethod
    def constant(cls, given, name):
        """Channel to a singleton alphabet, the empty auxiliary."""
        given = _as_axes(given)
        shape = tuple(a.size for _, a in given) + (1,)
        return cls(given, [(name, Alphabet(1, ["-"]))], numpy.ones(shape))

    @property
    def given(self):
        return self._given

    @property
    def outputs(self):
        return self._outputs

    @property
    def given_names(self):
        return tuple(name for name, _ in self._given)

    @property
    def output_names(self):
        return tuple(name for name, _ in self._outputs)

    @property
    def given_shape(self):
        return tuple(a.size for _, a in self._given)

    @property
    def output_shape(self):
        return tuple(a.size for _, a in self._outputs)

    @property
    def probs(self):
        return self._probs

    def matrix(self):
        """Channel as a (given cells) x (output cells) matrix."""
        return self._probs.reshape(int(numpy.prod(self.given_shape)), -1)

    def to_json(self):
        return {"given": [dict(name=n, **a.to_json()) for n, a in self._given],
                "outputs": [dict(name=n, **a.to_json())
                            for n, a in self._outputs],
                "probs": [float(p) for p in self._probs.ravel()]}

    @classmethod
    def from_json(cls, data):
        try:
            given = [(a["name"], Alphabet(a["size"], a.get("labels")))
                     for a in data["given"]]
            outputs = [(a["name"], Alphabet(a["size"], a.get("labels")))
                       for a in data["outputs"]]
            return cls(given, outputs, data["probs"], tol=1e-9)
        except (KeyError, TypeError) as e:
            raise UsageError("malformed channel document: %s" % e)

    def __repr__(self):
        return "ConditionalPMF(%s | %s)" % (",".join(self.output_names),
                                            ",".join(self.given_names))


def entropy(pmf, over, given=()):
    """H(over | given) in bits."""
    over, given = as_names(over), as_names(given)
    for name in over + given:
        pmf.axis(name)
    union = tuple(dict.fromkeys(over + given))
    if not over:
        return 0.0
    h = entropy_bits(pmf.array(union))
    if given:
        h -= entropy_bits(pmf.array(tuple(dict.fromkeys(given))))
    return 0.0 if -PROB_TOL < h < 0.0 else h


def mutual_information(pmf, a, b, given=()):
    """I(a; b | given) in bits, computed as H(a|given) - H(a|b,given)."""
    a, b, given = as_names(a), as_names(b), as_names(given)
    if (set(a) & set(b)) or (set(a) & set(given)) or (set(b) & set(given)):
        raise UsageError("variable sets %s, %s, %s overlap" % (a, b, given))
    if not a or not b:
        return 0.0
    value = entropy(pmf, a, given) - entropy(pmf, a, b + given)
    return 0.0 if -PROB_TOL < value < 0.0 else value


def binary_entropy(p):
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise UsageError("binary entropy needs 0 <= p <= 1, got %g" % p)
    return float(entr(p) + entr(1.0 - p)) / _LN2


class MarkovReport(object):

    def __init__(self, holds, max_violation, worst_link=None):
        self.holds = bool(holds)
        self.max_violation = float(max_violation)
        self.worst_link = worst_link

    def __bool__(self):
        return bool(self.holds)

    def __repr__(self):
        return "MarkovReport(holds=%s, max_violation=%.3g)" % (
            self.holds, self.max_violation)


def _chain_link_violation(pmf, past, middle, following):
    joint = pmf.grouped(past, middle, following)
    p_pm = joint.sum(axis=2)
    p_m = p_pm.sum(axis=0)
    p_mf = joint.sum(axis=0)
    worst = 0.0
    for m in range(joint.shape[1]):
        if p_m[m] <= 0.0:
            continue
        reference = p_mf[m] / p_m[m]
        for a in range(joint.shape[0]):
            if p_pm[a, m] <= 0.0:
                continue
            tv = 0.5 * numpy.abs(joint[a, m] / p_pm[a, m] - reference).sum()
            worst = max(worst, tv)
    return worst


def check_markov(pmf, chain, tol=1e-9):
    """
    Test the Markov chain ``chain[0] - chain[1] - ...`` on ``pmf``.

    Each link checks p(next | all previous) = p(next | current) in total
    variation on every conditioning slice of positive probability.
    Elements of ``chain`` may be single names or groups of names.
    """
    groups = [as_names(element) for element in chain]
    if len(groups) < 3:
        raise UsageError("a Markov chain needs at least 3 elements")
    flat = [name for group in groups for name in group]
    if len(set(flat)) != len(flat):
        raise UsageError("Markov chain elements overlap: %s" % (chain,))
    for name in flat:
        pmf.axis(name)
    worst, worst_link = 0.0, None
    for i in range(1, len(groups) - 1):
        past = [name for group in groups[:i] for name in group]
        violation = _chain_link_violation(pmf, past, groups[i], groups[i + 1])
        if violation > worst:
            worst, worst_link = violation, i
    return MarkovReport(bool(worst <= tol), float(worst), worst_link)


def make_erasure_source(p_source, p_e, of=None, name="Y",
                        label=ERASURE_LABEL):
    """
    Append ``name``: a copy of axis ``of`` erased with probability p_e.

    The erasure symbol is ``label``; it must not be a label of ``of``.
    """
    p_e = float(p_e)
    if not 0.0 <= p_e <= 1.0:
        raise UsageError("erasure probability must be in [0, 1], got %g" % p_e)
    of = p_source.names[0] if of is None else of
    alphabet = p_source.alphabet(of)
    if str(label) in alphabet.labels:
        raise UsageError("erasure label %r is already a symbol of %s"
                         % (label, of))
    erased = Alphabet(alphabet.size + 1, alphabet.labels + (label,))
    matrix = numpy.hstack([(1.0 - p_e) * numpy.eye(alphabet.size),
                           numpy.full((alphabet.size, 1), p_e)])
    channel = ConditionalPMF.from_matrix(of, alphabet, name, erased, matrix)
    return p_source.extend(channel)
