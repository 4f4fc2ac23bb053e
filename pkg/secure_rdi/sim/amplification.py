"""
List-size and block-entropy measures of what a decoder knows about X^n.
"""

import logging
import math

import numpy

from secure_rdi.errors import UsageError
from secure_rdi.core.probability import as_names, check_capacity, \
    entropy_bits
from secure_rdi.sim.typicality import SEQUENCE_LIMIT, TYPICAL_EPS, \
    all_sequences, joint_index, robust_typical

__all__ = ["SequenceJoint", "ListReport", "AmplificationCheck",
           "measure_list", "measure_block_entropy", "check_amplification"]

_log = logging.getLogger("secure_rdi.amplification")


class SequenceJoint(object):
    """
    Exact joint of X^n and the decoder information.

    Args:
        probs: (|X|^n, infos) array
        n: blocklength
        letter_pmf: single-letter p(x, letter) the list decoder tests against
        letters: (infos, n) per-symbol letter index of each information value
    """

    def __init__(self, probs, n, letter_pmf, letters):
        probs = numpy.asarray(probs, dtype=float)
        letter_pmf = numpy.asarray(letter_pmf, dtype=float)
        letters = numpy.asarray(letters, dtype=int)
        if probs.shape[0] != letter_pmf.shape[0] ** n:
            raise UsageError("joint has %d rows, expected |X|^n = %d"
                             % (probs.shape[0], letter_pmf.shape[0] ** n))
        if letters.shape != (probs.shape[1], n):
            raise UsageError("letter sequences must be (%d, %d), got %s"
                             % (probs.shape[1], n, letters.shape))
        if abs(probs.sum() - 1.0) > 1e-9:
            raise UsageError("sequence joint sums to %.12g" % probs.sum())
        self.probs = probs
        self.n = n
        self.letter_pmf = letter_pmf
        self.letters = letters

    @property
    def x_size(self):
        return self.letter_pmf.shape[0]

    @classmethod
    def iid(cls, pmf, x, info, n):
        """n i.i.d. copies of (X, info) with info seen symbol by symbol."""
        info = as_names(info)
        pair = pmf.grouped(x, info)
        check_capacity("(X^n, info^n) enumeration", pair.size ** n,
                       SEQUENCE_LIMIT)
        probs = numpy.ones((1, 1))
        for _ in range(n):
            probs = numpy.kron(probs, pair)
        return cls(probs, n, pair, all_sequences(pair.shape[1], n))


class ListReport(object):

    def __init__(self, exponent, coverage, max_size):
        self.exponent = exponent
        self.coverage = coverage
        self.max_size = max_size

    def to_json(self):
        return {"list_exponent": self.exponent, "coverage": self.coverage,
                "max_list_size": self.max_size}

    def __repr__(self):
        return "ListReport(exponent=%.4g, coverage=%.4g, max=%d)" % (
            self.exponent, self.coverage, self.max_size)


def measure_list(joint, eps=TYPICAL_EPS):
    """
    List decoder {x^n : (x^n, letters) robustly typical} for every
    decoder information value of positive probability.
    """
    x_seqs = all_sequences(joint.x_size, joint.n)
    k = joint.letter_pmf.shape[1]
    check_capacity("list enumeration",
                   x_seqs.shape[0] * joint.letters.shape[0] * joint.n,
                   10 * SEQUENCE_LIMIT)
    letters = joint_index((x_seqs[:, None, :], joint.x_size),
                          (joint.letters[None, :, :], k))
    members = robust_typical(letters, joint.letter_pmf, eps)
    seen = joint.probs.sum(axis=0) > 0
    sizes = members.sum(axis=0)[seen]
    max_size = int(sizes.max()) if sizes.size else 0
    exponent = math.log2(max_size) / joint.n if max_size > 0 else 0.0
    coverage = float(joint.probs[members].sum())
    report = ListReport(exponent, min(coverage, 1.0), max_size)
    _log.debug("list measure %r", report)
    return report


def measure_block_entropy(joint):
    """(1/n) H(X^n | decoder information) in bits per symbol."""
    value = entropy_bits(joint.probs) - entropy_bits(joint.probs.sum(axis=0))
    return max(value, 0.0) / joint.n


class AmplificationCheck(object):
    """H(X^n|info)/n against the list exponent plus the failure term."""

    def __init__(self, entropy_rate, bound):
        self.entropy_rate = entropy_rate
        self.bound = bound
        self.holds = entropy_rate <= bound + 1e-12

    def to_json(self):
        return {"entropy_rate": self.entropy_rate, "bound": self.bound,
                "holds": self.holds}

    def __repr__(self):
        return "AmplificationCheck(%.4g <= %.4g: %s)" % (
            self.entropy_rate, self.bound, self.holds)


def check_amplification(entropy_rate, list_report, n, x_size):
    """
    H(X^n|info) <= log|L| + 2 + n P(X^n not in L) log|X|, per symbol.
    """
    miss = max(0.0, 1.0 - list_report.coverage)
    bound = list_report.exponent + \
        (2.0 + n * miss * math.log2(x_size)) / n
    check = AmplificationCheck(entropy_rate, bound)
    if not check.holds:
        _log.warning("amplification relation fails: %r", check)
    return check
