"""
Random binning of sequences and codewords, and the one-time pad.

Entropies are exact: every sequence is enumerated and the bin map of the
seed is fixed. Each sequence draws one uniform label u and lands in bin
floor(u * bins), so bin maps of one seed refine each other whenever the
bin counts divide each other.
"""

import logging
import math

import numpy

from secure_rdi.errors import PreconditionError, UsageError
from secure_rdi.core.probability import check_capacity, entropy_bits, \
    mutual_information
from secure_rdi.sim.typicality import SEQUENCE_LIMIT, TYPICAL_EPS, \
    all_sequences, joint_index, robust_typical, sequence_probs

__all__ = ["PadIndex", "one_time_pad", "pad_values", "unpad_values",
           "BinningExperiment", "LemmaReport", "exact_binning_entropy",
           "codeword_binning_entropy", "bin_labels", "bin_map"]

_log = logging.getLogger("secure_rdi.binning")


class PadIndex(object):
    """Index in [1 : modulus]."""

    def __init__(self, value, modulus):
        if int(modulus) < 1:
            raise UsageError("modulus must be >= 1, got %r" % modulus)
        if not 1 <= int(value) <= int(modulus):
            raise UsageError("pad index %r outside [1 : %d]"
                             % (value, modulus))
        self.value = int(value)
        self.modulus = int(modulus)

    def __eq__(self, other):
        return isinstance(other, PadIndex) and \
            (self.value, self.modulus) == (other.value, other.modulus)

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __repr__(self):
        return "PadIndex(%d/%d)" % (self.value, self.modulus)


def pad_values(m, k, modulus):
    """(m + k) mod modulus on 1-based indices, 0 mapped to modulus."""
    result = (numpy.asarray(m) + numpy.asarray(k)) % modulus
    return numpy.where(result == 0, modulus, result)


def unpad_values(c, k, modulus):
    """Inverse of ``pad_values`` in m for fixed k."""
    result = (numpy.asarray(c) - numpy.asarray(k)) % modulus
    return numpy.where(result == 0, modulus, result)


def one_time_pad(m, k):
    if m.modulus != k.modulus:
        raise UsageError("pad moduli differ: %d and %d"
                         % (m.modulus, k.modulus))
    return PadIndex(int(pad_values(m.value, k.value, m.modulus)), m.modulus)


def bin_labels(count, seed, stream=0):
    """One uniform label per item, shared by every bin count of a seed."""
    return numpy.random.default_rng([seed, stream]).random(count)


def bin_map(labels, bins):
    return numpy.minimum((labels * bins).astype(int), bins - 1)


def _bin_count(n, rate):
    return max(1, int(round(2.0 ** (n * rate))))


class LemmaReport(object):
    """
    Exact conditional entropy of a binning experiment against its bound.

    Both lemmas bound the entropy from above, up to n * delta: ``slack``
    is bound - value and ``delta`` the per-symbol excess
    max(0, (value - bound) / n), 0 when the bound holds outright.
    ``lower_bound``, when present, is a bound from below that always holds.
    """

    def __init__(self, value, bound, n, bins, lower_bound=None, notes=None):
        self.value = value
        self.bound = bound
        self.n = n
        self.bins = bins
        self.effective_rate = math.log2(bins) / n
        self.slack = bound - value
        self.delta = max(0.0, -self.slack / n)
        self.lower_bound = lower_bound
        self.notes = dict(notes or {})

    def to_json(self):
        data = {"value": self.value, "bound": self.bound, "n": self.n,
                "bins": self.bins, "effective_key_rate": self.effective_rate,
                "slack": self.slack, "delta": self.delta}
        if self.lower_bound is not None:
            data["lower_bound"] = self.lower_bound
        data.update(self.notes)
        return data

    def __repr__(self):
        return "LemmaReport(value=%.6g, bound=%.6g, delta=%.3g)" % (
            self.value, self.bound, self.delta)


class BinningExperiment(object):
    """
    Bin all Y^n sequences into round(2^{n R_K}) bins; W observes Y.

    Args:
        source: joint pmf containing the binned variable and its observer
        n: blocklength, 1 to 12
        R_K: key rate in bits per symbol
        seed: seed of the bin labels
    """

    def __init__(self, source, n, R_K, seed=0, binned="Y", observer="W"):
        if not 1 <= int(n) <= 12:
            raise UsageError("blocklength must be in [1, 12], got %r" % n)
        if R_K < 0:
            raise UsageError("key rate must be >= 0, got %g" % R_K)
        self.source = source
        self.n = int(n)
        self.R_K = float(R_K)
        self.seed = int(seed)
        self.binned = binned
        self.observer = observer
        self.bins = _bin_count(self.n, self.R_K)
        pair = source.grouped(binned, observer)
        check_capacity("(Y^n, W^n) enumeration",
                       (pair.shape[0] * pair.shape[1]) ** self.n,
                       SEQUENCE_LIMIT)

    def bin_map(self):
        size = self.source.grouped(self.binned).size ** self.n
        return bin_map(bin_labels(size, self.seed), self.bins)

    def __repr__(self):
        return "BinningExperiment(n=%d, R_K=%g, bins=%d, seed=%d)" % (
            self.n, self.R_K, self.bins, self.seed)


def exact_binning_entropy(exp):
    """H(Y^n | W^n, K) = n H(Y,W) - H(W^n, K), with K a function of Y^n."""
    pair = exp.source.grouped(exp.binned, exp.observer)
    joint = numpy.ones((1, 1))
    for _ in range(exp.n):
        joint = numpy.kron(joint, pair)
    keyed = numpy.zeros((exp.bins, joint.shape[1]))
    numpy.add.at(keyed, exp.bin_map(), joint)
    value = exp.n * entropy_bits(pair) - entropy_bits(keyed)
    value = max(value, 0.0)
    h_cond = entropy_bits(pair) - entropy_bits(pair.sum(axis=0))
    key_bits = math.log2(exp.bins)
    if key_bits > exp.n * h_cond + 1e-12:
        _log.warning("key rate %.4g exceeds H(Y|W)=%.4g",
                     key_bits / exp.n, h_cond)
    report = LemmaReport(value, exp.n * (h_cond - exp.R_K), exp.n, exp.bins,
                         lower_bound=exp.n * h_cond - key_bits)
    _log.debug("binning entropy %r", report)
    return report


def codeword_binning_entropy(n, R_tilde, R_K, joint, seed=0,
                             eps=TYPICAL_EPS, u="U", w="W"):
    """
    H(L | K, W^n) for a random U-codebook of 2^{n R~} words.

    W^n is drawn from its marginal; the encoder picks L uniformly among
    codewords jointly typical with W^n, or among all when none is. K is
    the random bin of L.
    """
    p_uw = joint.grouped(u, w)
    p_u, p_w = p_uw.sum(axis=1), p_uw.sum(axis=0)
    info = mutual_information(joint, u, w)
    if R_tilde - R_K - info <= 0:
        raise PreconditionError("R~ - R_K - I(U;W) = %.4g must be > 0"
                                % (R_tilde - R_K - info))
    words = int(math.ceil(2.0 ** (n * R_tilde) - 1e-9))
    bins = _bin_count(n, R_K)
    w_seqs = all_sequences(p_w.size, n)
    check_capacity("codebook x W^n enumeration", words * len(w_seqs) * n,
                   10 * SEQUENCE_LIMIT)
    rng = numpy.random.default_rng([seed, 1])
    codebook = rng.choice(p_u.size, size=(words, n), p=p_u)
    keys = bin_map(bin_labels(words, seed, 2), bins)

    letters = joint_index((codebook[None, :, :], p_u.size),
                          (w_seqs[:, None, :], p_w.size))
    typical = robust_typical(letters, p_uw, eps)              # (W^n, L)
    none = ~typical.any(axis=1)
    typical[none] = True
    choice = typical / typical.sum(axis=1, keepdims=True)
    p_l_w = sequence_probs(p_w, n)[:, None] * choice
    p_k_w = numpy.zeros((len(w_seqs), bins))
    numpy.add.at(p_k_w.T, keys, p_l_w.T)
    value = max(entropy_bits(p_l_w) - entropy_bits(p_k_w), 0.0)
    report = LemmaReport(value, n * (R_tilde - R_K - info), n,
                         bins, notes={"codewords": words,
                                      "mutual_information": info,
                                      "untypical_mass": float(
                                          sequence_probs(p_w, n)[none].sum())})
    _log.debug("codeword binning entropy %r", report)
    return report
