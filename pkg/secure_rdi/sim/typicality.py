"""Sequence enumeration and robust typicality over small blocklengths."""

import numpy

from secure_rdi.core.probability import check_capacity

__all__ = ["SEQUENCE_LIMIT", "all_sequences", "sequence_probs",
           "sequence_channel", "type_counts", "robust_typical",
           "joint_index"]

SEQUENCE_LIMIT = 10 ** 7
TYPICAL_EPS = 0.15


def all_sequences(size, n, limit=SEQUENCE_LIMIT):
    """Every length-n sequence over ``size`` symbols, first symbol major."""
    check_capacity("%d^%d sequence enumeration" % (size, n), size ** n,
                   limit)
    if n == 0:
        return numpy.zeros((1, 0), dtype=int)
    return numpy.stack(numpy.unravel_index(numpy.arange(size ** n),
                                           (size,) * n), axis=1)


def sequence_probs(p, n):
    """i.i.d. probabilities of ``all_sequences`` order."""
    p = numpy.asarray(p, dtype=float).ravel()
    probs = numpy.ones(1)
    for _ in range(n):
        probs = numpy.kron(probs, p)
    return probs


def sequence_channel(channel, n):
    """
    Memoryless extension of a channel tensor p(b | a1, a2, ...).

    ``channel`` has the output on its last axis; every axis is expanded
    to its n-fold sequence axis in ``all_sequences`` order.
    """
    channel = numpy.asarray(channel, dtype=float)
    result = numpy.ones((1,) * channel.ndim)
    for _ in range(n):
        result = numpy.multiply.outer(result, channel)
        nd = channel.ndim
        order = [j for i in range(nd) for j in (i, nd + i)]
        result = result.transpose(order).reshape(
            [result.shape[i] * result.shape[nd + i] for i in range(nd)])
    return result


def joint_index(*parts):
    """Combine (index array, alphabet size) pairs into one letter index."""
    index = 0
    for values, size in parts:
        index = index * size + numpy.asarray(values)
    return index


def type_counts(letters, size):
    """Counts of each letter along the last axis."""
    letters = numpy.asarray(letters)
    counts = numpy.empty(letters.shape[:-1] + (size,), dtype=float)
    for a in range(size):
        counts[..., a] = (letters == a).sum(axis=-1)
    return counts


def robust_typical(letters, p, eps=TYPICAL_EPS):
    """
    |pi(a) - p(a)| <= eps p(a) on every letter a.

    ``letters`` holds joint letter indices along its last axis; cells of
    probability zero must not occur at all.
    """
    p = numpy.asarray(p, dtype=float).ravel()
    letters = numpy.asarray(letters)
    n = letters.shape[-1]
    if n == 0:
        return numpy.ones(letters.shape[:-1], dtype=bool)
    pi = type_counts(letters, p.size) / n
    return numpy.all(numpy.abs(pi - p) <= eps * p + 1e-12, axis=-1)
