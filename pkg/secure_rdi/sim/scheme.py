"""
Exact simulation of the two-layer binning scheme with a Y-derived key.

One codebook is drawn per seed. Every (x^n, y^n) pair is enumerated with
the encoder's choice distribution (uniform over jointly typical
codewords, uniform over all when none is), so distortion, error rates
and leakage I(X^n; M, Z^n) of that codebook are exact. Monte Carlo trials
sample the same outcome law.
"""

import logging
import math

import numpy

from secure_rdi.errors import UsageError
from secure_rdi.core.probability import check_capacity, entropy_bits, \
    mutual_information, entropy
from secure_rdi.core.regions import U, V, expected_distortion
from secure_rdi.core.solvers import DistortionSpec, bayes_reconstruction
from secure_rdi.sim.binning import bin_labels, bin_map, pad_values, \
    unpad_values
from secure_rdi.sim.typicality import SEQUENCE_LIMIT, TYPICAL_EPS, \
    all_sequences, joint_index, robust_typical, sequence_channel
from secure_rdi.sim.amplification import SequenceJoint, measure_list, \
    measure_block_entropy, check_amplification

__all__ = ["SchemeCodebook", "SimReport", "simulate_scheme_open",
           "LOGLOSS_EPS", "MAX_SIM_N"]

LOGLOSS_EPS = 1e-3
MAX_SIM_N = 6
ENUMERATION_LIMIT = 2 * SEQUENCE_LIMIT

_log = logging.getLogger("secure_rdi.scheme")


def _size(n, rate):
    return max(1, int(math.ceil(2.0 ** (n * rate) - 1e-9)))


class SchemeCodebook(object):
    """
    Rate-distortion and key codebooks of one seed.

    ``u_words`` is (L0, n), ``v_words`` (L0, L1, n). ``bin0`` maps l0 to
    m0, ``bin1`` maps (l0, l1) to m1, ``key_bins`` maps every y^n to m_k.
    Indices are 0-based.
    """

    def __init__(self, joint, n, eps, seed, slack, x, y, z):
        self.n = n
        self.eps = eps
        self.seed = seed
        uv = (U, V)
        self.rates = {
            "U": mutual_information(joint, U, (x, y)),
            "V|U": mutual_information(joint, V, (x, y), U),
            "m0": mutual_information(joint, U, x, y),
            "m1": mutual_information(joint, V, x, (U, y)),
        }
        self.key_rate = min(self.rates["m1"],
                            entropy(joint, y, uv + (x, z)))
        self.L0 = _size(n, self.rates["U"] + slack)
        self.L1 = _size(n, self.rates["V|U"] + slack)
        self.M0 = min(_size(n, self.rates["m0"] + 3 * slack), self.L0)
        M1 = min(_size(n, self.rates["m1"] + 3 * slack), self.L1)
        self.MK = min(max(1, int(round(2.0 ** (n * self.key_rate)))), M1)
        # the pad acts on a full sub-index of every outer bin
        self.M1o = int(math.ceil(M1 / float(self.MK)))
        self.M1 = self.M1o * self.MK
        self.scrambled = self.MK > 1
        for name in ("L0", "L1", "M0", "M1"):
            if getattr(self, name) == 1:
                _log.warning("codebook size %s is 1 at n=%d", name, n)
        if not self.scrambled:
            _log.warning("key rate %.4g gives a single key bin at n=%d, "
                         "scrambling skipped", self.key_rate, n)

        k_u, k_v = joint.alphabet(U).size, joint.alphabet(V).size
        rng = numpy.random.default_rng([seed, 0])
        self.u_words = rng.choice(k_u, size=(self.L0, n),
                                  p=joint.array(U))
        cdf = numpy.cumsum(joint.conditional(V, U).matrix(), axis=1)
        draws = rng.random((self.L0, self.L1, n))
        step = cdf[self.u_words][:, None, :, :]
        self.v_words = numpy.minimum(
            (draws[..., None] > step).sum(axis=-1), k_v - 1)
        self.bin0 = bin_map(bin_labels(self.L0, seed, 3), self.M0)
        self.bin1 = bin_map(bin_labels(self.L0 * self.L1, seed, 4),
                            self.M1).reshape(self.L0, self.L1)
        self.key_bins = bin_map(
            bin_labels(joint.alphabet(y).size ** n, seed, 5), self.MK)

    @property
    def messages(self):
        return self.M0 * self.M1o * self.MK

    def message(self, m0, m1, key, scrambled=True):
        """Flat message index of (m0, m1o, m1s (+) key)."""
        m1s, m1o = m1 % self.MK, m1 // self.MK
        if scrambled:
            m1s = pad_values(m1s + 1, key + 1, self.MK) - 1
        return (m0 * self.M1o + m1o) * self.MK + m1s

    def unscramble(self, message, key, scrambled=True):
        """(m0, m1) from a flat message and the key."""
        m1s = message % self.MK
        rest = message // self.MK
        m1o, m0 = rest % self.M1o, rest // self.M1o
        if scrambled:
            m1s = unpad_values(m1s + 1, key + 1, self.MK) - 1
        return m0, m1o * self.MK + m1s

    def sizes(self):
        return {"L0": self.L0, "L1": self.L1, "M0": self.M0, "M1": self.M1,
                "MK": self.MK, "M1o": self.M1o}

    def __repr__(self):
        return "SchemeCodebook(n=%d, %s)" % (
            self.n, ", ".join("%s=%d" % kv for kv in sorted(
                self.sizes().items())))


class SimReport(object):
    """
    Exact and sampled figures of one simulated codebook.

    ``leakage`` is that of the deployed scheme, ``leakage_padded`` that of
    the padded messages; ``scrambled`` says whether the pad was kept.
    """

    fields = ("n", "trials", "seed", "eps", "empirical_distortion",
              "distortion_stderr", "exact_distortion",
              "single_letter_distortion", "leakage", "leakage_unscrambled",
              "leakage_padded", "eavesdropper_floor", "key_rate", "key_bins", "scrambled",
              "encoder_failure_rate", "decoder_error_rate",
              "empirical_error_rate", "list_exponent", "list_coverage",
              "block_entropy_rate", "amplification_holds", "codebook")

    def __init__(self, **kwargs):
        for name in self.fields:
            setattr(self, name, kwargs.get(name))
        for name in ("leakage", "leakage_unscrambled", "leakage_padded",
                     "list_exponent", "block_entropy_rate"):
            if getattr(self, name) < -1e-12:
                raise UsageError("%s must be >= 0" % name)
            setattr(self, name, max(getattr(self, name), 0.0))

    @property
    def distortion_gap(self):
        return self.exact_distortion - self.single_letter_distortion

    def to_json(self):
        data = {name: getattr(self, name) for name in self.fields}
        data["distortion_gap"] = self.distortion_gap
        return data

    def __repr__(self):
        return "SimReport(n=%d, D=%.4g, leakage=%.4g/%.4g)" % (
            self.n, self.exact_distortion, self.leakage,
            self.leakage_unscrambled)


def _uniform_choice(typical):
    """Uniform over True entries of the last axis, over all if none."""
    none = ~typical.any(axis=-1)
    mask = typical | none[..., None]
    return mask / mask.sum(axis=-1, keepdims=True), none


def _first_candidate(candidates, fallback):
    """Lowest index of ``candidates`` along the last axis, else fallback."""
    found = candidates.any(axis=-1)
    first = numpy.argmax(candidates, axis=-1)
    backup = numpy.argmax(fallback, axis=-1)
    return numpy.where(found, first, backup), found


def _letter_loss(joint, dist, x, decoder, table):
    """loss[x, letter] of the per-symbol reconstruction."""
    p_xc = joint.grouped(x, decoder)
    if dist.is_log_loss:
        k = p_xc.shape[0]
        mass = p_xc.sum(axis=0)
        post = numpy.where(mass > 0, p_xc / numpy.where(mass > 0, mass, 1.0),
                           1.0 / k)
        support = post > 0
        zeros = (~support).sum(axis=0)
        guess = numpy.where(support, (1.0 - zeros * LOGLOSS_EPS / k) * post,
                            LOGLOSS_EPS / k)
        return -numpy.log2(guess)
    d = dist.matrix_for(p_xc.shape[0])
    if table is None:
        table = bayes_reconstruction(p_xc, d)
    return d[:, table]


def simulate_scheme_open(source, aux, n, eps=TYPICAL_EPS, seed=0,
                         trials=10000, dist=None, slack=0.05, x="X", y="Y",
                         z="Z"):
    """
    Simulate the open-switch scheme for one codebook.

    Args:
        source: pmf over (X, Y, Z)
        aux: ``AuxChannelSet`` whose channel depends on X and/or Y
        n: blocklength, at most 6
        eps: robust typicality parameter
        slack: rate margin added to every codebook rate
    """
    dist = dist or DistortionSpec.hamming()
    if not 1 <= n <= MAX_SIM_N:
        raise UsageError("exact simulation needs 1 <= n <= %d, got %r"
                         % (MAX_SIM_N, n))
    if slack < 0:
        raise UsageError("rate slack must be >= 0, got %g" % slack)
    if trials < 1:
        raise UsageError("trials must be >= 1")
    joint = aux.joint(source, (x, y))
    single_letter = expected_distortion(joint, dist, (x,), (y, U, V),
                                        aux.reconstruction)
    given = aux.uv.given_names
    k_x, k_y, k_z = (source.alphabet(name).size for name in (x, y, z))
    k_u, k_v = aux.uv.output_shape
    check_capacity("(x^n, y^n, z^n) enumeration", (k_x * k_y * k_z) ** n,
                   SEQUENCE_LIMIT)
    book = SchemeCodebook(joint, n, eps, seed, slack, x, y, z)
    _log.info("simulating %r", book)

    x_seqs, y_seqs = all_sequences(k_x, n), all_sequences(k_y, n)
    n_x, n_y = len(x_seqs), len(y_seqs)
    check_capacity("encoder enumeration",
                   n_x * n_y * book.L0 * book.L1 * n, ENUMERATION_LIMIT)
    seqs = {x: (x_seqs[:, None, :], k_x), y: (y_seqs[None, :, :], k_y)}
    sizes = [seqs[name][1] for name in given]
    k_g = int(numpy.prod(sizes)) if sizes else 1
    g = numpy.broadcast_to(joint_index(*[seqs[name] for name in given]),
                           (n_x, n_y, n))

    # encoder
    p_ug = joint.grouped(U, given)
    letters = joint_index((book.u_words[None, None], k_u),
                          (g[:, :, None, :], k_g))
    p_l0, fail_u = _uniform_choice(robust_typical(letters, p_ug, eps))
    p_vug = joint.grouped(V, U, given)
    letters = joint_index((book.v_words[None, None], k_v),
                          (book.u_words[None, None, :, None, :], k_u),
                          (g[:, :, None, None, :], k_g))
    p_l1, fail_v = _uniform_choice(robust_typical(letters, p_vug, eps))
    p_xy = _pair_probs(source.grouped(x, y), n)
    weight = p_xy[:, :, None, None] * p_l0[..., None] * p_l1
    failed = fail_u[:, :, None, None] | fail_v[..., None]

    # decoder
    p_uy = joint.grouped(U, y)
    dec_u = robust_typical(joint_index((book.u_words[None], k_u),
                                       (y_seqs[:, None, :], k_y)), p_uy, eps)
    in_bin0 = book.bin0[None, :] == numpy.arange(book.M0)[:, None]
    l0_hat, _ = _first_candidate(dec_u[:, None, :] & in_bin0[None],
                                 numpy.broadcast_to(in_bin0[None],
                                                    (n_y,) + in_bin0.shape))
    p_vuy = joint.grouped(V, U, y)
    dec_v = robust_typical(joint_index(
        (book.v_words[None], k_v), (book.u_words[None, :, None, :], k_u),
        (y_seqs[:, None, None, :], k_y)), p_vuy, eps)       # (Ny, L0, L1)
    y_idx = numpy.arange(n_y)[:, None]
    cand_v = dec_v[y_idx, l0_hat]                           # (Ny, M0, L1)
    in_bin1 = book.bin1[l0_hat][:, :, None, :] == \
        numpy.arange(book.M1)[None, None, :, None]          # (Ny, M0, M1, L1)
    l1_hat, _ = _first_candidate(cand_v[:, :, None, :] & in_bin1, in_bin1)

    u_dec = book.u_words[l0_hat]                            # (Ny, M0, n)
    v_dec = book.v_words[l0_hat[:, :, None], l1_hat]        # (Ny, M0, M1, n)
    decoded = joint_index((y_seqs[:, None, None, :], k_y),
                          (u_dec[:, :, None, :], k_u), (v_dec, k_v))
    loss = _letter_loss(joint, dist, x, (y, U, V), aux.reconstruction)
    flat = decoded.reshape(-1, n)
    block_loss = numpy.zeros((n_x, flat.shape[0]))
    for i in range(n):
        block_loss += loss[x_seqs[:, i][:, None], flat[None, :, i]]
    block_loss = (block_loss / n).reshape((n_x, n_y, book.M0, book.M1))

    outcome_loss = block_loss[:, :, book.bin0[:, None], book.bin1]
    wrong = (l0_hat[:, book.bin0][:, :, None] !=
             numpy.arange(book.L0)[None, :, None]) | \
        (l1_hat[:, book.bin0[:, None], book.bin1] !=
         numpy.arange(book.L1)[None, None, :])               # (Ny, L0, L1)
    wrong = numpy.broadcast_to(wrong[None], weight.shape)

    exact_distortion = float(numpy.sum(weight * outcome_loss))
    error_rate = float(numpy.sum(weight * wrong))
    failure_rate = float(numpy.sum(weight * failed))

    # leakage
    keys = book.key_bins[:, None, None]
    m0 = book.bin0[None, :, None]
    m1 = book.bin1[None, :, :]
    on = book.message(m0, m1, keys, True)                   # (Ny, L0, L1)
    off = book.message(m0, m1, keys, False)
    p_z = sequence_channel(source.conditional(z, (x, y)).probs, n)
    leak_padded, info_on = _leakage(weight, on, p_z, book.messages, n)
    leak_off, info_off = _leakage(weight, off, p_z, book.messages, n)
    # the pad stays only where it does not raise the exact leakage
    padded = bool(book.scrambled and leak_padded <= leak_off + 1e-12)
    if book.scrambled and not padded:
        _log.warning("padded leakage %.6g exceeds unpadded %.6g, pad "
                     "dropped for this codebook", leak_padded, leak_off)
    leakage, info = (leak_padded, info_on) if padded else (leak_off,
                                                           info_off)

    # decoder information (message, y^n)
    messages = numpy.arange(book.messages)
    dec_m0, dec_m1 = book.unscramble(messages[None, :],
                                     book.key_bins[:, None], padded)
    info_letters = decoded[numpy.arange(n_y)[:, None], dec_m0, dec_m1]
    seq_joint = SequenceJoint(info, n, joint.grouped(x, (y, U, V)),
                              info_letters.reshape(-1, n))
    lists = measure_list(seq_joint, eps)
    block_rate = measure_block_entropy(seq_joint)
    amplification = check_amplification(block_rate, lists, n, k_x)

    rng = numpy.random.default_rng([seed, 7])
    law = weight.ravel() / weight.sum()
    picks = rng.choice(law.size, size=trials, p=law)
    sampled = outcome_loss.ravel()[picks]
    report = SimReport(
        n=n, trials=trials, seed=seed, eps=eps,
        empirical_distortion=float(sampled.mean()),
        distortion_stderr=float(sampled.std(ddof=1) / math.sqrt(trials))
        if trials > 1 else 0.0,
        exact_distortion=exact_distortion,
        single_letter_distortion=single_letter,
        leakage=leakage, leakage_unscrambled=leak_off,
        leakage_padded=leak_padded,
        eavesdropper_floor=mutual_information(source, x, z),
        key_rate=book.key_rate, key_bins=book.MK, scrambled=padded,
        encoder_failure_rate=failure_rate, decoder_error_rate=error_rate,
        empirical_error_rate=float(wrong.ravel()[picks].mean()),
        list_exponent=lists.exponent, list_coverage=lists.coverage,
        block_entropy_rate=block_rate,
        amplification_holds=amplification.holds, codebook=book.sizes())
    _log.info("%r", report)
    return report


def _pair_probs(p_xy, n):
    """p(x^n, y^n) as an (|X|^n, |Y|^n) array."""
    probs = numpy.ones((1, 1))
    for _ in range(n):
        probs = numpy.kron(probs, p_xy)
    return probs


def _leakage(weight, message, p_z, messages, n):
    """(1/n) I(X^n; M, Z^n) and the (x^n, (y^n, m)) law."""
    n_x, n_y = weight.shape[:2]
    cols = (numpy.arange(n_y)[:, None, None] * messages + message).ravel()
    per_y = numpy.zeros((n_y * messages, n_x))
    numpy.add.at(per_y, cols, weight.reshape(n_x, -1).T)
    info = per_y.T                                          # (Nx, Ny*M)
    by_y = info.reshape(n_x, n_y, messages)
    law = numpy.einsum("xym,xyz->xmz", by_y, p_z)
    value = (entropy_bits(law.sum(axis=(1, 2))) +
             entropy_bits(law.sum(axis=0)) - entropy_bits(law)) / n
    return max(value, 0.0), info
