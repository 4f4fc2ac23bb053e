import logging

import numpy
import pytest

from secure_rdi.errors import CapacityError, PreconditionError, UsageError
from secure_rdi.core.probability import JointPMF, binary_entropy
from secure_rdi.sim.binning import BinningExperiment, LemmaReport, \
    PadIndex, bin_labels, bin_map, codeword_binning_entropy, \
    exact_binning_entropy, one_time_pad, pad_values, unpad_values


@pytest.fixture
def lemma_bsc():
    """Y Bern(1/2) seen by W through a BSC(0.1)."""
    return JointPMF([("Y", 2), ("W", 2)], [0.45, 0.05, 0.05, 0.45])


@pytest.mark.parametrize("m, k, c", [
    (3, 8, 3),
    (7, 3, 2),
    (5, 3, 8),
])
def test_one_time_pad(m, k, c):
    padded = one_time_pad(PadIndex(m, 8), PadIndex(k, 8))
    assert padded == PadIndex(c, 8)
    assert int(unpad_values(c, k, 8)) == m


def test_pad_is_a_bijection():
    keys = numpy.arange(1, 9)
    for m in range(1, 9):
        assert sorted(pad_values(m, keys, 8)) == list(range(1, 9))


@pytest.mark.parametrize("modulus", [1, 2, 3, 7, 255, 1024, 4099, 2 ** 16])
def test_pad_bijection_in_message(modulus):
    messages = numpy.arange(1, modulus + 1)
    for k in {1, modulus // 2 + 1, modulus}:
        padded = pad_values(messages, k, modulus)
        numpy.testing.assert_array_equal(numpy.sort(padded), messages)
        numpy.testing.assert_array_equal(
            unpad_values(padded, k, modulus), messages)


@pytest.mark.parametrize("modulus", [1, 2, 5, 16, 1023, 2 ** 10])
def test_padded_index_uniform_for_every_message(modulus):
    values = numpy.arange(1, modulus + 1)
    table = pad_values(values[:, None], values[None, :], modulus)  # (m, k)
    # a uniform key hits every padded value once, whatever the message
    numpy.testing.assert_array_equal(numpy.sort(table, axis=1),
                                     numpy.broadcast_to(values, table.shape))
    numpy.testing.assert_array_equal(numpy.sort(table, axis=0),
                                     numpy.broadcast_to(values[:, None],
                                                        table.shape))


@pytest.mark.parametrize("value, modulus", [(0, 8), (9, 8), (1, 0)])
def test_pad_index_range(value, modulus):
    with pytest.raises(UsageError):
        PadIndex(value, modulus)


def test_pad_moduli_differ():
    with pytest.raises(UsageError):
        one_time_pad(PadIndex(1, 8), PadIndex(1, 4))


@pytest.mark.parametrize("R_K, bins", [(0.0, 1), (0.2, 3), (0.4, 9)])
def test_bin_count(lemma_bsc, R_K, bins):
    assert BinningExperiment(lemma_bsc, 8, R_K).bins == bins


def test_bin_maps_are_nested():
    labels = bin_labels(256, seed=11)
    fine, coarse = bin_map(labels, 9), bin_map(labels, 3)
    numpy.testing.assert_array_equal(fine // 3, coarse)
    assert not bin_map(labels, 1).any()
    assert fine.max() < 9


def test_exact_entropy_without_key(lemma_bsc):
    report = exact_binning_entropy(BinningExperiment(lemma_bsc, 8, 0.0))
    assert report.value == pytest.approx(8 * binary_entropy(0.1), abs=1e-9)
    assert report.delta == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_exact_entropy_decreases_with_key_rate(lemma_bsc, seed):
    grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    reports = [exact_binning_entropy(BinningExperiment(lemma_bsc, 8, R_K,
                                                       seed))
               for R_K in grid]
    values = [r.value for r in reports]
    assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))
    h_cond = binary_entropy(0.1)
    for R_K, report in zip(grid, reports):
        assert report.value >= report.lower_bound - 1e-9
        assert report.value <= report.bound + 8 * report.delta + 1e-9
        # the key cannot carry more than H(Y^n | W^n)
        assert report.delta >= max(0.0, R_K - h_cond) - 1e-9
        if R_K < h_cond:
            assert report.delta <= 0.15
    assert reports[4].effective_rate == pytest.approx(numpy.log2(9) / 8)


def test_key_rate_above_conditional_entropy_is_reported(lemma_bsc, caplog):
    caplog.set_level(logging.WARNING, logger="secure_rdi")
    report = exact_binning_entropy(BinningExperiment(lemma_bsc, 8, 0.5))
    assert report.delta > 0.0
    assert report.slack < 0.0
    assert "exceeds H(Y|W)" in caplog.text



def test_exact_entropy_same_seed_same_value(lemma_bsc):
    first = exact_binning_entropy(BinningExperiment(lemma_bsc, 6, 0.3, 4))
    second = exact_binning_entropy(BinningExperiment(lemma_bsc, 6, 0.3, 4))
    assert first.value == second.value


@pytest.mark.parametrize("n, R_K", [(0, 0.1), (13, 0.1), (4, -0.1)])
def test_experiment_validation(lemma_bsc, n, R_K):
    with pytest.raises(UsageError):
        BinningExperiment(lemma_bsc, n, R_K)


def test_experiment_capacity(lemma_bsc):
    with pytest.raises(CapacityError):
        BinningExperiment(lemma_bsc, 12, 0.1)


def test_lemma_report_excess():
    report = LemmaReport(3.0, 2.8, 4, 2)
    assert report.slack == pytest.approx(-0.2)
    assert report.delta == pytest.approx(0.05)
    assert report.to_json()["effective_key_rate"] == pytest.approx(0.25)
    under = LemmaReport(2.0, 2.8, 4, 2, lower_bound=1.5)
    assert under.delta == 0.0
    assert under.to_json()["lower_bound"] == 1.5


@pytest.fixture
def bsc_pair():
    def make(p):
        return JointPMF([("U", 2), ("W", 2)],
                        [(1 - p) / 2, p / 2, p / 2, (1 - p) / 2])
    return make


@pytest.mark.parametrize("p, R_tilde, R_K", [
    (0.1, 0.9, 0.3),
    (0.2, 0.9, 0.3),
    (0.2, 0.75, 0.125),
])
def test_codeword_binning_at_blocklength_eight(bsc_pair, p, R_tilde, R_K):
    joint = bsc_pair(p)
    report = codeword_binning_entropy(8, R_tilde, R_K, joint, seed=3,
                                      eps=1.0)
    info = 1.0 - binary_entropy(p)
    assert report.bound == pytest.approx(8 * (R_tilde - R_K - info),
                                         abs=1e-9)
    assert report.delta == pytest.approx(
        max(0.0, (report.value - report.bound) / 8), abs=1e-12)
    assert report.value <= report.bound + 8 * report.delta + 1e-9
    assert 0.0 <= report.value <= numpy.log2(report.notes["codewords"]) + 1e-9


def test_codeword_binning_independent_observer():
    joint = JointPMF([("U", 2), ("W", 2)], [0.25, 0.25, 0.25, 0.25])
    report = codeword_binning_entropy(8, 0.75, 0.0, joint, seed=1)
    assert report.notes["codewords"] == 64
    assert report.notes["mutual_information"] == pytest.approx(0.0,
                                                               abs=1e-12)
    assert report.value <= 8 * 0.75 + 1e-9
    assert report.delta == pytest.approx(0.0, abs=1e-12)



def test_codeword_binning(lemma_bsc):
    joint = JointPMF([("U", 2), ("W", 2)], lemma_bsc.probs)
    report = codeword_binning_entropy(4, 1.0, 0.25, joint, seed=2)
    assert report.bins == 2
    assert report.notes["codewords"] == 16
    assert report.notes["mutual_information"] == \
        pytest.approx(1.0 - binary_entropy(0.1), abs=1e-12)
    assert report.value >= 0.0
    assert 0.0 <= report.notes["untypical_mass"] <= 1.0


def test_codeword_binning_precondition(lemma_bsc):
    joint = JointPMF([("U", 2), ("W", 2)], lemma_bsc.probs)
    with pytest.raises(PreconditionError):
        codeword_binning_entropy(4, 0.5, 0.25, joint)
