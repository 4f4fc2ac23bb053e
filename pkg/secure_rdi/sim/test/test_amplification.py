import numpy
import pytest

from secure_rdi.errors import CapacityError, UsageError
from secure_rdi.core.probability import Alphabet, ConditionalPMF, JointPMF
from secure_rdi.sim.typicality import all_sequences, robust_typical, \
    sequence_channel, sequence_probs
from secure_rdi.sim.amplification import ListReport, SequenceJoint, \
    check_amplification, measure_block_entropy, measure_list


def bern(name="X", p=0.5):
    return JointPMF.from_vector(name, [1.0 - p, p])


@pytest.fixture
def perfect():
    source = bern().extend(ConditionalPMF.from_matrix(
        "X", Alphabet(2), "Y", Alphabet(2), numpy.eye(2)))
    return SequenceJoint.iid(source, "X", "Y", 3)


@pytest.fixture
def blind():
    source = JointPMF.product(bern(), JointPMF.from_vector("Y", [1.0]))
    return SequenceJoint.iid(source, "X", "Y", 3)


def test_all_sequences_order():
    seqs = all_sequences(2, 3)
    assert seqs.shape == (8, 3)
    assert list(seqs[1]) == [0, 0, 1]
    assert list(seqs[-1]) == [1, 1, 1]
    assert all_sequences(3, 0).shape == (1, 0)


def test_all_sequences_capacity():
    with pytest.raises(CapacityError):
        all_sequences(4, 12)


def test_sequence_probs():
    numpy.testing.assert_allclose(sequence_probs([0.25, 0.75], 2),
                                  [1 / 16., 3 / 16., 3 / 16., 9 / 16.])


def test_sequence_channel():
    channel = sequence_channel([[0.9, 0.1], [0.2, 0.8]], 2)
    assert channel.shape == (4, 4)
    numpy.testing.assert_allclose(channel.sum(axis=1), 1.0)
    # a = (0, 1), b = (1, 0)
    assert channel[1, 2] == pytest.approx(0.1 * 0.2)


@pytest.mark.parametrize("letters, eps, typical", [
    ([0, 0, 1, 1], 0.0, True),
    ([0, 0, 0, 1], 0.5, True),
    ([0, 0, 0, 1], 0.4, False),
])
def test_robust_typical(letters, eps, typical):
    assert bool(robust_typical(letters, [0.5, 0.5], eps)) == typical


def test_zero_probability_letter_is_never_typical():
    assert not robust_typical([0, 1, 1], [0.0, 1.0], 1.0)
    assert robust_typical([1, 1, 1], [0.0, 1.0], 0.1)


def test_list_with_perfect_information(perfect):
    report = measure_list(perfect, eps=1.0)
    assert report.max_size == 1
    assert report.exponent == 0.0
    assert report.coverage == pytest.approx(1.0)
    assert measure_block_entropy(perfect) == pytest.approx(0.0, abs=1e-12)


def test_list_without_information(blind):
    report = measure_list(blind, eps=1.0)
    assert report.max_size == 8
    assert report.exponent == pytest.approx(1.0)
    assert report.coverage == pytest.approx(1.0)
    assert measure_block_entropy(blind) == pytest.approx(1.0, abs=1e-12)


def test_amplification_holds(blind):
    report = measure_list(blind, eps=1.0)
    check = check_amplification(measure_block_entropy(blind), report, 3, 2)
    assert check.holds
    assert check.bound == pytest.approx(1.0 + 2.0 / 3)


def test_amplification_fails_on_short_list():
    check = check_amplification(2.0, ListReport(0.0, 1.0, 1), 3, 2)
    assert not check.holds
    assert check.to_json()["bound"] == pytest.approx(2.0 / 3)


def test_amplification_miss_term():
    check = check_amplification(0.9, ListReport(0.0, 0.5, 1), 4, 2)
    assert check.bound == pytest.approx(0.5 + 0.5)
    assert check.holds


def test_sequence_joint_validation():
    pmf = numpy.full((2, 1), 0.5)
    with pytest.raises(UsageError):
        SequenceJoint(numpy.full((3, 1), 1 / 3.), 1, pmf, [[0]])
    with pytest.raises(UsageError):
        SequenceJoint(numpy.full((2, 1), 0.5), 1, pmf, [[0, 0]])
    with pytest.raises(UsageError):
        SequenceJoint(numpy.full((2, 1), 0.4), 1, pmf, [[0]])
