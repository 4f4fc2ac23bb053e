import numpy
import pytest

from secure_rdi.errors import CapacityError, UsageError
from secure_rdi.core.probability import Alphabet, ConditionalPMF, JointPMF, \
    binary_entropy, check_markov, entropy, make_erasure_source, \
    mutual_information, check_capacity


def bern(name="X", p=0.5):
    return JointPMF.from_vector(name, [1.0 - p, p])


def copy_of(source, of, name):
    size = source.alphabet(of).size
    return source.extend(ConditionalPMF.from_matrix(
        of, source.alphabet(of), name, Alphabet(size), numpy.eye(size)))


def bsc(source, of, name, p):
    return source.extend(ConditionalPMF.from_matrix(
        of, source.alphabet(of), name, Alphabet(2),
        [[1.0 - p, p], [p, 1.0 - p]]))


@pytest.fixture
def erased_example():
    """X Bern(1/2), Y erased w.p. 0.8, Z = Y with e sent to a coin."""
    source = make_erasure_source(bern(), 0.8, "X", "Y")
    return source.extend(ConditionalPMF.from_matrix(
        "Y", source.alphabet("Y"), "Z", Alphabet(2),
        [[1, 0], [0, 1], [0.5, 0.5]]))


def test_entropy_uniform_bit():
    assert entropy(bern(), "X") == pytest.approx(1.0, abs=1e-12)


def test_entropy_of_copy_given_original():
    assert entropy(copy_of(bern(), "X", "Y"), "X", "Y") == \
        pytest.approx(0.0, abs=1e-12)


def test_erased_conditional_entropy():
    source = make_erasure_source(bern(), 0.8)
    assert entropy(source, "X", "Y") == pytest.approx(0.8, abs=1e-12)


def test_entropy_unknown_variable():
    with pytest.raises(UsageError):
        entropy(bern(), "Q")


def test_mutual_information_independent():
    pmf = JointPMF.product(bern("X", 0.3), bern("Y", 0.6))
    assert mutual_information(pmf, "X", "Y") == pytest.approx(0.0, abs=1e-12)


def test_mutual_information_copy():
    assert mutual_information(copy_of(bern(), "X", "Y"), "X", "Y") == \
        pytest.approx(1.0, abs=1e-12)


def test_mutual_information_numerical_example(erased_example):
    value = mutual_information(erased_example, "X", "Z")
    assert value == pytest.approx(1.0 - binary_entropy(0.4), abs=1e-12)
    assert value == pytest.approx(0.029049, abs=1e-6)


def test_mutual_information_overlap():
    pmf = copy_of(bern(), "X", "Y")
    with pytest.raises(UsageError):
        mutual_information(pmf, ("X", "Y"), "Y")


def test_mutual_information_symmetric(erased_example):
    assert mutual_information(erased_example, "X", ("Y", "Z")) == \
        pytest.approx(mutual_information(erased_example, ("Z", "Y"), "X"),
                      abs=1e-12)


@pytest.mark.parametrize("p, value", [
    (0.0, 0.0),
    (0.5, 1.0),
    (0.4, 0.970951),
    (1.0, 0.0),
])
def test_binary_entropy(p, value):
    assert binary_entropy(p) == pytest.approx(value, abs=1e-6)


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_binary_entropy_range(p):
    with pytest.raises(UsageError):
        binary_entropy(p)


def test_markov_composed_channels():
    pmf = bsc(bsc(bern(), "X", "Y", 0.1), "Y", "Z", 0.2)
    report = check_markov(pmf, ["X", "Y", "Z"])
    assert report
    assert report.max_violation <= 1e-12


def random_chain(rng):
    """X -> Y -> Z through random channels of random alphabet sizes."""
    kx, ky, kz = rng.integers(2, 5, size=3)
    source = JointPMF.from_vector("X", rng.dirichlet(numpy.ones(kx)))
    source = source.extend(ConditionalPMF.from_matrix(
        "X", Alphabet(kx), "Y", Alphabet(ky),
        rng.dirichlet(numpy.ones(ky), size=kx)))
    return source.extend(ConditionalPMF.from_matrix(
        "Y", Alphabet(ky), "Z", Alphabet(kz),
        rng.dirichlet(numpy.ones(kz), size=ky)))


def random_joint(rng, names=("A", "B", "C", "D")):
    sizes = rng.integers(2, 4, size=len(names))
    probs = rng.dirichlet(numpy.ones(int(numpy.prod(sizes))))
    return JointPMF(list(zip(names, (int(k) for k in sizes))), probs)


def test_markov_random_composed_chains():
    rng = numpy.random.default_rng(0)
    for _ in range(100):
        pmf = random_chain(rng)
        report = check_markov(pmf, ["X", "Y", "Z"])
        assert report.holds is True
        assert bool(report)
        assert check_markov(pmf, ["Z", "Y", "X"])


def test_markov_random_joints_fail():
    rng = numpy.random.default_rng(1)
    for _ in range(100):
        report = check_markov(random_joint(rng, ("X", "Y", "Z")),
                              ["X", "Y", "Z"])
        assert report.holds is False
        assert not report


def test_markov_violation():
    pmf = copy_of(JointPMF.product(bern("X"), bern("Y", 0.3)), "X", "Z")
    report = check_markov(pmf, ["X", "Y", "Z"])
    assert not report
    assert report.max_violation == pytest.approx(0.5, abs=1e-12)


def test_markov_erased_eavesdropper():
    source = make_erasure_source(bern(), 0.8, "X", "Z")
    source = source.extend(ConditionalPMF.from_matrix(
        "Z", source.alphabet("Z"), "Y", Alphabet(2),
        [[1, 0], [0, 1], [0.9, 0.1]]))
    assert check_markov(source, ["X", "Z", "Y"])


def test_markov_groups(erased_example):
    assert check_markov(erased_example, [("X",), "Y", ("Z",)])
    with pytest.raises(UsageError):
        check_markov(erased_example, ["X", "Y"])
    with pytest.raises(UsageError):
        check_markov(erased_example, ["X", ("X", "Y"), "Z"])


def test_erasure_zero_is_copy():
    source = make_erasure_source(bern("X", 0.3), 0.0)
    assert entropy(source, "X", "Y") == pytest.approx(0.0, abs=1e-12)
    assert source.array("Y")[2] == 0.0


def test_erasure_one_is_constant():
    source = make_erasure_source(bern("X", 0.3), 1.0)
    assert source.array("Y")[2] == pytest.approx(1.0)
    assert mutual_information(source, "X", "Y") == \
        pytest.approx(0.0, abs=1e-12)


def test_erasure_marginal():
    source = make_erasure_source(bern(), 0.8)
    numpy.testing.assert_allclose(source.array("Y"), [0.1, 0.1, 0.8])
    assert source.alphabet("Y").labels == ("0", "1", "e")


def test_erasure_probability_range():
    with pytest.raises(UsageError):
        make_erasure_source(bern(), 1.2)


def test_erasure_label_collision():
    source = JointPMF.from_vector("X", [0.5, 0.5], labels=["0", "e"])
    with pytest.raises(UsageError):
        make_erasure_source(source, 0.5)
    erased = make_erasure_source(source, 0.5, label="?")
    assert erased.alphabet("Y").labels == ("0", "e", "?")
    numpy.testing.assert_allclose(erased.array("Y"), [0.25, 0.25, 0.5])


def test_chain_rule_on_random_joints():
    rng = numpy.random.default_rng(2)
    for _ in range(100):
        pmf = random_joint(rng)
        assert entropy(pmf, ("A", "B")) == pytest.approx(
            entropy(pmf, "A") + entropy(pmf, "B", "A"), abs=1e-9)
        assert mutual_information(pmf, "A", ("B", "C"), "D") == \
            pytest.approx(mutual_information(pmf, "A", "C", "D") +
                          mutual_information(pmf, "A", "B", ("C", "D")),
                          abs=1e-9)


def test_measures_nonnegative_on_random_joints():
    rng = numpy.random.default_rng(3)
    for _ in range(100):
        pmf = random_joint(rng)
        assert entropy(pmf, "A", ("B", "C")) >= -1e-12
        assert mutual_information(pmf, "A", "B") >= -1e-12
        assert mutual_information(pmf, "A", "B", ("C", "D")) >= -1e-12
        assert mutual_information(pmf, ("A", "D"), "C", "B") >= -1e-12


def test_data_processing_on_random_chains():
    rng = numpy.random.default_rng(4)
    for _ in range(100):
        pmf = random_chain(rng)
        assert mutual_information(pmf, "X", "Z") <= \
            mutual_information(pmf, "X", "Y") + 1e-9
        assert mutual_information(pmf, "X", "Z", "Y") == \
            pytest.approx(0.0, abs=1e-9)


def test_joint_validation():
    with pytest.raises(UsageError):
        JointPMF([("X", 2)], [0.5, 0.6])
    with pytest.raises(UsageError):
        JointPMF([("X", 2), ("X", 2)], [0.25] * 4)
    with pytest.raises(UsageError):
        JointPMF([("X", 2)], [1.2, -0.2])


def test_capacity_limit():
    with pytest.raises(CapacityError):
        check_capacity("test", 11, 10)
    check_capacity("test", 10, 10)


def test_conditional_zero_slice_uniform():
    pmf = JointPMF([("X", 2), ("Y", 2)], [0.5, 0.5, 0.0, 0.0])
    channel = pmf.conditional("Y", "X")
    assert channel.degenerate_slices == 1
    numpy.testing.assert_allclose(channel.matrix()[1], [0.5, 0.5])


def test_json_document(erased_example):
    restored = JointPMF.from_json(erased_example.to_json())
    assert restored.names == erased_example.names
    numpy.testing.assert_allclose(restored.probs, erased_example.probs)


def test_json_malformed():
    with pytest.raises(UsageError):
        JointPMF.from_json({"probs": [1.0]})
