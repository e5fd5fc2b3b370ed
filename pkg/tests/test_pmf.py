import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import entropy as scipy_entropy

from conftest import joints, kernel_tables
from macjsc import (
    DiscreteKernel,
    DistortionMeasure,
    attach_kernel,
    binary_entropy,
    entropy,
    expected_distortion,
    make_joint,
    mutual_info,
    point_mass,
    product,
)
from macjsc.exceptions import (
    AlphabetMismatch,
    NameCollision,
    NegativeProbability,
    NotNormalized,
    OverlappingSets,
    ShapeMismatch,
    UnknownVariable,
)
from macjsc.instances import binary_pair

CASES = settings(max_examples=200, deadline=None)


def H(p):
    return float(scipy_entropy(np.ravel(p), base=2))


# -- fixed values ---------------------------------------------------------------


def test_binary_pair_entropies():
    j = binary_pair()
    assert entropy(j, "U1") == pytest.approx(1.0, abs=1e-12)
    # oracle: -(2/3 log 1/3... ) by hand: H(U1|U2) = h(1/3)
    assert entropy(j, "U1", "U2") == pytest.approx(binary_entropy(1 / 3), abs=1e-12)
    assert entropy(j, ("U1", "U2")) == pytest.approx(1 + binary_entropy(1 / 3), abs=1e-12)
    assert mutual_info(j, "U1", "U2") == pytest.approx(1 - binary_entropy(1 / 3), abs=1e-12)


def test_zero_cells_contribute_nothing():
    j = make_joint([("A", 2), ("B", 2)], [[0.5, 0.0], [0.0, 0.5]])
    assert entropy(j, ("A", "B")) == pytest.approx(1.0)
    assert entropy(j, "A", "B") == 0.0


def test_point_mass_has_zero_entropy():
    j = point_mass([("A", 3), ("B", 2)], (2, 1))
    assert entropy(j, ("A", "B")) == 0.0


def test_product_is_independent():
    a = make_joint([("A", 2)], [0.2, 0.8])
    b = make_joint([("B", 3)], [0.1, 0.3, 0.6])
    j = product(a, b)
    assert mutual_info(j, "A", "B") == pytest.approx(0.0, abs=1e-12)


def test_expected_distortion_hamming():
    j = attach_kernel(make_joint([("U", 2)], [0.5, 0.5]), DiscreteKernel(("U",), "V", [[0.9, 0.1], [0.2, 0.8]]))
    assert expected_distortion(j, "U", "V", DistortionMeasure.hamming(2)) == pytest.approx(0.15)


def test_binary_entropy_endpoints():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0


# -- validation -----------------------------------------------------------------


def test_negative_probability():
    with pytest.raises(NegativeProbability):
        make_joint([("A", 2)], [1.1, -0.1])


def test_not_normalized():
    with pytest.raises(NotNormalized):
        make_joint([("A", 2)], [0.3, 0.3])


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        make_joint([("A", 2), ("B", 2)], [0.5, 0.5])


def test_unknown_variable():
    with pytest.raises(UnknownVariable):
        entropy(binary_pair(), "Q")


def test_name_collision():
    with pytest.raises(NameCollision):
        attach_kernel(binary_pair(), DiscreteKernel(("U1",), "U2", np.eye(2)))


def test_overlapping_sets():
    with pytest.raises(OverlappingSets):
        mutual_info(binary_pair(), "U1", "U1")


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        attach_kernel(binary_pair(), DiscreteKernel(("U1",), "V", np.full((3, 2), 0.5)))


def test_kernel_rows_must_normalize():
    with pytest.raises(NotNormalized):
        DiscreteKernel(("U1",), "V", [[0.5, 0.4], [0.5, 0.5]])


def test_json_round_trip():
    j = binary_pair()
    k = j.__class__.from_dict(j.to_dict())
    assert k.names == j.names
    np.testing.assert_array_equal(k.probs, j.probs)


# -- properties -----------------------------------------------------------------


@CASES
@given(joints())
def test_entropy_matches_scipy(j):
    assert entropy(j, ("A", "B", "C")) == pytest.approx(H(j.probs), abs=1e-9)
    assert entropy(j, "A") == pytest.approx(H(j.probs.sum((1, 2))), abs=1e-9)


@CASES
@given(joints())
def test_chain_rule(j):
    lhs = entropy(j, ("A", "B", "C"))
    rhs = entropy(j, "A") + entropy(j, "B", "A") + entropy(j, "C", ("A", "B"))
    assert lhs == pytest.approx(rhs, abs=1e-9)


@CASES
@given(joints())
def test_mutual_info_nonnegative_and_symmetric(j):
    i = mutual_info(j, "A", "B", "C")
    assert i >= -1e-12
    assert i == pytest.approx(mutual_info(j, "B", "A", "C"), abs=1e-9)
    assert mutual_info(j, "A", ("B", "C")) >= -1e-12


@CASES
@given(joints(names=("A", "B")), st.data())
def test_data_processing(j, data):
    t = data.draw(kernel_tables([j.size("B")], data.draw(st.integers(1, 3))))
    jc = attach_kernel(j, DiscreteKernel(("B",), "C", t))
    assert mutual_info(jc, "A", "C") <= mutual_info(jc, "A", "B") + 1e-9


@CASES
@given(joints(), st.data())
def test_attach_kernel_preserves_marginal(j, data):
    t = data.draw(kernel_tables([j.size("C"), j.size("A")], data.draw(st.integers(1, 3))))
    jk = attach_kernel(j, DiscreteKernel(("C", "A"), "K", t))
    np.testing.assert_allclose(jk.marginal(("A", "B", "C")).probs, j.probs, atol=1e-12)
    # the new variable depends on nothing but its inputs
    assert mutual_info(jk, "K", "B", ("A", "C")) == pytest.approx(0.0, abs=1e-9)


@CASES
@given(st.floats(0.0, 1.0))
def test_binary_entropy_oracle(p):
    expect = 0.0 if p in (0.0, 1.0) else -(p * math.log2(p) + (1 - p) * math.log2(1 - p))
    assert binary_entropy(p) == pytest.approx(expect, abs=1e-12)
