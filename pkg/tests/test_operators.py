import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcwb.operators import (PauliSum, PauliTerm, TermPartition, commutes, group_commuting,
                            qubitwise_commutes, random_pauli_sum, simplify, to_matrix,
                            validate_partition)

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
MAT = {"I": I2, "X": X, "Y": Y, "Z": Z}

labels = st.integers(1, 5).flatmap(lambda n: st.tuples(st.text("IXYZ", min_size=n, max_size=n),
                                                      st.text("IXYZ", min_size=n, max_size=n)))


def kron_label(label):
    m = np.eye(1)
    for ch in label:
        m = np.kron(m, MAT[ch])
    return m


def T(label, c=1.0):
    return PauliTerm(label, c)


@pytest.mark.parametrize("a,b,expected", [("XX", "YY", True), ("XI", "ZI", False), ("IZ", "ZI", True)])
def test_commutes_examples(a, b, expected):
    assert commutes(T(a), T(b)) is expected


@pytest.mark.parametrize("a,b,expected", [("XI", "XZ", True), ("XX", "YY", False), ("II", "XY", True)])
def test_qubitwise_examples(a, b, expected):
    assert qubitwise_commutes(T(a), T(b)) is expected


@given(labels)
def test_commutes_agrees_with_matrices(pair):
    a, b = pair
    ma, mb = kron_label(a), kron_label(b)
    assert commutes(T(a), T(b)) == np.allclose(ma @ mb, mb @ ma)
    if qubitwise_commutes(T(a), T(b)):
        assert commutes(T(a), T(b))


def test_width_mismatch_rejected():
    with pytest.raises(ValueError):
        commutes(T("X"), T("XX"))


def test_invalid_label_and_coefficient():
    with pytest.raises(ValueError):
        T("XQ")
    with pytest.raises(ValueError):
        T("X", float("nan"))


def test_simplify_examples():
    s = PauliSum.from_pairs([(1.0, "Z"), (1.0, "Z")]).simplify()
    assert [(t.coeff, t.label) for t in s] == [(2.0, "Z")]
    empty = PauliSum.from_pairs([(1.0, "X"), (-1.0, "X")]).simplify()
    assert len(empty) == 0 and empty.width == 1
    s = PauliSum.from_pairs([(0.5, "II"), (0.25, "ZZ"), (0.5, "II")]).simplify()
    assert [(t.coeff, t.label) for t in s] == [(1.0, "II"), (0.25, "ZZ")]


def test_simplify_is_canonical_and_idempotent(rng):
    s = random_pauli_sum(4, 30, rng)
    shuffled = PauliSum(4, list(reversed(s.terms)))
    assert simplify(s) == simplify(shuffled)
    assert simplify(simplify(s)) == simplify(s)


def test_to_matrix_examples():
    np.testing.assert_allclose(PauliSum.from_pairs([(1.0, "Z")]).to_matrix(), np.diag([1, -1]))
    np.testing.assert_allclose(PauliSum.from_pairs([(1.0, "X")]).to_matrix(), [[0, 1], [1, 0]])
    np.testing.assert_allclose(PauliSum.from_pairs([(0.5, "I"), (0.5, "Z")]).to_matrix(), np.diag([1, 0]))


def test_label_is_ket_ordered():
    # "XZ": X on qubit 1, Z on qubit 0 -> matrix kron(X, Z)
    np.testing.assert_allclose(to_matrix(PauliSum.from_pairs([(1.0, "XZ")])), np.kron(X, Z))
    assert T("XZ").axis(0) == "Z" and T("XZ").support() == [0, 1]


@given(st.lists(st.tuples(st.floats(-2, 2), st.text("IXYZ", min_size=3, max_size=3)), min_size=1, max_size=6))
@settings(max_examples=50)
def test_to_matrix_matches_kron_sum(pairs):
    s = PauliSum.from_pairs(pairs)
    ref = sum(c * kron_label(l) for c, l in pairs)
    np.testing.assert_allclose(s.to_matrix(), ref, atol=1e-12)
    np.testing.assert_allclose(s.to_matrix(), s.to_matrix().conj().T)


def test_to_matrix_respects_limit():
    with pytest.raises(ValueError):
        PauliSum.identity(5).to_matrix(limit=4)


def test_compiled_matvec_matches_dense(rng):
    s = random_pauli_sum(5, 25, rng)
    psi = rng.normal(size=32) + 1j * rng.normal(size=32)
    np.testing.assert_allclose(s._compiled.matvec(psi), s.to_matrix() @ psi, atol=1e-12)


def test_grouping_examples():
    assert group_commuting(PauliSum.from_pairs([(1, "X"), (1, "Z")]), "qubitwise").n_groups == 2
    assert group_commuting(PauliSum.from_pairs([(1, "XI"), (1, "IZ"), (1, "XZ")]), "qubitwise").n_groups == 1


@pytest.mark.parametrize("mode,check", [("general", commutes), ("qubitwise", qubitwise_commutes)])
def test_random_partition_is_valid(mode, check):
    s = random_pauli_sum(8, 60, np.random.default_rng(7))
    part = group_commuting(s, mode)
    assert sorted(i for g in part.groups for i in g) == list(range(len(s)))
    for g in part.groups:
        for i, j in itertools.combinations(g, 2):
            assert check(s.terms[i], s.terms[j])
    validate_partition(s, part)


def test_validate_partition_rejects_bad():
    s = PauliSum.from_pairs([(1, "X"), (1, "Z")])
    with pytest.raises(ValueError):
        validate_partition(s, TermPartition(((0, 1),), "general"))
    with pytest.raises(ValueError):
        validate_partition(s, TermPartition(((0,),), "general"))


def test_text_round_trip(rng):
    s = random_pauli_sum(4, 10, rng)
    assert PauliSum.from_text(s.to_text()) == s


@pytest.mark.parametrize("text,fragment", [
    ("0.5 XZ\n0.1 XQ\n", "src:2"),
    ("0.5 XZ\nabc ZZ\n", "src:2"),
    ("0.5 XZ\n0.5 XZZ\n", "src:2"),
    ("0.5\n", "src:1"),
])
def test_text_errors_name_line(text, fragment):
    with pytest.raises(ValueError, match=fragment):
        PauliSum.from_text(text, source="src")
