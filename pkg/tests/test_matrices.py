import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nilspace import (
    ExactMatrix,
    NotNilpotentError,
    PrimeField,
    RATIONALS,
    SingularMatrixError,
    identity_matrix,
    inverse,
    is_nilpotent,
    jordan_partition,
    mat_pow,
    nilindex,
    rank,
    shift_matrix,
    submatrix,
    unit_matrix,
)

F5 = PrimeField(5)
F7 = PrimeField(7)


def test_shift_matrix_pattern():
    j = shift_matrix(3, F5)
    assert j.rows == ((0, 1, 0), (0, 0, 1), (0, 0, 0))
    assert shift_matrix(1, F5).rows == ((0,),)


def test_shift_matrix_rational_power_and_rank():
    j = shift_matrix(4, RATIONALS)
    assert mat_pow(j, 4).is_zero()
    assert rank(j) == 3


def test_unit_matrix_examples():
    e = unit_matrix(0, 1, 2, F5)
    assert e.rows == ((0, 1), (0, 0))
    assert unit_matrix(2, 2, 3, F5).trace() == 1
    e12 = unit_matrix(0, 1, 3, F5)
    e23 = unit_matrix(1, 2, 3, F5)
    assert (e12 @ e23) == unit_matrix(0, 2, 3, F5)
    with pytest.raises(ValueError):
        unit_matrix(3, 0, 3, F5)


def test_rank_examples():
    for n in range(1, 6):
        assert rank(shift_matrix(n, F5)) == n - 1
    assert rank(ExactMatrix.zeros(3, 3, F5)) == 0
    # hand elimination mod 2: the two rows coincide
    m = ExactMatrix.from_rows(PrimeField(2), [[1, 1], [1, 1]])
    assert rank(m) == 1


def test_rank_is_deterministic_and_capped():
    from nilspace.matrices import _rank_mod_p

    rng = random.Random(5)
    for _ in range(50):
        rows = [[rng.randrange(7) for _ in range(4)] for _ in range(4)]
        full = _rank_mod_p(rows, 7)
        for cap in range(0, 5):
            got = _rank_mod_p(rows, 7, cap)
            assert got == (full if full <= cap else cap + 1)


def test_mat_pow_examples():
    j3 = shift_matrix(3, F5)
    assert mat_pow(j3, 2) == unit_matrix(0, 2, 3, F5)
    assert mat_pow(j3, 3).is_zero()
    assert mat_pow(j3, 0) == identity_matrix(3, F5)
    two_i = identity_matrix(2, RATIONALS).scale(2)
    assert mat_pow(two_i, 3) == identity_matrix(2, RATIONALS).scale(8)
    with pytest.raises(ValueError):
        mat_pow(ExactMatrix.zeros(2, 3, F5), 2)


def test_nilindex_examples():
    for n in (1, 2, 4):
        assert nilindex(shift_matrix(n, F5)) == max(n, 1)
    assert nilindex(identity_matrix(3, F5)) is None
    assert nilindex(unit_matrix(0, 1, 4, F5)) == 2
    assert nilindex(ExactMatrix.zeros(2, 2, F5)) == 1


def test_jordan_partition_examples():
    for n in range(1, 6):
        assert jordan_partition(shift_matrix(n, F5)).parts == (n,) + (0,) * (n - 1)
    assert jordan_partition(ExactMatrix.zeros(4, 4, F5)).parts == (1, 1, 1, 1)
    # one 2-block plus one 1-block: rank sequence 3, 1, 0 -> counts (2, 1, 0)
    m = ExactMatrix.from_rows(F5, [[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    assert jordan_partition(m).parts == (2, 1, 0)
    with pytest.raises(NotNilpotentError):
        jordan_partition(identity_matrix(2, F5))


def test_jordan_partition_round_trip_with_rank_sequence():
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randrange(2, 6)
        # random strictly upper triangular matrices are nilpotent
        m = ExactMatrix.from_rows(
            F7,
            [[rng.randrange(7) if j > i else 0 for j in range(n)] for i in range(n)],
        )
        part = jordan_partition(m)
        conj = part.conjugate()
        for j in range(1, n + 1):
            expected = rank(mat_pow(m, j - 1)) - rank(mat_pow(m, j))
            assert conj.parts[j - 1] == expected


def test_submatrix_examples():
    j3 = shift_matrix(3, F5)
    assert submatrix(j3, (0, 1, 2), (0, 1, 2)) == j3
    j2 = shift_matrix(2, F5)
    assert submatrix(j2, (0,), (0,)).rows == ((0,),)
    assert submatrix(j3, (0, 1), (1, 2)).rows == ((1, 0), (0, 1))
    with pytest.raises(ValueError):
        submatrix(j3, (1, 0), (0, 1))
    with pytest.raises(ValueError):
        submatrix(j3, (0, 3), (0, 1))


def test_matrix_construction_and_equality():
    m = ExactMatrix.from_rows(RATIONALS, [[1, "1/2"], [0, 3]])
    assert m[0, 1] == Fraction(1, 2)
    with pytest.raises(ValueError):
        ExactMatrix.from_rows(F5, [[1, 2], [3]])
    with pytest.raises(ValueError):
        ExactMatrix(F5, ((7,),))  # not canonical without from_rows


def test_inverse_round_trip_and_singular():
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randrange(1, 5)
        m = ExactMatrix.from_rows(
            F7, [[rng.randrange(7) for _ in range(n)] for _ in range(n)]
        )
        if rank(m) < n:
            with pytest.raises(SingularMatrixError):
                inverse(m)
        else:
            assert m @ inverse(m) == identity_matrix(n, F7)
    q = ExactMatrix.from_rows(RATIONALS, [[2, 1], [1, 1]])
    assert inverse(q) @ q == identity_matrix(2, RATIONALS)


@st.composite
def _square_matrices(draw):
    n = draw(st.integers(2, 4))
    rows = draw(
        st.lists(
            st.lists(st.integers(0, 6), min_size=n, max_size=n),
            min_size=n, max_size=n,
        )
    )
    return ExactMatrix.from_rows(F7, rows)


@settings(max_examples=60, deadline=None)
@given(_square_matrices())
def test_rank_sequence_is_doubly_monotone(m):
    # rank(M^k) decreases, and its decrements decrease too; this is what
    # makes the block-size extraction well defined
    n = m.n_rows
    ranks = [rank(mat_pow(m, k)) for k in range(n + 2)]
    diffs = [a - b for a, b in zip(ranks, ranks[1:])]
    assert all(a >= b for a, b in zip(ranks, ranks[1:]))
    assert all(a >= b for a, b in zip(diffs, diffs[1:]))


@settings(max_examples=40, deadline=None)
@given(_square_matrices())
def test_nilpotency_equivalent_to_vanishing_nth_power(m):
    assert is_nilpotent(m) == mat_pow(m, m.n_rows).is_zero()
    assert is_nilpotent(m) == (nilindex(m) is not None)
