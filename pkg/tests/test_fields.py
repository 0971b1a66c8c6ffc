from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nilspace import PrimeField, RATIONALS


def test_prime_field_rejects_composites():
    for bad in (0, 1, 4, 6, 9, 91):
        with pytest.raises(ValueError):
            PrimeField(bad)
    for good in (2, 3, 5, 7, 65537):
        assert PrimeField(good).p == good


def test_prime_field_cardinality_and_equality():
    f5 = PrimeField(5)
    assert f5.cardinality == 5
    assert f5 == PrimeField(5)
    assert f5 != PrimeField(7)
    assert f5 != RATIONALS
    assert RATIONALS.cardinality == float("inf")


def test_normalization_is_canonical():
    f7 = PrimeField(7)
    assert f7.normalize(-1) == 6
    assert f7.normalize(14) == 0
    assert f7.normalize("12") == 5
    assert f7.normalize(Fraction(1, 2)) == 4  # 2^-1 = 4 mod 7
    assert RATIONALS.normalize("3/6") == Fraction(1, 2)
    assert RATIONALS.normalize(4) == Fraction(4)


def test_rationals_reject_floats():
    with pytest.raises(TypeError):
        RATIONALS.normalize(0.5)


def test_scalar_division_by_zero_rejected():
    f5 = PrimeField(5)
    with pytest.raises(ZeroDivisionError):
        f5.scalar(3) / f5.scalar(0)
    with pytest.raises(ZeroDivisionError):
        RATIONALS.scalar(1) / RATIONALS.scalar(0)


def test_scalar_arithmetic_examples():
    f5 = PrimeField(5)
    a, b = f5.scalar(3), f5.scalar(4)
    assert (a + b).value == 2
    assert (a - b).value == 4
    assert (a * b).value == 2
    assert (a / b).value == 2  # 4^-1 = 4, 3*4 = 12 = 2
    assert (-a).value == 2
    q = RATIONALS.scalar("2/3")
    assert (q + 1).value == Fraction(5, 3)
    assert (q * Fraction(3, 2)).value == 1


def test_scalars_from_different_fields_do_not_mix():
    with pytest.raises(ValueError):
        PrimeField(5).scalar(1) + PrimeField(7).scalar(1)


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_field_axioms_f7(x, y, z):
    f = PrimeField(7)
    a, b, c = f.scalar(x), f.scalar(y), f.scalar(z)
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + f.scalar(0) == a
    assert a * f.scalar(1) == a
    assert a + (-a) == f.scalar(0)
    if b.value != 0:
        assert (a / b) * b == a


@given(st.fractions(), st.fractions(), st.fractions())
def test_field_axioms_rationals(x, y, z):
    f = RATIONALS
    a, b, c = f.scalar(x), f.scalar(y), f.scalar(z)
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    if y != 0:
        assert (a / b) * b == a


def test_scalar_is_immutable():
    s = PrimeField(5).scalar(2)
    with pytest.raises(AttributeError):
        s.value = 3
