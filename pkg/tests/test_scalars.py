from fractions import Fraction

import pytest

from naklab.scalars import (
    GaussianRational,
    I,
    as_scalar,
    demote,
    format_scalar,
    i_power,
    parse_scalar,
    real_imag,
)


def test_i_squared_is_minus_one():
    assert I * I == -1
    assert isinstance(I * I, (int, Fraction))


def test_i_powers_cycle():
    assert [i_power(k) for k in range(4)] == [1, I, -1, -I]
    assert i_power(-1) == -I
    assert i_power(-1) * i_power(1) == 1


def test_gaussian_division_is_exact():
    z = GaussianRational(Fraction(1, 2), 3)
    assert z / z == 1
    assert (1 / z) * z == 1


def test_floats_rejected():
    with pytest.raises(TypeError):
        as_scalar(0.5)


@pytest.mark.parametrize("text, value", [
    ("3", Fraction(3)),
    ("-2/4", Fraction(-1, 2)),
    ("1/2+1/3*i", GaussianRational(Fraction(1, 2), Fraction(1, 3))),
    ("-i", -I),
    ("2*i", 2 * I),
])
def test_parse_scalar(text, value):
    assert parse_scalar(text) == value


def test_format_round_trip():
    for z in (Fraction(-7, 3), GaussianRational(0, -1), GaussianRational(Fraction(2, 5), Fraction(-1, 7))):
        assert parse_scalar(format_scalar(z)) == z


def test_real_imag_and_demote():
    assert real_imag(Fraction(1, 2)) == (Fraction(1, 2), 0)
    assert demote(Fraction(4, 2)) == 2 and type(demote(Fraction(4, 2))) is int
    assert type(demote(Fraction(1, 2))) is Fraction
