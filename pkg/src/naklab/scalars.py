"""Exact Gaussian-rational scalars.

Real coefficients stay plain :class:`fractions.Fraction` (or ``int``); a
:class:`GaussianRational` only appears once a nonzero imaginary part does,
and arithmetic collapses back to a ``Fraction`` when the imaginary part
cancels.  This keeps the common (real) path fast.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

__all__ = [
    "demote",
    "GaussianRational",
    "I",
    "as_scalar",
    "format_rational",
    "format_scalar",
    "i_power",
    "is_zero",
    "parse_rational",
    "parse_scalar",
    "real_imag",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"inexact or unsupported scalar {x!r}")


class GaussianRational:
    """``re + im*i`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @staticmethod
    def make(re, im):
        """Build a scalar, collapsing to a ``Fraction`` when ``im == 0``."""
        if im == 0:
            return _frac(re)
        return GaussianRational(re, im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational.make(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Rational)):
            return GaussianRational(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational.make(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Rational)):
            return GaussianRational(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Rational)):
            return GaussianRational(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational.make(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Rational)):
            return GaussianRational.make(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            norm = other.re * other.re + other.im * other.im
            if norm == 0:
                raise ZeroDivisionError("division by zero scalar")
            num = self * other.conjugate()
            re, im = real_imag(num)
            return GaussianRational.make(re / norm, im / norm)
        if isinstance(other, (int, Rational)):
            if other == 0:
                raise ZeroDivisionError("division by zero scalar")
            return GaussianRational.make(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Rational)):
            return GaussianRational(other) / self
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** (-k))
        result = Fraction(1)
        base = self
        while k:
            if k & 1:
                result = base * result
            base = base * base
            k >>= 1
        return result


I = GaussianRational(0, 1)

_I_POWERS = (Fraction(1), I, Fraction(-1), GaussianRational(0, -1))


def demote(x):
    """Integral Fractions become ints: exact, equal, same hash, much faster."""
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def i_power(k: int):
    """``sqrt(-1)**k`` for any integer ``k``."""
    return _I_POWERS[k % 4]


def real_imag(x) -> tuple[Fraction, Fraction]:
    if isinstance(x, GaussianRational):
        return x.re, x.im
    return _frac(x), Fraction(0)


def as_scalar(x):
    """Normalize ints/Fractions/Gaussians; rejects floats."""
    if isinstance(x, GaussianRational):
        return GaussianRational.make(x.re, x.im)
    return _frac(x)


def is_zero(x) -> bool:
    return not x


_RAT = r"[+-]?\d+(?:/\d+)?"
_RAT_RE = re.compile(rf"^\s*({_RAT})\s*$")
_SCALAR_RE = re.compile(
    rf"^\s*(?:(?P<re>{_RAT})(?=$|\s*[+-]))?\s*"
    rf"(?:(?P<im>[+-]?\s*(?:\d+(?:/\d+)?)?)\s*\*?\s*i)?\s*$"
)


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` (or an int) into a Fraction."""
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str) or not _RAT_RE.match(text):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text.strip())


def parse_scalar(text):
    """Parse ``"p/q+r/s*i"`` style Gaussian-rational strings."""
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a scalar: {text!r}")
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    m = _SCALAR_RE.match(s)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise ValueError(f"not a Gaussian rational: {text!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
    im_text = m.group("im")
    if im_text is None:
        im_part = Fraction(0)
    elif im_text in ("", "+"):
        im_part = Fraction(1)
    elif im_text == "-":
        im_part = Fraction(-1)
    else:
        im_part = Fraction(im_text)
    return GaussianRational.make(re_part, im_part)


def format_rational(x) -> str:
    x = _frac(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_scalar(x) -> str:
    re_part, im_part = real_imag(x)
    if im_part == 0:
        return format_rational(re_part)
    im_text = format_rational(im_part)
    if re_part == 0:
        return f"{im_text}*i"
    sign = "" if im_part < 0 else "+"
    return f"{format_rational(re_part)}{sign}{im_text}*i"
