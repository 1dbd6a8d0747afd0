"""Exact Gaussian rationals.

Every coefficient in the engine is a :class:`Scalar`, a complex number whose
real and imaginary parts are :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

__all__ = ["Scalar", "ZERO", "ONE", "I", "as_scalar", "parse_scalar", "format_scalar", "format_rational"]


class Scalar:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "Scalar":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Scalar._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Scalar._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return Scalar._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return Scalar._raw(a * c, b)
        return Scalar._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "Scalar":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Scalar")
        return Scalar._raw(self.re / n, -self.im / n)

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self.re, -self.im)

    def norm2(self) -> Fraction:
        """Squared modulus, an exact rational."""
        return self.re * self.re + self.im * self.im

    # comparison -------------------------------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return False
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return format_scalar(self)


def _coerce(x):
    if type(x) is Scalar:
        return x
    if isinstance(x, (int, Rational)):
        return Scalar._raw(Fraction(x), Fraction(0))
    if isinstance(x, complex):
        return Scalar(Fraction(x.real), Fraction(x.imag))
    return NotImplemented


def as_scalar(x) -> Scalar:
    """Coerce ints, Fractions, exact-valued complex numbers and literal strings."""
    if isinstance(x, str):
        return parse_scalar(x)
    s = _coerce(x)
    if s is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to Scalar")
    return s


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def format_rational(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(s: Scalar) -> str:
    if not s.im:
        return format_rational(s.re)
    if s.im == 1:
        im = "i"
    elif s.im == -1:
        im = "-i"
    else:
        im = format_rational(s.im) + "i"
    if not s.re:
        return im
    sign = "" if im.startswith("-") else "+"
    return f"{format_rational(s.re)}{sign}{im}"


_RAT = r"[+-]?\d+(?:/\d+)?"
_IMAG = r"(?:(?:\d+(?:/\d+)?)?i|i/\d+)"
_SCALAR_RE = re.compile(
    rf"^(?:(?P<re>{_RAT})(?P<im>[+-]{_IMAG})?|(?P<imonly>[+-]?{_IMAG}))$"
)


def _parse_imag(text: str) -> Fraction:
    if "i/" in text:
        sign, _, den = text.partition("i/")
        return Fraction(-1 if sign == "-" else 1, int(den))
    body = text[:-1]
    if body in ("", "+"):
        return Fraction(1)
    if body == "-":
        return Fraction(-1)
    return Fraction(body)


def parse_scalar(text: str) -> Scalar:
    """Parse ``"p/q"``, ``"p/q+r/si"``, ``"r/si"``, ``"i/q"`` or ``"i"``.

    ``r/si`` always means ``(r/s)*i``.
    """
    t = "".join(str(text).split())
    m = _SCALAR_RE.match(t)
    if not m:
        raise ValueError(f"invalid scalar literal: {text!r}")
    try:
        if m.group("imonly") is not None:
            return Scalar(0, _parse_imag(m.group("imonly")))
        re_part = Fraction(m.group("re"))
        im = m.group("im")
        if im is None:
            return Scalar(re_part)
        return Scalar(re_part, _parse_imag(im))
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in scalar literal: {text!r}") from None
