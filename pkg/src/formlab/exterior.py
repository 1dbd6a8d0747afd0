"""Sector-twisted exterior algebra over a rank-n complex coframe.

A monomial is ``chi * eta^H ^ etabar^A`` where ``chi = exp(a*w + b*conj(w))``
is a character (its :class:`Sector`) and ``H``, ``A`` are bitmasks over the
coframe indices (bit ``k-1`` stands for index ``k``).  Generators are ordered
``eta^1 .. eta^n, etabar^1 .. etabar^n`` when computing Koszul signs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, NamedTuple

from .scalar import ONE, ZERO, Scalar, as_scalar, format_rational, parse_scalar

__all__ = [
    "Sector",
    "TRIVIAL",
    "Monomial",
    "Form",
    "FormSyntaxError",
    "wedge",
    "conjugate",
    "basis_monomials",
    "parse_form",
    "format_form",
    "generator",
    "mask_of",
    "indices_of",
]

GaussInt = tuple  # (re, im) pair of ints


@dataclass(frozen=True, order=True)
class Sector:
    """Character ``exp(a*w + b*conj(w))`` with Gaussian-integer exponents."""

    a: GaussInt = (0, 0)
    b: GaussInt = (0, 0)

    def __add__(self, other: "Sector") -> "Sector":
        return Sector(
            (self.a[0] + other.a[0], self.a[1] + other.a[1]),
            (self.b[0] + other.b[0], self.b[1] + other.b[1]),
        )

    def __neg__(self) -> "Sector":
        return Sector((-self.a[0], -self.a[1]), (-self.b[0], -self.b[1]))

    def conj(self) -> "Sector":
        return Sector((self.b[0], -self.b[1]), (self.a[0], -self.a[1]))

    @property
    def trivial(self) -> bool:
        return self.a == (0, 0) and self.b == (0, 0)

    def is_unitary(self) -> bool:
        # b = -conj(a)
        return self.b == (-self.a[0], self.a[1])

    def a_scalar(self) -> Scalar:
        return Scalar(self.a[0], self.a[1])

    def b_scalar(self) -> Scalar:
        return Scalar(self.b[0], self.b[1])

    def as_list(self) -> list[int]:
        return [self.a[0], self.a[1], self.b[0], self.b[1]]

    @classmethod
    def from_list(cls, vals) -> "Sector":
        ar, ai, br, bi = (int(v) for v in vals)
        return cls((ar, ai), (br, bi))

    def __str__(self):
        return f"x({_format_gint(self.a)},{_format_gint(self.b)})"


TRIVIAL = Sector()


class Monomial(NamedTuple):
    sector: Sector
    holo: int
    anti: int

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.holo.bit_count(), self.anti.bit_count())

    @property
    def degree(self) -> int:
        return self.holo.bit_count() + self.anti.bit_count()

    def with_sector(self, s: Sector) -> "Monomial":
        return Monomial(s, self.holo, self.anti)

    def __str__(self):
        return format_monomial(self)


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for k in indices:
        m |= 1 << (k - 1)
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    k = 1
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


@lru_cache(maxsize=None)
def _inversions(x: int, y: int) -> int:
    """Number of pairs (i in x, j in y) with i > j."""
    count = 0
    while y:
        low = y & -y
        count += (x & ~((low << 1) - 1)).bit_count()
        y ^= low
    return count


@lru_cache(maxsize=None)
def _wedge_sign(h1: int, a1: int, h2: int, a2: int) -> int:
    parity = a1.bit_count() * h2.bit_count() + _inversions(h1, h2) + _inversions(a1, a2)
    return -1 if parity & 1 else 1


def wedge_monomials(x: Monomial, y: Monomial):
    """Return ``(sign, monomial)`` for ``x ^ y`` or ``None`` when it vanishes."""
    if x.holo & y.holo or x.anti & y.anti:
        return None
    sign = _wedge_sign(x.holo, x.anti, y.holo, y.anti)
    return sign, Monomial(x.sector + y.sector, x.holo | y.holo, x.anti | y.anti)


def conjugate_monomial(m: Monomial) -> tuple[int, Monomial]:
    sign = -1 if (m.holo.bit_count() * m.anti.bit_count()) & 1 else 1
    return sign, Monomial(m.sector.conj(), m.anti, m.holo)


class Form:
    """Finite sum of monomials with :class:`Scalar` coefficients.

    Instances are treated as immutable; zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | Iterable | None = None):
        clean: dict[Monomial, Scalar] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for mono, c in items:
                c = as_scalar(c)
                if c:
                    prev = clean.get(mono)
                    if prev is not None:
                        c = prev + c
                        if not c:
                            del clean[mono]
                            continue
                    clean[mono] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, terms: dict) -> "Form":
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, mono: Monomial, coeff=ONE) -> "Form":
        return cls({mono: coeff})

    @classmethod
    def one(cls, sector: Sector = TRIVIAL) -> "Form":
        return cls({Monomial(sector, 0, 0): ONE})

    @classmethod
    def zero(cls) -> "Form":
        return cls._wrap({})

    # container protocol ------------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, Scalar]:
        return dict(self._terms)

    def items(self):
        """Terms in canonical monomial order."""
        return sorted(self._terms.items())

    def monomials(self) -> list[Monomial]:
        return sorted(self._terms)

    def coefficient(self, mono: Monomial) -> Scalar:
        return self._terms.get(mono, ZERO)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, Form):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"Form({format_form(self)!r})"

    def __str__(self):
        return format_form(self)

    # linear structure --------------------------------------------------------

    def __add__(self, other: "Form") -> "Form":
        if not isinstance(other, Form):
            return NotImplemented
        out = dict(self._terms)
        for mono, c in other._terms.items():
            prev = out.get(mono)
            if prev is None:
                out[mono] = c
            else:
                s = prev + c
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return Form._wrap(out)

    def __neg__(self) -> "Form":
        return Form._wrap({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        if not isinstance(other, Form):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar) -> "Form":
        if isinstance(scalar, Form):
            return NotImplemented
        s = as_scalar(scalar)
        if not s:
            return Form._wrap({})
        return Form._wrap({m: c * s for m, c in self._terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    # grading -----------------------------------------------------------------

    def bidegrees(self) -> set[tuple[int, int]]:
        return {m.bidegree for m in self._terms}

    def sectors(self) -> set[Sector]:
        return {m.sector for m in self._terms}

    def is_pure(self, p: int | None = None, q: int | None = None) -> bool:
        """True when all terms share one bidegree (optionally equal to ``(p, q)``)."""
        bd = self.bidegrees()
        if not bd:
            return True
        if len(bd) > 1:
            return False
        if p is None:
            return True
        return bd == {(p, q)}

    def bidegree(self) -> tuple[int, int] | None:
        """Common bidegree; ``None`` for the zero form; ``ValueError`` when mixed."""
        bd = self.bidegrees()
        if not bd:
            return None
        if len(bd) > 1:
            raise ValueError(f"form has mixed bidegree {sorted(bd)}")
        return next(iter(bd))

    def degree(self) -> int | None:
        degs = {m.degree for m in self._terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"form has mixed degree {sorted(degs)}")
        return next(iter(degs))

    def component(self, p: int, q: int) -> "Form":
        return Form._wrap({m: c for m, c in self._terms.items() if m.bidegree == (p, q)})

    def sector_part(self, s: Sector) -> "Form":
        return Form._wrap({m: c for m, c in self._terms.items() if m.sector == s})

    def degree_part(self, k: int) -> "Form":
        return Form._wrap({m: c for m, c in self._terms.items() if m.degree == k})

    def conjugate(self) -> "Form":
        return conjugate(self)

    def map_coefficients(self, fn) -> "Form":
        return Form({m: fn(c) for m, c in self._terms.items()})


def wedge(x: Form, y: Form) -> Form:
    """Exterior product; sectors add and repeated generators vanish."""
    out: dict[Monomial, Scalar] = {}
    for m1, c1 in x._terms.items():
        for m2, c2 in y._terms.items():
            if m1.holo & m2.holo or m1.anti & m2.anti:
                continue
            sign = _wedge_sign(m1.holo, m1.anti, m2.holo, m2.anti)
            mono = Monomial(m1.sector + m2.sector, m1.holo | m2.holo, m1.anti | m2.anti)
            c = c1 * c2
            if sign < 0:
                c = -c
            prev = out.get(mono)
            if prev is not None:
                c = prev + c
                if not c:
                    del out[mono]
                    continue
            out[mono] = c
    return Form._wrap(out)


def wedge_all(*forms: Form) -> Form:
    result = Form.one()
    for f in forms:
        result = wedge(result, f)
    return result


def conjugate(x: Form) -> Form:
    """Complex conjugation: swaps eta and etabar, conjugates coefficients and sectors."""
    out = {}
    for m, c in x._terms.items():
        sign, cm = conjugate_monomial(m)
        c = c.conjugate()
        out[cm] = -c if sign < 0 else c
    return Form._wrap(out)


def generator(k: int, bar: bool = False, sector: Sector = TRIVIAL) -> Form:
    """The 1-form ``eta^k`` (or ``etabar^k``)."""
    bit = 1 << (k - 1)
    return Form._wrap({Monomial(sector, 0, bit) if bar else Monomial(sector, bit, 0): ONE})


@lru_cache(maxsize=None)
def _masks(n: int, p: int) -> tuple[int, ...]:
    return tuple(sorted(mask_of(c) for c in combinations(range(1, n + 1), p)))


def basis_monomials(n: int, p: int, q: int, s: Sector = TRIVIAL) -> list[Monomial]:
    """All monomials of bidegree ``(p, q)`` in sector ``s``, canonical order."""
    if p < 0 or q < 0 or p > n or q > n:
        return []
    return [Monomial(s, h, a) for h in _masks(n, p) for a in _masks(n, q)]


# ----------------------------------------------------------------------------
# textual form expressions
# ----------------------------------------------------------------------------


class FormSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


def _format_gint(z: GaussInt) -> str:
    re_, im = z
    if not im:
        return str(re_)
    im_s = "i" if im == 1 else "-i" if im == -1 else f"{im}i"
    if not re_:
        return im_s
    return f"{re_}{'' if im_s.startswith('-') else '+'}{im_s}"


def format_monomial(m: Monomial) -> str:
    gens = [f"e{k}" for k in indices_of(m.holo)] + [f"E{k}" for k in indices_of(m.anti)]
    body = "^".join(gens)
    if not m.sector.trivial:
        return f"{m.sector}*{body}" if body else str(m.sector)
    return body or "1"


def _format_coeff(c: Scalar) -> str:
    if not c.im and c.re.denominator == 1:
        return str(abs(c.re.numerator))
    if not c.im:
        return f"({format_rational(abs(c.re))})"
    re_s = format_rational(c.re)
    im_abs = format_rational(abs(c.im))
    sign = "-" if c.im < 0 else "+"
    return f"({re_s}{sign}{im_abs}i)"


def format_form(x: Form) -> str:
    """Canonical text; ``parse_form(format_form(x), n) == x``."""
    items = x.items()
    if not items:
        return "0"
    pieces = []
    for idx, (m, c) in enumerate(items):
        negative = c.re < 0 or (c.re == 0 and c.im < 0)
        coeff = -c if negative else c
        mono = format_monomial(m)
        is_const = m.holo == 0 and m.anti == 0
        if coeff == ONE and not is_const:
            term = mono
        elif coeff == ONE and is_const:
            term = mono if not m.sector.trivial else "1"
        else:
            cs = _format_coeff(coeff)
            if is_const and m.sector.trivial:
                term = cs
            else:
                term = f"{cs}*{mono}"
        if idx == 0:
            pieces.append(("-" if negative else "") + term)
        else:
            pieces.append((" - " if negative else " + ") + term)
    return "".join(pieces)


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.pos = 0

    def error(self, msg: str, pos: int | None = None):
        raise FormSyntaxError(msg, self.pos if pos is None else pos)

    def skip(self):
        t = self.text
        while self.pos < len(t) and t[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def integer(self, signed=True) -> int:
        self.skip()
        start = self.pos
        t = self.text
        if signed and self.pos < len(t) and t[self.pos] in "+-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(t) and t[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            self.error("expected integer", start)
        return int(t[start:self.pos])

    def form(self) -> Form:
        terms: dict[Monomial, Scalar] = {}
        sign = ONE
        if self.peek() in "+-":
            if self.text[self.pos] == "-":
                sign = -ONE
            self.pos += 1
        while True:
            mono, c = self.term()
            if mono is not None:
                c = c * sign
                terms[mono] = terms.get(mono, ZERO) + c
            ch = self.peek()
            if ch == "":
                break
            if ch not in "+-":
                self.error(f"unexpected {ch!r}")
            sign = ONE if ch == "+" else -ONE
            self.pos += 1
        return Form(terms)

    def term(self):
        coeff = ONE
        ch = self.peek()
        have_scalar = False
        if ch == "(" or ch.isdigit():
            coeff = self.scalar()
            have_scalar = True
            if self.peek() != "*":
                return Monomial(TRIVIAL, 0, 0), coeff
            self.pos += 1
        sector = TRIVIAL
        if self.peek() == "x":
            sector = self.char()
            if self.peek() != "*":
                return Monomial(sector, 0, 0), coeff
            self.pos += 1
        ch = self.peek()
        if ch not in ("e", "E"):
            if have_scalar or not sector.trivial:
                self.error("expected generator")
            self.error("expected term")
        holo = anti = 0
        sign = 1
        order: list[tuple[bool, int]] = []
        while True:
            bar, k = self.gen()
            order.append((bar, k))
            if self.peek() != "^":
                break
            self.pos += 1
        # build by successive wedges to get the Koszul sign right
        zero = False
        for bar, k in order:
            bit = 1 << (k - 1)
            if bar:
                if anti & bit:
                    zero = True
                    break
                sign *= _wedge_sign(holo, anti, 0, bit)
                anti |= bit
            else:
                if holo & bit:
                    zero = True
                    break
                sign *= _wedge_sign(holo, anti, bit, 0)
                holo |= bit
        if zero:
            return None, ZERO
        return Monomial(sector, holo, anti), coeff * sign

    def gen(self) -> tuple[bool, int]:
        ch = self.peek()
        start = self.pos
        if ch not in ("e", "E"):
            self.error("expected generator")
        self.pos += 1
        t = self.text
        if self.pos >= len(t) or not t[self.pos].isdigit():
            self.error("expected generator index")
        k = int(t[self.pos])
        self.pos += 1
        if k < 1 or k > self.n:
            raise FormSyntaxError(f"generator index {k} out of range 1..{self.n}", start)
        return ch == "E", k

    def scalar(self) -> Scalar:
        if self.peek() == "(":
            start = self.pos
            self.pos += 1
            depth_end = self.text.find(")", self.pos)
            if depth_end < 0:
                self.error("unclosed '('", start)
            body = self.text[self.pos:depth_end]
            try:
                value = parse_scalar(body)
            except ValueError:
                raise FormSyntaxError(f"invalid scalar {body.strip()!r}", self.pos) from None
            self.pos = depth_end + 1
            return value
        return as_scalar(self.integer(signed=False))

    def gint(self) -> GaussInt:
        self.skip()
        t = self.text
        start = self.pos
        j = self.pos
        while j < len(t) and t[j] not in ",)":
            j += 1
        body = "".join(t[self.pos:j].split())
        try:
            value = parse_scalar(body) if body else None
        except ValueError:
            value = None
        if value is None or value.re.denominator != 1 or value.im.denominator != 1:
            raise FormSyntaxError(f"invalid Gaussian integer {body!r}", start)
        self.pos = j
        return (int(value.re), int(value.im))

    def char(self) -> Sector:
        self.skip()
        if not self.text.startswith("x(", self.pos):
            self.error("expected 'x('")
        self.pos += 2
        a = self.gint()
        self.expect(",")
        b = self.gint()
        self.expect(")")
        return Sector(a, b)


def parse_form(text: str, n: int) -> Form:
    """Parse a form expression such as ``"(1/2+3i)*e1^e2 - x(-1,1)*E3"``."""
    p = _Parser(text, n)
    if p.peek() == "":
        raise FormSyntaxError("empty expression", 0)
    if p.peek() == "0" and p.text.strip() == "0":
        return Form.zero()
    return p.form()
