"""Dolbeault and Aeppli-Bott-Chern Massey triple products."""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import Model, del_delbar, delbar
from .cohomology import (
    NotClosed,
    cell,
    cup_product,
    harmonic_space,
    is_closed,
    operator_matrix,
)
from .exterior import Form, wedge
from .linalg import Subspace, kernel, solve
from .scalar import ONE, ZERO, Scalar

__all__ = [
    "MasseyResult",
    "NotExact",
    "ProductsNotVanishing",
    "solve_primitive",
    "dolbeault_massey",
    "abc_massey",
]


class NotExact(ValueError):
    """The target is not in the image of the operator."""


class ProductsNotVanishing(ValueError):
    """A pairwise cup product is nonzero, so the triple product is undefined."""


_OPS = {"delbar": ((0, 1), delbar), "del_delbar": ((1, 1), del_delbar)}


def solve_primitive(target: Form, op: str, m: Model, where: tuple[int, int] | None = None) -> Form:
    """Minimum-norm ``x`` with ``op(x) = target`` for ``op`` in {delbar, del_delbar}."""
    if op not in _OPS:
        raise ValueError(f"unknown operator {op!r}; expected delbar or del_delbar")
    (dp, dq), _ = _OPS[op]
    if not target:
        return Form.zero()
    p, q = where if where is not None else target.bidegree()
    sp, sq = p - dp, q - dq
    if sp < 0 or sq < 0 or sp > m.n or sq > m.n:
        raise NotExact(f"{target} has no primitive of bidegree ({sp},{sq})")
    rows, src, tgt = operator_matrix(op, m, sp, sq)
    rhs = tgt.vector(target)
    if not src.size:
        raise NotExact(f"{target} is not {op}-exact")
    try:
        x = solve(rows, rhs)
    except ValueError:
        raise NotExact(f"{target} is not {op}-exact") from None
    # drop the component along ker(op): what remains is orthogonal to it
    ker = kernel(rows, src.size)
    proj = ker.project(x, src.weights)
    return src.form([a - b for a, b in zip(x, proj)])


@dataclass(frozen=True)
class MasseyResult:
    kind: str
    inputs: tuple[Form, Form, Form]
    bidegrees: tuple[tuple[int, int], tuple[int, int], tuple[int, int]] | None
    primitives: tuple[Form, Form]
    representative: Form
    target: tuple[int, int] | None
    reduced: Form
    indeterminacy: Subspace | None
    indeterminacy_spanners: tuple[Form, ...]
    verdict: str
    witness: tuple[Scalar, ...] | None = None

    @property
    def vanishes(self) -> bool:
        return self.verdict == "vanishes"

    @property
    def indeterminacy_dim(self) -> int:
        return self.indeterminacy.dim if self.indeterminacy is not None else 0


def _bidegrees(forms, given):
    if given is not None:
        return tuple(tuple(b) for b in given)
    out = []
    for f in forms:
        bd = f.bidegree()
        if bd is None:
            return None
        out.append(bd)
    return tuple(out)


def _trivial(kind, forms, bds):
    return MasseyResult(kind, forms, bds, (Form.zero(), Form.zero()), Form.zero(), None, Form.zero(), None, (), "vanishes", ())


def _harmonic_forms(theory: str, m: Model, p: int, q: int) -> list[Form]:
    if not (0 <= p <= m.n and 0 <= q <= m.n):
        return []
    c = cell(m, p, q)
    return [c.form(v) for v in harmonic_space(theory, m, p, q).basis]


def _decide(kind, theory, m, forms, bds, prims, rep, target, spanners):
    """Reduce the representative and test membership in the indeterminacy."""
    p, q = target
    if not (0 <= p <= m.n and 0 <= q <= m.n):
        return MasseyResult(kind, forms, bds, prims, rep, target, Form.zero(), None, (), "vanishes", ())
    c = cell(m, p, q)
    harm = harmonic_space(theory, m, p, q)
    weights = c.weights

    def red(x: Form):
        return harm.project(c.vector(x), weights) if x else tuple(ZERO for _ in range(c.size))

    reduced_spanners = [red(s) for s in spanners]
    ideal = Subspace(c.size, reduced_spanners)
    r = red(rep)
    if ideal.contains(r):
        verdict = "vanishes"
        if any(r):
            cols = [[v[i] for v in reduced_spanners] for i in range(c.size)]
            witness = tuple(solve(cols, list(r)))
        else:
            witness = tuple(ZERO for _ in spanners)
    else:
        verdict, witness = "nonVanishing", None
    return MasseyResult(
        kind, forms, bds, prims, rep, target, c.form(r), ideal, tuple(spanners), verdict, witness
    )


def _check_closed(forms, theory, m):
    for f in forms:
        if f and not is_closed(f, theory, m):
            raise NotClosed(f"{f} is not {theory}-closed")


def dolbeault_massey(a: Form, b: Form, c: Form, m: Model, bidegrees=None, f_ab: Form | None = None, f_bc: Form | None = None) -> MasseyResult:
    """``<[a], [b], [c]>`` in Dolbeault cohomology.

    The representative is ``f_ab ^ c - (-1)^(p+q) a ^ f_bc`` with
    ``a ^ b = delbar f_ab`` and ``b ^ c = delbar f_bc``; the sign makes it
    delbar-closed.  Explicit primitives may be passed to test independence.
    """
    forms = (a, b, c)
    _check_closed(forms, "dolbeault", m)
    bds = _bidegrees(forms, bidegrees)
    if bds is None:
        return _trivial("dolbeault", forms, bds)
    (p, q), (r, s), (u, v) = bds
    if cup_product(a, b, "dolbeault", m) or cup_product(b, c, "dolbeault", m):
        raise ProductsNotVanishing("pairwise Dolbeault products must vanish")
    ab, bc = wedge(a, b), wedge(b, c)
    if f_ab is None:
        f_ab = solve_primitive(ab, "delbar", m, (p + r, q + s))
    if f_bc is None:
        f_bc = solve_primitive(bc, "delbar", m, (r + u, s + v))
    if delbar(f_ab, m) != ab or delbar(f_bc, m) != bc:
        raise NotExact("supplied primitives do not solve delbar f = product")
    sign = -ONE if (p + q) % 2 else ONE
    rep = wedge(f_ab, c) - wedge(a, f_bc) * sign
    if delbar(rep, m):
        raise AssertionError("Dolbeault Massey representative is not delbar-closed")
    spanners = [wedge(h, c) for h in _harmonic_forms("dolbeault", m, p + r, q + s - 1)]
    spanners += [wedge(a, h) for h in _harmonic_forms("dolbeault", m, r + u, s + v - 1)]
    return _decide("dolbeault", "dolbeault", m, forms, bds, (f_ab, f_bc), rep, (p + r + u, q + s + v - 1), spanners)


def abc_massey(a: Form, b: Form, c: Form, m: Model, bidegrees=None, g_ab: Form | None = None, g_bc: Form | None = None) -> MasseyResult:
    """``<[a], [b], [c]>`` for Bott-Chern classes, valued in Aeppli cohomology.

    With ``(-1)^(p+q) a ^ b = dd^c g_ab`` and ``(-1)^(r+s) b ^ c = dd^c g_bc``
    the representative is ``(-1)^(p+q) a ^ g_bc - (-1)^(r+s) g_ab ^ c``.
    """
    forms = (a, b, c)
    _check_closed(forms, "bottChern", m)
    bds = _bidegrees(forms, bidegrees)
    if bds is None:
        return _trivial("abc", forms, bds)
    (p, q), (r, s), (u, v) = bds
    if cup_product(a, b, "bottChern", m) or cup_product(b, c, "bottChern", m):
        raise ProductsNotVanishing("pairwise Bott-Chern products must vanish")
    e1 = -ONE if (p + q) % 2 else ONE
    e2 = -ONE if (r + s) % 2 else ONE
    ab, bc = wedge(a, b) * e1, wedge(b, c) * e2
    if g_ab is None:
        g_ab = solve_primitive(ab, "del_delbar", m, (p + r, q + s))
    if g_bc is None:
        g_bc = solve_primitive(bc, "del_delbar", m, (r + u, s + v))
    if del_delbar(g_ab, m) != ab or del_delbar(g_bc, m) != bc:
        raise NotExact("supplied primitives do not solve dd^c g = product")
    rep = wedge(a, g_bc) * e1 - wedge(g_ab, c) * e2
    if del_delbar(rep, m):
        raise AssertionError("ABC Massey representative is not del-delbar-closed")
    spanners = [wedge(a, h) for h in _harmonic_forms("aeppli", m, r + u - 1, s + v - 1)]
    spanners += [wedge(h, c) for h in _harmonic_forms("aeppli", m, p + r - 1, q + s - 1)]
    return _decide("abc", "aeppli", m, forms, bds, (g_ab, g_bc), rep, (p + r + u - 1, q + s + v - 1), spanners)
