"""Dolbeault, Bott-Chern, Aeppli and de Rham cohomology of a finite model.

Every space is computed on the concatenated monomial basis of all configured
sectors; the differentials preserve sectors, so the matrices are block
diagonal and the result is the direct sum of the sector contributions.
Harmonic spaces come from first-order characterizations: the map
``x -> D(*x)`` is antilinear, and since ``*x = S conj(x)`` for a real matrix
``S`` its kernel is the conjugate of ``ker(D S)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

from .calculus import (
    Model,
    _d_monomial,
    _star_monomial,
    del_,
    del_delbar,
    delbar,
    d,
    hodge_star,
    is_harmonic,
    monomial_weight,
    wedge,
)
from .exterior import Form, Monomial, Sector
from .linalg import Subspace, image, kernel
from .scalar import ONE, ZERO, Scalar

__all__ = [
    "THEORIES",
    "THEORY_ALIASES",
    "canonical_theory",
    "Cell",
    "CohomologyResult",
    "OutOfComplex",
    "NotClosed",
    "InternalInconsistency",
    "cell",
    "operator_matrix",
    "cohomology",
    "harmonic_space",
    "reduce_class",
    "is_closed",
    "cup_product",
    "ddbar_check",
    "froelicher_check",
    "duality_checks",
    "formality_check",
    "table",
]

THEORIES = ("deRham", "dolbeault", "bottChern", "aeppli")
THEORY_ALIASES = {
    "derham": "deRham",
    "dr": "deRham",
    "dolbeault": "dolbeault",
    "delbar": "dolbeault",
    "bc": "bottChern",
    "bottchern": "bottChern",
    "bott-chern": "bottChern",
    "a": "aeppli",
    "aeppli": "aeppli",
}


def canonical_theory(name: str) -> str:
    key = name.replace("_", "").lower()
    try:
        return THEORY_ALIASES[key]
    except KeyError:
        raise ValueError(f"unknown theory {name!r}") from None


class OutOfComplex(ValueError):
    """A form has a component outside the model's configured complex."""


class NotClosed(ValueError):
    """A representative is not closed for the requested theory."""


class InternalInconsistency(RuntimeError):
    pass


# ----------------------------------------------------------------------------
# cells: ambient bases with coordinate maps
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    """Ordered monomial basis of one bidegree (or total degree) across sectors."""

    monomials: tuple[Monomial, ...]
    index: dict = field(compare=False, hash=False, repr=False)
    weights: tuple[Fraction, ...] = field(compare=False, hash=False, repr=False)

    @property
    def size(self) -> int:
        return len(self.monomials)

    def vector(self, x: Form) -> tuple[Scalar, ...]:
        v = [ZERO] * len(self.monomials)
        for mono, c in x._terms.items():
            i = self.index.get(mono)
            if i is None:
                raise OutOfComplex(f"term {mono} lies outside the model complex")
            v[i] = c
        return tuple(v)

    def form(self, v) -> Form:
        return Form._wrap({m: c for m, c in zip(self.monomials, v) if c})


def cell(m: Model, p: int, q: int | None = None, sectors=None) -> Cell:
    """Basis of bidegree ``(p, q)``; ``q=None`` means total degree ``p``."""
    sectors = tuple(m.sectors if sectors is None else sectors)
    key = ("cell", p, q, sectors)
    hit = m._cache.get(key)
    if hit is not None:
        return hit
    monos: list[Monomial] = []
    for s in sectors:
        if q is None:
            monos.extend(m.degree_basis(p, s) if 0 <= p <= 2 * m.n else [])
        elif 0 <= p <= m.n and 0 <= q <= m.n:
            monos.extend(m.basis(p, q, s))
    hit = Cell(
        tuple(monos),
        {mono: i for i, mono in enumerate(monos)},
        tuple(monomial_weight(m, mono) for mono in monos),
    )
    m._cache[key] = hit
    return hit


# ----------------------------------------------------------------------------
# operator matrices
# ----------------------------------------------------------------------------


def _monomial_form(mono: Monomial) -> Form:
    return Form._wrap({mono: ONE})


def _linear_star(m: Model, mono: Monomial) -> Form:
    coef, target = _star_monomial(m, mono)
    return Form._wrap({target: Scalar(coef)})


def _bidegree_part(shift: tuple[int, int]):
    def proj(mono: Monomial, m: Model) -> Form:
        p, q = mono.bidegree
        return _d_monomial(m, mono).component(p + shift[0], q + shift[1])

    return proj


_PRIMITIVES: dict[str, Callable] = {
    "d": lambda mono, m: _d_monomial(m, mono),
    "del": _bidegree_part((1, 0)),
    "delbar": _bidegree_part((0, 1)),
    "del_delbar": lambda mono, m: del_delbar(_monomial_form(mono), m),
}

# (source shift of bidegree) for each operator; star-composites map (p,q) to the
# complementary bidegree first.
_SHIFT = {"d": None, "del": (1, 0), "delbar": (0, 1), "del_delbar": (1, 1)}


def _matrix(source: Cell, target: Cell, fn: Callable[[Monomial], Form]) -> list[list[Scalar]]:
    rows = [[ZERO] * source.size for _ in range(target.size)]
    for j, mono in enumerate(source.monomials):
        for t, c in fn(mono)._terms.items():
            i = target.index.get(t)
            if i is None:
                raise OutOfComplex(f"image term {t} lies outside the model complex")
            rows[i][j] = c
    return rows


def operator_matrix(op: str, m: Model, p: int, q: int | None = None, s: Sector | None = None):
    """Matrix of ``op`` from the ``(p, q)`` basis to its target basis.

    ``op`` is one of ``d``, ``del``, ``delbar``, ``del_delbar``,
    ``codiff_del``, ``codiff_delbar``.  For ``d`` with ``q=None`` the source
    is total degree ``p``.  Returns ``(rows, source_cell, target_cell)``.
    """
    sectors = None
    if s is not None:
        if s not in m.sectors:
            raise OutOfComplex(f"sector {s} is not configured for model {m.name!r}")
        sectors = (s,)
    key = ("opmat", op, p, q, sectors)
    hit = m._cache.get(key)
    if hit is not None:
        return hit
    if op in ("codiff_del", "codiff_delbar"):
        if q is None:
            raise ValueError(f"{op} needs a bidegree")
        # -* D * is C-linear: with *x = S conj(x) it equals -S' conj(D) S
        base = "del" if op == "codiff_del" else "delbar"
        dp, dq = _SHIFT[base]
        src = cell(m, p, q, sectors)
        tgt = cell(m, p - dp, q - dq, sectors)
        dual = _PRIMITIVES[base]

        def fn(mono):
            out = Form.zero()
            for t, c in _linear_star(m, mono)._terms.items():
                for u, c2 in dual(t, m)._terms.items():
                    out = out + _linear_star(m, u) * (-(c * c2).conjugate())
            return out

        hit = (_matrix(src, tgt, fn), src, tgt)
    elif op == "d":
        if q is None:
            src, tgt = cell(m, p, None, sectors), cell(m, p + 1, None, sectors)
        else:
            raise ValueError("d acts on total degree; pass q=None")
        hit = (_matrix(src, tgt, lambda mono: _d_monomial(m, mono)), src, tgt)
    elif op in _SHIFT:
        dp, dq = _SHIFT[op]
        src, tgt = cell(m, p, q, sectors), cell(m, p + dp, q + dq, sectors)
        prim = _PRIMITIVES[op]
        hit = (_matrix(src, tgt, lambda mono: prim(mono, m)), src, tgt)
    else:
        raise ValueError(f"unknown operator {op!r}")
    m._cache[key] = hit
    return hit


def _star_composite(m: Model, op: str, p: int, q: int | None):
    """Matrix of ``x -> op(S x)`` where ``*x = S conj(x)``."""
    key = ("starop", op, p, q)
    hit = m._cache.get(key)
    if hit is not None:
        return hit
    if q is None:
        src = cell(m, p)
        tgt = cell(m, 2 * m.n - p + 1)
        fn = lambda mono: d(_linear_star(m, mono), m)
    else:
        dp, dq = _SHIFT[op]
        src = cell(m, p, q)
        tgt = cell(m, m.n - p + dp, m.n - q + dq)
        prim = _PRIMITIVES[op]

        def fn(mono):
            out = Form.zero()
            for t, c in _linear_star(m, mono)._terms.items():
                out = out + prim(t, m) * c
            return out

    hit = (_matrix(src, tgt, fn), src, tgt)
    m._cache[key] = hit
    return hit


def _ker(rows, src: Cell) -> Subspace:
    return kernel(rows, src.size)


def _img(rows, tgt: Cell) -> Subspace:
    return image(rows, tgt.size)


def _conj_space(S: Subspace) -> Subspace:
    return Subspace(S.n, [tuple(c.conjugate() for c in v) for v in S.basis])


def _kernel_of(m, op, p, q):
    rows, src, _ = operator_matrix(op, m, p, q)
    return _ker(rows, src)


def _image_into(m, op, p, q):
    """Image of ``op`` landing in bidegree ``(p, q)``."""
    if q is None:
        rows, _, tgt = operator_matrix("d", m, p - 1, None)
        return _img(rows, tgt)
    dp, dq = _SHIFT[op]
    sp, sq = p - dp, q - dq
    target = cell(m, p, q)
    if sp < 0 or sq < 0:
        return Subspace(target.size)
    rows, _, tgt = operator_matrix(op, m, sp, sq)
    return _img(rows, tgt)


def _star_kernel(m, op, p, q):
    rows, src, _ = _star_composite(m, op, p, q)
    return _conj_space(_ker(rows, src))


# ----------------------------------------------------------------------------
# closed / exact / harmonic spaces
# ----------------------------------------------------------------------------


def _closed(m: Model, theory: str, p: int, q: int | None) -> Subspace:
    key = ("closed", theory, p, q)
    hit = m._cache.get(key)
    if hit is None:
        if theory == "deRham":
            rows, src, _ = operator_matrix("d", m, p, None)
            hit = _ker(rows, src)
        elif theory == "dolbeault":
            hit = _kernel_of(m, "delbar", p, q)
        elif theory == "bottChern":
            hit = _kernel_of(m, "del", p, q).intersect(_kernel_of(m, "delbar", p, q))
        else:
            hit = _kernel_of(m, "del_delbar", p, q)
        m._cache[key] = hit
    return hit


def _exact(m: Model, theory: str, p: int, q: int | None) -> Subspace:
    key = ("exact", theory, p, q)
    hit = m._cache.get(key)
    if hit is None:
        if theory == "deRham":
            if p == 0:
                hit = Subspace(cell(m, 0).size)
            else:
                hit = _image_into(m, "d", p, None)
        elif theory == "dolbeault":
            hit = _image_into(m, "delbar", p, q)
        elif theory == "bottChern":
            hit = _image_into(m, "del_delbar", p, q)
        else:
            hit = _image_into(m, "del", p, q) + _image_into(m, "delbar", p, q)
        m._cache[key] = hit
    return hit


def harmonic_space(flavor: str, m: Model, p: int, q: int | None = None) -> Subspace:
    """Harmonic forms of bidegree ``(p, q)`` (total degree ``p`` for deRham)."""
    flavor = canonical_theory(flavor)
    if flavor == "deRham":
        q = None
    key = ("harmonic", flavor, p, q)
    hit = m._cache.get(key)
    if hit is not None:
        return hit
    closed = _closed(m, flavor, p, q)
    if flavor == "deRham":
        hit = closed.intersect(_star_kernel(m, "d", p, None))
    elif flavor == "dolbeault":
        hit = closed.intersect(_star_kernel(m, "delbar", p, q))
    elif flavor == "bottChern":
        hit = closed.intersect(_star_kernel(m, "del_delbar", p, q))
    else:
        hit = closed.intersect(_star_kernel(m, "del", p, q)).intersect(_star_kernel(m, "delbar", p, q))
    m._cache[key] = hit
    return hit


class CohomologyResult(NamedTuple):
    theory: str
    p: int
    q: int | None
    dim: int
    representatives: tuple[Form, ...]

    @property
    def key(self) -> str:
        return str(self.p) if self.q is None else f"{self.p},{self.q}"


def _in_range(m: Model, p: int, q: int | None) -> bool:
    if q is None:
        return 0 <= p <= 2 * m.n
    return 0 <= p <= m.n and 0 <= q <= m.n


def cohomology(theory: str, m: Model, p: int, q: int | None = None) -> CohomologyResult:
    """Dimension and harmonic representatives of one cohomology cell.

    Representatives are orthogonal projections of a quotient basis onto the
    harmonic space, brought to reduced echelon form so that each has leading
    coefficient 1.
    """
    theory = canonical_theory(theory)
    if theory == "deRham":
        q = None
    key = ("cohomology", theory, p, q)
    hit = m._cache.get(key)
    if hit is not None:
        return hit
    if not _in_range(m, p, q):
        hit = CohomologyResult(theory, p, q, 0, ())
        m._cache[key] = hit
        return hit
    c = cell(m, p, q)
    closed = _closed(m, theory, p, q)
    exact = _exact(m, theory, p, q)
    if not exact.is_subspace_of(closed):
        raise InternalInconsistency(f"{theory} boundaries not closed at {p},{q}")
    quotient = closed.quotient_basis(exact)
    dim = closed.dim - exact.dim
    if len(quotient) != dim:
        raise InternalInconsistency(f"{theory} quotient dimension mismatch at {p},{q}")
    harm = harmonic_space(theory, m, p, q)
    if harm.dim != dim:
        raise InternalInconsistency(
            f"{theory} at {p},{q}: cohomology dimension {dim} but harmonic dimension {harm.dim}"
        )
    projected = Subspace(c.size, [harm.project(v, c.weights) for v in quotient])
    if projected != harm:
        raise InternalInconsistency(f"{theory} projections do not span the harmonic space at {p},{q}")
    reps = tuple(c.form(v) for v in projected.basis)
    hit = CohomologyResult(theory, p, q, dim, reps)
    m._cache[key] = hit
    return hit


def table(theory: str, m: Model) -> dict:
    """All cells of a theory with explicit zeros, keyed by ``(p, q)`` or ``k``."""
    theory = canonical_theory(theory)
    if theory == "deRham":
        return {k: cohomology(theory, m, k) for k in range(2 * m.n + 1)}
    return {(p, q): cohomology(theory, m, p, q) for p in range(m.n + 1) for q in range(m.n + 1)}


# ----------------------------------------------------------------------------
# classes
# ----------------------------------------------------------------------------


def _locate(x: Form, theory: str) -> tuple[int, int | None]:
    if theory == "deRham":
        k = x.degree()
        return (k if k is not None else 0), None
    try:
        bd = x.bidegree()
    except ValueError:
        raise ValueError("class representatives must have pure bidegree") from None
    return bd if bd is not None else (0, 0)


def _check_sectors(x: Form, m: Model) -> None:
    extra = x.sectors() - set(m.sectors)
    if extra:
        raise OutOfComplex(f"sector {min(extra)} is not configured for model {m.name!r}")


def is_closed(x: Form, theory: str, m: Model) -> bool:
    theory = canonical_theory(theory)
    _check_sectors(x, m)
    if theory == "deRham":
        return not d(x, m)
    if theory == "dolbeault":
        return not delbar(x, m)
    if theory == "bottChern":
        return not del_(x, m) and not delbar(x, m)
    return not del_delbar(x, m)


def reduce_class(x: Form, theory: str, m: Model, where: tuple[int, int | None] | None = None) -> Form:
    """Harmonic representative of the class of ``x`` (zero iff the class vanishes)."""
    theory = canonical_theory(theory)
    if not x:
        return Form.zero()
    if not is_closed(x, theory, m):
        raise NotClosed(f"{x} is not {theory}-closed")
    p, q = where if where is not None else _locate(x, theory)
    c = cell(m, p, q)
    harm = harmonic_space(theory, m, p, q)
    return c.form(harm.project(c.vector(x), c.weights))


def cup_product(x: Form, y: Form, theory: str, m: Model, x_theory: str | None = None, y_theory: str | None = None) -> Form:
    """Harmonic representative of ``[x] u [y]`` in ``theory``.

    Inputs are checked to be closed for their own theories (defaulting to the
    target theory; for a Bott-Chern times Aeppli pairing pass them explicitly).
    """
    theory = canonical_theory(theory)
    for form, th in ((x, x_theory or theory), (y, y_theory or theory)):
        if form and not is_closed(form, th, m):
            raise NotClosed(f"{form} is not {canonical_theory(th)}-closed")
    return reduce_class(wedge(x, y), theory, m)


# ----------------------------------------------------------------------------
# global checks
# ----------------------------------------------------------------------------


def _dims(theory: str, m: Model) -> dict:
    return {k: r.dim for k, r in table(theory, m).items()}


@dataclass
class DdbarReport:
    verdict: bool
    injectivity: dict
    subspace_form: dict
    froelicher: dict
    symmetric: bool

    @property
    def failing(self) -> list:
        return sorted(k for k, ok in self.injectivity.items() if not ok)


def ddbar_check(m: Model) -> DdbarReport:
    """Evaluate the ddbar-lemma three ways; disagreement is an internal error."""
    injective = {}
    subspace_form = {}
    for p in range(m.n + 1):
        for q in range(m.n + 1):
            ddbar_img = _exact(m, "bottChern", p, q).dim
            ker_del = _kernel_of(m, "del", p, q)
            ker_both = _closed(m, "bottChern", p, q)
            im_delbar = _image_into(m, "delbar", p, q)
            im_sum = _exact(m, "aeppli", p, q)
            injective[(p, q)] = ker_del.intersect(im_delbar).dim == ddbar_img
            subspace_form[(p, q)] = ker_both.intersect(im_sum).dim == ddbar_img
    fr = froelicher_check(m)
    dol = _dims("dolbeault", m)
    symmetric = all(dol[(p, q)] == dol[(q, p)] for p, q in dol)
    v1 = all(injective.values())
    v2 = all(subspace_form.values())
    v3 = all(row["equal"] for row in fr.values()) and symmetric
    if not v1 == v2 == v3:
        raise InternalInconsistency(
            f"ddbar formulations disagree on {m.name}: injectivity={v1}, subspace={v2}, froelicher={v3}"
        )
    return DdbarReport(v1, injective, subspace_form, fr, symmetric)


def froelicher_check(m: Model) -> dict:
    dol = _dims("dolbeault", m)
    betti = _dims("deRham", m)
    out = {}
    for k in range(2 * m.n + 1):
        h = sum(dol.get((p, k - p), 0) for p in range(k + 1))
        b = betti[k]
        if h < b:
            raise InternalInconsistency(f"Froelicher inequality violated in degree {k}: {h} < {b}")
        out[k] = {"hodge_sum": h, "betti": b, "equal": h == b}
    return out


def duality_checks(m: Model) -> dict:
    """Star and conjugation dualities between the cohomology tables."""
    n = m.n
    bc, ae, dol = _dims("bottChern", m), _dims("aeppli", m), _dims("dolbeault", m)
    cells = [(p, q) for p in range(n + 1) for q in range(n + 1)]
    report = {
        "star_bc_aeppli": all(bc[(p, q)] == ae[(n - p, n - q)] for p, q in cells),
        "star_dolbeault": all(dol[(p, q)] == dol[(n - p, n - q)] for p, q in cells),
        "conjugation_bc": all(bc[(p, q)] == bc[(q, p)] for p, q in cells),
        "conjugation_aeppli": all(ae[(p, q)] == ae[(q, p)] for p, q in cells),
        "star_harmonic": True,
    }
    for p, q in cells:
        src = harmonic_space("bottChern", m, p, q)
        dst = harmonic_space("aeppli", m, n - p, n - q)
        c_src, c_dst = cell(m, p, q), cell(m, n - p, n - q)
        imgs = [c_dst.vector(hodge_star(c_src.form(v), m)) for v in src.basis]
        if Subspace(c_dst.size, imgs) != dst:
            report["star_harmonic"] = False
    report["ok"] = all(report.values())
    return report


class FormalityResult(NamedTuple):
    flavor: str
    verdict: bool
    witness: tuple[Form, Form, Form] | None


def harmonic_basis(flavor: str, m: Model) -> list[Form]:
    """Harmonic basis forms by total degree, holomorphic degree first, then echelon order."""
    out = []
    for k in range(2 * m.n + 1):
        for p in range(min(k, m.n), max(0, k - m.n) - 1, -1):
            q = k - p
            c = cell(m, p, q)
            out.extend(c.form(v) for v in harmonic_space(flavor, m, p, q).basis)
    return out


def formality_check(flavor: str, m: Model) -> FormalityResult:
    """Is the space of harmonic forms closed under the wedge product?"""
    flavor = canonical_theory(flavor)
    forms = harmonic_basis(flavor, m)
    for i, x in enumerate(forms):
        for y in forms[i:]:
            w = wedge(x, y)
            if w and not is_harmonic(w, flavor, m).ok:
                return FormalityResult(flavor, False, (x, y, w))
    return FormalityResult(flavor, True, None)
