"""Differentials, Hodge star and harmonicity on a finite invariant model."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import NamedTuple

from .exterior import (
    TRIVIAL,
    Form,
    Monomial,
    Sector,
    _wedge_sign,
    basis_monomials,
    conjugate,
    wedge,
)
from .scalar import ONE, Scalar, as_scalar

__all__ = [
    "GroupAction",
    "Model",
    "ValidationReport",
    "HarmonicCheck",
    "FLAVORS",
    "validate_model",
    "d",
    "del_",
    "delbar",
    "del_delbar",
    "hodge_star",
    "inner",
    "norm2",
    "codiff_del",
    "codiff_delbar",
    "is_harmonic",
    "monomial_weight",
    "action_eigenvalue",
]

FLAVORS = ("deRham", "dolbeault", "bottChern", "aeppli")


@dataclass(frozen=True)
class GroupAction:
    """Finite diagonal action ``eta^k -> eigenvalues[k-1] * eta^k``."""

    name: str
    order: int
    eigenvalues: tuple[Scalar, ...]
    lattice: str | None = None  # "heisenberg" enables point-level enumeration

    def power(self, k: int, name: str | None = None) -> "GroupAction":
        eig = tuple(e ** k for e in self.eigenvalues)
        order = self.order // gcd(self.order, k) if k else 1
        return GroupAction(name or f"{self.name}^{k}", order, eig, self.lattice)


@dataclass(frozen=True)
class Model:
    name: str
    n: int
    d_eta: tuple[Form, ...]
    mu: Form = field(default_factory=Form.zero)
    sectors: tuple[Sector, ...] = (TRIVIAL,)
    metric: tuple[Fraction, ...] = ()
    actions: tuple[GroupAction, ...] = ()
    invariant_under: str | None = None
    params: tuple[tuple[str, Scalar], ...] = ()
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if not self.metric:
            object.__setattr__(self, "metric", tuple(Fraction(1) for _ in range(self.n)))
        else:
            object.__setattr__(self, "metric", tuple(_as_fraction(c) for c in self.metric))
        object.__setattr__(self, "sectors", tuple(sorted(set(self.sectors))))
        object.__setattr__(self, "actions", tuple(sorted(self.actions, key=lambda a: a.name)))

    # ------------------------------------------------------------------

    def action(self, name: str) -> GroupAction:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(f"model {self.name!r} has no action {name!r}")

    @property
    def invariance(self) -> GroupAction | None:
        return self.action(self.invariant_under) if self.invariant_under else None

    def basis(self, p: int, q: int, s: Sector = TRIVIAL) -> list[Monomial]:
        """Monomial basis of the (possibly invariant) complex in bidegree (p, q)."""
        key = ("basis", p, q, s)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        monos = basis_monomials(self.n, p, q, s)
        act = self.invariance
        if act is not None:
            monos = [m for m in monos if action_eigenvalue(act, m) == ONE]
        self._cache[key] = monos
        return monos

    def degree_basis(self, k: int, s: Sector = TRIVIAL) -> list[Monomial]:
        out = []
        for p in range(max(0, k - self.n), min(k, self.n) + 1):
            out.extend(self.basis(p, k - p, s))
        return out

    def with_changes(self, **kw) -> "Model":
        from dataclasses import replace

        return replace(self, _cache={}, **kw)

    def param(self, key: str, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default


def _as_fraction(c) -> Fraction:
    if isinstance(c, Scalar):
        if c.im:
            raise ValueError("metric entries must be real")
        return c.re
    if isinstance(c, str):
        return _as_fraction(as_scalar(c))
    return Fraction(c)


def action_eigenvalue(action: GroupAction, m: Monomial) -> Scalar:
    ev = ONE
    for k in range(len(action.eigenvalues)):
        bit = 1 << k
        if m.holo & bit:
            ev = ev * action.eigenvalues[k]
        if m.anti & bit:
            ev = ev * action.eigenvalues[k].conjugate()
    return ev


# ----------------------------------------------------------------------------
# differentials
# ----------------------------------------------------------------------------


def _generator_differentials(m: Model):
    hit = m._cache.get("dgen")
    if hit is None:
        holo = list(m.d_eta)
        anti = [conjugate(f) for f in m.d_eta]
        hit = (holo, anti)
        m._cache["dgen"] = hit
    return hit


def _sector_potential(m: Model, s: Sector) -> Form:
    key = ("theta", s)
    hit = m._cache.get(key)
    if hit is None:
        if s.trivial:
            hit = Form.zero()
        else:
            hit = m.mu * s.a_scalar() + conjugate(m.mu) * s.b_scalar()
        m._cache[key] = hit
    return hit


def _d_untwisted(m: Model, holo: int, anti: int) -> Form:
    """d of the trivial-sector monomial eta^holo ^ etabar^anti."""
    key = ("d0", holo, anti)
    hit = m._cache.get(key)
    if hit is not None:
        return hit
    dh, da = _generator_differentials(m)
    factors = [(False, k) for k in range(m.n) if holo >> k & 1]
    factors += [(True, k) for k in range(m.n) if anti >> k & 1]
    total = Form.zero()
    for j, (bar, k) in enumerate(factors):
        piece = Form.one()
        for i, (b2, k2) in enumerate(factors):
            if i == j:
                piece = wedge(piece, da[k2] if b2 else dh[k2])
            else:
                bit = 1 << k2
                piece = wedge(piece, Form._wrap({Monomial(TRIVIAL, 0, bit) if b2 else Monomial(TRIVIAL, bit, 0): ONE}))
            if not piece:
                break
        if j & 1:
            piece = -piece
        total = total + piece
    m._cache[key] = total
    return total


def _d_monomial(m: Model, mono: Monomial) -> Form:
    key = ("d", mono)
    hit = m._cache.get(key)
    if hit is not None:
        return hit
    base = _d_untwisted(m, mono.holo, mono.anti)
    s = mono.sector
    if s.trivial:
        out = base
    else:
        shifted = Form._wrap({t.with_sector(s): c for t, c in base._terms.items()})
        theta = _sector_potential(m, s)
        out = shifted + wedge(theta, Form._wrap({mono: ONE}))
    m._cache[key] = out
    return out


def d(x: Form, m: Model) -> Form:
    out: dict = {}
    for mono, c in x._terms.items():
        for t, v in _d_monomial(m, mono)._terms.items():
            out[t] = out.get(t, 0) + v * c
    return Form(out)


def _require_pure(x: Form, what: str) -> tuple[int, int] | None:
    try:
        return x.bidegree()
    except ValueError:
        raise ValueError(f"{what} requires a pure-bidegree form") from None


def del_(x: Form, m: Model) -> Form:
    bd = _require_pure(x, "del")
    if bd is None:
        return Form.zero()
    return d(x, m).component(bd[0] + 1, bd[1])


def delbar(x: Form, m: Model) -> Form:
    bd = _require_pure(x, "delbar")
    if bd is None:
        return Form.zero()
    return d(x, m).component(bd[0], bd[1] + 1)


def del_delbar(x: Form, m: Model) -> Form:
    return del_(delbar(x, m), m)


# ----------------------------------------------------------------------------
# metric structure
# ----------------------------------------------------------------------------


def monomial_weight(m: Model, mono: Monomial) -> Fraction:
    """g(mono, mono) for the diagonal metric."""
    w = Fraction(1)
    for k in range(m.n):
        bit = 1 << k
        if mono.holo & bit:
            w *= m.metric[k]
        if mono.anti & bit:
            w *= m.metric[k]
    return w


def _star_monomial(m: Model, mono: Monomial) -> tuple[Fraction, Monomial]:
    key = ("star", mono)
    hit = m._cache.get(key)
    if hit is not None:
        return hit
    full = (1 << m.n) - 1
    hc, ac = full ^ mono.holo, full ^ mono.anti
    eps = _wedge_sign(mono.holo, mono.anti, hc, ac)
    vol_scale = Fraction(1)
    for c in m.metric:
        vol_scale *= c
    coef = monomial_weight(m, mono) / vol_scale
    if eps < 0:
        coef = -coef
    hit = (coef, Monomial(mono.sector.conj(), hc, ac))
    m._cache[key] = hit
    return hit


def hodge_star(x: Form, m: Model) -> Form:
    """C-antilinear Hodge star with ``x ^ *y = <x, y> vol``."""
    _require_pure(x, "hodge_star")
    out = {}
    for mono, c in x._terms.items():
        coef, target = _star_monomial(m, mono)
        out[target] = c.conjugate() * coef
    return Form._wrap(out)


def volume_form(m: Model) -> Form:
    return hodge_star(Form.one(), m)


def inner(x: Form, y: Form, m: Model) -> Scalar:
    """Hermitian product, linear in ``x``; distinct monomials are orthogonal."""
    total = Scalar(0)
    small, big = (x, y) if len(x) <= len(y) else (y, x)
    for mono in small._terms:
        cy = y._terms.get(mono)
        cx = x._terms.get(mono)
        if cx is None or cy is None:
            continue
        total = total + cx * cy.conjugate() * monomial_weight(m, mono)
    return total


def norm2(x: Form, m: Model) -> Fraction:
    return inner(x, x, m).re


def codiff_del(x: Form, m: Model) -> Form:
    return -hodge_star(del_(hodge_star(x, m), m), m)


def codiff_delbar(x: Form, m: Model) -> Form:
    return -hodge_star(delbar(hodge_star(x, m), m), m)


class HarmonicCheck(NamedTuple):
    ok: bool
    failed: tuple[str, ...]

    def __bool__(self):
        return self.ok


def is_harmonic(x: Form, flavor: str, m: Model) -> HarmonicCheck:
    if flavor == "deRham":
        try:
            x.degree()
        except ValueError:
            raise ValueError("deRham harmonicity requires pure total degree") from None
        star = Form.zero()
        for p, q in sorted(x.bidegrees()):
            star = star + hodge_star(x.component(p, q), m)
        conds = {"dx": d(x, m), "d*x": d(star, m)}
    else:
        _require_pure(x, "is_harmonic")
        star = hodge_star(x, m)
        if flavor == "dolbeault":
            conds = {"delbar x": delbar(x, m), "delbar *x": delbar(star, m)}
        elif flavor == "bottChern":
            conds = {"del x": del_(x, m), "delbar x": delbar(x, m), "del delbar *x": del_delbar(star, m)}
        elif flavor == "aeppli":
            conds = {"del *x": del_(star, m), "delbar *x": delbar(star, m), "del delbar x": del_delbar(x, m)}
        else:
            raise ValueError(f"unknown flavor {flavor!r}")
    failed = tuple(name for name, val in conds.items() if val)
    return HarmonicCheck(not failed, failed)


# ----------------------------------------------------------------------------
# validation
# ----------------------------------------------------------------------------


@dataclass
class ValidationReport:
    model: str
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


def validate_model(m: Model) -> ValidationReport:
    rep = ValidationReport(m.name)
    fail = rep.failures.append
    if m.n < 1 or m.n > 9:
        fail(f"rank {m.n} outside 1..9")
        return rep
    if len(m.d_eta) != m.n:
        fail(f"expected {m.n} structure equations, got {len(m.d_eta)}")
        return rep
    if len(m.metric) != m.n:
        fail(f"expected {m.n} metric entries, got {len(m.metric)}")
    for k, c in enumerate(m.metric, 1):
        if c <= 0:
            fail(f"metric entry c{k} = {c} is not positive")
    structurally_ok = True
    for i, f in enumerate(m.d_eta, 1):
        for mono in f.monomials():
            if not mono.sector.trivial:
                fail(f"d eta^{i} has a non-constant coefficient (sector {mono.sector})")
                structurally_ok = False
            if mono.degree != 2 or max(mono.holo, mono.anti) >> m.n:
                fail(f"d eta^{i} contains a term of wrong degree or index")
                structurally_ok = False
        if f.component(0, 2):
            fail(f"integrability: d eta^{i} has a (0,2) component")
    for mono in m.mu.monomials():
        if not mono.sector.trivial or mono.degree != 1 or max(mono.holo, mono.anti) >> m.n:
            fail("mu must be a constant-coefficient 1-form")
            structurally_ok = False
            break
    for s in m.sectors:
        if not s.is_unitary():
            fail(f"unitarity: sector {s} has b != -conj(a)")
        if s.conj() not in m.sectors:
            # the Hodge star and conjugation both land in the conjugate sector
            fail(f"sector {s} is configured without its conjugate {s.conj()}")
    names = [a.name for a in m.actions]
    if len(set(names)) != len(names):
        fail("duplicate action names")
    for a in m.actions:
        _validate_action(m, a, fail)
    if m.invariant_under is not None and m.invariant_under not in names:
        fail(f"invariant_under refers to unknown action {m.invariant_under!r}")
    if not structurally_ok:
        return rep
    for s in m.sectors:
        for mono in m.degree_basis(0, s) + m.degree_basis(1, s):
            dd = d(_d_monomial(m, mono), m)
            if dd:
                fail(f"d^2 != 0 on {mono} in sector {s}: {dd}")
    return rep


def _validate_action(m: Model, a: GroupAction, fail) -> None:
    if len(a.eigenvalues) != m.n:
        fail(f"action {a.name}: expected {m.n} eigenvalues")
        return
    for k, e in enumerate(a.eigenvalues, 1):
        if e ** a.order != ONE:
            fail(f"action {a.name}: eigenvalue {e} on eta^{k} is not an {a.order}-th root of unity")
    for i, f in enumerate(m.d_eta):
        for mono in f.monomials():
            if action_eigenvalue(a, mono) != a.eigenvalues[i]:
                fail(f"action {a.name} does not commute with d on eta^{i + 1}")
                break
    if any(not s.trivial for s in m.sectors):
        fail(f"action {a.name}: group actions require the trivial sector only")
    if a.lattice == "heisenberg":
        if m.n != 3:
            fail(f"action {a.name}: heisenberg lattice needs rank 3")
        elif a.eigenvalues[2] != a.eigenvalues[0] * a.eigenvalues[1]:
            fail(f"action {a.name}: not compatible with the lattice product (need c = a*b)")
    elif a.lattice is not None:
        fail(f"action {a.name}: unknown lattice {a.lattice!r}")
