"""Built-in models, deformation machinery, group actions and lattice fixed points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Callable, Mapping

from .calculus import GroupAction, Model, action_eigenvalue, validate_model
from .exterior import TRIVIAL, Form, Monomial, Sector, conjugate, indices_of, wedge
from .linalg import rref
from .scalar import I, ONE, ZERO, Scalar, as_scalar

__all__ = [
    "CatalogError",
    "ModelFamily",
    "FAMILIES",
    "MODELS",
    "builtin_model",
    "builtin_names",
    "instantiate",
    "derive_deformed_structure",
    "change_coframe",
    "invariant_subcomplex",
    "burnside_count",
    "fixed_points",
    "fixed_curve_bases",
    "FixedPointReport",
    "heisenberg_product",
]


class CatalogError(ValueError):
    pass


NAKAMURA_SECTORS = (TRIVIAL, Sector((1, 0), (-1, 0)), Sector((-1, 0), (1, 0)))


def _f(text: str) -> Form:
    from .exterior import parse_form

    return parse_form(text, 3)


# ----------------------------------------------------------------------------
# base models
# ----------------------------------------------------------------------------


SIGMA = GroupAction("sigma", 4, (I, I, -ONE), lattice="heisenberg")
PSI = GroupAction("psi", 2, (-ONE, -ONE, ONE), lattice="heisenberg")


def iwasawa() -> Model:
    return Model(
        "iwasawa",
        3,
        (Form.zero(), Form.zero(), -_f("e1^e2")),
        actions=(SIGMA, PSI),
    )


def iwasawa_orbifold() -> Model:
    return iwasawa().with_changes(name="iwasawa_orbifold", invariant_under="sigma")


def nakamura_hp() -> Model:
    return Model(
        "nakamura_hp",
        3,
        (Form.zero(), -_f("e1^e2"), _f("e1^e3")),
        mu=_f("e1"),
        sectors=NAKAMURA_SECTORS,
    )


def solv_00() -> Model:
    two_i = Scalar(0, 2)
    return Model("solv_00", 3, (_f("e1^e3") * two_i, _f("e2^e3") * -two_i, Form.zero()))


# ----------------------------------------------------------------------------
# families
# ----------------------------------------------------------------------------


def _unit_disc(value: Scalar, label: str) -> None:
    if value.norm2() >= 1:
        raise CatalogError(f"parameter {label} = {value} must satisfy |{label}| < 1")


def nakamura_family(t) -> Model:
    """Deformation with coframe ``eta^1 + t etabar^1, eta^2, eta^3``."""
    t = as_scalar(t)
    _unit_disc(t, "t")
    k = (ONE - t * t.conjugate()).inverse()
    d_eta = (
        Form.zero(),
        _f("e1^e2") * -k + _f("e2^E1") * (-t * k),
        _f("e1^e3") * k + _f("e3^E1") * (t * k),
    )
    mu = _f("e1") * k - _f("E1") * (t * k)
    return Model(
        "nakamura_family", 3, d_eta, mu=mu, sectors=NAKAMURA_SECTORS, params=(("t", t),)
    )


def nakamura_coframe(t, sign: int = 1) -> tuple[Form, Form, Form]:
    """``eta^1 + sign * t etabar^1`` with ``eta^2, eta^3`` unchanged."""
    t = as_scalar(t)
    return (_f("e1") + _f("E1") * (t * sign), _f("e2"), _f("e3"))


def solv_family(t1, t2) -> Model:
    """The structure equations obtained from the coframe deformation of ``solv_00``."""
    t1, t2 = as_scalar(t1), as_scalar(t2)
    _unit_disc(t2, "t2")
    k = (ONE - t2 * t2.conjugate()).inverse()
    two_i = Scalar(0, 2)
    d_eta = (
        _f("e1^e3") * (two_i * k) - _f("e1^E3") * (two_i * t2 * k) + _f("e3^E3") * (two_i * t1 * k),
        _f("e2^e3") * (-two_i * k) + _f("e2^E3") * (two_i * t2 * k),
        Form.zero(),
    )
    return Model("solv_family", 3, d_eta, params=(("t1", t1), ("t2", t2)))


def solv_coframe(t1, t2) -> tuple[Form, Form, Form]:
    t1, t2 = as_scalar(t1), as_scalar(t2)
    return (_f("e1") + _f("E3") * t1, _f("e2"), _f("e3") + _f("E3") * t2)


def solv_t2_family(t1, t2) -> Model:
    """Structure equations of ``solv_family(t1, t2)`` in the tau coframe (t2 != 0)."""
    t1, t2 = as_scalar(t1), as_scalar(t2)
    _unit_disc(t2, "t2")
    if not t2:
        raise CatalogError("solv_t2_family requires t2 != 0")
    k = (ONE - t2 * t2.conjugate()).inverse()
    d_eta = (
        Form.zero(),
        _f("e1^e2") * -k + _f("e2^E1") * (t2 * k),
        _f("e1^e3") * k - _f("e3^E1") * (t2 * k),
    )
    return Model("solv_t2_family", 3, d_eta, params=(("t1", t1), ("t2", t2)))


def solv_tau_coframe(t1, t2, sign: int = -1) -> tuple[Form, Form, Form]:
    """``tau = (2i eta^3, eta^1 + sign (t1/t2) eta^3, eta^2)``.

    ``sign=-1`` is the choice that yields the displayed tau equations.
    """
    t1, t2 = as_scalar(t1), as_scalar(t2)
    return (_f("e3") * Scalar(0, 2), _f("e1") + _f("e3") * (t1 / t2 * sign), _f("e2"))


@dataclass(frozen=True)
class ModelFamily:
    name: str
    params: tuple[str, ...]
    build: Callable[..., Model]
    description: str = ""

    def instantiate(self, values: Mapping[str, object]) -> Model:
        missing = [p for p in self.params if p not in values]
        extra = [k for k in values if k not in self.params]
        if missing or extra:
            raise CatalogError(
                f"family {self.name} takes parameters {', '.join(self.params)}"
                + (f"; missing {', '.join(missing)}" if missing else "")
                + (f"; unknown {', '.join(extra)}" if extra else "")
            )
        return self.build(*(as_scalar(values[p]) for p in self.params))


MODELS: dict[str, Callable[[], Model]] = {
    "iwasawa": iwasawa,
    "iwasawa_orbifold": iwasawa_orbifold,
    "nakamura_hp": nakamura_hp,
    "solv_00": solv_00,
}

FAMILIES: dict[str, ModelFamily] = {
    "nakamura_family": ModelFamily("nakamura_family", ("t",), nakamura_family, "|t| < 1"),
    "solv_family": ModelFamily("solv_family", ("t1", "t2"), solv_family, "|t2| < 1"),
    "solv_t2_family": ModelFamily("solv_t2_family", ("t1", "t2"), solv_t2_family, "0 < |t2| < 1"),
}


def builtin_names() -> list[str]:
    return sorted(MODELS) + sorted(FAMILIES)


def builtin_model(name: str) -> Model | ModelFamily:
    if name in MODELS:
        return MODELS[name]()
    if name in FAMILIES:
        return FAMILIES[name]
    raise CatalogError(f"unknown model {name!r}; known: {', '.join(builtin_names())}")


def instantiate(name: str, params: Mapping[str, object] | None = None) -> Model:
    obj = builtin_model(name)
    if isinstance(obj, ModelFamily):
        return obj.instantiate(params or {})
    if params:
        raise CatalogError(f"model {name} takes no parameters")
    return obj


# ----------------------------------------------------------------------------
# coframe changes
# ----------------------------------------------------------------------------


def _coframe_matrix(n: int, forms) -> list[list[Scalar]]:
    """Rows: new eta^i then new etabar^i, over old (eta^1..n, etabar^1..n)."""
    rows = []
    for f in list(forms) + [conjugate(f) for f in forms]:
        row = [ZERO] * (2 * n)
        for mono, c in f._terms.items():
            if not mono.sector.trivial or mono.degree != 1:
                raise CatalogError("coframe entries must be constant 1-forms")
            if mono.holo:
                row[mono.holo.bit_length() - 1] = c
            else:
                row[n + mono.anti.bit_length() - 1] = c
        rows.append(row)
    return rows


def _invert(rows: list[list[Scalar]]) -> list[list[Scalar]]:
    size = len(rows)
    aug = [list(r) + [ONE if i == j else ZERO for j in range(size)] for i, r in enumerate(rows)]
    red, pivots = rref(aug, 2 * size)
    if pivots[:size] != list(range(size)) or len(pivots) < size:
        raise CatalogError("coframe change is singular")
    return [r[size:] for r in red]


def _substitute(x: Form, images: list[Form], n: int) -> Form:
    """Apply the algebra map sending old generator slot k to ``images[k]``."""
    out = Form.zero()
    for mono, c in x._terms.items():
        piece = Form._wrap({Monomial(mono.sector, 0, 0): c})
        for k in indices_of(mono.holo):
            piece = wedge(piece, images[k - 1])
        for k in indices_of(mono.anti):
            piece = wedge(piece, images[n + k - 1])
        out = out + piece
    return out


def _old_in_new(n: int, forms) -> list[Form]:
    inv = _invert(_coframe_matrix(n, forms))
    # old slot j = sum_i inv[j][i] * new slot i
    out = []
    for j in range(2 * n):
        terms = {}
        for i in range(2 * n):
            c = inv[j][i]
            if c:
                mono = Monomial(TRIVIAL, 1 << i, 0) if i < n else Monomial(TRIVIAL, 0, 1 << (i - n))
                terms[mono] = c
        out.append(Form(terms))
    return out


def derive_deformed_structure(base: Model, coframe, name: str | None = None, params=()) -> Model:
    """Express ``d`` of a new (1,0)-coframe in that coframe and rebuild the model."""
    from .calculus import d

    n = base.n
    coframe = tuple(coframe)
    if len(coframe) != n:
        raise CatalogError(f"need {n} coframe forms")
    images = _old_in_new(n, coframe)
    d_eta = tuple(_substitute(d(f, base), images, n) for f in coframe)
    for i, f in enumerate(d_eta, 1):
        if f.component(0, 2):
            raise CatalogError(f"integrability fails: d tau^{i} has a (0,2) part")
    mu = _substitute(base.mu, images, n)
    return Model(
        name or base.name,
        n,
        d_eta,
        mu=mu,
        sectors=base.sectors,
        metric=(),
        params=tuple(params) or base.params,
    )


def change_coframe(m: Model, tau, name: str | None = None) -> Model:
    """Rewrite the structure equations in another (1,0)-coframe of the same structure."""
    for i, f in enumerate(tau, 1):
        if f and f.bidegrees() != {(1, 0)}:
            raise CatalogError(f"tau^{i} is not a (1,0)-form")
    out = derive_deformed_structure(m, tau, name=name)
    return out.with_changes(metric=m.metric if _is_permutation(tau) else ())


def _is_permutation(tau) -> bool:
    return all(len(f) == 1 and next(iter(f._terms.values())) == ONE for f in tau)


# ----------------------------------------------------------------------------
# group actions
# ----------------------------------------------------------------------------


def invariant_subcomplex(m: Model, action: str | GroupAction) -> Model:
    """Restrict the model to forms fixed by a finite diagonal action."""
    act = m.action(action) if isinstance(action, str) else action
    if act not in m.actions:
        m = m.with_changes(actions=m.actions + (act,))
    restricted = m.with_changes(invariant_under=act.name)
    report = validate_model(restricted)
    if not report.ok:
        raise CatalogError("; ".join(report.failures))
    return restricted


def burnside_count(m: Model, action: GroupAction) -> int:
    """Number of invariant monomials as the average trace over the cyclic group."""
    total = ZERO
    for k in range(action.order):
        g = action.power(k)
        for p in range(m.n + 1):
            for q in range(m.n + 1):
                for s in m.sectors:
                    from .exterior import basis_monomials

                    for mono in basis_monomials(m.n, p, q, s):
                        total = total + action_eigenvalue(g, mono)
    value = total / action.order
    if value.im or value.re.denominator != 1:
        raise CatalogError("Burnside average is not an integer")
    return int(value.re)


# ----------------------------------------------------------------------------
# lattice points for the Heisenberg group over Z[i]
# ----------------------------------------------------------------------------


def heisenberg_product(z, w):
    return (z[0] + w[0], z[1] + w[1], z[2] + z[0] * w[1] + w[2])


def _floor_gauss(z: Scalar) -> Scalar:
    return Scalar(math.floor(z.re), math.floor(z.im))


def _frac_gauss(z: Scalar) -> Scalar:
    return z - _floor_gauss(z)


def _canonical_point(z) -> tuple[Scalar, Scalar, Scalar]:
    """Representative of the left coset Gamma z with all coordinates in [0,1)^2."""
    lam1 = -_floor_gauss(z[0])
    lam2 = -_floor_gauss(z[1])
    z3 = z[2] + lam1 * z[1]
    return (z[0] + lam1, z[1] + lam2, _frac_gauss(z3))


def _gauss_box(radius: int):
    for a in range(-radius, radius + 1):
        for b in range(-radius, radius + 1):
            yield Scalar(a, b)


@dataclass(frozen=True)
class FixedPointReport:
    action: str
    isolated: bool
    points: tuple[tuple[Scalar, Scalar, Scalar], ...]

    @property
    def count(self) -> int:
        return len(self.points)


def _lattice_action(m: Model, action: str | GroupAction) -> GroupAction:
    act = m.action(action) if isinstance(action, str) else action
    if act.lattice != "heisenberg":
        raise CatalogError(f"action {act.name} carries no lattice data")
    a, b, c = act.eigenvalues
    if c != a * b:
        raise CatalogError(f"action {act.name} does not descend to the lattice quotient")
    return act


def fixed_points(m: Model, action: str | GroupAction = "sigma", radius: int = 1) -> FixedPointReport:
    """Fixed points of a diagonal lattice automorphism on the Heisenberg quotient.

    Solves ``sigma(z) = gamma * z`` for gamma in a box of Gaussian integers and
    reduces the solutions modulo left multiplication by the lattice.
    """
    act = _lattice_action(m, action)
    a, b, c = act.eigenvalues
    if ONE in (a, b, c):
        return FixedPointReport(act.name, False, ())
    points = set()
    for g1, g2, g3 in product(list(_gauss_box(radius)), repeat=3):
        z1 = g1 / (a - ONE)
        z2 = g2 / (b - ONE)
        z3 = (g1 * z2 + g3) / (c - ONE)
        points.add(_canonical_point((z1, z2, z3)))
    return FixedPointReport(act.name, True, tuple(sorted(points, key=_point_key)))


def fixed_curve_bases(m: Model, action: str | GroupAction = "psi") -> list[tuple[Scalar, Scalar]]:
    """Base points ``(z1, z2)`` of fixed curves when only ``z3`` is fixed pointwise.

    The curve over ``(z1, z2)`` exists when ``gamma1 * z2`` is a Gaussian integer,
    with ``gamma1 = (a - 1) z1``; base points are reduced modulo Z[i]^2.
    """
    act = _lattice_action(m, action)
    a, b, c = act.eigenvalues
    if c != ONE or ONE in (a, b):
        raise CatalogError(f"action {act.name} does not fix curves in the z3 direction")
    out = set()
    for g1, g2 in product(list(_gauss_box(2)), repeat=2):
        z1 = g1 / (a - ONE)
        z2 = g2 / (b - ONE)
        shift = g1 * z2
        if shift.re.denominator == 1 and shift.im.denominator == 1:
            out.add((_frac_gauss(z1), _frac_gauss(z2)))
    return sorted(out, key=_point_key)


def _point_key(pt):
    return tuple((z.re, z.im) for z in pt)
