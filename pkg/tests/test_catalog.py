import pytest
from hypothesis import given, strategies as st

from formlab.calculus import GroupAction, action_eigenvalue, d, hodge_star, validate_model
from formlab.catalog import (
    FAMILIES,
    CatalogError,
    builtin_model,
    builtin_names,
    burnside_count,
    change_coframe,
    derive_deformed_structure,
    fixed_curve_bases,
    fixed_points,
    heisenberg_product,
    instantiate,
    invariant_subcomplex,
    nakamura_coframe,
    solv_coframe,
    solv_tau_coframe,
)
from formlab.exterior import Form, parse_form
from formlab.scalar import I, ONE, Scalar, as_scalar
from strategies import scalars

IWASAWA = builtin_model("iwasawa")
NAK = builtin_model("nakamura_hp")
HALF = Scalar(1, 0) / 2


def f(text):
    return parse_form(text, 3)


def small_params():
    # |t| < 1 with small denominators
    part = st.fractions(-3, 3, max_denominator=4).map(lambda x: x / 5)
    return st.builds(Scalar, part, part)


def test_names():
    assert set(builtin_names()) >= {"iwasawa", "iwasawa_orbifold", "nakamura_hp", "nakamura_family", "solv_family", "solv_t2_family"}
    with pytest.raises(CatalogError):
        builtin_model("kodaira")


@pytest.mark.parametrize("name", ["iwasawa", "iwasawa_orbifold", "nakamura_hp", "solv_00"])
def test_builtins_validate(name):
    assert validate_model(builtin_model(name)).ok


@given(small_params())
def test_family_instances_validate(t):
    assert validate_model(instantiate("nakamura_family", {"t": t})).ok
    assert validate_model(instantiate("solv_family", {"t1": t + 1, "t2": t})).ok
    if t:
        assert validate_model(instantiate("solv_t2_family", {"t1": ONE, "t2": t})).ok


def test_nakamura_family_degenerates_at_zero():
    m = instantiate("nakamura_family", {"t": 0})
    assert m.d_eta == NAK.d_eta and m.mu == NAK.mu and m.sectors == NAK.sectors


def test_nakamura_family_at_one_half():
    m = instantiate("nakamura_family", {"t": "1/2"})
    four_thirds = Scalar(4) / 3
    assert m.d_eta[1] == f("e1^e2") * -four_thirds + f("e2^E1") * (-four_thirds * HALF)
    assert m.mu == f("e1") * four_thirds - f("E1") * (four_thirds * HALF)


@pytest.mark.parametrize(
    "family, params",
    [
        ("nakamura_family", {"t": 1}),
        ("nakamura_family", {"t": "3/5+4/5i"}),
        ("solv_family", {"t1": 0, "t2": "-1"}),
        ("solv_t2_family", {"t1": 1, "t2": 0}),
        ("nakamura_family", {}),
        ("nakamura_family", {"t": 0, "s": 1}),
    ],
)
def test_inadmissible_parameters(family, params):
    with pytest.raises(CatalogError):
        instantiate(family, params)


def test_plain_models_take_no_parameters():
    with pytest.raises(CatalogError):
        instantiate("iwasawa", {"t": 0})


# coframe changes -------------------------------------------------------------


def test_identity_coframe():
    for m in (NAK, IWASAWA, builtin_model("solv_00")):
        out = derive_deformed_structure(m, (f("e1"), f("e2"), f("e3")))
        assert out.d_eta == m.d_eta and out.mu == m.mu


@given(small_params())
def test_nakamura_derivation_matches_family(t):
    got = derive_deformed_structure(NAK, nakamura_coframe(t))
    fam = instantiate("nakamura_family", {"t": t})
    assert got.d_eta == fam.d_eta and got.mu == fam.mu


@given(small_params(), small_params())
def test_solv_derivation_matches_family(t1, t2):
    got = derive_deformed_structure(builtin_model("solv_00"), solv_coframe(t1, t2))
    assert got.d_eta == instantiate("solv_family", {"t1": t1, "t2": t2}).d_eta


@given(small_params())
def test_inverse_coframe_returns_the_base(t):
    deformed = derive_deformed_structure(NAK, nakamura_coframe(t))
    k = (ONE - t * t.conjugate()).inverse()
    inverse = (f("e1") * k - f("E1") * (t * k), f("e2"), f("e3"))
    back = derive_deformed_structure(deformed, inverse)
    assert back.d_eta == NAK.d_eta and back.mu == NAK.mu


def test_tau_coframe_at_one_half():
    src = instantiate("solv_family", {"t1": 1, "t2": "1/2"})
    got = change_coframe(src, solv_tau_coframe(1, "1/2"))
    four_thirds = Scalar(4) / 3
    assert got.d_eta[1] == f("e1^e2") * -four_thirds + f("e2^E1") * (Scalar(2) / 3)
    assert got.d_eta == instantiate("solv_t2_family", {"t1": 1, "t2": "1/2"}).d_eta


def test_permutation_coframe_permutes():
    out = change_coframe(NAK, (f("e1"), f("e3"), f("e2")))
    assert out.d_eta == (f("0"), f("e1^e2"), f("-e1^e3"))
    with pytest.raises(CatalogError):
        change_coframe(NAK, (f("E1"), f("e2"), f("e3")))


def test_singular_coframe_rejected():
    with pytest.raises(CatalogError):
        derive_deformed_structure(NAK, (f("e1"), f("e1"), f("e3")))


# group actions ---------------------------------------------------------------


def test_sigma_invariants():
    inv = invariant_subcomplex(IWASAWA, "sigma")
    monos = [mono for p in range(4) for q in range(4) for mono in inv.basis(p, q)]
    assert len(monos) == 16
    assert f("e3^E3").monomials()[0] in monos
    one_one = {mono for mono in inv.basis(1, 1)}
    assert one_one == {f(s).monomials()[0] for s in ("e1^E1", "e1^E2", "e2^E1", "e2^E2", "e3^E3")}
    assert burnside_count(IWASAWA, IWASAWA.action("sigma")) == 16


def test_trivial_action_keeps_everything():
    ident = GroupAction("id", 1, (ONE, ONE, ONE))
    inv = invariant_subcomplex(IWASAWA, ident)
    assert sum(len(inv.basis(p, q)) for p in range(4) for q in range(4)) == 64


def test_invariant_subcomplex_is_closed_under_d_and_star():
    inv = invariant_subcomplex(IWASAWA, "sigma")
    act = inv.action("sigma")
    for p in range(4):
        for q in range(4):
            for mono in inv.basis(p, q):
                x = Form.monomial(mono)
                for y in (d(x, inv), hodge_star(x, inv)):
                    assert all(action_eigenvalue(act, t) == ONE for t in y.monomials())


def test_action_not_commuting_is_rejected():
    with pytest.raises(CatalogError):
        invariant_subcomplex(IWASAWA, GroupAction("bad", 4, (I, ONE, ONE)))


# lattice ----------------------------------------------------------------------


def test_sigma_fixed_points():
    rep = fixed_points(IWASAWA, "sigma")
    assert rep.isolated and rep.count == 16
    pts = set(rep.points)
    for z3 in ("0", "1/2", "i/2", "1/2+i/2"):
        assert (as_scalar(0), as_scalar(0), as_scalar(z3)) in pts


def test_fixed_points_independent_of_enumeration():
    assert set(fixed_points(IWASAWA, "sigma", radius=1).points) == set(fixed_points(IWASAWA, "sigma", radius=2).points)


def test_identity_is_not_isolated():
    ident = GroupAction("id", 1, (ONE, ONE, ONE), lattice="heisenberg")
    rep = fixed_points(IWASAWA.with_changes(actions=(ident,)), "id")
    assert not rep.isolated and rep.count == 0


def test_psi_curves():
    bases = fixed_curve_bases(IWASAWA, "psi")
    assert len(bases) == 8
    assert (as_scalar(0), as_scalar(0)) in bases
    assert (as_scalar("1/2+i/2"), as_scalar("1/2+i/2")) in bases
    with pytest.raises(CatalogError):
        fixed_curve_bases(IWASAWA, "sigma")


@given(st.tuples(scalars(), scalars(), scalars()), st.tuples(scalars(), scalars(), scalars()), st.tuples(scalars(), scalars(), scalars()))
def test_heisenberg_product_is_associative(x, y, z):
    assert heisenberg_product(heisenberg_product(x, y), z) == heisenberg_product(x, heisenberg_product(y, z))


def test_families_registry():
    assert FAMILIES["nakamura_family"].params == ("t",)
