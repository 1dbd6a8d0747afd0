import pytest
from hypothesis import given, strategies as st

from formlab.calculus import del_delbar, delbar, is_harmonic
from formlab.catalog import builtin_model, instantiate
from formlab.cohomology import NotClosed, cell, cup_product, formality_check, operator_matrix, table
from formlab.exterior import Form, parse_form
from formlab.linalg import kernel
from formlab.massey import NotExact, ProductsNotVanishing, abc_massey, dolbeault_massey, solve_primitive
from formlab.reports import proportional
from formlab.scalar import I, Scalar
from strategies import scalars

ORBIFOLD = builtin_model("iwasawa_orbifold")
NAK = builtin_model("nakamura_hp")
SOLV = instantiate("solv_family", {"t1": "1", "t2": "0"})
HALF = Scalar(1, 0) / 2

ORB_TRIPLE = ("e1^E1", "e2^E2", "e2^E2")
NAK_TRIPLE = ("e1^e2", "x(-1,1)*e3^E1", "E1^E2")
SOLV_TRIPLE = ("e3", "e3", "E3")


def f(text):
    return parse_form(text, 3)


def forms(triple):
    return tuple(f(s) for s in triple)


def test_solve_primitive_examples():
    assert solve_primitive(f("e3^E3"), "delbar", SOLV) == f("e1") * (-I * HALF)
    g = solve_primitive(f("e1^E1") ^ f("e2^E2"), "del_delbar", ORBIFOLD)
    assert proportional(g, f("e3^E3"))
    assert solve_primitive(Form.zero(), "delbar", SOLV) == Form.zero()


def test_solve_primitive_rejects_non_exact():
    with pytest.raises(NotExact):
        solve_primitive(f("E1"), "delbar", NAK)
    with pytest.raises(ValueError):
        solve_primitive(f("E1"), "del", NAK)


def test_primitive_has_minimum_norm():
    # orthogonal to the kernel of delbar in its bidegree
    g = solve_primitive(f("e3^E3"), "delbar", SOLV)
    rows, src, _ = operator_matrix("delbar", SOLV, 1, 0)
    ker = kernel(rows, src.size)
    assert not any(ker.project(src.vector(g), src.weights))


def test_dolbeault_on_solv():
    r = dolbeault_massey(*forms(SOLV_TRIPLE), SOLV)
    assert r.verdict == "nonVanishing"
    assert proportional(r.representative, f("e1^e3"))
    assert r.primitives[1] == f("e1") * (-I * HALF)
    assert not delbar(r.representative, SOLV)


def test_zero_input_vanishes():
    r = dolbeault_massey(Form.zero(), f("e3"), f("E3"), SOLV)
    assert r.vanishes


def test_abc_on_orbifold():
    r = abc_massey(*forms(ORB_TRIPLE), ORBIFOLD)
    assert r.verdict == "nonVanishing"
    assert proportional(r.reduced, f("e2^e3^E2^E3"))
    assert r.indeterminacy_dim == 0
    assert r.target == (2, 2)


def test_abc_on_nakamura_central_fiber():
    r = abc_massey(*forms(NAK_TRIPLE), NAK)
    assert r.verdict == "nonVanishing"
    assert proportional(r.reduced, f("x(-1,1)*e2^e3^E1^E2"))
    assert is_harmonic(r.reduced, "aeppli", NAK)
    assert r.indeterminacy_dim == 2
    assert not r.indeterminacy.contains(cell(NAK, 2, 2).vector(r.reduced))
    assert not del_delbar(r.representative, NAK)


def test_abc_zero_middle_vanishes():
    a, _, c = forms(ORB_TRIPLE)
    assert abc_massey(a, Form.zero(), c, ORBIFOLD).vanishes


def test_products_must_vanish():
    with pytest.raises(ProductsNotVanishing):
        abc_massey(f("e1"), f("e2"), f("e1"), ORBIFOLD.with_changes(invariant_under=None))
    with pytest.raises(ProductsNotVanishing):
        dolbeault_massey(f("e1"), f("e2"), f("e1"), builtin_model("iwasawa"))


def test_inputs_must_be_closed():
    with pytest.raises(NotClosed):
        abc_massey(f("e3"), f("e1"), f("e2"), builtin_model("iwasawa"))


def _kernel_element(op, m, p, q, coeffs):
    rows, src, _ = operator_matrix(op, m, p, q)
    ker = kernel(rows, src.size)
    vec = [Scalar(0)] * src.size
    for c, v in zip(coeffs, ker.basis):
        vec = [a + c * b for a, b in zip(vec, v)]
    return src.form(vec)


@given(st.lists(scalars(), min_size=8, max_size=8), st.lists(scalars(), min_size=8, max_size=8))
def test_verdict_independent_of_abc_primitives(c1, c2):
    for m, triple in ((ORBIFOLD, ORB_TRIPLE), (NAK, NAK_TRIPLE)):
        base = abc_massey(*forms(triple), m)
        (p, q), (r, s), (u, v) = base.bidegrees
        g_ab = base.primitives[0] + _kernel_element("del_delbar", m, p + r - 1, q + s - 1, c1)
        g_bc = base.primitives[1] + _kernel_element("del_delbar", m, r + u - 1, s + v - 1, c2)
        again = abc_massey(*forms(triple), m, g_ab=g_ab, g_bc=g_bc)
        assert again.verdict == base.verdict


@given(st.lists(scalars(), min_size=4, max_size=4))
def test_verdict_independent_of_dolbeault_primitives(coeffs):
    base = dolbeault_massey(*forms(SOLV_TRIPLE), SOLV)
    # e3 ^ e3 = 0, so only the second primitive has room to move
    f_bc = base.primitives[1] + _kernel_element("delbar", SOLV, 1, 0, coeffs)
    again = dolbeault_massey(*forms(SOLV_TRIPLE), SOLV, f_bc=f_bc)
    assert again.verdict == base.verdict


@given(scalars(nonzero=True), scalars(nonzero=True), scalars(nonzero=True))
def test_scaling(x, y, z):
    a, b, c = forms(NAK_TRIPLE)
    base = abc_massey(a, b, c, NAK)
    r = abc_massey(a * x, b * y, c * z, NAK)
    assert r.verdict == base.verdict
    assert r.reduced == base.reduced * (x * y * z)


def _bc_classes(m, max_degree=2):
    out = []
    for (p, q), res in table("bottChern", m).items():
        if 0 < p + q <= max_degree:
            out.extend(res.representatives)
    return out


@pytest.mark.parametrize(
    "m",
    [instantiate("nakamura_family", {"t": "1/2"}), instantiate("nakamura_family", {"t": "i/3"})],
    ids=["t=1/2", "t=i/3"],
)
def test_bott_chern_formal_models_have_trivial_products(m):
    assert formality_check("bottChern", m).verdict
    classes = _bc_classes(m)
    checked = 0
    for a in classes:
        for b in classes:
            if cup_product(a, b, "bottChern", m):
                continue
            for c in classes:
                if cup_product(b, c, "bottChern", m):
                    continue
                assert abc_massey(a, b, c, m).vanishes
                checked += 1
    assert checked > 0
