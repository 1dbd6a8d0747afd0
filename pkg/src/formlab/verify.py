"""The acceptance suite, run against the embedded expected data."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

from .calculus import (
    Model,
    _d_monomial,
    d,
    hodge_star,
    is_harmonic,
    monomial_weight,
    validate_model,
)
from .catalog import (
    burnside_count,
    change_coframe,
    derive_deformed_structure,
    fixed_curve_bases,
    fixed_points,
    instantiate,
    nakamura_coframe,
    solv_coframe,
    solv_tau_coframe,
)
from .cohomology import (
    cell,
    cohomology,
    ddbar_check,
    duality_checks,
    formality_check,
    froelicher_check,
    table,
    _kernel_of,
)
from .exterior import Form, format_form, parse_form, wedge
from .massey import abc_massey, dolbeault_massey
from .reports import diff_table, proportional, sweep, table_report
from .scalar import ONE, Scalar, as_scalar, parse_scalar

__all__ = ["Criterion", "Outcome", "CRITERIA", "load_expected", "run_verify", "catalog_models"]


@dataclass
class Outcome:
    number: int
    title: str
    tags: tuple[str, ...]
    ok: bool
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        head = f"[{status}] criterion {self.number}: {self.title}"
        if self.failures:
            head += "\n" + "\n".join(f"    - {f}" for f in self.failures)
        return head


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    tags: tuple[str, ...]
    run: Callable[[dict], list[str]]


def load_expected(data_dir: str | Path | None = None) -> dict:
    if data_dir is not None:
        return json.loads((Path(data_dir) / "expected.json").read_text())
    return json.loads(resources.files("formlab").joinpath("data/expected.json").read_text())


def _diff_lines(label: str, diff: dict) -> list[str]:
    out = []
    for key, c in diff.items():
        if not c["match"]:
            msg = f"{label} cell ({key}): expected {c['expected']}, got {c['actual']}"
            if c["unmatched"]:
                msg += f"; representatives not in table: {', '.join(c['unmatched'])}"
            out.append(msg)
    return out


def _form(text: str) -> Form:
    return parse_form(text, 3)


# ----------------------------------------------------------------------------
# criteria
# ----------------------------------------------------------------------------


def _c1(data: dict) -> list[str]:
    exp = data["orbifold"]
    m = instantiate(exp["model"])
    fails = []
    dol = table_report(m, "dolbeault", exp["dolbeault"])
    fails += _diff_lines("Dolbeault", dol.diff)
    betti = table_report(m, "deRham", {str(k): b for k, b in enumerate(exp["betti"])})
    fails += _diff_lines("Betti", betti.diff)
    for theory in ("bottChern", "aeppli"):
        rep = table_report(m, theory, exp["dolbeault"])
        fails += _diff_lines(theory, rep.diff)
    rep = ddbar_check(m)
    if not all(rep.injectivity.values()):
        fails.append("ddbar: injectivity formulation is FALSE")
    if not all(rep.subspace_form.values()):
        fails.append("ddbar: subspace formulation is FALSE")
    if not (all(r["equal"] for r in rep.froelicher.values()) and rep.symmetric):
        fails.append("ddbar: Froelicher formulation is FALSE")
    count = sum(len(m.basis(p, q)) for p in range(4) for q in range(4))
    if count != exp["invariant_monomials"]:
        fails.append(f"invariant monomials: expected {exp['invariant_monomials']}, got {count}")
    base = instantiate("iwasawa")
    if burnside_count(base, base.action("sigma")) != count:
        fails.append("Burnside count disagrees with the invariant basis")
    return fails


def _massey_checks(r, exp: dict, label: str) -> list[str]:
    fails = []
    if r.verdict != exp["verdict"]:
        fails.append(f"{label}: verdict {r.verdict}, expected {exp['verdict']}")
    if "class" in exp and not proportional(r.reduced, _form(exp["class"])):
        fails.append(f"{label}: class {format_form(r.reduced)} is not a multiple of {exp['class']}")
    if "indeterminacy_dim" in exp and r.indeterminacy_dim != exp["indeterminacy_dim"]:
        fails.append(f"{label}: indeterminacy dimension {r.indeterminacy_dim}, expected {exp['indeterminacy_dim']}")
    return fails


def _c2(data: dict) -> list[str]:
    exp = data["orbifold"]["massey_abc"]
    m = instantiate(data["orbifold"]["model"])
    r = abc_massey(_form(exp["a"]), _form(exp["b"]), _form(exp["c"]), m)
    return _massey_checks(r, exp, "ABC Massey")


def _c3(data: dict) -> list[str]:
    exp = data["nakamura_j0"]
    m = instantiate(exp["model"])
    fails = _diff_lines("Bott-Chern", table_report(m, "bottChern", exp["bc"]).diff)
    aeppli = table_report(m, "aeppli")
    diff = diff_table(m, "aeppli", aeppli.dims, aeppli.representatives, exp["aeppli"])
    fails += _diff_lines("Aeppli", {k: diff[k] for k in exp["aeppli"]})
    h01 = cohomology("dolbeault", m, 0, 1).dim
    if h01 != exp["dolbeault_01"]:
        fails.append(f"h^(0,1) = {h01}, expected {exp['dolbeault_01']}")
    return fails


def _c4(data: dict) -> list[str]:
    exp = data["nakamura_j0"]
    m = instantiate(exp["model"])
    fails = []
    fr = formality_check("bottChern", m)
    want = tuple(_form(s) for s in exp["formality_witness"])
    if fr.verdict:
        fails.append("Bott-Chern formality is TRUE, expected FALSE")
    elif not (proportional(fr.witness[0], want[0]) and proportional(fr.witness[1], want[1])):
        fails.append(f"formality witness ({format_form(fr.witness[0])}, {format_form(fr.witness[1])})")
    if ddbar_check(m).verdict:
        fails.append("ddbar is TRUE, expected FALSE")
    mexp = exp["massey_abc"]
    r = abc_massey(_form(mexp["a"]), _form(mexp["b"]), _form(mexp["c"]), m)
    fails += _massey_checks(r, mexp, "ABC Massey")
    if not is_harmonic(_form(mexp["class"]), "aeppli", m).ok:
        fails.append(f"{mexp['class']} is not Aeppli-harmonic")
    if r.indeterminacy is not None and r.indeterminacy.contains(cell(m, 2, 2).vector(r.reduced)):
        fails.append("representative lies in the indeterminacy")
    return fails


def _c5(data: dict) -> list[str]:
    exp = data["nakamura_t"]
    dims = {k: len(v) for k, v in exp["bc"].items()}
    fails = []
    for value in exp["values"]:
        m = instantiate(exp["family"], {"t": value})
        fails += _diff_lines(f"t={value} Bott-Chern", table_report(m, "bottChern", dims).diff)
        if not ddbar_check(m).verdict:
            fails.append(f"t={value}: ddbar is FALSE")
        if not formality_check("bottChern", m).verdict:
            fails.append(f"t={value}: Bott-Chern formality is FALSE")
    return fails


def _c6(data: dict) -> list[str]:
    exp = data["solv_massey"]
    m = instantiate(exp["family"], exp["params"])
    r = dolbeault_massey(_form(exp["a"]), _form(exp["b"]), _form(exp["c"]), m)
    fails = []
    if r.verdict != exp["verdict"]:
        fails.append(f"verdict {r.verdict}, expected {exp['verdict']}")
    if not proportional(r.representative, _form(exp["class"])):
        fails.append(f"representative {format_form(r.representative)} is not a multiple of {exp['class']}")
    if r.primitives[1] != _form(exp["primitive"]):
        fails.append(f"primitive {format_form(r.primitives[1])}, expected {exp['primitive']}")
    return fails


def _structure_diff(label: str, got: Model, want) -> list[str]:
    out = []
    for i, (x, y) in enumerate(zip(got.d_eta, want), 1):
        if x != y:
            out.append(f"{label}: d eta^{i} = {format_form(x)}, expected {format_form(y)}")
    return out


def _c7(data: dict) -> list[str]:
    exp = data["structure"]
    fails = []
    base = instantiate("solv_00")
    for t1, t2 in exp["solv_t1t2"]["values"]:
        got = derive_deformed_structure(base, solv_coframe(t1, t2))
        want = instantiate("solv_family", {"t1": t1, "t2": t2})
        fails += _structure_diff(f"solv (t1,t2)=({t1},{t2})", got, want.d_eta)
    for t1, t2 in exp["solv_t2"]["values"]:
        src = instantiate("solv_family", {"t1": t1, "t2": t2})
        got = change_coframe(src, solv_tau_coframe(t1, t2))
        want = instantiate("solv_t2_family", {"t1": t1, "t2": t2})
        fails += _structure_diff(f"tau coframe (t1,t2)=({t1},{t2})", got, want.d_eta)
    nak = instantiate("nakamura_hp")
    for value in exp["nakamura_t"]["values"]:
        t = parse_scalar(value)
        got = derive_deformed_structure(nak, nakamura_coframe(t))
        family = instantiate("nakamura_family", {"t": value})
        if got.d_eta != family.d_eta or got.mu != family.mu:
            fails.append(f"nakamura t={value}: derived structure differs from the catalog family")
        displayed = tuple(_form(s) for s in exp["nakamura_t"]["displayed"][value])
        lines = _structure_diff(f"nakamura t={value}", got, displayed)
        if lines and derive_deformed_structure(nak, nakamura_coframe(t, -1)).d_eta == displayed:
            lines.append(f"nakamura t={value}: the displayed system is what the coframe eta^1 - t etabar^1 gives")
        fails += lines
    return fails


def _c8(data: dict) -> list[str]:
    exp = data["fixed_points"]
    m = instantiate("iwasawa")
    fails = []
    pts = fixed_points(m, "sigma")
    if pts.count != exp["sigma_count"]:
        fails.append(f"sigma fixed points: {pts.count}, expected {exp['sigma_count']}")
    have = set(pts.points)
    for req in exp["sigma_required"]:
        if tuple(as_scalar(x) for x in req) not in have:
            fails.append(f"missing sigma fixed point {req}")
    bases = fixed_curve_bases(m, "psi")
    if len(bases) != exp["psi_count"]:
        fails.append(f"psi curve bases: {len(bases)}, expected {exp['psi_count']}")
    for req in exp["psi_required"]:
        if tuple(as_scalar(x) for x in req) not in set(bases):
            fails.append(f"missing psi base point {req}")
    return fails


def catalog_models() -> list[Model]:
    """Every builtin model plus representative family members."""
    return [
        instantiate("iwasawa"),
        instantiate("iwasawa_orbifold"),
        instantiate("nakamura_hp"),
        instantiate("solv_00"),
        instantiate("nakamura_family", {"t": "1/2"}),
        instantiate("nakamura_family", {"t": "i/3"}),
        instantiate("solv_family", {"t1": "1", "t2": "0"}),
        instantiate("solv_family", {"t1": "1", "t2": "1/2"}),
        instantiate("solv_t2_family", {"t1": "1", "t2": "i/3"}),
    ]


def _monomials(m: Model):
    for p in range(m.n + 1):
        for q in range(m.n + 1):
            for s in m.sectors:
                yield from m.basis(p, q, s)


def model_properties(m: Model) -> list[str]:
    """Deterministic versions of the property suite on one model."""
    fails = []
    if not validate_model(m).ok:
        fails.append(f"{m.name}: validation fails")
    for mono in _monomials(m):
        x = Form._wrap({mono: ONE})
        if d(_d_monomial(m, mono), m):
            fails.append(f"{m.name}: d^2 != 0 on {format_form(x)}")
        p, q = mono.bidegree
        if hodge_star(hodge_star(x, m), m) != x * (-1) ** (p + q):
            fails.append(f"{m.name}: ** != (-1)^(p+q) on {format_form(x)}")
        if monomial_weight(m, mono) <= 0:
            fails.append(f"{m.name}: g(x,x) <= 0 on {format_form(x)}")
    rng = random.Random(0)
    monos = list(_monomials(m))
    for _ in range(60):
        a, b = rng.choice(monos), rng.choice(monos)
        x, y = Form._wrap({a: ONE}), Form._wrap({b: ONE})
        if (a.sector + b.sector) not in m.sectors:
            continue
        lhs = d(wedge(x, y), m)
        rhs = wedge(d(x, m), y) + wedge(x, d(y, m)) * (-1) ** a.degree
        if lhs != rhs:
            fails.append(f"{m.name}: Leibniz fails on {format_form(x)}, {format_form(y)}")
    for theory in ("deRham", "dolbeault", "bottChern", "aeppli"):
        table(theory, m)  # asserts dim cohomology == dim harmonic cell by cell
    dual = duality_checks(m)
    for key, ok in dual.items():
        if not ok and key != "ok":
            fails.append(f"{m.name}: duality check {key} fails")
    froelicher_check(m)
    ddbar_check(m)
    return fails


def massey_independence(trials: int = 50, seed: int = 0) -> list[str]:
    """Perturb primitives by random closed forms; verdicts must not move."""
    rng = random.Random(seed)
    fails = []
    cases = [
        ("abc", "iwasawa_orbifold", {}, ("e1^E1", "e2^E2", "e2^E2")),
        ("abc", "nakamura_hp", {}, ("e1^e2", "x(-1,1)*e3^E1", "E1^E2")),
        ("dolbeault", "solv_family", {"t1": "1", "t2": "0"}, ("e3", "e3", "E3")),
    ]
    for kind, name, params, triple in cases:
        m = instantiate(name, params)
        a, b, c = (_form(s) for s in triple)
        fn = abc_massey if kind == "abc" else dolbeault_massey
        ref = fn(a, b, c, m)
        op = "del_delbar" if kind == "abc" else "delbar"
        (p, q), (r, s), (u, v) = ref.bidegrees
        shift = (1, 1) if kind == "abc" else (0, 1)
        cells = [(p + r - shift[0], q + s - shift[1]), (r + u - shift[0], s + v - shift[1])]
        kers = []
        for bp, bq in cells:
            if 0 <= bp <= m.n and 0 <= bq <= m.n:
                kers.append((cell(m, bp, bq), _kernel_of(m, op, bp, bq)))
            else:
                kers.append((None, None))
        for _ in range(trials):
            prims = []
            for prim, (cl, ker) in zip(ref.primitives, kers):
                extra = Form.zero()
                if ker is not None:
                    for vec in ker.basis:
                        coeff = Scalar(rng.randint(-3, 3), rng.randint(-3, 3))
                        extra = extra + cl.form(vec) * coeff
                prims.append(prim + extra)
            kw = {"g_ab": prims[0], "g_bc": prims[1]} if kind == "abc" else {"f_ab": prims[0], "f_bc": prims[1]}
            got = fn(a, b, c, m, **kw)
            if got.verdict != ref.verdict:
                fails.append(f"{kind} Massey on {name}: verdict moved under a closed perturbation")
                break
    return fails


def _c9(data: dict) -> list[str]:
    fails = []
    for m in catalog_models():
        fails += model_properties(m)
    fails += massey_independence()
    return fails


def _c10(data: dict) -> list[str]:
    values = ["0", "1/2", "i/3", "3/5"]
    rows = sweep(lambda t: instantiate("nakamura_family", {"t": t}), values, ["ddbar", "bc-formality", "abc-massey"])
    fails = []
    for row in rows:
        v = row.verdicts
        if row.value == "0":
            want = {"ddbar": "FALSE", "bc-formality": "FALSE", "abc-massey": "nonVanishing"}
            bad = [k for k in want if v[k] != want[k]]
        else:
            bad = [k for k in ("ddbar", "bc-formality") if v[k] != "TRUE"]
            if v["abc-massey"] not in ("vanishes", "undefined"):
                bad.append("abc-massey")
        for k in bad:
            fails.append(f"t={row.value}: {k} = {v[k]}")
    return fails


CRITERIA = (
    Criterion(1, "orbifold cohomology and the ddbar-lemma", ("orbifold", "cohomology"), _c1),
    Criterion(2, "orbifold ABC-Massey product", ("orbifold", "massey"), _c2),
    Criterion(3, "Nakamura central fiber tables", ("nakamura", "cohomology"), _c3),
    Criterion(4, "Nakamura central fiber negative verdicts", ("nakamura", "massey", "formality"), _c4),
    Criterion(5, "Nakamura deformed fibers", ("nakamura", "deformation", "cohomology"), _c5),
    Criterion(6, "Dolbeault Massey product on the solv family", ("solv", "massey"), _c6),
    Criterion(7, "structure equation re-derivation", ("structure", "solv", "nakamura", "deformation"), _c7),
    Criterion(8, "lattice fixed points", ("orbifold", "lattice"), _c8),
    Criterion(9, "property suites", ("properties",), _c9),
    Criterion(10, "sweep across the Nakamura family", ("nakamura", "sweep"), _c10),
)


def run_verify(only: str | None = None, data_dir: str | Path | None = None) -> list[Outcome]:
    data = load_expected(data_dir)
    out = []
    for crit in CRITERIA:
        if only and only not in crit.tags and only != str(crit.number):
            continue
        start = time.perf_counter()
        try:
            fails = crit.run(data)
        except Exception as exc:  # a crash is a failed criterion, reported as such
            fails = [f"{type(exc).__name__}: {exc}"]
        out.append(Outcome(crit.number, crit.title, crit.tags, not fails, fails, time.perf_counter() - start))
    return out
