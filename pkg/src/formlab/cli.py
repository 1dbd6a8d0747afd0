"""Command line interface.

Exit codes: 0 success, 1 verification mismatch, 2 input or parse error,
3 mathematical precondition failure (invalid model, open form, undefined product).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import modelfile
from .calculus import Model, validate_model
from .catalog import (
    CatalogError,
    FAMILIES,
    ModelFamily,
    builtin_model,
    builtin_names,
    fixed_curve_bases,
    fixed_points,
    invariant_subcomplex,
)
from .cohomology import NotClosed, OutOfComplex, ddbar_check, formality_check
from .exterior import Form, FormSyntaxError, format_form, parse_form
from .massey import NotExact, ProductsNotVanishing, abc_massey, dolbeault_massey
from .reports import SWEEP_CHECKS, sweep, table_report
from .scalar import ONE, format_scalar, parse_scalar

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_MATH = 0, 1, 2, 3


class InputError(Exception):
    pass


class MathError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _threads() -> int | None:
    # accepted for compatibility; the engine evaluates cells sequentially
    raw = os.environ.get("FORMLAB_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"FORMLAB_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"FORMLAB_THREADS must be a positive integer, got {raw!r}")
    return value


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"parameters look like key=value, got {item!r}")
        try:
            out[key.strip()] = parse_scalar(value)
        except ValueError as e:
            raise InputError(str(e)) from None
    return out


def load_model(ref: str, params=None) -> Model:
    """Resolve a builtin name or a model file path."""
    params = params or {}
    path = Path(ref)
    if ref.endswith(".json") or (path.exists() and ref not in builtin_names()):
        if params:
            raise InputError("parameters apply to builtin families only")
        try:
            return modelfile.load(path)
        except OSError as e:
            raise InputError(f"cannot read {ref}: {e.strerror}") from None
    try:
        obj = builtin_model(ref)
        if isinstance(obj, ModelFamily):
            return obj.instantiate(params)
        if params:
            raise InputError(f"model {ref} takes no parameters")
        return obj
    except CatalogError as e:
        raise InputError(str(e)) from None


def _checked(m: Model) -> Model:
    report = validate_model(m)
    if not report.ok:
        raise MathError("model validation failed: " + "; ".join(report.failures))
    return m


def _expr(text: str, m: Model):
    try:
        return parse_form(text, m.n)
    except FormSyntaxError as e:
        raise InputError(f"cannot parse {text!r}: {e}") from None


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------


def cmd_model(args, out) -> int:
    m = load_model(args.ref, _parse_params(args.param))
    if args.action == "validate":
        report = validate_model(m)
        if args.format == "json":
            out.write(_dump({"model": m.name, "ok": report.ok, "failures": report.failures}))
        else:
            out.write(f"{m.name}: {'valid' if report.ok else 'INVALID'}\n")
            for f in report.failures:
                out.write(f"  - {f}\n")
        return EXIT_OK if report.ok else EXIT_MATH
    if args.format == "json":
        out.write(modelfile.dumps(m))
    else:
        out.write(f"model {m.name} (n={m.n})\n")
        for i, f in enumerate(m.d_eta, 1):
            out.write(f"  d e{i} = {format_form(f)}\n")
        if m.mu:
            out.write(f"  mu = {format_form(m.mu)}\n")
        out.write("  sectors: " + ", ".join(str(s) for s in m.sectors) + "\n")
        out.write("  metric: " + ", ".join(str(c) for c in m.metric) + "\n")
        for a in m.actions:
            eig = ", ".join(format_scalar(e) for e in a.eigenvalues)
            out.write(f"  action {a.name}: order {a.order}, eigenvalues ({eig})\n")
        if m.invariant_under:
            out.write(f"  invariant under {m.invariant_under}\n")
    return EXIT_OK


def _load_expected(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from None
    if isinstance(doc, dict) and "cells" in doc:
        doc = doc["cells"]
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected an object of cells")
    return doc


def cmd_cohom(args, out) -> int:
    m = _checked(load_model(args.ref, _parse_params(args.param)))
    expected = _load_expected(args.expected) if args.expected else None
    try:
        report = table_report(m, args.theory, expected)
    except FormSyntaxError as e:
        raise InputError(f"expected table: {e}") from None
    out.write({"json": report.to_json, "csv": report.to_csv, "text": report.to_text}[args.format]())
    return EXIT_OK if report.matches else EXIT_MISMATCH


def cmd_ddbar(args, out) -> int:
    m = _checked(load_model(args.ref, _parse_params(args.param)))
    rep = ddbar_check(m)
    doc = {
        "model": m.name,
        "verdict": rep.verdict,
        "failing_bidegrees": [f"{p},{q}" for p, q in rep.failing],
        "froelicher": {str(k): v for k, v in rep.froelicher.items()},
        "dolbeault_symmetric": rep.symmetric,
    }
    if args.format == "json":
        out.write(_dump(doc))
    else:
        out.write(f"ddbar-lemma on {m.name}: {'TRUE' if rep.verdict else 'FALSE'}\n")
        if rep.failing:
            out.write("  injectivity fails at " + ", ".join(f"({p},{q})" for p, q in rep.failing) + "\n")
    return EXIT_OK


def cmd_formality(args, out) -> int:
    m = _checked(load_model(args.ref, _parse_params(args.param)))
    res = formality_check(args.flavor, m)
    witness = [format_form(f) for f in res.witness] if res.witness else None
    if args.format == "json":
        out.write(_dump({"model": m.name, "flavor": res.flavor, "verdict": res.verdict, "witness": witness}))
    else:
        out.write(f"{res.flavor} formality of {m.name}: {'TRUE' if res.verdict else 'FALSE'}\n")
        if witness:
            out.write(f"  {witness[0]}  ^  {witness[1]}  =  {witness[2]} is not harmonic\n")
    return EXIT_OK


def cmd_massey(args, out) -> int:
    m = _checked(load_model(args.ref, _parse_params(args.param)))
    a, b, c = (_expr(x, m) for x in (args.a, args.b, args.c))
    fn = abc_massey if args.kind == "abc" else dolbeault_massey
    try:
        r = fn(a, b, c, m)
    except OutOfComplex as e:
        raise InputError(str(e)) from None
    except (NotClosed, ProductsNotVanishing, NotExact) as e:
        raise MathError(str(e)) from None
    doc = {
        "kind": r.kind,
        "model": m.name,
        "verdict": r.verdict,
        "target": list(r.target) if r.target else None,
        "representative": format_form(r.representative),
        "reduced": format_form(r.reduced),
        "primitives": [format_form(f) for f in r.primitives],
        "indeterminacy_dim": r.indeterminacy_dim,
        "witness": [format_scalar(x) for x in r.witness] if r.witness else None,
    }
    if args.format == "json":
        out.write(_dump(doc))
    else:
        out.write(f"{r.kind} Massey product on {m.name}: {r.verdict}\n")
        out.write(f"  representative: {doc['representative']}\n")
        out.write(f"  harmonic class: {doc['reduced']}\n")
        out.write(f"  primitives: {doc['primitives'][0]} ; {doc['primitives'][1]}\n")
        out.write(f"  indeterminacy dimension: {r.indeterminacy_dim}\n")
    return EXIT_OK


def _point(pt) -> list[str]:
    return [format_scalar(z) for z in pt]


def cmd_fixed_points(args, out) -> int:
    m = _checked(load_model(args.ref, _parse_params(args.param)))
    try:
        act = m.action(args.action)
    except KeyError as e:
        raise InputError(str(e.args[0])) from None
    try:
        if ONE in act.eigenvalues:
            bases = fixed_curve_bases(m, act)
            doc = {"action": act.name, "kind": "curves", "count": len(bases), "base_points": [_point(b) for b in bases]}
        else:
            rep = fixed_points(m, act)
            doc = {"action": act.name, "kind": "points", "count": rep.count, "points": [_point(p) for p in rep.points]}
    except CatalogError as e:
        raise MathError(str(e)) from None
    if args.format == "json":
        out.write(_dump(doc))
    else:
        key = "points" if doc["kind"] == "points" else "base_points"
        out.write(f"{act.name}: {doc['count']} fixed {doc['kind']}\n")
        for pt in doc[key]:
            out.write("  (" + ", ".join(pt) + ")\n")
    return EXIT_OK


def cmd_invariant(args, out) -> int:
    m = _checked(load_model(args.ref, _parse_params(args.param)))
    try:
        inv = invariant_subcomplex(m, args.action)
    except KeyError as e:
        raise InputError(str(e.args[0])) from None
    except CatalogError as e:
        raise MathError(str(e)) from None
    if args.out:
        modelfile.save(inv, args.out)
    monos = [mono for p in range(inv.n + 1) for q in range(inv.n + 1) for s in inv.sectors for mono in inv.basis(p, q, s)]
    if args.format == "json":
        out.write(_dump({"model": m.name, "action": args.action, "count": len(monos),
                         "monomials": [format_form(Form.monomial(x)) for x in monos]}))
    else:
        out.write(f"{len(monos)} monomials of {m.name} are invariant under {args.action}\n")
        for x in monos:
            out.write(f"  {format_form(Form.monomial(x))}\n")
    return EXIT_OK


def _sweep_values(items) -> tuple[str, list[str]]:
    if not items or len(items) != 1:
        raise InputError("sweep takes exactly one --param name=v1,v2,...")
    key, sep, values = items[0].partition("=")
    if not sep:
        raise InputError(f"parameters look like key=v1,v2,..., got {items[0]!r}")
    vals = [v.strip() for v in values.split(",") if v.strip()]
    for v in vals:
        try:
            parse_scalar(v)
        except ValueError as e:
            raise InputError(str(e)) from None
    return key.strip(), vals


def cmd_sweep(args, out) -> int:
    if args.family not in FAMILIES:
        raise InputError(f"unknown family {args.family!r}; known: {', '.join(sorted(FAMILIES))}")
    family = FAMILIES[args.family]
    key, values = _sweep_values(args.param)
    fixed = _parse_params(args.fix)
    if key not in family.params:
        raise InputError(f"family {family.name} has no parameter {key!r}")
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = [c for c in checks if c not in SWEEP_CHECKS]
    if unknown:
        raise InputError(f"unknown checks {', '.join(unknown)}; choose from {', '.join(SWEEP_CHECKS)}")
    models = {}
    for v in values:
        try:
            models[v] = family.instantiate({**fixed, key: parse_scalar(v)})
        except CatalogError as e:
            raise InputError(str(e)) from None
    rows = sweep(models.__getitem__, values, checks)
    if args.format == "json":
        out.write(_dump({"family": family.name, "parameter": key, "checks": checks, "rows": [r.to_dict() for r in rows]}))
    elif args.format == "csv":
        out.write(",".join([key] + checks) + "\n")
        for r in rows:
            out.write(",".join([r.value] + [r.verdicts[c] for c in checks]) + "\n")
    else:
        width = max([len(key)] + [len(r.value) for r in rows])
        out.write((f"{key:<{width}}  " + "  ".join(checks)).rstrip() + "\n")
        previous = None
        for r in rows:
            cells = [r.verdicts[c] for c in checks]
            flip = "  <- verdicts change" if previous is not None and cells != previous else ""
            line = f"{r.value:<{width}}  " + "  ".join(f"{c:<{len(h)}}" for c, h in zip(cells, checks))
            out.write(line.rstrip() + flip + "\n")
            previous = cells
    return EXIT_OK


def cmd_verify(args, out) -> int:
    from .verify import run_verify

    try:
        outcomes = run_verify(args.only, args.data_dir)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot load expected data: {e}") from None
    if args.only and not outcomes:
        raise InputError(f"no criterion matches {args.only!r}")
    for o in outcomes:
        out.write(o.line() + "\n")
    passed = sum(o.ok for o in outcomes)
    out.write(f"{passed}/{len(outcomes)} criteria passed\n")
    return EXIT_OK if passed == len(outcomes) else EXIT_MISMATCH


# ----------------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="formlab", description="Exact cohomology of invariant complex models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_cmd(name, helptext, formats=("text", "json")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("ref", help="builtin model name or path to a JSON model file")
        p.add_argument("--param", action="append", metavar="K=V", help="family parameter (repeatable)")
        p.add_argument("--format", choices=formats, default=formats[0])
        return p

    p = sub.add_parser("model", help="validate or print a model")
    p.add_argument("action", choices=("validate", "show"))
    p.add_argument("ref")
    p.add_argument("--param", action="append", metavar="K=V")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_model)

    p = model_cmd("cohom", "cohomology table", ("text", "json", "csv"))
    p.add_argument("--theory", required=True, choices=("derham", "dolbeault", "bc", "aeppli"))
    p.add_argument("--expected", metavar="FILE", help="JSON table to diff against")
    p.set_defaults(func=cmd_cohom)

    model_cmd("ddbar", "check the ddbar-lemma").set_defaults(func=cmd_ddbar)

    p = model_cmd("formality", "is the harmonic space closed under wedge?")
    p.add_argument("--flavor", required=True, choices=("dolbeault", "bc"))
    p.set_defaults(func=cmd_formality)

    p = sub.add_parser("massey", help="Massey triple products")
    p.add_argument("kind", choices=("dolbeault", "abc"))
    p.add_argument("ref")
    p.add_argument("--param", action="append", metavar="K=V")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_massey)

    p = model_cmd("fixed-points", "fixed locus of a lattice automorphism")
    p.add_argument("--action", required=True)
    p.set_defaults(func=cmd_fixed_points)

    p = model_cmd("invariant", "invariant subcomplex of a finite action")
    p.add_argument("--action", required=True)
    p.add_argument("--out", metavar="FILE", help="write the invariant model here")
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("sweep", help="evaluate checks across a family")
    p.add_argument("family")
    p.add_argument("--param", action="append", metavar="K=V1,V2,...", help="the swept parameter")
    p.add_argument("--fix", action="append", metavar="K=V", help="other family parameters")
    p.add_argument("--checks", default="ddbar,bc-formality,abc-massey")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--only", metavar="TAG", help="criterion tag or number")
    p.add_argument("--data-dir", metavar="DIR", help="directory holding expected.json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        _threads()
        return args.func(args, out)
    except InputError as e:
        print(f"formlab: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (modelfile.ModelFileError, FormSyntaxError) as e:
        print(f"formlab: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (MathError, modelfile.InvalidModel) as e:
        print(f"formlab: {e}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
