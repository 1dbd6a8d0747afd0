"""Table reports, expected-table diffs and fiber sweeps."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .calculus import Model
from .cohomology import (
    NotClosed,
    OutOfComplex,
    canonical_theory,
    cohomology,
    ddbar_check,
    formality_check,
)
from .exterior import Form, format_form, parse_form
from .massey import NotExact, ProductsNotVanishing, abc_massey
from .scalar import format_scalar

__all__ = [
    "TableReport",
    "table_report",
    "proportional",
    "diff_table",
    "SweepRow",
    "sweep",
    "SWEEP_CHECKS",
]


def proportional(x: Form, y: Form) -> bool:
    """``x = c * y`` for some nonzero scalar ``c``."""
    if not x or not y or set(x.monomials()) != set(y.monomials()):
        return False
    mono = x.monomials()[0]
    return x == y * (x.coefficient(mono) / y.coefficient(mono))


def _key(p: int, q: int | None) -> str:
    return str(p) if q is None else f"{p},{q}"


@dataclass
class TableReport:
    model: str
    theory: str
    n: int
    dims: dict  # key -> int, explicit zeros
    representatives: dict  # key -> list[str]
    diff: dict | None = None  # key -> {"expected", "actual", "match", "unmatched"}
    params: dict = field(default_factory=dict)

    @property
    def matches(self) -> bool:
        return self.diff is None or all(c["match"] for c in self.diff.values())

    def mismatches(self) -> list[str]:
        return [k for k, c in (self.diff or {}).items() if not c["match"]]

    def to_dict(self) -> dict:
        out = {
            "model": self.model,
            "theory": self.theory,
            "dim": self.n,
            "params": self.params,
            "dims": self.dims,
            "representatives": self.representatives,
        }
        if self.diff is not None:
            out["diff"] = self.diff
            out["match"] = self.matches
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["theory", "p", "q", "dim", "representatives"]
        if self.diff is not None:
            header.append("match")
        w.writerow(header)
        for key in self.dims:
            p, _, q = key.partition(",")
            row = [self.theory, p, q, self.dims[key], "; ".join(self.representatives[key])]
            if self.diff is not None:
                row.append("yes" if self.diff[key]["match"] else "no")
            w.writerow(row)
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{self.theory} cohomology of {self.model}"]
        if self.params:
            lines[0] += " (" + ", ".join(f"{k}={v}" for k, v in sorted(self.params.items())) + ")"
        for key, dim in self.dims.items():
            reps = ", ".join(self.representatives[key])
            mark = ""
            if self.diff is not None:
                mark = "  ok" if self.diff[key]["match"] else f"  MISMATCH (expected {self.diff[key]['expected']})"
            lines.append(f"  ({key}) {dim}" + (f"  <{reps}>" if reps else "") + mark)
        return "\n".join(lines) + "\n"


def table_report(m: Model, theory: str, expected: dict | None = None) -> TableReport:
    theory = canonical_theory(theory)
    dims, reps = {}, {}
    if theory == "deRham":
        cells = [(k, None) for k in range(2 * m.n + 1)]
    else:
        cells = [(p, q) for p in range(m.n + 1) for q in range(m.n + 1)]
    for p, q in cells:
        r = cohomology(theory, m, p, q)
        dims[_key(p, q)] = r.dim
        reps[_key(p, q)] = [format_form(f) for f in r.representatives]
    report = TableReport(
        m.name, theory, m.n, dims, reps, params={k: format_scalar(v) for k, v in m.params}
    )
    if expected is not None:
        report.diff = diff_table(m, theory, dims, reps, expected)
    return report


def diff_table(m: Model, theory: str, dims: dict, reps: dict, expected: dict) -> dict:
    """Cell-wise comparison; expected cells are a dimension or a list of forms.

    Cells missing from ``expected`` are expected to vanish.
    """
    out = {}
    for key, dim in dims.items():
        want = expected.get(key, 0)
        if isinstance(want, list):
            forms = [parse_form(s, m.n) for s in want]
            ours = [parse_form(s, m.n) for s in reps[key]]
            unmatched = [format_form(f) for f in ours if not any(proportional(f, e) for e in forms)]
            ok = dim == len(forms) and not unmatched
            out[key] = {"expected": len(forms), "actual": dim, "match": ok, "unmatched": unmatched}
        else:
            out[key] = {"expected": int(want), "actual": dim, "match": dim == int(want), "unmatched": []}
    return out


# ----------------------------------------------------------------------------
# sweeps
# ----------------------------------------------------------------------------

SWEEP_CHECKS = ("ddbar", "bc-formality", "dolbeault-formality", "abc-massey")

# the Bott-Chern triple that is nonzero on the central Nakamura fiber
DEFAULT_TRIPLE = ("e1^e2", "x(-1,1)*e3^E1", "E1^E2")


@dataclass
class SweepRow:
    value: str
    verdicts: dict

    def to_dict(self) -> dict:
        return {"value": self.value, **self.verdicts}


def _massey_verdict(m: Model, triple) -> str:
    a, b, c = (parse_form(s, m.n) for s in triple)
    try:
        return abc_massey(a, b, c, m).verdict
    except (NotClosed, ProductsNotVanishing, NotExact, OutOfComplex):
        return "undefined"


def sweep(build, values, checks, triple=DEFAULT_TRIPLE) -> list[SweepRow]:
    """Evaluate ``checks`` on ``build(value)`` for each value, in the given order."""
    unknown = [c for c in checks if c not in SWEEP_CHECKS]
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")
    rows = []
    for value in values:
        m = build(value)
        out = {}
        for check in checks:
            if check == "ddbar":
                out[check] = "TRUE" if ddbar_check(m).verdict else "FALSE"
            elif check == "bc-formality":
                out[check] = "TRUE" if formality_check("bottChern", m).verdict else "FALSE"
            elif check == "dolbeault-formality":
                out[check] = "TRUE" if formality_check("dolbeault", m).verdict else "FALSE"
            else:
                out[check] = _massey_verdict(m, triple)
        rows.append(SweepRow(str(value), out))
    return rows
