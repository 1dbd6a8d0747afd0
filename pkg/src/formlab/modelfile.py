"""JSON model files.

A model file looks like::

    {"name": "iwasawa", "dim": 3,
     "d_eta": [[], [], [{"coeff": "-1", "holo": [1, 2], "anti": []}]],
     "mu": [], "sectors": [[0, 0, 0, 0]], "metric": ["1", "1", "1"],
     "actions": {"sigma": {"order": 4, "eigenvalues": ["i", "i", "-1"]}}}

Actions may carry ``"lattice": "heisenberg"``; ``"invariant_under"`` names the
action whose fixed forms make up the complex.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .calculus import GroupAction, Model, validate_model
from .exterior import Form, Sector, generator, indices_of, wedge
from .scalar import as_scalar, format_rational, format_scalar

__all__ = ["ModelFileError", "InvalidModel", "model_to_dict", "model_from_dict", "dumps", "loads", "load", "save"]


class ModelFileError(ValueError):
    pass


class InvalidModel(ValueError):
    """Raised when a well-formed file describes an invalid model."""

    def __init__(self, failures):
        super().__init__("; ".join(failures))
        self.failures = list(failures)


def _terms_out(f: Form) -> list[dict]:
    return [
        {"coeff": format_scalar(c), "holo": list(indices_of(m.holo)), "anti": list(indices_of(m.anti))}
        for m, c in f.items()
    ]


def _terms_in(items, n: int, where: str) -> Form:
    if not isinstance(items, list):
        raise ModelFileError(f"{where}: expected a list of terms")
    terms: dict = {}
    for t in items:
        if not isinstance(t, dict) or not {"coeff", "holo", "anti"} <= set(t):
            raise ModelFileError(f"{where}: each term needs coeff, holo and anti")
        try:
            c = as_scalar(str(t["coeff"]))
        except ValueError as e:
            raise ModelFileError(f"{where}: {e}") from None
        idx = list(t["holo"]) + list(t["anti"])
        if any(not isinstance(k, int) or not 1 <= k <= n for k in idx):
            raise ModelFileError(f"{where}: indices must be integers in 1..{n}")
        if len(set(t["holo"])) != len(t["holo"]) or len(set(t["anti"])) != len(t["anti"]):
            raise ModelFileError(f"{where}: repeated index")
        # indices are read as an ordered wedge, so sort with the permutation sign
        f = Form.one() * c
        for k in t["holo"]:
            f = wedge(f, generator(k))
        for k in t["anti"]:
            f = wedge(f, generator(k, bar=True))
        for mono, coeff in f._terms.items():
            terms[mono] = terms.get(mono, 0) + coeff
    return Form(terms)


def model_to_dict(m: Model) -> dict:
    out = {
        "name": m.name,
        "dim": m.n,
        "d_eta": [_terms_out(f) for f in m.d_eta],
        "mu": _terms_out(m.mu),
        "sectors": [s.as_list() for s in m.sectors],
        "metric": [format_rational(c) for c in m.metric],
        "actions": {
            a.name: {"order": a.order, "eigenvalues": [format_scalar(e) for e in a.eigenvalues]}
            | ({"lattice": a.lattice} if a.lattice else {})
            for a in m.actions
        },
    }
    if m.invariant_under:
        out["invariant_under"] = m.invariant_under
    if m.params:
        out["params"] = {k: format_scalar(v) for k, v in m.params}
    return out


def model_from_dict(doc: dict, validate: bool = True) -> Model:
    if not isinstance(doc, dict):
        raise ModelFileError("model file must contain a JSON object")
    for key in ("name", "dim", "d_eta"):
        if key not in doc:
            raise ModelFileError(f"missing key {key!r}")
    n = doc["dim"]
    if not isinstance(n, int) or n < 1:
        raise ModelFileError("dim must be a positive integer")
    if not isinstance(doc["d_eta"], list) or len(doc["d_eta"]) != n:
        raise ModelFileError(f"d_eta must list {n} structure equations")
    d_eta = tuple(_terms_in(t, n, f"d_eta[{i}]") for i, t in enumerate(doc["d_eta"], 1))
    mu = _terms_in(doc.get("mu", []), n, "mu")
    try:
        sectors = tuple(Sector.from_list(s) for s in doc.get("sectors", [[0, 0, 0, 0]]))
        metric = tuple(Fraction(str(c)) for c in doc.get("metric", []))
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ModelFileError(f"bad sector or metric entry: {e}") from None
    actions = []
    for name, spec in sorted(doc.get("actions", {}).items()):
        try:
            eig = tuple(as_scalar(str(e)) for e in spec["eigenvalues"])
            actions.append(GroupAction(name, int(spec["order"]), eig, spec.get("lattice")))
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFileError(f"action {name}: {e}") from None
    try:
        params = tuple((k, as_scalar(str(v))) for k, v in sorted(doc.get("params", {}).items()))
    except ValueError as e:
        raise ModelFileError(f"params: {e}") from None
    m = Model(
        str(doc["name"]),
        n,
        d_eta,
        mu=mu,
        sectors=sectors,
        metric=metric,
        actions=tuple(actions),
        invariant_under=doc.get("invariant_under"),
        params=params,
    )
    if validate:
        report = validate_model(m)
        if not report.ok:
            raise InvalidModel(report.failures)
    return m


def dumps(m: Model) -> str:
    return json.dumps(model_to_dict(m), indent=2, sort_keys=True) + "\n"


def loads(text: str, validate: bool = True) -> Model:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(f"invalid JSON: {e}") from None
    return model_from_dict(doc, validate)


def load(path, validate: bool = True) -> Model:
    return loads(Path(path).read_text(), validate)


def save(m: Model, path) -> None:
    Path(path).write_text(dumps(m))
