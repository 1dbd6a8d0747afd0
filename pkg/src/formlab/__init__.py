"""Exact cohomology, harmonic forms and Massey products on invariant complexes."""

from .calculus import Model, GroupAction, d, del_, delbar, del_delbar, hodge_star, validate_model
from .catalog import builtin_model, instantiate
from .cohomology import cohomology, ddbar_check, formality_check, harmonic_space
from .exterior import Form, Sector, conjugate, format_form, parse_form, wedge
from .massey import abc_massey, dolbeault_massey
from .scalar import Scalar, parse_scalar

__version__ = "0.1.0"

__all__ = [
    "Form",
    "GroupAction",
    "Model",
    "Scalar",
    "Sector",
    "abc_massey",
    "builtin_model",
    "cohomology",
    "conjugate",
    "d",
    "ddbar_check",
    "del_",
    "del_delbar",
    "delbar",
    "dolbeault_massey",
    "format_form",
    "formality_check",
    "harmonic_space",
    "hodge_star",
    "instantiate",
    "parse_form",
    "parse_scalar",
    "validate_model",
    "wedge",
]
