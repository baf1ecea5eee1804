"""Toolkit for APN analysis of the Dillon-type hexanomial family over GF(q^2)."""

from .field import (
    FieldCtx,
    FieldSpec,
    NAMED_SPECS,
    ReducibleModulusError,
    make_field,
    parse_field_spec,
)
from .hexanomial import Coeffs, UnivariateForm, evaluate, to_univariate

__version__ = "0.1.0"

__all__ = [
    "Coeffs",
    "FieldCtx",
    "FieldSpec",
    "NAMED_SPECS",
    "ReducibleModulusError",
    "UnivariateForm",
    "__version__",
    "evaluate",
    "make_field",
    "parse_field_spec",
    "to_univariate",
]
