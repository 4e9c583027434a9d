"""Exact symbolic computations for braided algebras, their Weyl algebras and quantized operators."""

from __future__ import annotations

from .checks import Verdict
from .exact_core import Scalar, ScalarMatrix, format_scalar, parse_scalar, var
from .grammar import ParseError

__all__ = ["ParseError", "Scalar", "ScalarMatrix", "Verdict", "format_scalar", "parse_scalar", "var"]
__version__ = "0.1.0"
