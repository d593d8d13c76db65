"""A calculus of nominal tags with a dynamic hierarchy, records, dependent
pairs and functions over names, and iso-recursive types."""

from .dynamics import evaluate, is_value, step
from .parser import ParseError, parse_program, parse_tm, parse_ty
from .pretty import pretty
from .subtype import SubtypeQuery, subtype_check
from .typing import TypeCheckError, check_against, synthesize

__all__ = [
    "ParseError", "SubtypeQuery", "TypeCheckError", "check_against", "evaluate",
    "is_value", "parse_program", "parse_tm", "parse_ty", "pretty", "step",
    "subtype_check", "synthesize",
]
__version__ = "0.1.0"
