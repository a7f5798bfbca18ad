"""Consequence-based saturation reasoner for expressive description logics.

Decides concept subsumption and performs one-pass classification by
saturating a context structure under ordered-paramodulation-style
inference rules, with dedicated machinery for named individuals and a
brute-force oracle for desk-scale validation.
"""

from .api import (
    ENTAILED, NOT_ENTAILED, Query, ResourceExhausted, Verdict,
    check_satisfiability, check_subsumption, classify, load_ontology,
)
from .engine import Saturator, make_strategy, saturate
from .ontology import Ontology, ParseError, detect_fragment, parse
from .structure import ContextStructure, ResourceCapError

__all__ = [
    "ENTAILED", "NOT_ENTAILED", "Query", "ResourceExhausted", "Verdict",
    "check_satisfiability", "check_subsumption", "classify", "load_ontology",
    "Saturator", "make_strategy", "saturate",
    "Ontology", "ParseError", "detect_fragment", "parse",
    "ContextStructure", "ResourceCapError",
]

__version__ = "0.1.0"
