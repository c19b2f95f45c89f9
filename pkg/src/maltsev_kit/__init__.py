"""Finite-algebra workbench for congruence identities and Maltsev conditions."""

from .algebra import FiniteAlgebra, Operation, parse_term, validate_algebra
from .corpus import builtin
from .dsl import parse_identity, pretty_print
from .free import free_algebra
from .identities import MinK, NoK, Undetermined, check_quantified, find_min_parameter
from .maltsev import decide_condition_ii, extract_terms, verify_term_chain
from .relations import Congruence, all_congruences, cg

__all__ = [
    "FiniteAlgebra", "Operation", "parse_term", "validate_algebra", "builtin",
    "parse_identity", "pretty_print", "free_algebra", "MinK", "NoK", "Undetermined",
    "check_quantified", "find_min_parameter", "decide_condition_ii", "extract_terms",
    "verify_term_chain", "Congruence", "all_congruences", "cg",
]
