"""Alternating dependence/independence-friendly logic over finite structures.

Three provably equivalent ways to evaluate a sentence, all implemented here
and cross-validated against each other:

* the compositional semantics on hyperteams (sets of sets of assignments),
* a Herbrand-Skolem style semantics quantifying over uniform functions,
* a two-phase infinite-duration game compiled to a finite parity game.
"""

from .formulas import (
    Constraint, Formula, ParseError, PrefixViolation, VarSet, free_vars,
    hs_prefix, parse_formula, prefix_subformulae, print_formula, split_prenex,
    support_vars, to_nnf,
)
from .games import game_winner, solve_parity
from .herbrand import model_check, sat_meta, skolemisation_search
from .hyperteams import (
    FunctionAssignment, Hyperteam, UniformFunction, bipartitions, cylindrify,
    dualize, extend, parse_hyperteam, reduce_hyperteam, refines, restrict,
    trivial_hyperteam,
)
from .semantics import (
    EvalOptions, check_equivalence, is_true_sentence, sat_adif, sat_dif,
    sat_fol,
)
from .structures import Structure, load_structure, parse_structure

__all__ = [
    "Constraint", "EvalOptions", "Formula", "FunctionAssignment", "Hyperteam",
    "ParseError", "PrefixViolation", "Structure", "UniformFunction", "VarSet",
    "bipartitions", "check_equivalence", "cylindrify", "dualize", "extend",
    "free_vars", "game_winner", "hs_prefix", "is_true_sentence",
    "load_structure", "model_check", "parse_formula", "parse_hyperteam",
    "parse_structure", "prefix_subformulae", "print_formula",
    "reduce_hyperteam", "refines", "restrict", "sat_adif", "sat_dif",
    "sat_fol", "sat_meta", "skolemisation_search", "solve_parity",
    "split_prenex", "support_vars", "to_nnf", "trivial_hyperteam",
]
