"""Meta-level semantics: quantification over uniform functions, the prefix
reversal, the enumeration-based model checker, and Skolemisation search.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .formulas import (
    And, Atom, Eq, Exists, FalseF, Forall, Formula, MetaExists, MetaForall,
    Not, Or, Quantified, TrueF, all_variables, attach_prefix, free_vars,
    hs_prefix, split_prenex, support_vars, NotPrenex, NotASentence,
)
from .hyperteams import (
    EMPTY_FUNCTIONS, FunctionAssignment, Hyperteam, UniformFunction,
    apply_function_assignment, bipartitions, dualize,
    enumerate_uniform_functions, extend_constrained, format_assignment,
    trivial_hyperteam,
)
from .semantics import SemanticsError, SupportViolation, dual_flag, sat_fol
from .structures import Structure


class CyclicFunctionAssignment(SemanticsError):
    pass


class NotMetaPrenex(SemanticsError):
    pass


# ---------------------------------------------------------------------------
# Meta satisfaction
# ---------------------------------------------------------------------------

class MetaEvaluator:
    def __init__(self, structure: Structure, universe):
        self.structure = structure
        self.universe = frozenset(universe)
        self.memo: dict = {}

    def sat(self, theta: FunctionAssignment, x: Hyperteam, alternation: str,
            phi: Formula) -> bool:
        key = (theta, x.teams, alternation, phi)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        result = self._sat(theta, x, alternation, phi)
        self.memo[key] = result
        return result

    def _sat(self, theta: FunctionAssignment, x: Hyperteam, alternation: str,
             phi: Formula) -> bool:
        ea = alternation == "EA"
        if isinstance(phi, FalseF):
            return x.is_null if ea else x.is_empty
        if isinstance(phi, TrueF):
            return not x.is_empty if ea else not x.is_null
        if isinstance(phi, (Atom, Eq)):
            applied = apply_function_assignment(x, theta, self.structure)
            from .semantics import _atom_holds
            if ea:
                return any(all(_atom_holds(self.structure, s, phi) for s in t)
                           for t in applied.teams)
            return all(any(_atom_holds(self.structure, s, phi) for s in t)
                       for t in applied.teams)
        if isinstance(phi, Not):
            return not self.sat(theta, x, dual_flag(alternation), phi.body)
        if isinstance(phi, (And, Or)):
            coherent = ea if isinstance(phi, And) else not ea
            if not coherent:
                return self.sat(theta, dualize(x), dual_flag(alternation), phi)
            if isinstance(phi, And):
                for left, right in bipartitions(x):
                    if not (self.sat(theta, left, "EA", phi.left)
                            or self.sat(theta, right, "EA", phi.right)):
                        return False
                return True
            for left, right in bipartitions(x):
                if (self.sat(theta, left, "AE", phi.left)
                        and self.sat(theta, right, "AE", phi.right)):
                    return True
            return False
        if isinstance(phi, (Exists, Forall)):
            coherent = ea if isinstance(phi, Exists) else not ea
            if not coherent:
                return self.sat(theta, dualize(x), dual_flag(alternation), phi)
            extended = extend_constrained(x, phi.var, phi.constraint, self.structure)
            return self.sat(theta, extended, alternation, phi.body)
        if isinstance(phi, (MetaExists, MetaForall)):
            # A function never depends on its own variable: with a -W
            # constraint the materialized denotation can contain it, and a
            # self-referential table could filter a team down to nothing.
            dep = phi.constraint.denotation_within(self.universe) - {phi.var}
            functions = enumerate_uniform_functions(dep, self.universe, self.structure)
            if isinstance(phi, MetaExists):
                return any(self.sat(theta.bind(phi.var, fn), x, alternation, phi.body)
                           for fn in functions)
            return all(self.sat(theta.bind(phi.var, fn), x, alternation, phi.body)
                       for fn in functions)
        raise TypeError(f"not a formula: {phi!r}")


def sat_meta(structure: Structure, theta: FunctionAssignment, x: Hyperteam,
             alternation: str, phi: Formula) -> bool:
    """Alternating satisfaction with an environment of uniform functions."""
    if alternation not in ("EA", "AE"):
        raise ValueError(f"unknown alternation flag {alternation!r}")
    if not theta.is_acyclic():
        raise CyclicFunctionAssignment(
            "the function assignment admits no acyclic dependency context")
    if not (support_vars(phi) - theta.domain) <= x.variables:
        missing = sorted((support_vars(phi) - theta.domain) - x.variables)
        raise SupportViolation(
            f"hyperteam variables do not cover the support variables {missing}")
    structure.check_formula(phi)
    universe = x.variables | theta.domain | all_variables(phi)
    return MetaEvaluator(structure, universe).sat(theta, x, alternation, phi)


# ---------------------------------------------------------------------------
# Quantifier interpretation harness
# ---------------------------------------------------------------------------

def quantifier_interchange_check(structure: Structure, theta: FunctionAssignment,
                                 x: Hyperteam, constraint, var: str,
                                 matrix: Formula, alternation: str = "EA",
                                 kind: str = "E"):
    """Evaluate a first-order quantifier and its meta twin on the same data.

    Returns the pair of truth values; the interchange property says the two
    components always agree.  Preconditions are rejected explicitly.
    """
    from .formulas import is_fol
    if not is_fol(matrix):
        raise SemanticsError("the matrix must be a defaulted-quantifier formula")
    if var in constraint.denotation():
        raise SemanticsError(f"{var!r} occurs in the constraint denotation")
    if theta.domain & constraint.denotation_within(theta.domain):
        raise SemanticsError("function variables overlap the constraint denotation")
    if var in x.variables:
        raise SemanticsError(f"{var!r} is already bound in the hyperteam")
    plain_node = Exists if kind == "E" else Forall
    meta_node = MetaExists if kind == "E" else MetaForall
    plain = sat_meta(structure, theta, x, alternation, plain_node(constraint, var, matrix))
    meta = sat_meta(structure, theta, x, alternation, meta_node(constraint, var, matrix))
    return plain, meta


# ---------------------------------------------------------------------------
# Model checking of prenex sentences
# ---------------------------------------------------------------------------

def _prenex_sentence_parts(phi: Formula):
    prefix, matrix, matrix_qf = split_prenex(phi)
    if not matrix_qf:
        raise NotPrenex("the matrix must be quantifier-free")
    if any(step.is_meta for step in prefix):
        raise NotPrenex("plain quantifier prefix expected")
    if not free_vars(phi).is_empty():
        raise NotASentence(f"free variables: {free_vars(phi)}")
    return prefix, matrix


def model_check(structure: Structure, phi: Formula, strategy: str = "depth_first") -> bool:
    """Decide a prenex sentence by reversing the prefix into function
    quantifiers and enumerating uniform functions.

    The default strategy holds one function per quantifier in scope at a
    time (the recursion's natural depth-first order).  The "materialize"
    strategy builds every complete function environment first and folds the
    quantifier tree over the results; both must agree.
    """
    prefix, matrix = _prenex_sentence_parts(phi)
    meta_prefix = hs_prefix(prefix)
    meta_formula = attach_prefix(meta_prefix, matrix)
    if strategy == "depth_first":
        return sat_meta(structure, EMPTY_FUNCTIONS, trivial_hyperteam(), "EA",
                        meta_formula)
    if strategy == "materialize":
        return _model_check_materialized(structure, meta_prefix, matrix)
    raise ValueError(f"unknown strategy {strategy!r}")


def _model_check_materialized(structure: Structure, meta_prefix, matrix: Formula) -> bool:
    universe = frozenset(v for step in meta_prefix for v in (step.var,)) \
        | frozenset(v for step in meta_prefix for v in step.constraint.variables) \
        | support_vars(matrix)
    spaces = []
    for step in meta_prefix:
        dep = step.constraint.denotation_within(universe) - {step.var}
        spaces.append(list(enumerate_uniform_functions(dep, universe, structure)))

    def outcome(theta: FunctionAssignment) -> bool:
        return sat_meta(structure, theta, trivial_hyperteam(), "EA", matrix)

    def fold(level: int, theta: FunctionAssignment) -> bool:
        if level == len(meta_prefix):
            return outcome(theta)
        step = meta_prefix[level]
        branches = (fold(level + 1, theta.bind(step.var, fn)) for fn in spaces[level])
        if step.kind == "EE":
            return any(branches)
        return all(branches)

    return fold(0, EMPTY_FUNCTIONS)


# ---------------------------------------------------------------------------
# Skolemisation search
# ---------------------------------------------------------------------------

@dataclass
class SkolemWitness:
    """For each existential function variable, a map from the functions of
    the earlier-quantified variables to its witness function."""

    order: tuple[str, ...]
    tables: dict[str, dict[tuple[UniformFunction, ...], UniformFunction]]

    def describe(self) -> str:
        lines = []
        for var in self.order:
            if var not in self.tables:
                continue
            for context, fn in sorted(self.tables[var].items(), key=lambda e: str(e[0])):
                prefix = ", ".join(str(f) for f in context) or "()"
                for key, value in fn.table:
                    lines.append(f"F_{var}({format_assignment(key)}) = {value}"
                                 + (f"  [given {prefix}]" if context else ""))
        return "\n".join(sorted(lines))


def skolemisation_search(structure: Structure, phi: Formula,
                         alternation: str = "EA") -> SkolemWitness | None:
    """Search for a Skolemisation whose every extension satisfies the matrix.

    The input must be a prefix of meta quantifiers over a quantifier-free
    matrix.  Existence of a witness coincides with meta satisfaction of the
    sentence on the trivial hyperteam.
    """
    prefix, matrix, matrix_qf = split_prenex(phi)
    if not matrix_qf or any(not step.is_meta for step in prefix):
        raise NotMetaPrenex("a meta-quantifier prefix over a quantifier-free "
                            "matrix is required")
    universe = frozenset(step.var for step in prefix) \
        | frozenset(v for step in prefix for v in step.constraint.variables) \
        | support_vars(matrix)
    spaces = [list(enumerate_uniform_functions(
        step.constraint.denotation_within(universe) - {step.var}, universe, structure))
        for step in prefix]
    existential_positions = [i for i, step in enumerate(prefix) if step.kind == "EE"]

    def contexts(i: int):
        return list(product(*spaces[:i]))

    # Enumerate all Skolemisations: for every existential position a total
    # map from earlier-function tuples to a function choice.
    choice_spaces = []
    for i in existential_positions:
        ctxs = contexts(i)
        choice_spaces.append([dict(zip(ctxs, pick))
                              for pick in product(spaces[i], repeat=len(ctxs))])

    def extensions(skolem: dict[int, dict]):
        """Every complete function tuple consistent with the Skolemisation."""
        def rec(i: int, chosen: tuple[UniformFunction, ...]):
            if i == len(prefix):
                yield chosen
                return
            if i in skolem:
                yield from rec(i + 1, chosen + (skolem[i][chosen],))
            else:
                for fn in spaces[i]:
                    yield from rec(i + 1, chosen + (fn,))
        yield from rec(0, ())

    for picks in product(*choice_spaces):
        skolem = dict(zip(existential_positions, picks))
        good = True
        for chosen in extensions(skolem):
            theta = FunctionAssignment.of(
                {prefix[i].var: fn for i, fn in enumerate(chosen)})
            if not sat_meta(structure, theta, trivial_hyperteam(), alternation, matrix):
                good = False
                break
        if good:
            return SkolemWitness(
                tuple(step.var for step in prefix),
                {prefix[i].var: skolem[i] for i in existential_positions})
    return None
