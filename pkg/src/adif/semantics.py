"""Satisfaction relations: alternating hyperteam semantics, the Tarskian
oracle, and the team semantics of the dependence/independence fragment.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .formulas import (
    And, Atom, Eq, Exists, FalseF, Forall, Formula, Not, Or, Quantified,
    TrueF, free_vars, has_meta_quantifiers, is_fol, is_quantifier_free,
    support_vars,
)
from .hyperteams import (
    Hyperteam, Team, all_assignments, asg_get, asg_vars, bipartitions,
    cylindrify_team, dualize, enumerate_uniform_functions, extend_constrained,
    extend_team, reduce_hyperteam, team, team_bipartitions, trivial_hyperteam,
)
from .structures import Structure


class SemanticsError(Exception):
    pass


class UnboundVariable(SemanticsError):
    pass


class SupportViolation(SemanticsError):
    pass


class FragmentViolation(SemanticsError):
    pass


class NotASentenceError(SemanticsError):
    pass


def dual_flag(alternation: str) -> str:
    return "AE" if alternation == "EA" else "EA"


# ---------------------------------------------------------------------------
# Tarskian oracle
# ---------------------------------------------------------------------------

def sat_fol(structure: Structure, sigma, phi: Formula) -> bool:
    """Classic satisfaction for the fragment with defaulted quantifiers only."""
    if not is_fol(phi):
        raise FragmentViolation("the Tarskian oracle takes defaulted-quantifier formulae")
    return _sat_fol(structure, dict(sigma), phi)


def _sat_fol(structure: Structure, sigma: dict, phi: Formula) -> bool:
    if isinstance(phi, FalseF):
        return False
    if isinstance(phi, TrueF):
        return True
    if isinstance(phi, (Atom, Eq)):
        return _atom_holds(structure, sigma, phi)
    if isinstance(phi, Not):
        return not _sat_fol(structure, sigma, phi.body)
    if isinstance(phi, And):
        return _sat_fol(structure, sigma, phi.left) and _sat_fol(structure, sigma, phi.right)
    if isinstance(phi, Or):
        return _sat_fol(structure, sigma, phi.left) or _sat_fol(structure, sigma, phi.right)
    if isinstance(phi, Exists):
        return any(_sat_fol(structure, {**sigma, phi.var: a}, phi.body)
                   for a in structure.domain)
    if isinstance(phi, Forall):
        return all(_sat_fol(structure, {**sigma, phi.var: a}, phi.body)
                   for a in structure.domain)
    raise TypeError(f"not a formula: {phi!r}")


def _atom_holds(structure: Structure, sigma, phi: Formula) -> bool:
    lookup = dict(sigma)
    if isinstance(phi, Eq):
        names = (phi.left, phi.right)
        relation = "="
    else:
        names = phi.args
        relation = phi.relation
    try:
        row = tuple(lookup[v] for v in names)
    except KeyError as exc:
        raise UnboundVariable(f"variable {exc.args[0]!r} has no value") from exc
    return structure.holds(relation, row)


# ---------------------------------------------------------------------------
# Alternating hyperteam semantics
# ---------------------------------------------------------------------------

@dataclass
class EvalOptions:
    """Evaluator knobs.

    use_reduce prunes hyperteams to their inclusion-minimal teams after each
    operator application (equivalence-preserving).  fast_path_teams bounds
    the size at which quantifier-free subformulae switch from the bipartition
    rules to per-assignment evaluation; None disables the switch entirely.
    """

    use_reduce: bool = False
    fast_path_teams: int | None = 12


class Evaluator:
    def __init__(self, structure: Structure, options: EvalOptions | None = None):
        self.structure = structure
        self.options = options or EvalOptions()
        self.memo: dict = {}

    def sat(self, x: Hyperteam, alternation: str, phi: Formula) -> bool:
        if alternation not in ("EA", "AE"):
            raise ValueError(f"unknown alternation flag {alternation!r}")
        if has_meta_quantifiers(phi):
            raise SemanticsError("plain formula expected; use the meta evaluator")
        if not support_vars(phi) <= x.variables:
            missing = sorted(support_vars(phi) - x.variables)
            raise SupportViolation(
                f"hyperteam variables do not cover the support variables {missing}")
        self.structure.check_formula(phi)
        return self._sat(x, alternation, phi)

    def _sat(self, x: Hyperteam, alternation: str, phi: Formula) -> bool:
        key = (x.teams, alternation, phi)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        result = self._sat_raw(x, alternation, phi)
        self.memo[key] = result
        return result

    def _sat_raw(self, x: Hyperteam, alternation: str, phi: Formula) -> bool:
        ea = alternation == "EA"
        if isinstance(phi, FalseF):
            return x.is_null if ea else x.is_empty
        if isinstance(phi, TrueF):
            return not x.is_empty if ea else not x.is_null
        if isinstance(phi, (Atom, Eq)):
            if ea:
                return any(all(_atom_holds(self.structure, s, phi) for s in t)
                           for t in x.teams)
            return all(any(_atom_holds(self.structure, s, phi) for s in t)
                       for t in x.teams)
        if isinstance(phi, Not):
            return not self._sat(x, dual_flag(alternation), phi.body)
        if isinstance(phi, (And, Or)):
            coherent = ea if isinstance(phi, And) else not ea
            if not coherent:
                return self._sat(self._dual(x), dual_flag(alternation), phi)
            budget = self.options.fast_path_teams
            if (budget is not None and len(x.teams) > budget
                    and is_quantifier_free(phi)):
                return self._sat_quantifier_free(x, alternation, phi)
            if isinstance(phi, And):
                # every split must satisfy one side
                for left, right in bipartitions(x):
                    if not (self._sat(left, "EA", phi.left)
                            or self._sat(right, "EA", phi.right)):
                        return False
                return True
            for left, right in bipartitions(x):
                if self._sat(left, "AE", phi.left) and self._sat(right, "AE", phi.right):
                    return True
            return False
        if isinstance(phi, Quantified):
            coherent = ea if isinstance(phi, Exists) else not ea
            if not coherent:
                return self._sat(self._dual(x), dual_flag(alternation), phi)
            extended = extend_constrained(x, phi.var, phi.constraint, self.structure)
            if self.options.use_reduce:
                extended = reduce_hyperteam(extended)
            return self._sat(extended, alternation, phi.body)
        raise TypeError(f"not a formula: {phi!r}")

    def _dual(self, x: Hyperteam) -> Hyperteam:
        if self.options.use_reduce:
            x = reduce_hyperteam(x)
        d = dualize(x)
        if self.options.use_reduce:
            d = reduce_hyperteam(d)
        return d

    def _sat_quantifier_free(self, x: Hyperteam, alternation: str, phi: Formula) -> bool:
        # Per-assignment evaluation; sound for the quantifier-free fragment,
        # where hyperteam satisfaction reduces to the Tarskian check along
        # the alternation pattern.  Validated against the bipartition path in
        # the test suite.
        if alternation == "EA":
            return any(all(_sat_fol(self.structure, dict(s), phi) for s in t)
                       for t in x.teams)
        return all(any(_sat_fol(self.structure, dict(s), phi) for s in t)
                   for t in x.teams)


def sat_adif(structure: Structure, x: Hyperteam, alternation: str, phi: Formula,
             options: EvalOptions | None = None) -> bool:
    return Evaluator(structure, options).sat(x, alternation, phi)


def is_true_sentence(structure: Structure, phi: Formula,
                     options: EvalOptions | None = None) -> bool:
    """Truth of a sentence, checked on the trivial hyperteam."""
    if not free_vars(phi).is_empty():
        raise NotASentenceError(f"free variables: {free_vars(phi)}")
    return sat_adif(structure, trivial_hyperteam(), "EA", phi, options)


# ---------------------------------------------------------------------------
# Team semantics for the dependence/independence fragment
# ---------------------------------------------------------------------------

def _check_dif_fragment(phi: Formula, beta: str) -> None:
    """beta is the semantics flag; the formula must be in the dual fragment:
    under the 'A' semantics universals are bare -{} and existentials free,
    under the 'E' semantics the other way around."""
    if isinstance(phi, (Atom, Eq)):
        return
    if isinstance(phi, Not):
        if not isinstance(phi.body, (Atom, Eq)):
            raise FragmentViolation("negation is atomic-only in this fragment")
        return
    if isinstance(phi, (And, Or)):
        _check_dif_fragment(phi.left, beta)
        _check_dif_fragment(phi.right, beta)
        return
    if isinstance(phi, (Exists, Forall)):
        bare = (not phi.constraint.positive) and not phi.constraint.variables
        restricted_kind = Exists if beta == "A" else Forall
        if not isinstance(phi, restricted_kind) and not bare:
            raise FragmentViolation(
                f"{'universal' if beta == 'A' else 'existential'} quantifiers "
                f"must carry the bare -{{}} constraint under the "
                f"{'A' if beta == 'A' else 'E'} semantics")
        _check_dif_fragment(phi.body, beta)
        return
    if isinstance(phi, (FalseF, TrueF)):
        raise FragmentViolation("constants are not part of this fragment")
    raise FragmentViolation(f"not in the fragment: {phi!r}")


def sat_dif(structure: Structure, t: Team, beta: str, phi: Formula) -> bool:
    """Team satisfaction; beta 'A' runs the forall-flavoured rules (over the
    existential fragment), beta 'E' the dual ones."""
    if beta not in ("A", "E"):
        raise ValueError(f"unknown team-semantics flag {beta!r}")
    _check_dif_fragment(phi, beta)
    return _sat_dif(structure, t, beta, phi)


def _sat_dif(structure: Structure, t: Team, beta: str, phi: Formula) -> bool:
    forall_mode = beta == "A"
    if isinstance(phi, (Atom, Eq)):
        if forall_mode:
            return all(_atom_holds(structure, s, phi) for s in t)
        return any(_atom_holds(structure, s, phi) for s in t)
    if isinstance(phi, Not):
        if forall_mode:
            return all(not _atom_holds(structure, s, phi.body) for s in t)
        return any(not _atom_holds(structure, s, phi.body) for s in t)
    if isinstance(phi, And):
        if forall_mode:
            return (_sat_dif(structure, t, beta, phi.left)
                    and _sat_dif(structure, t, beta, phi.right))
        return all(_sat_dif(structure, t1, beta, phi.left)
                   or _sat_dif(structure, t2, beta, phi.right)
                   for t1, t2 in team_bipartitions(t))
    if isinstance(phi, Or):
        if forall_mode:
            return any(_sat_dif(structure, t1, beta, phi.left)
                       and _sat_dif(structure, t2, beta, phi.right)
                       for t1, t2 in team_bipartitions(t))
        return (_sat_dif(structure, t, beta, phi.left)
                or _sat_dif(structure, t, beta, phi.right))
    if isinstance(phi, (Exists, Forall)):
        base = asg_vars(t[0]) if t else frozenset()
        bare = (not phi.constraint.positive) and not phi.constraint.variables
        coherent = isinstance(phi, Forall) if forall_mode else isinstance(phi, Exists)
        if coherent and bare:
            return _sat_dif(structure, cylindrify_team(t, phi.var, structure),
                            beta, phi.body)
        dep = phi.constraint.denotation_within(base)
        functions = enumerate_uniform_functions(dep, base, structure)
        if forall_mode:
            # existential choice of a witness function
            return any(_sat_dif(structure, extend_team(t, fn, phi.var), beta, phi.body)
                       for fn in functions)
        return all(_sat_dif(structure, extend_team(t, fn, phi.var), beta, phi.body)
                   for fn in functions)
    raise FragmentViolation(f"not in the fragment: {phi!r}")


# ---------------------------------------------------------------------------
# Bounded equivalence checking
# ---------------------------------------------------------------------------

def enumerate_teams(structure: Structure, names, max_assignments: int):
    """All teams over names with at most max_assignments members."""
    pool = all_assignments(names, structure)
    for size in range(0, max_assignments + 1):
        for combo in combinations(pool, size):
            yield team(combo)


def enumerate_hyperteams(structure: Structure, names, max_teams: int,
                         max_assignments: int, include_degenerate: bool = True):
    """All hyperteams over names within the given bounds, deterministically.

    Degenerate means empty or null; the fundamentals suites need those, the
    satisfiability-flavoured checks skip them.
    """
    names = frozenset(names)
    teams = list(enumerate_teams(structure, names, max_assignments))
    for count in range(0, max_teams + 1):
        for combo in combinations(teams, count):
            x = Hyperteam(tuple(sorted(combo)), names)
            if not include_degenerate and not x.is_proper:
                continue
            yield x


@dataclass
class EquivalenceVerdict:
    equivalent: bool
    counterexample: tuple[Hyperteam, str] | None
    checked: int

    def describe(self) -> str:
        if self.equivalent:
            return f"equivalent within bounds ({self.checked} hyperteam/flag pairs)"
        x, flag = self.counterexample
        return f"counterexample: flag {flag}, hyperteam {x}"


def check_equivalence(structure: Structure, phi1: Formula, phi2: Formula,
                      names, max_teams: int = 3, max_assignments: int = 3,
                      options: EvalOptions | None = None) -> EquivalenceVerdict:
    """Brute-force alpha-equivalence over all hyperteams within bounds."""
    needed = support_vars(phi1) | support_vars(phi2)
    names = frozenset(names)
    if not needed <= names:
        raise SupportViolation(
            f"enumeration variables must cover the support variables {sorted(needed)}")
    checked = 0
    for x in enumerate_hyperteams(structure, names, max_teams, max_assignments):
        for flag in ("EA", "AE"):
            checked += 1
            left = sat_adif(structure, x, flag, phi1, options)
            right = sat_adif(structure, x, flag, phi2, options)
            if left != right:
                return EquivalenceVerdict(False, (x, flag), checked)
    return EquivalenceVerdict(True, None, checked)


def check_implication(structure: Structure, phi1: Formula, phi2: Formula,
                      names, max_teams: int = 3, max_assignments: int = 3,
                      options: EvalOptions | None = None) -> EquivalenceVerdict:
    needed = support_vars(phi1) | support_vars(phi2)
    names = frozenset(names)
    if not needed <= names:
        raise SupportViolation(
            f"enumeration variables must cover the support variables {sorted(needed)}")
    checked = 0
    for x in enumerate_hyperteams(structure, names, max_teams, max_assignments):
        for flag in ("EA", "AE"):
            checked += 1
            if sat_adif(structure, x, flag, phi1, options) and not sat_adif(
                    structure, x, flag, phi2, options):
                return EquivalenceVerdict(False, (x, flag), checked)
    return EquivalenceVerdict(True, None, checked)
