"""Assignments, teams, hyperteams and the semantic operators over them.

Representation choices keep everything canonical and hashable:

* an assignment is a tuple of (variable, value) pairs sorted by variable;
* a team is a sorted tuple of distinct assignments;
* a hyperteam stores a sorted tuple of distinct teams plus its variable set
  (carried explicitly so empty hyperteams and empty teams keep their type).

Set equality on any level is therefore structural equality, which keeps the
golden tests stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

from .formulas import Constraint
from .structures import Structure

Assignment = tuple[tuple[str, str], ...]
Team = tuple[Assignment, ...]


class HyperteamError(Exception):
    pass


class VariableAlreadyBound(HyperteamError):
    pass


# ---------------------------------------------------------------------------
# Assignments
# ---------------------------------------------------------------------------

EMPTY_ASSIGNMENT: Assignment = ()


def assignment(mapping) -> Assignment:
    if isinstance(mapping, dict):
        items = mapping.items()
    else:
        items = mapping
    return tuple(sorted((str(k), str(v)) for k, v in items))


def asg_vars(sigma: Assignment) -> frozenset[str]:
    return frozenset(v for v, _ in sigma)


def asg_get(sigma: Assignment, var: str) -> str:
    for v, value in sigma:
        if v == var:
            return value
    raise KeyError(var)


def asg_restrict(sigma: Assignment, names) -> Assignment:
    names = frozenset(names)
    return tuple(p for p in sigma if p[0] in names)


def asg_extend(sigma: Assignment, var: str, value: str) -> Assignment:
    return tuple(sorted(sigma + ((var, value),)))


def format_assignment(sigma: Assignment) -> str:
    return "{" + " ".join(f"{v}={a}" for v, a in sigma) + "}"


# ---------------------------------------------------------------------------
# Teams and hyperteams
# ---------------------------------------------------------------------------

def team(assignments) -> Team:
    return tuple(sorted(set(assignments)))


EMPTY_TEAM: Team = ()


def format_team(t: Team) -> str:
    return "{ " + " ".join(format_assignment(s) for s in t) + " }"


@dataclass(frozen=True)
class Hyperteam:
    teams: tuple[Team, ...]
    variables: frozenset[str]

    @staticmethod
    def of(teams_iter, variables=None) -> "Hyperteam":
        canon = tuple(sorted({team(t) for t in teams_iter}))
        if variables is None:
            found = None
            for t in canon:
                for sigma in t:
                    found = asg_vars(sigma)
                    break
                if found is not None:
                    break
            variables = found if found is not None else frozenset()
        variables = frozenset(variables)
        for t in canon:
            for sigma in t:
                if asg_vars(sigma) != variables:
                    raise HyperteamError(
                        f"assignment over {sorted(asg_vars(sigma))} in a hyperteam "
                        f"over {sorted(variables)}")
        return Hyperteam(canon, variables)

    @property
    def is_empty(self) -> bool:
        return not self.teams

    @property
    def is_null(self) -> bool:
        return EMPTY_TEAM in self.teams

    @property
    def is_trivial(self) -> bool:
        return self.teams == ((EMPTY_ASSIGNMENT,),)

    @property
    def is_proper(self) -> bool:
        return not self.is_empty and not self.is_null

    def __str__(self) -> str:
        return " ".join(format_team(t) for t in self.teams) if self.teams else "<empty>"


def trivial_hyperteam() -> Hyperteam:
    return Hyperteam(((EMPTY_ASSIGNMENT,),), frozenset())


def empty_hyperteam(variables=()) -> Hyperteam:
    return Hyperteam((), frozenset(variables))


def null_hyperteam(variables=()) -> Hyperteam:
    return Hyperteam((EMPTY_TEAM,), frozenset(variables))


# ---------------------------------------------------------------------------
# Restriction and comparison
# ---------------------------------------------------------------------------

def restrict(x: Hyperteam, names) -> Hyperteam:
    names = frozenset(names)
    return Hyperteam.of(
        (tuple(asg_restrict(s, names) for s in t) for t in x.teams),
        x.variables & names)


def refines(x1: Hyperteam, x2: Hyperteam, names=None) -> bool:
    """Every team of x1 includes some team of x2, after restriction."""
    if names is None:
        if x1.variables != x2.variables:
            raise HyperteamError("refinement without a variable restriction "
                                 "needs hyperteams over the same variables")
        r1, r2 = x1, x2
    else:
        r1, r2 = restrict(x1, names), restrict(x2, names)
    teams2 = [set(t) for t in r2.teams]
    for t1 in r1.teams:
        s1 = set(t1)
        if not any(t2 <= s1 for t2 in teams2):
            return False
    return True


def equiv(x1: Hyperteam, x2: Hyperteam, names=None) -> bool:
    return refines(x1, x2, names) and refines(x2, x1, names)


def equal_on(x1: Hyperteam, x2: Hyperteam, names) -> bool:
    return restrict(x1, names).teams == restrict(x2, names).teams


# ---------------------------------------------------------------------------
# Dualisation
# ---------------------------------------------------------------------------

def dualize(x: Hyperteam) -> Hyperteam:
    """Images of all choice functions, one assignment picked per team.

    The product over teams is computed with deduplication after every step;
    partial images with equal contents have equal futures, so the work is
    bounded by #teams * 2^#distinct-assignments instead of prod |T|.
    """
    index: dict[Assignment, int] = {}
    for t in x.teams:
        for sigma in t:
            if sigma not in index:
                index[sigma] = len(index)
    masks: set[int] = {0}
    for t in x.teams:
        bits = [1 << index[sigma] for sigma in t]
        masks = {m | b for m in masks for b in bits}
        if not masks:
            break
    by_position = {pos: sigma for sigma, pos in index.items()}
    teams = []
    for mask in masks:
        members = []
        pos = 0
        while mask:
            if mask & 1:
                members.append(by_position[pos])
            mask >>= 1
            pos += 1
        teams.append(team(members))
    return Hyperteam.of(teams, x.variables)


# ---------------------------------------------------------------------------
# Uniform functions and extension
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniformFunction:
    """A choice of domain value depending only on dep_vars.

    The table is total over all restricted assignments on dep_vars; by
    uniformity the value on any assignment is the value on its restriction.
    """

    dep_vars: frozenset[str]
    table: tuple[tuple[Assignment, str], ...]

    def apply(self, sigma: Assignment) -> str:
        present = asg_vars(sigma)
        if not self.dep_vars <= present:
            missing = sorted(self.dep_vars - present)
            raise HyperteamError(
                f"function depends on {missing} which the assignment lacks")
        key = asg_restrict(sigma, self.dep_vars)
        for k, value in self.table:
            if k == key:
                return value
        raise HyperteamError(f"function table has no entry for {format_assignment(key)}")

    def lookup(self) -> dict[Assignment, str]:
        return dict(self.table)

    @staticmethod
    def constant(value: str) -> "UniformFunction":
        return UniformFunction(frozenset(), ((EMPTY_ASSIGNMENT, str(value)),))

    @staticmethod
    def from_table(dep_vars, table: dict) -> "UniformFunction":
        return UniformFunction(frozenset(dep_vars),
                               tuple(sorted(table.items())))

    def __str__(self) -> str:
        entries = ", ".join(f"{format_assignment(k)}->{v}" for k, v in self.table)
        return f"fn[{','.join(sorted(self.dep_vars))}]({entries})"


def all_assignments(names, structure: Structure) -> list[Assignment]:
    """Every assignment over names, in domain-lexicographic order."""
    names = sorted(names)
    out = []
    for values in product(structure.domain, repeat=len(names)):
        out.append(tuple(zip(names, values)))
    return out


def enumerate_uniform_functions(dep, base, structure: Structure):
    """All |A|^(|A|^|dep ∩ base|) functions, in a deterministic order."""
    dep_vars = frozenset(dep) & frozenset(base)
    keys = all_assignments(dep_vars, structure)
    for values in product(structure.domain, repeat=len(keys)):
        yield UniformFunction(dep_vars, tuple(sorted(zip(keys, values))))


def extend_team(t: Team, fn: UniformFunction, var: str) -> Team:
    return team(asg_extend(sigma, var, fn.apply(sigma)) for sigma in t)


def extend(x: Hyperteam, var: str, dep, structure: Structure) -> Hyperteam:
    """Extend every team with var by every (dep ∩ var(x))-uniform function."""
    if var in x.variables:
        raise VariableAlreadyBound(f"variable {var!r} is already bound in the hyperteam")
    functions = list(enumerate_uniform_functions(dep, x.variables, structure))
    teams = {extend_team(t, fn, var) for t in x.teams for fn in functions}
    return Hyperteam.of(teams, x.variables | {var})


def extend_constrained(x: Hyperteam, var: str, constraint: Constraint,
                       structure: Structure) -> Hyperteam:
    return extend(x, var, constraint.denotation_within(x.variables), structure)


def extend_prefix(x: Hyperteam, prefix, alternation: str,
                  structure: Structure) -> Hyperteam:
    """Iterated quantifier application at a fixed alternation flag.

    A flag-coherent quantifier extends directly; the other kind dualises,
    extends, and dualises back.
    """
    from .formulas import QuantifierStep  # noqa: F401  (documentation import)
    if alternation not in ("EA", "AE"):
        raise ValueError(f"unknown alternation flag {alternation!r}")
    for step in prefix:
        if step.is_meta:
            raise HyperteamError("prefix extension takes plain quantifiers only")
        coherent = (step.kind == "E") == (alternation == "EA")
        if coherent:
            x = extend_constrained(x, step.var, step.constraint, structure)
        else:
            x = dualize(extend_constrained(dualize(x), step.var, step.constraint, structure))
    return x


# ---------------------------------------------------------------------------
# Partitions, cylindrification, reduction
# ---------------------------------------------------------------------------

def bipartitions(x: Hyperteam):
    """All ordered splits of the team set, in bitmask order."""
    n = len(x.teams)
    for mask in range(1 << n):
        left = tuple(x.teams[i] for i in range(n) if mask >> i & 1)
        right = tuple(x.teams[i] for i in range(n) if not mask >> i & 1)
        yield (Hyperteam(left, x.variables), Hyperteam(right, x.variables))


def team_bipartitions(t: Team):
    n = len(t)
    for mask in range(1 << n):
        left = tuple(t[i] for i in range(n) if mask >> i & 1)
        right = tuple(t[i] for i in range(n) if not mask >> i & 1)
        yield left, right


def cylindrify_team(t: Team, var: str, structure: Structure) -> Team:
    return team(asg_extend(sigma, var, value)
                for sigma in t for value in structure.domain)


def cylindrify(x: Hyperteam, var: str, structure: Structure) -> Hyperteam:
    if var in x.variables:
        raise VariableAlreadyBound(f"variable {var!r} is already bound in the hyperteam")
    return Hyperteam.of((cylindrify_team(t, var, structure) for t in x.teams),
                        x.variables | {var})


def reduce_hyperteam(x: Hyperteam) -> Hyperteam:
    """Keep only the inclusion-minimal teams; equivalent to x on every W."""
    sets = [set(t) for t in x.teams]
    keep = []
    for i, t in enumerate(x.teams):
        if any(sets[j] < sets[i] for j in range(len(sets))):
            continue
        keep.append(t)
    return Hyperteam(tuple(keep), x.variables)


# ---------------------------------------------------------------------------
# Function assignments (Herbrand/Skolem environments)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionAssignment:
    entries: tuple[tuple[str, UniformFunction], ...]

    @staticmethod
    def of(mapping) -> "FunctionAssignment":
        items = mapping.items() if isinstance(mapping, dict) else mapping
        return FunctionAssignment(tuple(sorted(items)))

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.entries)

    def get(self, var: str) -> UniformFunction:
        for v, fn in self.entries:
            if v == var:
                return fn
        raise KeyError(var)

    def bind(self, var: str, fn: UniformFunction) -> "FunctionAssignment":
        rest = tuple(e for e in self.entries if e[0] != var)
        return FunctionAssignment(tuple(sorted(rest + ((var, fn),))))

    def true_supports(self) -> dict[str, frozenset[str]]:
        """Per variable, the dependency variables its table actually uses."""
        out = {}
        for var, fn in self.entries:
            table = fn.lookup()
            needed = set()
            for dep in fn.dep_vars:
                others = fn.dep_vars - {dep}
                grouped: dict[Assignment, set[str]] = {}
                for key, value in table.items():
                    grouped.setdefault(asg_restrict(key, others), set()).add(value)
                if any(len(vals) > 1 for vals in grouped.values()):
                    needed.add(dep)
            out[var] = frozenset(needed)
        return out

    def is_acyclic(self) -> bool:
        """There is an acyclic dependency context covering every function."""
        deps = self.true_supports()
        remaining = set(deps)
        while remaining:
            ready = {v for v in remaining
                     if v not in deps[v] and not (deps[v] & (remaining - {v}))}
            if not ready:
                return False
            remaining -= ready
        return True

    def __str__(self) -> str:
        return "{" + ", ".join(f"{v}: {fn}" for v, fn in self.entries) + "}"


EMPTY_FUNCTIONS = FunctionAssignment(())


def apply_function_assignment(x: Hyperteam, theta: FunctionAssignment,
                              structure: Structure) -> Hyperteam:
    """Cylindrify over the new function variables, keep coherent assignments.

    Variables already present in x are kept as they are; only the values of
    the not-yet-assigned function variables get filtered.
    """
    new_vars = sorted(theta.domain - x.variables)
    if not new_vars:
        return x
    teams = []
    for t in x.teams:
        extended = []
        for sigma in t:
            for values in product(structure.domain, repeat=len(new_vars)):
                full = tuple(sorted(sigma + tuple(zip(new_vars, values))))
                if all(asg_get(full, v) == theta.get(v).apply(full) for v in new_vars):
                    extended.append(full)
        teams.append(team(extended))
    return Hyperteam.of(teams, x.variables | set(new_vars))


# ---------------------------------------------------------------------------
# Hyperteam text format
# ---------------------------------------------------------------------------

def parse_hyperteam(text: str) -> Hyperteam:
    """Parse `{ {x=0 y=1} {x=1 y=0} } { {x=0 y=0} }` style text."""
    tokens = re.findall(r"[{}]|[A-Za-z_][A-Za-z0-9_]*=[A-Za-z0-9_]+|\S", text)
    pos = 0
    teams: list[list[Assignment]] = []
    current: list[Assignment] | None = None
    sigma: list[tuple[str, str]] | None = None
    for tok in tokens:
        pos += 1
        if tok == "{":
            if current is None:
                current = []
            elif sigma is None:
                sigma = []
            else:
                raise HyperteamError("unexpected '{' inside an assignment")
        elif tok == "}":
            if sigma is not None:
                current.append(assignment(sigma))
                sigma = None
            elif current is not None:
                teams.append(current)
                current = None
            else:
                raise HyperteamError("unexpected '}'")
        elif "=" in tok and sigma is not None:
            var, value = tok.split("=", 1)
            sigma.append((var, value))
        else:
            raise HyperteamError(f"unexpected token {tok!r} in hyperteam text")
    if current is not None or sigma is not None:
        raise HyperteamError("unbalanced braces in hyperteam text")
    return Hyperteam.of(map(team, teams))


def load_hyperteam(path: str) -> Hyperteam:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_hyperteam(handle.read())
