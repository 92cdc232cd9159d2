"""Formula ASTs, the concrete grammar, variable analyses and prefix utilities.

The grammar (ASCII, whitespace-insensitive)::

    formula := 'false' | 'true' | atom | '~' formula | '(' formula ')'
             | formula '&' formula | formula '|' formula | quant
    quant   := ('E'|'A'|'EE'|'AA') constraint? ident '.' formula
    constraint := '[' ('+'|'-') '{' [ident (',' ident)*] '}' ']'
    atom    := ident '(' ident (',' ident)* ')' | ident '=' ident

Precedence: ~ binds tighter than &, which binds tighter than |; quantifier
bodies extend maximally to the right.  An undecorated quantifier over x gets
the default constraint +{support variables of the body, minus x}.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class FormulaError(Exception):
    """Base class for formula-level errors."""


class ParseError(FormulaError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class PrefixViolation(FormulaError):
    """A quantifier prefix breaks one of the well-formedness rules."""


class NotPrenex(FormulaError):
    pass


class NotASentence(FormulaError):
    pass


# ---------------------------------------------------------------------------
# Variable sets that may be co-finite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VarSet:
    """A finite or co-finite set of variable names.

    Co-finite sets arise from -W quantifier constraints, whose denotation is
    "every variable except those in W".  They stay symbolic here and are
    materialized against a finite universe only at use sites.
    """

    cofinite: bool
    names: frozenset[str]

    @staticmethod
    def finite(names=()) -> "VarSet":
        return VarSet(False, frozenset(names))

    @staticmethod
    def co_finite(excluded=()) -> "VarSet":
        return VarSet(True, frozenset(excluded))

    def __contains__(self, name: str) -> bool:
        return (name not in self.names) if self.cofinite else (name in self.names)

    def is_empty(self) -> bool:
        return not self.cofinite and not self.names

    def union(self, other: "VarSet") -> "VarSet":
        if not self.cofinite and not other.cofinite:
            return VarSet(False, self.names | other.names)
        if self.cofinite and other.cofinite:
            return VarSet(True, self.names & other.names)
        fin, cof = (self, other) if other.cofinite else (other, self)
        return VarSet(True, cof.names - fin.names)

    def intersect(self, other: "VarSet") -> "VarSet":
        if not self.cofinite and not other.cofinite:
            return VarSet(False, self.names & other.names)
        if self.cofinite and other.cofinite:
            return VarSet(True, self.names | other.names)
        fin, cof = (self, other) if other.cofinite else (other, self)
        return VarSet(False, fin.names - cof.names)

    def remove(self, name: str) -> "VarSet":
        if self.cofinite:
            return VarSet(True, self.names | {name})
        return VarSet(False, self.names - {name})

    def materialize(self, universe) -> frozenset[str]:
        universe = frozenset(universe)
        if self.cofinite:
            return universe - self.names
        return self.names

    def __str__(self) -> str:
        inner = ",".join(sorted(self.names))
        return f"co{{{inner}}}" if self.cofinite else f"{{{inner}}}"


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    """The ±W decoration of a quantifier."""

    positive: bool
    variables: frozenset[str]

    def denotation(self) -> VarSet:
        if self.positive:
            return VarSet.finite(self.variables)
        return VarSet.co_finite(self.variables)

    def denotation_within(self, base) -> frozenset[str]:
        """Materialize the denotation against a finite base variable set."""
        base = frozenset(base)
        if self.positive:
            return self.variables & base
        return base - self.variables

    def __str__(self) -> str:
        sign = "+" if self.positive else "-"
        return f"[{sign}{{{','.join(sorted(self.variables))}}}]"


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    relation: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Quantified(Formula):
    constraint: Constraint
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Quantified):
    pass


@dataclass(frozen=True)
class Forall(Quantified):
    pass


@dataclass(frozen=True)
class MetaExists(Quantified):
    pass


@dataclass(frozen=True)
class MetaForall(Quantified):
    pass


FALSE = FalseF()
TRUE = TrueF()

PLAIN_QUANTIFIERS = (Exists, Forall)
META_QUANTIFIERS = (MetaExists, MetaForall)


# ---------------------------------------------------------------------------
# Variable analyses
# ---------------------------------------------------------------------------

def support_vars(phi: Formula) -> frozenset[str]:
    """Variables that need a value to evaluate the atoms of phi."""
    if isinstance(phi, (FalseF, TrueF)):
        return frozenset()
    if isinstance(phi, Atom):
        return frozenset(phi.args)
    if isinstance(phi, Eq):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Not):
        return support_vars(phi.body)
    if isinstance(phi, (And, Or)):
        return support_vars(phi.left) | support_vars(phi.right)
    if isinstance(phi, Quantified):
        return support_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def _free_dep(phi: Formula, context: dict[str, VarSet]):
    """Free and dependence variables under a dependency context.

    Returns a pair of VarSets.  For formulae without meta quantifiers and an
    empty context this coincides with the plain free-variable recursion.
    """
    if isinstance(phi, (FalseF, TrueF)):
        return VarSet.finite(), VarSet.finite()
    if isinstance(phi, (Atom, Eq)):
        names = support_vars(phi)
        free = VarSet.finite(names)
        closure = transitive_closure(context)
        for v in names:
            if v in closure:
                free = free.union(closure[v])
        return free, VarSet.finite()
    if isinstance(phi, Not):
        return _free_dep(phi.body, context)
    if isinstance(phi, (And, Or)):
        lf, ld = _free_dep(phi.left, context)
        rf, rd = _free_dep(phi.right, context)
        return lf.union(rf), ld.union(rd)
    if isinstance(phi, PLAIN_QUANTIFIERS):
        inner = {v: s for v, s in context.items() if v != phi.var}
        bf, bd = _free_dep(phi.body, inner)
        denot = phi.constraint.denotation()
        if phi.var in bf:
            return bf.remove(phi.var).union(denot), bd.remove(phi.var).union(denot)
        return bf, bd
    if isinstance(phi, META_QUANTIFIERS):
        inner = dict(context)
        inner[phi.var] = phi.constraint.denotation()
        bf, bd = _free_dep(phi.body, inner)
        if phi.var in bd:
            return bf, bd
        return bf.remove(phi.var), bd
    raise TypeError(f"not a formula: {phi!r}")


def free_vars(phi: Formula) -> VarSet:
    """Free variables; co-finite results come from -W constraints."""
    return _free_dep(phi, {})[0]


def transitive_closure(context: dict[str, VarSet]) -> dict[str, VarSet]:
    """Least fixpoint closing each entry under the context's own entries."""
    closure = dict(context)
    changed = True
    while changed:
        changed = False
        for x, deps in closure.items():
            for y, ydeps in context.items():
                if y in deps:
                    merged = deps.union(ydeps)
                    if merged != deps:
                        closure[x] = deps = merged
                        changed = True
    return closure


def is_acyclic(context: dict[str, VarSet]) -> bool:
    closure = transitive_closure(context)
    return all(x not in deps for x, deps in closure.items())


def all_variables(phi: Formula) -> frozenset[str]:
    """Every variable occurring anywhere: atoms, binders, constraint sets."""
    if isinstance(phi, (FalseF, TrueF)):
        return frozenset()
    if isinstance(phi, (Atom, Eq)):
        return support_vars(phi)
    if isinstance(phi, Not):
        return all_variables(phi.body)
    if isinstance(phi, (And, Or)):
        return all_variables(phi.left) | all_variables(phi.right)
    if isinstance(phi, Quantified):
        return all_variables(phi.body) | {phi.var} | phi.constraint.variables
    raise TypeError(f"not a formula: {phi!r}")


def has_meta_quantifiers(phi: Formula) -> bool:
    if isinstance(phi, META_QUANTIFIERS):
        return True
    if isinstance(phi, Quantified):
        return has_meta_quantifiers(phi.body)
    if isinstance(phi, Not):
        return has_meta_quantifiers(phi.body)
    if isinstance(phi, (And, Or)):
        return has_meta_quantifiers(phi.left) or has_meta_quantifiers(phi.right)
    return False


def is_quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, Quantified):
        return False
    if isinstance(phi, Not):
        return is_quantifier_free(phi.body)
    if isinstance(phi, (And, Or)):
        return is_quantifier_free(phi.left) and is_quantifier_free(phi.right)
    return True


def is_fol(phi: Formula) -> bool:
    """Membership in the fragment using only the defaulted quantifiers."""
    if isinstance(phi, (FalseF, TrueF, Atom, Eq)):
        return True
    if isinstance(phi, Not):
        return is_fol(phi.body)
    if isinstance(phi, (And, Or)):
        return is_fol(phi.left) and is_fol(phi.right)
    if isinstance(phi, PLAIN_QUANTIFIERS):
        default = support_vars(phi.body) - {phi.var}
        return (phi.constraint.positive
                and phi.constraint.variables == default
                and is_fol(phi.body))
    return False


def relation_arities(phi: Formula) -> dict[str, set[int]]:
    arities: dict[str, set[int]] = {}
    def walk(f: Formula):
        if isinstance(f, Atom):
            arities.setdefault(f.relation, set()).add(len(f.args))
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, (And, Or)):
            walk(f.left)
            walk(f.right)
        elif isinstance(f, Quantified):
            walk(f.body)
    walk(phi)
    return arities


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_KEYWORDS = {"true", "false", "E", "A", "EE", "AA"}
_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[0-9]+|[()\[\]{}.,~&|=+-]|\S")


class _Tokenizer:
    def __init__(self, text: str):
        self.tokens: list[tuple[str, int, int]] = []
        for lineno, line in enumerate(text.splitlines() or [""], start=1):
            for m in _TOKEN_RE.finditer(line):
                self.tokens.append((m.group(0), lineno, m.start() + 1))
        self.pos = 0
        last = text.splitlines() or [""]
        self._eof = (len(last), len(last[-1]) + 1)

    def peek(self) -> str | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def location(self) -> tuple[int, int]:
        if self.pos < len(self.tokens):
            _, line, col = self.tokens[self.pos]
            return line, col
        return self._eof

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, wanted: str) -> None:
        tok = self.peek()
        if tok != wanted:
            self.fail(f"expected {wanted!r}, found {tok!r}" if tok else f"expected {wanted!r}")
        self.pos += 1

    def fail(self, message: str):
        line, col = self.location()
        raise ParseError(message, line, col)


def _is_ident(tok: str | None) -> bool:
    return tok is not None and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok) is not None and tok not in _KEYWORDS


def parse_formula(text: str, mode: str = "adif") -> Formula:
    """Parse the external grammar into an AST.

    mode "adif" rejects the meta quantifiers EE/AA; mode "meta" allows them.
    Rebinding a variable inside the scope of its own quantifier is rejected.
    """
    if mode not in ("adif", "meta"):
        raise ValueError(f"unknown mode {mode!r}")
    tz = _Tokenizer(text)
    phi = _parse_or(tz, mode, frozenset())
    if tz.peek() is not None:
        tz.fail(f"trailing input starting at {tz.peek()!r}")
    return phi


def _parse_or(tz: _Tokenizer, mode: str, bound: frozenset[str]) -> Formula:
    left = _parse_and(tz, mode, bound)
    while tz.peek() == "|":
        tz.next()
        right = _parse_and(tz, mode, bound)
        left = Or(left, right)
    return left


def _parse_and(tz: _Tokenizer, mode: str, bound: frozenset[str]) -> Formula:
    left = _parse_unary(tz, mode, bound)
    while tz.peek() == "&":
        tz.next()
        right = _parse_unary(tz, mode, bound)
        left = And(left, right)
    return left


def _parse_unary(tz: _Tokenizer, mode: str, bound: frozenset[str]) -> Formula:
    tok = tz.peek()
    if tok == "~":
        tz.next()
        return Not(_parse_unary(tz, mode, bound))
    if tok in ("E", "A", "EE", "AA"):
        return _parse_quantifier(tz, mode, bound)
    return _parse_atomic(tz, mode, bound)


def _parse_quantifier(tz: _Tokenizer, mode: str, bound: frozenset[str]) -> Formula:
    kind = tz.next()
    if kind in ("EE", "AA") and mode != "meta":
        tz.fail(f"meta quantifier {kind!r} is only allowed in meta mode")
    constraint = None
    if tz.peek() == "[":
        tz.next()
        sign = tz.next()
        if sign not in ("+", "-"):
            tz.fail(f"expected '+' or '-' in constraint, found {sign!r}")
        tz.expect("{")
        names: list[str] = []
        if tz.peek() != "}":
            while True:
                name = tz.next()
                if not _is_ident(name):
                    tz.fail(f"expected variable name, found {name!r}")
                names.append(name)
                if tz.peek() == ",":
                    tz.next()
                    continue
                break
        tz.expect("}")
        tz.expect("]")
        constraint = Constraint(sign == "+", frozenset(names))
    var = tz.next()
    if not _is_ident(var):
        tz.fail(f"expected variable name, found {var!r}")
    if var in bound:
        tz.fail(f"variable {var!r} is already bound by an enclosing quantifier")
    tz.expect(".")
    body = _parse_or(tz, mode, bound | {var})
    if constraint is None:
        constraint = Constraint(True, support_vars(body) - {var})
    node = {"E": Exists, "A": Forall, "EE": MetaExists, "AA": MetaForall}[kind]
    return node(constraint, var, body)


def _parse_atomic(tz: _Tokenizer, mode: str, bound: frozenset[str]) -> Formula:
    tok = tz.peek()
    if tok == "(":
        tz.next()
        phi = _parse_or(tz, mode, bound)
        tz.expect(")")
        return phi
    if tok == "false":
        tz.next()
        return FALSE
    if tok == "true":
        tz.next()
        return TRUE
    if not _is_ident(tok):
        tz.fail(f"expected a formula, found {tok!r}")
    name = tz.next()
    if tz.peek() == "(":
        tz.next()
        args: list[str] = []
        while True:
            arg = tz.next()
            if not _is_ident(arg):
                tz.fail(f"expected variable name, found {arg!r}")
            args.append(arg)
            if tz.peek() == ",":
                tz.next()
                continue
            break
        tz.expect(")")
        return Atom(name, tuple(args))
    if tz.peek() == "=":
        tz.next()
        other = tz.next()
        if not _is_ident(other):
            tz.fail(f"expected variable name, found {other!r}")
        return Eq(name, other)
    tz.fail(f"expected '(' or '=' after {name!r}")


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def print_formula(phi: Formula) -> str:
    """Render to the external grammar; parse(print(phi)) == phi."""
    return _print(phi, 0, True)


def _print(phi: Formula, level: int, tail: bool) -> str:
    # level: 0 = or-context, 1 = and-context, 2 = unary-context.  tail marks
    # positions where a quantifier body may extend to the end of the input,
    # so the quantifier needs no parentheses there.
    if isinstance(phi, FalseF):
        return "false"
    if isinstance(phi, TrueF):
        return "true"
    if isinstance(phi, Atom):
        return f"{phi.relation}({','.join(phi.args)})"
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, Not):
        return f"~{_print(phi.body, 2, tail)}"
    if isinstance(phi, And):
        wrap = level > 1
        text = (f"{_print(phi.left, 1, False)} & "
                f"{_print(phi.right, 2, tail or wrap)}")
        return f"({text})" if wrap else text
    if isinstance(phi, Or):
        wrap = level > 0
        text = (f"{_print(phi.left, 0, False)} | "
                f"{_print(phi.right, 1, tail or wrap)}")
        return f"({text})" if wrap else text
    if isinstance(phi, Quantified):
        kind = {Exists: "E", Forall: "A", MetaExists: "EE", MetaForall: "AA"}[type(phi)]
        text = f"{kind}{phi.constraint} {phi.var} . {_print(phi.body, 0, True)}"
        return text if tail else f"({text})"
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Negation normal form
# ---------------------------------------------------------------------------

def to_nnf(phi: Formula) -> Formula:
    """Push negations down to atoms, using the quantifier/connective dualities."""
    if has_meta_quantifiers(phi):
        raise FormulaError("negation normal form is defined for plain formulae only")
    return _nnf(phi, False)


def _nnf(phi: Formula, negated: bool) -> Formula:
    if isinstance(phi, FalseF):
        return TRUE if negated else FALSE
    if isinstance(phi, TrueF):
        return FALSE if negated else TRUE
    if isinstance(phi, (Atom, Eq)):
        return Not(phi) if negated else phi
    if isinstance(phi, Not):
        return _nnf(phi.body, not negated)
    if isinstance(phi, And):
        if negated:
            return Or(_nnf(phi.left, True), _nnf(phi.right, True))
        return And(_nnf(phi.left, False), _nnf(phi.right, False))
    if isinstance(phi, Or):
        if negated:
            return And(_nnf(phi.left, True), _nnf(phi.right, True))
        return Or(_nnf(phi.left, False), _nnf(phi.right, False))
    if isinstance(phi, Exists):
        node = Forall if negated else Exists
        return node(phi.constraint, phi.var, _nnf(phi.body, negated))
    if isinstance(phi, Forall):
        node = Exists if negated else Forall
        return node(phi.constraint, phi.var, _nnf(phi.body, negated))
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Quantifier prefixes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuantifierStep:
    kind: str  # 'E', 'A', 'EE' or 'AA'
    constraint: Constraint
    var: str

    @property
    def is_meta(self) -> bool:
        return self.kind in ("EE", "AA")

    @property
    def is_existential(self) -> bool:
        return self.kind in ("E", "EE")

    def __str__(self) -> str:
        return f"{self.kind}{self.constraint} {self.var}"


QuantifierPrefix = tuple[QuantifierStep, ...]

_STEP_NODE = {"E": Exists, "A": Forall, "EE": MetaExists, "AA": MetaForall}
_NODE_STEP = {Exists: "E", Forall: "A", MetaExists: "EE", MetaForall: "AA"}


def validate_prefix(prefix: QuantifierPrefix) -> None:
    seen: list[QuantifierStep] = []
    for step in prefix:
        if any(s.var == step.var for s in seen):
            raise PrefixViolation(f"variable {step.var!r} is quantified twice in the prefix")
        if step.var in step.constraint.variables:
            raise PrefixViolation(
                f"variable {step.var!r} occurs in its own constraint set")
        for earlier in seen:
            # Meta constraints legitimately mention variables resolved later
            # (the prefix reversal produces exactly that shape); the scoping
            # rule binds plain quantifiers only.
            if not earlier.is_meta and step.var in earlier.constraint.denotation():
                raise PrefixViolation(
                    f"variable {step.var!r} is quantified in the scope of "
                    f"{earlier} whose constraint denotation contains it")
        seen.append(step)


def split_prenex(phi: Formula):
    """Peel the maximal leading quantifier prefix.

    Returns (prefix, matrix, matrix_is_quantifier_free).  The prefix is
    validated; a violation raises PrefixViolation.
    """
    prefix: list[QuantifierStep] = []
    rest = phi
    while isinstance(rest, Quantified):
        prefix.append(QuantifierStep(_NODE_STEP[type(rest)], rest.constraint, rest.var))
        rest = rest.body
    validate_prefix(tuple(prefix))
    return tuple(prefix), rest, is_quantifier_free(rest)


def attach_prefix(prefix: QuantifierPrefix, matrix: Formula) -> Formula:
    phi = matrix
    for step in reversed(prefix):
        phi = _STEP_NODE[step.kind](step.constraint, step.var, phi)
    return phi


def hs_prefix(prefix: QuantifierPrefix) -> QuantifierPrefix:
    """Reverse a plain prefix into the equivalent meta prefix."""
    out: list[QuantifierStep] = []
    for step in prefix:
        if step.is_meta:
            raise PrefixViolation("the prefix transform takes plain quantifiers only")
        out.append(QuantifierStep("EE" if step.kind == "E" else "AA", step.constraint, step.var))
    return tuple(reversed(out))


def prefix_subformulae(phi: Formula) -> list[Formula]:
    """The chain phi, body of its head quantifier, ..., down to the matrix."""
    out = [phi]
    rest = phi
    while isinstance(rest, Quantified):
        rest = rest.body
        out.append(rest)
    return out
