"""Executable property suites: the fundamental laws, the adequacy theorems,
the appendix lemmas, and cross-engine agreement.  Shared by the CLI commands
and the acceptance tests; a failure in any check means an implementation bug.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations, product

from .corpus import (
    corpus_structures, prenex_sentences, quantified_pool, quantifier_free_pool,
)
from .formulas import (
    And, Exists, Forall, Formula, Not, Or, Quantified, QuantifierStep,
    attach_prefix, free_vars, parse_formula, split_prenex, support_vars, to_nnf,
)
from .games import build_arena, bucket_update, constraint_of, game_winner
from .herbrand import model_check, sat_meta, skolemisation_search
from .hyperteams import (
    EMPTY_FUNCTIONS, FunctionAssignment, Hyperteam, all_assignments,
    apply_function_assignment, asg_restrict, bipartitions, cylindrify,
    dualize, enumerate_uniform_functions, extend, extend_prefix,
    reduce_hyperteam, refines, team, team_bipartitions, trivial_hyperteam,
)
from .semantics import (
    EvalOptions, Evaluator, dual_flag, enumerate_hyperteams, enumerate_teams,
    sat_dif, sat_fol,
)
from .structures import Structure


@dataclass
class Bounds:
    max_teams: int = 3
    max_assignments: int = 3
    variables: tuple[str, ...] = ("x", "y")


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    failures: int = 0
    first_counterexample: str | None = None
    seconds: float = 0.0

    def record(self, ok: bool, describe) -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if self.first_counterexample is None:
                self.first_counterexample = describe()

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class SuiteReport:
    name: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def total_checked(self) -> int:
        return sum(c.checked for c in self.checks)

    def lines(self) -> list[str]:
        out = [f"suite {self.name}"]
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            line = f"  {status} {c.name}: {c.checked} checks, {c.failures} failures ({c.seconds:.1f}s)"
            out.append(line)
            if c.first_counterexample:
                out.append(f"       first counterexample: {c.first_counterexample}")
        verdict = "pass" if self.passed else "FAIL"
        out.append(f"suite {self.name}: {verdict} ({self.total_checked} checks)")
        return out

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "checked": c.checked,
                    "failures": c.failures,
                    "first_counterexample": c.first_counterexample,
                    "seconds": round(c.seconds, 3),
                }
                for c in self.checks
            ],
        }


class _Timer:
    def __init__(self, result: CheckResult):
        self.result = result

    def __enter__(self):
        self.start = time.perf_counter()
        return self.result

    def __exit__(self, *exc):
        self.result.seconds = time.perf_counter() - self.start
        return False


def _pool(structure: Structure, bounds: Bounds) -> list[Hyperteam]:
    return list(enumerate_hyperteams(structure, bounds.variables,
                                     bounds.max_teams, bounds.max_assignments))


# ---------------------------------------------------------------------------
# Fundamentals: laws of the alternating semantics
# ---------------------------------------------------------------------------

def fundamentals_suite(structure: Structure, bounds: Bounds | None = None,
                       options: EvalOptions | None = None) -> SuiteReport:
    bounds = bounds or Bounds()
    options = options or EvalOptions()
    report = SuiteReport("fundamentals")
    pool = _pool(structure, bounds)
    evaluator = Evaluator(structure, options)
    qf = [phi for phi in quantifier_free_pool()
          if support_vars(phi) <= frozenset(bounds.variables)]
    quantified = [phi for phi in quantified_pool()
                  if support_vars(phi) <= frozenset(bounds.variables)]
    formulas = qf + quantified
    small_pool = [x for x in pool
                  if len(x.teams) <= 2 and all(len(t) <= 2 for t in x.teams)]

    sat: dict = {}
    def lookup(x: Hyperteam, flag: str, phi: Formula) -> bool:
        key = (x.teams, flag, phi)
        if key not in sat:
            sat[key] = evaluator.sat(x, flag, phi)
        return sat[key]

    check = CheckResult("empty and null hyperteams")
    with _Timer(check):
        empty = Hyperteam((), frozenset(bounds.variables))
        null = Hyperteam(((),), frozenset(bounds.variables))
        for phi in formulas:
            for x in (empty, null):
                check.record(not lookup(x, "EA", phi) if x.is_empty else lookup(x, "EA", phi),
                             lambda phi=phi, x=x: f"EA on {x}: {phi}")
                check.record(lookup(x, "AE", phi) if x.is_empty else not lookup(x, "AE", phi),
                             lambda phi=phi, x=x: f"AE on {x}: {phi}")
    report.checks.append(check)

    check = CheckResult("hyperteam refinement")
    with _Timer(check):
        by_free: dict = {}
        for phi in formulas:
            fv = free_vars(phi).materialize(bounds.variables)
            if fv not in by_free:
                from .hyperteams import restrict
                projected = [restrict(x, fv) for x in pool]
                table = []
                for x1r in projected:
                    row = []
                    sets1 = [set(t) for t in x1r.teams]
                    for x2r in projected:
                        sets2 = [set(t) for t in x2r.teams]
                        row.append(all(any(t2 <= t1 for t2 in sets2) for t1 in sets1))
                    table.append(row)
                by_free[fv] = table
            table = by_free[fv]
            for i, x1 in enumerate(pool):
                for j, x2 in enumerate(pool):
                    if not table[i][j]:
                        continue
                    ok_ea = (not lookup(x1, "EA", phi)) or lookup(x2, "EA", phi)
                    ok_ae = (not lookup(x2, "AE", phi)) or lookup(x1, "AE", phi)
                    check.record(ok_ea and ok_ae,
                                 lambda phi=phi, x1=x1, x2=x2:
                                 f"{phi} on {x1} vs {x2}")
    report.checks.append(check)

    check = CheckResult("double dualisation")
    with _Timer(check):
        for phi in formulas:
            for x in pool:
                d = dualize(x)
                dd = dualize(d)
                for flag in ("EA", "AE"):
                    v = lookup(x, flag, phi)
                    ok = (lookup(d, dual_flag(flag), phi) == v
                          and lookup(dd, flag, phi) == v)
                    check.record(ok, lambda phi=phi, x=x, flag=flag:
                                 f"{phi} flag {flag} on {x}")
    report.checks.append(check)

    check = CheckResult("game-theoretic determinacy")
    with _Timer(check):
        for phi in formulas:
            for x in pool:
                d = dualize(x)
                for flag in ("EA", "AE"):
                    v = lookup(x, flag, phi)
                    neg_flag = lookup(x, dual_flag(flag), Not(phi))
                    neg_dual = lookup(d, flag, Not(phi))
                    check.record(v != neg_flag and v != neg_dual,
                                 lambda phi=phi, x=x, flag=flag:
                                 f"{phi} flag {flag} on {x}")
    report.checks.append(check)

    check = CheckResult("law of excluded middle")
    with _Timer(check):
        for phi in _sentence_pool():
            t = lookup(trivial_hyperteam(), "EA", phi)
            t_ae = lookup(trivial_hyperteam(), "AE", phi)
            n = lookup(trivial_hyperteam(), "EA", Not(phi))
            n_ae = lookup(trivial_hyperteam(), "AE", Not(phi))
            check.record(t == t_ae and n == n_ae and t != n,
                         lambda phi=phi: f"sentence {phi}")
    report.checks.append(check)

    check = CheckResult("boolean laws")
    with _Timer(check):
        def equivalent(lhs: Formula, rhs: Formula, instances) -> None:
            for x in instances:
                for flag in ("EA", "AE"):
                    check.record(lookup(x, flag, lhs) == lookup(x, flag, rhs),
                                 lambda lhs=lhs, rhs=rhs, x=x, flag=flag:
                                 f"{lhs} vs {rhs} flag {flag} on {x}")

        def implies(lhs: Formula, rhs: Formula, instances) -> None:
            for x in instances:
                for flag in ("EA", "AE"):
                    check.record((not lookup(x, flag, lhs)) or lookup(x, flag, rhs),
                                 lambda lhs=lhs, rhs=rhs, x=x, flag=flag:
                                 f"{lhs} => {rhs} flag {flag} on {x}")

        true, false = parse_formula("true"), parse_formula("false")
        equivalent(Not(false), true, pool)
        equivalent(Not(true), false, pool)
        operand_sets = [(phi, pool) for phi in qf] + [(phi, small_pool) for phi in quantified]
        for phi, instances in operand_sets:
            equivalent(phi, Not(Not(phi)), instances)
            equivalent(And(phi, false), false, instances)
            equivalent(And(false, phi), false, instances)
            equivalent(And(phi, true), phi, instances)
            equivalent(Or(phi, true), true, instances)
            equivalent(Or(phi, false), phi, instances)
        pairs = [(qf[2], qf[3]), (qf[4], qf[5]), (qf[1], qf[7])]
        for phi1, phi2 in pairs:
            equivalent(And(phi1, phi2), And(phi2, phi1), pool)
            equivalent(Or(phi1, phi2), Or(phi2, phi1), pool)
            implies(And(phi1, phi2), phi1, pool)
            implies(phi1, Or(phi1, phi2), pool)
            equivalent(And(phi1, phi2), Not(Or(Not(phi1), Not(phi2))), pool)
            equivalent(Or(phi1, phi2), Not(And(Not(phi1), Not(phi2))), pool)
        triples = [(qf[2], qf[3], qf[4])]
        for phi1, phi, phi2 in triples:
            equivalent(And(phi1, And(phi, phi2)), And(And(phi1, phi), phi2), pool)
            equivalent(Or(phi1, Or(phi, phi2)), Or(Or(phi1, phi), phi2), pool)
        for phi in quantified:
            if not isinstance(phi, Quantified):
                continue
            flipped = Forall if isinstance(phi, Exists) else Exists
            dual_q = Not(flipped(phi.constraint, phi.var, Not(phi.body)))
            equivalent(phi, dual_q, pool)
    report.checks.append(check)

    check = CheckResult("negation normal form")
    with _Timer(check):
        for phi in formulas:
            shapes = [Not(phi), Not(And(phi, Not(phi))), Not(Not(Not(phi)))]
            for shape in shapes:
                nnf = to_nnf(shape)
                for x in small_pool:
                    for flag in ("EA", "AE"):
                        check.record(lookup(x, flag, shape) == lookup(x, flag, nnf),
                                     lambda shape=shape, x=x, flag=flag:
                                     f"{shape} flag {flag} on {x}")
    report.checks.append(check)

    check = CheckResult("prefix extension")
    with _Timer(check):
        prefix_texts = ["E[+{}] z", "A[+{}] z", "E[+{x}] z", "A[+{x}] z . E[+{z}] w"]
        for text in prefix_texts:
            whole = parse_formula(f"{text} . R(x,z)" if "w" not in text
                                  else f"{text} . R(z,w)")
            prefix, matrix, _ = split_prenex(whole)
            for x in small_pool:
                for flag in ("EA", "AE"):
                    direct = lookup(x, flag, whole)
                    extended = extend_prefix(x, prefix, flag, structure)
                    via_ext = evaluator.sat(extended, flag, matrix)
                    check.record(direct == via_ext,
                                 lambda whole=whole, x=x, flag=flag:
                                 f"{whole} flag {flag} on {x}")
    report.checks.append(check)

    return report


def _sentence_pool() -> list[Formula]:
    texts = [
        "A x . E[+{}] y . x = y",
        "E x . A[+{}] y . ~(x = y)",
        "E x . A[+{}] y . E[+{x}] z . (x = y & y = z)",
        "A x . E[+{x}] y . x = y",
        "E x . x = x",
        "A x . A[+{x}] y . (x = y | ~(x = y))",
        "true", "false",
    ]
    return [parse_formula(t) for t in texts]


# ---------------------------------------------------------------------------
# Adequacy: the Tarskian oracle and the team-semantics fragment
# ---------------------------------------------------------------------------

def _fol_pool() -> list[Formula]:
    texts = [
        "true", "P(x)", "x = y", "~R(x,y)", "P(x) & R(x,y)", "P(x) | ~(x = y)",
        "E z . R(x,z)", "E z . (R(x,z) & P(z))", "A z . (R(z,y) | P(z))",
        "A z . ~(z = y)", "E z . A w . R(z,w)", "A z . E w . (z = w)",
    ]
    return [parse_formula(t) for t in texts]


def _dif_pool(beta: str) -> list[Formula]:
    if beta == "A":  # existential-flavoured fragment
        texts = [
            "R(x,y)", "~R(x,y)", "P(x) & R(x,y)", "P(x) | ~P(y)",
            "E[+{}] z . R(x,z)", "E[+{x}] z . R(z,y)", "A[-{}] z . (R(x,z) | z = x)",
            "A[-{}] z . E[+{}] w . R(z,w)", "E[-{x}] z . z = y",
        ]
    else:
        texts = [
            "R(x,y)", "~P(x)", "P(x) | R(x,y)", "P(x) & ~P(y)",
            "A[+{}] z . R(x,z)", "A[+{x}] z . (R(z,y) | z = x)",
            "E[-{}] z . (R(x,z) & z = x)", "E[-{}] z . A[+{z}] w . R(z,w)",
            "A[-{x}] z . ~(z = y)",
        ]
    return [parse_formula(t) for t in texts]


def adequacy_suite(structure: Structure, bounds: Bounds | None = None,
                   options: EvalOptions | None = None) -> SuiteReport:
    bounds = bounds or Bounds()
    options = options or EvalOptions()
    report = SuiteReport("adequacy")
    pool = _pool(structure, bounds)
    evaluator = Evaluator(structure, options)

    check = CheckResult("first-order adequacy vs the Tarskian oracle")
    with _Timer(check):
        for phi in _fol_pool():
            if not support_vars(phi) <= frozenset(bounds.variables):
                continue
            for x in pool:
                oracle_ea = any(all(sat_fol(structure, dict(s), phi) for s in t)
                                for t in x.teams)
                oracle_ae = all(any(sat_fol(structure, dict(s), phi) for s in t)
                                for t in x.teams)
                ok = (evaluator.sat(x, "EA", phi) == oracle_ea
                      and evaluator.sat(x, "AE", phi) == oracle_ae)
                check.record(ok, lambda phi=phi, x=x: f"{phi} on {x}")
    report.checks.append(check)

    check = CheckResult("team-semantics adequacy")
    with _Timer(check):
        for beta, flag, exists_side in (("A", "EA", True), ("E", "AE", False)):
            for phi in _dif_pool(beta):
                if not support_vars(phi) <= frozenset(bounds.variables):
                    continue
                for x in pool:
                    team_verdicts = [sat_dif(structure, t, beta, phi) for t in x.teams]
                    expected = any(team_verdicts) if exists_side else all(team_verdicts)
                    got = evaluator.sat(x, flag, phi)
                    check.record(got == expected,
                                 lambda phi=phi, x=x, flag=flag: f"{phi} flag {flag} on {x}")
    report.checks.append(check)

    check = CheckResult("undetermined pair under team semantics")
    with _Timer(check):
        results = undetermined_pair(structure)
        for name, (got, expected) in results.items():
            check.record(got == expected, lambda name=name: name)
    report.checks.append(check)

    return report


def undetermined_pair(structure: Structure) -> dict[str, tuple[bool, bool]]:
    """The classic pair that team semantics leaves undetermined while the
    alternating semantics decides both.  Values are (got, expected)."""
    phi3p = parse_formula("A[-{}] x . E[+{}] y . x = y")
    phi4p = parse_formula("E[-{}] x . A[+{}] y . ~(x = y)")
    phi3p_all = parse_formula("A[-{}] x . E[-{}] y . x = y")
    phi4p_exs = parse_formula("E[-{}] x . A[-{}] y . ~(x = y)")
    triv = trivial_hyperteam()
    empty_team = ((),)
    ev = Evaluator(structure)
    return {
        "phi3' not true (A-semantics fails)":
            (sat_dif(structure, empty_team, "A", phi3p), False),
        "phi3' not false (E-semantics of its all-bare variant holds)":
            (sat_dif(structure, empty_team, "E", phi3p_all), True),
        "phi4' not false (E-semantics holds)":
            (sat_dif(structure, empty_team, "E", phi4p), True),
        "phi4' not true (A-semantics of its all-bare variant fails)":
            (sat_dif(structure, empty_team, "A", phi4p_exs), False),
        "alternating semantics decides phi3' (false)":
            (ev.sat(triv, "EA", phi3p) or ev.sat(triv, "AE", phi3p), False),
        "alternating semantics decides phi4' (true)":
            (ev.sat(triv, "EA", phi4p) and ev.sat(triv, "AE", phi4p), True),
    }


# ---------------------------------------------------------------------------
# Appendix lemmas
# ---------------------------------------------------------------------------

def appendix_suite(structure: Structure, bounds: Bounds | None = None,
                   max_play_depth: int = 12) -> SuiteReport:
    bounds = bounds or Bounds()
    report = SuiteReport("appendix")
    small = Bounds(2, 2, bounds.variables)
    pool = _pool(structure, small)
    names = frozenset(bounds.variables)

    check = CheckResult("monotonicity of dualisation, extension, partition")
    with _Timer(check):
        fresh = "m"
        w_sets = [frozenset(), frozenset({bounds.variables[0]}), names]
        pairs = [(x1, x2) for x1 in pool for x2 in pool
                 if refines(x1, x2, names)]
        for x1, x2 in pairs:
            check.record(refines(dualize(x2), dualize(x1), names),
                         lambda x1=x1, x2=x2: f"dual not antitone: {x1} vs {x2}")
            for w in w_sets:
                ext1 = extend(x1, fresh, w, structure)
                check.record(
                    _equal_restricted(x1, ext1, names - {fresh}),
                    lambda x1=x1, w=w: f"extension changed the base: {x1} W={sorted(w)}")
                for w2 in w_sets:
                    if not w <= w2 or not w <= names:
                        continue
                    ext2 = extend(x2, fresh, w2, structure)
                    check.record(refines(ext1, ext2, names | {fresh}),
                                 lambda x1=x1, x2=x2, w=w, w2=w2:
                                 f"extension not monotone: {x1} vs {x2}")
            for p1, p2 in bipartitions(x2):
                found = any(refines(q1, p1, names) and refines(q2, p2, names)
                            for q1, q2 in bipartitions(x1))
                check.record(found, lambda x1=x1, x2=x2: f"partition: {x1} vs {x2}")
    report.checks.append(check)

    check = CheckResult("cylindrification via double dualisation")
    with _Timer(check):
        fresh = "m"
        for x in pool:
            cyl = cylindrify(x, fresh, structure)
            simulated = dualize(extend(dualize(x), fresh, names, structure))
            ok = refines(cyl, simulated, names | {fresh}) and \
                refines(simulated, cyl, names | {fresh})
            check.record(ok, lambda x=x: f"cylindrification mismatch on {x}")
    report.checks.append(check)

    check = CheckResult("team partitioning through the dual")
    with _Timer(check):
        for x in pool:
            d = dualize(x)
            team_sets = [set(t) for t in x.teams]
            for p1, p2 in bipartitions(d):
                for y1 in dualize(p1).teams:
                    for y2 in dualize(p2).teams:
                        union = set(y1) | set(y2)
                        check.record(any(t <= union for t in team_sets),
                                     lambda x=x: f"item 1 fails on {x}")
            for t in x.teams:
                for t1, t2 in team_bipartitions(t):
                    s1, s2 = set(t1), set(t2)
                    witness = False
                    for p1, p2 in bipartitions(d):
                        d1, d2 = dualize(p1), dualize(p2)
                        if any(set(y1) <= s1 for y1 in d1.teams) and \
                                any(set(y2) <= s2 for y2 in d2.teams):
                            witness = True
                            break
                    check.record(witness, lambda x=x, t=t: f"item 2 fails on {x} team {t}")
    report.checks.append(check)

    check = CheckResult("dualisation preserves team membership patterns")
    with _Timer(check):
        # The choice-function argument needs an assignment to pick from every
        # team, so the lemma's scope excludes hyperteams containing the empty
        # team (whose dual is empty and loses everything).
        instances = [x for x in _pool(structure, Bounds(3, 2, bounds.variables))
                     if not x.is_null and sum(len(t) for t in x.teams) <= 4]
        for x in instances:
            d = dualize(x)
            universe = sorted({s for t in x.teams for s in t})
            for size in range(len(universe) + 1):
                for psi in combinations(universe, size):
                    psi_set = set(psi)
                    a1 = any(set(t) <= psi_set for t in x.teams)
                    b1 = all(set(t) & psi_set for t in d.teams)
                    check.record(a1 == b1, lambda x=x, psi=psi: f"item 1 on {x} psi {psi}")
                    a1d = any(set(t) <= psi_set for t in d.teams)
                    b1d = all(set(t) & psi_set for t in x.teams)
                    check.record(a1d == b1d, lambda x=x, psi=psi: f"item 1' on {x} psi {psi}")
                    a2 = any(set(t) & psi_set for t in x.teams)
                    b2 = any(set(t) & psi_set for t in d.teams)
                    check.record(a2 == b2, lambda x=x, psi=psi: f"item 2 on {x} psi {psi}")
                    a3 = all(set(t) <= psi_set for t in x.teams)
                    b3 = all(set(t) <= psi_set for t in d.teams)
                    check.record(a3 == b3, lambda x=x, psi=psi: f"item 3 on {x} psi {psi}")
    report.checks.append(check)

    check = CheckResult("extension monotonicity under function environments")
    with _Timer(check):
        var = "m"
        w = frozenset(bounds.variables[:1])
        functions = list(enumerate_uniform_functions(w, names, structure))
        thetas = [FunctionAssignment.of({var: fn}) for fn in functions[:3]]
        for x1, x2 in [(a, b) for a in pool for b in pool if refines(a, b, names)]:
            for theta in thetas:
                e1 = apply_function_assignment(x1, theta, structure)
                e2 = apply_function_assignment(x2, theta, structure)
                check.record(refines(e1, e2, names),
                             lambda x1=x1, x2=x2, theta=theta:
                             f"{theta} on {x1} vs {x2}")
    report.checks.append(check)

    check = CheckResult("skolemisation search coincides with meta truth")
    with _Timer(check):
        meta_texts = [
            "EE[+{}] x . P(x)",
            "AA[+{}] x . P(x)",
            "AA[+{}] x . EE[+{x}] y . x = y",
            "EE[+{x}] y . AA[+{}] x . x = y",
            "AA[+{}] x . EE[+{}] y . x = y",
            "EE[+{}] x . AA[+{x}] y . ~(x = y)",
            "AA[+{}] x . AA[+{x}] y . (x = y | ~P(y))",
            "EE[+{}] x . EE[+{x}] y . (R(x,y) | x = y)",
        ]
        for text in meta_texts:
            phi = parse_formula(text, mode="meta")
            try:
                structure.check_formula(phi)
            except Exception:
                continue
            witness = skolemisation_search(structure, phi)
            truth = sat_meta(structure, EMPTY_FUNCTIONS, trivial_hyperteam(), "EA", phi)
            check.record((witness is not None) == truth,
                         lambda text=text: f"{text}: witness {witness is not None} truth {truth}")
    report.checks.append(check)

    check = CheckResult(f"bucket soundness to depth {max_play_depth}")
    with _Timer(check):
        for text in ["E x . A[+{}] y . E[+{x}] z . (x = y & y = z)",
                     "E x . A[+{}] y . ~(x = y)",
                     "A[+{}] x . E[+{x}] y . x = y",
                     "E[+{}] w . E[+{w}] x . A[+{w}] y . x = y"]:
            phi = parse_formula(text)
            try:
                structure.check_formula(phi)
            except Exception:
                continue
            violations = bucket_soundness_violations(structure, phi, max_play_depth)
            check.record(violations == 0,
                         lambda text=text, violations=violations:
                         f"{text}: {violations} incoherent states")
    report.checks.append(check)

    return report


def _equal_restricted(x1: Hyperteam, x2: Hyperteam, names) -> bool:
    from .hyperteams import restrict
    return restrict(x1, names).teams == restrict(x2, names).teams


def bucket_soundness_violations(structure: Structure, phi: Formula,
                                depth: int) -> int:
    """Explore the bucket-annotated state graph breadth-first to the given
    depth; at every state, any per-bucket choice of compatible functions must
    rebuild exactly the assignment stored in the position."""
    from collections import deque
    from .games import GameState, PHASE_DECISION

    arena = build_arena(structure, phi)
    n = len(arena.prefix)
    initial = GameState(arena.initial(), tuple(() for _ in range(n)), 0)
    seen = {initial: 0}
    queue = deque([initial])
    violations = 0
    while queue:
        state = queue.popleft()
        level = seen[state]
        if not _bucket_state_coherent(structure, arena, state):
            violations += 1
        if level >= depth:
            continue
        position = state.position
        if position.index == arena.matrix_index and position.phase != PHASE_DECISION:
            continue
        for move in arena.moves(position):
            buckets = state.buckets
            stamped = 0
            if move.kind in ("decide", "challenge"):
                i = position.index
                entry = constraint_of(arena.key_vars[i], move.target.sigma,
                                      arena.prefix[i].var)
                updated, cheated = bucket_update(buckets[i], entry)
                buckets = buckets[:i] + (updated,) + buckets[i + 1:]
                if cheated:
                    stamped = arena.priorities[i]
            nxt = GameState(move.target, buckets, stamped)
            if nxt not in seen:
                seen[nxt] = level + 1
                queue.append(nxt)
    return violations


def _bucket_state_coherent(structure: Structure, arena, state) -> bool:
    sigma = dict(state.position.sigma)
    decided = [k for k, step in enumerate(arena.prefix)
               if not arena.vacuous[k] and step.var in sigma]
    spaces = []
    for k in decided:
        keys = all_assignments(arena.key_vars[k], structure)
        recorded = dict(state.buckets[k])
        free_keys = [key for key in keys if key not in recorded]
        tables = []
        for values in product(structure.domain, repeat=len(free_keys)):
            table = dict(recorded)
            table.update(zip(free_keys, values))
            tables.append(table)
        spaces.append(tables)
    for choice in product(*spaces):
        rebuilt: dict[str, str] = {}
        for k, table in zip(decided, choice):
            step = arena.prefix[k]
            key = tuple(sorted((v, rebuilt[v]) for v in arena.key_vars[k]))
            rebuilt[step.var] = table[key]
        for k in decided:
            var = arena.prefix[k].var
            if rebuilt[var] != sigma[var]:
                return False
    return True


# ---------------------------------------------------------------------------
# Engine agreement and reduce soundness
# ---------------------------------------------------------------------------

def engine_agreement_suite(max_quantifiers: int = 3, per_prefix: int = 5,
                           seed: int = 7, max_states: int = 5_000_000,
                           options: EvalOptions | None = None) -> SuiteReport:
    report = SuiteReport("engine-agreement")
    sentences = prenex_sentences(max_quantifiers, per_prefix, seed)
    check = CheckResult("compositional = herbrand-skolem = game winner")
    with _Timer(check):
        for sname, structure in corpus_structures():
            evaluator = Evaluator(structure, options or EvalOptions())
            for phi in sentences:
                try:
                    structure.check_formula(phi)
                except Exception:
                    continue
                compositional = evaluator.sat(trivial_hyperteam(), "EA", phi)
                meta = model_check(structure, phi)
                winner = game_winner(structure, phi, max_states).winner
                ok = compositional == meta == (winner == "Eloise")
                check.record(ok, lambda phi=phi, sname=sname,
                             compositional=compositional, meta=meta, winner=winner:
                             f"{sname}: {phi} -> compositional {compositional}, "
                             f"meta {meta}, game {winner}")
    report.checks.append(check)
    return report


def reduce_soundness_suite(structure: Structure, bounds: Bounds | None = None,
                           options: EvalOptions | None = None) -> SuiteReport:
    bounds = bounds or Bounds()
    options = options or EvalOptions()
    report = SuiteReport("reduce-soundness")
    pool = _pool(structure, bounds)
    evaluator = Evaluator(structure, options)
    formulas = [phi for phi in quantifier_free_pool() + quantified_pool()
                if support_vars(phi) <= frozenset(bounds.variables)]
    check = CheckResult("satisfaction agrees on X and reduce(X)")
    with _Timer(check):
        for phi in formulas:
            for x in pool:
                r = reduce_hyperteam(x)
                for flag in ("EA", "AE"):
                    check.record(
                        evaluator.sat(x, flag, phi) == evaluator.sat(r, flag, phi),
                        lambda phi=phi, x=x, flag=flag: f"{phi} flag {flag} on {x}")
    report.checks.append(check)
    return report
