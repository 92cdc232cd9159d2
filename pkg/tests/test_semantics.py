import pytest

from adif.formulas import Not, parse_formula, to_nnf
from adif.hyperteams import (
    Hyperteam, assignment, parse_hyperteam, team, trivial_hyperteam,
)
from adif.semantics import (
    EvalOptions, Evaluator, FragmentViolation, NotASentenceError,
    SupportViolation, UnboundVariable, check_equivalence, check_implication,
    enumerate_hyperteams, is_true_sentence, sat_adif, sat_dif, sat_fol,
)
from adif.structures import BINARY_EQUALITY as BIN, Structure

MIX = Structure.make(["0", "1"], [("P", 1, [("0",)]),
                                  ("R", 2, [("0", "1"), ("1", "0")])])

PHI3 = parse_formula("A x . E[+{}] y . x = y")
PHI4 = parse_formula("E x . A[+{}] y . ~(x = y)")
PHI5 = parse_formula("A x . E[-{x}] y . x = y")
PHI6 = parse_formula("E x . A[-{x}] y . ~(x = y)")
PHI7 = parse_formula("E x . A[+{}] y . E[+{x}] z . (x = y & y = z)")
TRIVIAL = trivial_hyperteam()


class TestTarskianOracle:
    def test_equality(self):
        assert sat_fol(BIN, assignment({"x": 0, "y": 0}), parse_formula("x = y"))
        assert not sat_fol(BIN, assignment({"x": 0, "y": 1}), parse_formula("x = y"))

    def test_identity_witness(self):
        assert sat_fol(BIN, (), parse_formula("A x . E y . x = y"))

    def test_unbound_variable(self):
        with pytest.raises(UnboundVariable):
            sat_fol(BIN, (), parse_formula("x = x"))

    def test_fragment_required(self):
        with pytest.raises(FragmentViolation):
            sat_fol(BIN, assignment({"y": 0}), parse_formula("A[-{y}] x . x = x"))


class TestGoldenSentences:
    def test_phi4_true_on_trivial(self):
        assert sat_adif(BIN, TRIVIAL, "EA", PHI4)

    def test_phi3_false_on_trivial(self):
        assert not sat_adif(BIN, TRIVIAL, "EA", PHI3)

    def test_phi7_true_on_trivial(self):
        assert sat_adif(BIN, TRIVIAL, "EA", PHI7)

    def test_flag_immaterial_on_trivial(self):
        for phi in (PHI3, PHI4, PHI7):
            assert sat_adif(BIN, TRIVIAL, "EA", phi) == sat_adif(BIN, TRIVIAL, "AE", phi)

    def test_pseudo_sentences_on_trivial(self):
        # on the trivial hyperteam the pseudo sentences behave like phi3/phi4
        assert sat_adif(BIN, TRIVIAL, "EA", PHI6)
        assert not sat_adif(BIN, TRIVIAL, "EA", PHI5)

    def test_pseudo_sentence_sensitivity(self):
        x = parse_hyperteam("{ {z=0} {z=1} }")
        assert sat_adif(BIN, x, "AE", PHI5)
        assert not sat_adif(BIN, x, "EA", PHI6)
        # the dual-flag values, forced by determinacy
        assert not sat_adif(BIN, x, "EA", PHI5)
        assert sat_adif(BIN, x, "AE", PHI6)

    def test_is_true_sentence(self):
        assert not is_true_sentence(BIN, PHI3)
        assert is_true_sentence(BIN, PHI4)
        assert is_true_sentence(BIN, parse_formula("true"))
        with pytest.raises(NotASentenceError):
            is_true_sentence(BIN, parse_formula("P(x)"))

    def test_empty_and_null(self):
        empty = Hyperteam((), frozenset())
        null = Hyperteam(((),), frozenset())
        for phi in (PHI3, PHI4, parse_formula("true"), parse_formula("false")):
            assert not sat_adif(BIN, empty, "EA", phi)
            assert sat_adif(BIN, empty, "AE", phi)
            assert sat_adif(BIN, null, "EA", phi)
            assert not sat_adif(BIN, null, "AE", phi)

    def test_support_violation(self):
        with pytest.raises(SupportViolation):
            sat_adif(BIN, TRIVIAL, "EA", parse_formula("P(x)"))

    def test_reduce_option_changes_nothing(self):
        x = parse_hyperteam("{ {z=0} {z=1} }")
        options = EvalOptions(use_reduce=True)
        assert sat_adif(BIN, x, "AE", PHI5, options)
        assert sat_adif(BIN, TRIVIAL, "EA", PHI7, options)
        assert not sat_adif(BIN, TRIVIAL, "EA", PHI3, options)


class TestTeamSemantics:
    def test_undetermined_sentences(self):
        phi3p = parse_formula("A[-{}] x . E[+{}] y . x = y")
        phi4p = parse_formula("E[-{}] x . A[+{}] y . ~(x = y)")
        empty_asg_team = ((),)
        assert not sat_dif(BIN, empty_asg_team, "A", phi3p)
        assert sat_dif(BIN, empty_asg_team, "E", phi4p)

    def test_vacuous_universal_on_empty_team(self):
        assert sat_dif(MIX, (), "A", parse_formula("P(x)"))
        assert not sat_dif(MIX, (), "E", parse_formula("P(x)"))

    def test_fragment_violations(self):
        with pytest.raises(FragmentViolation):
            sat_dif(BIN, ((),), "A", parse_formula("~(E x . x = x)"))
        with pytest.raises(FragmentViolation):
            # universal must carry the bare -{} constraint under 'A'
            sat_dif(BIN, ((),), "A", parse_formula("A[+{}] x . x = x"))
        with pytest.raises(FragmentViolation):
            sat_dif(BIN, ((),), "E", parse_formula("E[+{}] x . x = x"))
        with pytest.raises(FragmentViolation):
            sat_dif(BIN, ((),), "A", parse_formula("true"))

    def test_team_splitting_disjunction(self):
        # under the 'A' rules a disjunction splits the team
        phi = parse_formula("P(x) | ~P(x)")
        t = team([assignment({"x": 0}), assignment({"x": 1})])
        assert sat_dif(MIX, t, "A", phi)
        assert sat_dif(MIX, t, "E", phi)

    def test_uniform_choice(self):
        # y must be chosen without seeing x: impossible for equality
        phi = parse_formula("E[+{}] y . x = y")
        t = team([assignment({"x": 0}), assignment({"x": 1})])
        assert not sat_dif(BIN, t, "A", phi)
        # with full information the identity function works
        assert sat_dif(BIN, t, "A", parse_formula("E[+{x}] y . x = y"))


class TestEquivalenceChecker:
    def test_conjunction_with_truth(self):
        phi = parse_formula("P(x)")
        verdict = check_equivalence(MIX, parse_formula("P(x) & true"), phi, {"x"})
        assert verdict.equivalent
        assert verdict.checked > 0

    def test_disjunction_commutes(self):
        verdict = check_equivalence(
            MIX, parse_formula("P(x) | R(x,y)"), parse_formula("R(x,y) | P(x)"),
            {"x", "y"}, max_teams=2, max_assignments=2)
        assert verdict.equivalent

    def test_sentence_vs_pseudo_sentence(self):
        verdict = check_equivalence(BIN, PHI3, PHI5, {"z"},
                                    max_teams=2, max_assignments=2)
        assert not verdict.equivalent
        x, flag = verdict.counterexample
        assert "z" in x.variables
        assert "z" in verdict.describe()

    def test_implication(self):
        assert check_implication(MIX, parse_formula("P(x) & R(x,y)"),
                                 parse_formula("P(x)"), {"x", "y"},
                                 max_teams=2, max_assignments=2).equivalent
        assert not check_implication(MIX, parse_formula("P(x)"),
                                     parse_formula("R(x,y)"), {"x", "y"},
                                     max_teams=2, max_assignments=2).equivalent

    def test_support_cover_required(self):
        with pytest.raises(SupportViolation):
            check_equivalence(MIX, parse_formula("P(x)"), parse_formula("P(y)"), {"x"})


class TestFastPath:
    def test_quantifier_free_fast_path_matches_bipartition_rules(self):
        honest = Evaluator(MIX, EvalOptions(fast_path_teams=None))
        shortcut = Evaluator(MIX, EvalOptions(fast_path_teams=0))
        formulas = [parse_formula(t) for t in [
            "P(x) & R(x,y)", "P(x) | ~R(x,y)", "~(P(x) & x = y)",
            "(P(x) | P(y)) & (R(x,y) | x = y)",
        ]]
        count = 0
        for x in enumerate_hyperteams(MIX, {"x", "y"}, 3, 2):
            for phi in formulas:
                for flag in ("EA", "AE"):
                    assert honest.sat(x, flag, phi) == shortcut.sat(x, flag, phi), \
                        f"{phi} flag {flag} on {x}"
                    count += 1
        assert count > 1500

    def test_nnf_preserves_satisfaction(self):
        evaluator = Evaluator(MIX)
        shapes = [Not(parse_formula("P(x) | R(x,y)")),
                  Not(parse_formula("E z . R(x,z)")),
                  Not(Not(parse_formula("P(x) & ~R(x,y)")))]
        for shape in shapes:
            nnf = to_nnf(shape)
            for x in enumerate_hyperteams(MIX, {"x", "y"}, 2, 2):
                for flag in ("EA", "AE"):
                    assert evaluator.sat(x, flag, shape) == evaluator.sat(x, flag, nnf)


def test_enumerate_hyperteams_counts():
    # 4 assignments over two binary variables; teams of size <= 1 are the
    # empty team plus 4 singletons; hyperteams with <= 1 team add the empty
    # hyperteam
    pool = list(enumerate_hyperteams(BIN, {"x", "y"}, 1, 1))
    assert len(pool) == 6
    proper = list(enumerate_hyperteams(BIN, {"x", "y"}, 1, 1,
                                       include_degenerate=False))
    assert len(proper) == 4
