import pytest

from adif.formulas import (
    Constraint, Not, attach_prefix, hs_prefix, parse_formula, split_prenex,
)
from adif.herbrand import (
    CyclicFunctionAssignment, NotMetaPrenex, model_check,
    quantifier_interchange_check, sat_meta, skolemisation_search,
)
from adif.hyperteams import (
    EMPTY_FUNCTIONS, FunctionAssignment, Hyperteam, UniformFunction,
    assignment, dualize, parse_hyperteam, trivial_hyperteam,
)
from adif.semantics import (
    Evaluator, SupportViolation, dual_flag, enumerate_hyperteams, sat_adif,
)
from adif.structures import BINARY_EQUALITY as BIN, Structure
from adif.formulas import NotPrenex, NotASentence

MIX = Structure.make(["0", "1"], [("P", 1, [("0",)]),
                                  ("R", 2, [("0", "1"), ("1", "0")])])
TRIVIAL = trivial_hyperteam()

PHI3 = parse_formula("A x . E[+{}] y . x = y")
PHI4 = parse_formula("E x . A[+{}] y . ~(x = y)")
PHI7 = parse_formula("E x . A[+{}] y . E[+{x}] z . (x = y & y = z)")

IDENTITY_ON_X = UniformFunction.from_table(
    {"x"}, {assignment({"x": 0}): "0", assignment({"x": 1}): "1"})


class TestMetaSatisfaction:
    def test_empty_environment_collapses_to_plain(self):
        formulas = [parse_formula(t) for t in [
            "P(x)", "x = y", "P(x) & R(x,y)", "E z . R(x,z)",
            "A[+{x}] z . (R(z,y) | P(z))",
        ]]
        for x in enumerate_hyperteams(MIX, {"x", "y"}, 2, 2):
            for phi in formulas:
                for flag in ("EA", "AE"):
                    assert sat_meta(MIX, EMPTY_FUNCTIONS, x, flag, phi) == \
                        sat_adif(MIX, x, flag, phi), f"{phi} flag {flag} on {x}"

    def test_hsp_of_three_quantifier_sentence(self):
        prefix, matrix, _ = split_prenex(PHI7)
        meta = attach_prefix(hs_prefix(prefix), matrix)
        assert sat_meta(BIN, EMPTY_FUNCTIONS, TRIVIAL, "EA", meta)

    def test_universal_function_over_truth(self):
        phi = parse_formula("AA[+{}] x . true", mode="meta")
        assert sat_meta(BIN, EMPTY_FUNCTIONS, TRIVIAL, "EA", phi)

    def test_cyclic_environment_rejected(self):
        flip = UniformFunction.from_table(
            {"y"}, {assignment({"y": 0}): "1", assignment({"y": 1}): "0"})
        flop = UniformFunction.from_table(
            {"x"}, {assignment({"x": 0}): "1", assignment({"x": 1}): "0"})
        theta = FunctionAssignment.of({"x": flip, "y": flop})
        with pytest.raises(CyclicFunctionAssignment):
            sat_meta(BIN, theta, TRIVIAL, "EA", parse_formula("x = y"))

    def test_support_condition_net_of_environment(self):
        theta = FunctionAssignment.of({"x": UniformFunction.constant("0")})
        # x is provided by the environment, so the trivial hyperteam suffices
        assert sat_meta(MIX, theta, TRIVIAL, "EA", parse_formula("P(x)"))
        with pytest.raises(SupportViolation):
            sat_meta(MIX, EMPTY_FUNCTIONS, TRIVIAL, "EA", parse_formula("P(x)"))

    def test_environment_filters_at_atoms(self):
        # the sentence-level theta applies at every atom independently
        theta = FunctionAssignment.of({"z": IDENTITY_ON_X})
        x = parse_hyperteam("{ {x=0} {x=1} }")
        assert sat_meta(BIN, theta, x, "EA", parse_formula("x = z"))
        assert not sat_meta(BIN, theta, x, "EA", parse_formula("~(x = z)"))


class TestQuantifierInterchange:
    def test_trivial_exists(self):
        got = quantifier_interchange_check(
            BIN, EMPTY_FUNCTIONS, TRIVIAL, Constraint(True, frozenset()), "x",
            parse_formula("x = x"), "EA", "E")
        assert got == (True, True)

    def test_forall_refuted_by_other_value(self):
        structure = Structure.make(["0", "1"], [("Z", 1, [("0",)])])
        got = quantifier_interchange_check(
            structure, EMPTY_FUNCTIONS, TRIVIAL, Constraint(True, frozenset()), "x",
            parse_formula("Z(x)"), "EA", "A")
        assert got == (False, False)

    def test_components_always_agree(self):
        matrices = [parse_formula(t) for t in ["R(y,x)", "x = y", "P(x) | x = y"]]
        constraints = [Constraint(True, frozenset()), Constraint(True, frozenset({"y"}))]
        count = 0
        for x in enumerate_hyperteams(MIX, {"y"}, 2, 2):
            for matrix in matrices:
                for constraint in constraints:
                    for flag in ("EA", "AE"):
                        for kind in ("E", "A"):
                            plain, meta = quantifier_interchange_check(
                                MIX, EMPTY_FUNCTIONS, x, constraint, "x",
                                matrix, flag, kind)
                            assert plain == meta
                            count += 1
        assert count == 264

    def test_preconditions_enforced(self):
        with pytest.raises(Exception):
            quantifier_interchange_check(
                BIN, EMPTY_FUNCTIONS, TRIVIAL, Constraint(True, frozenset({"x"})),
                "x", parse_formula("x = x"))


class TestHerbrandSkolemTheorem:
    def test_prefix_reversal_preserves_satisfaction(self):
        texts = [
            "E[+{}] x . A[+{}] y . ~(x = y)",
            "A[+{}] x . E[+{x}] y . x = y",
            "A[+{}] x . E[+{}] y . x = y",
            "E[+{}] x . A[+{x}] y . R(x,y)",
            "A[+{}] x . E[+{x}] y . (R(x,y) | x = y)",
        ]
        for text in texts:
            phi = parse_formula(text)
            try:
                MIX.check_formula(phi)
            except Exception:
                continue
            prefix, matrix, _ = split_prenex(phi)
            meta = attach_prefix(hs_prefix(prefix), matrix)
            for x in enumerate_hyperteams(MIX, set(), 1, 1):
                for flag in ("EA", "AE"):
                    lhs = sat_meta(MIX, EMPTY_FUNCTIONS, x, flag, phi)
                    rhs = sat_meta(MIX, EMPTY_FUNCTIONS, x, flag, meta)
                    assert lhs == rhs, f"{text} flag {flag} on {x}"

    def test_open_formula_with_environment(self):
        # one free variable supplied by the hyperteam, one function binding
        # disjoint from the prefix constraint sets
        phi = parse_formula("A[+{}] x . E[+{x}] y . (x = y | R(y,w))")
        prefix, matrix, _ = split_prenex(phi)
        meta = attach_prefix(hs_prefix(prefix), matrix)
        theta = FunctionAssignment.of({"q": UniformFunction.constant("0")})
        for x in enumerate_hyperteams(MIX, {"w"}, 2, 2):
            for flag in ("EA", "AE"):
                lhs = sat_meta(MIX, theta, x, flag, phi)
                rhs = sat_meta(MIX, theta, x, flag, meta)
                assert lhs == rhs, f"flag {flag} on {x}"


class TestModelCheck:
    def test_golden_sentences(self):
        assert model_check(BIN, PHI4)
        assert not model_check(BIN, PHI3)
        assert model_check(BIN, PHI7)

    def test_strategies_agree(self):
        for phi in (PHI3, PHI4, PHI7,
                    parse_formula("A x . true"),
                    parse_formula("E x . A[+{x}] y . R(x,y)")):
            try:
                BIN.check_formula(phi)
                structure = BIN
            except Exception:
                structure = MIX
            assert model_check(structure, phi) == \
                model_check(structure, phi, strategy="materialize")

    def test_rejects_non_prenex(self):
        with pytest.raises(NotPrenex):
            model_check(BIN, parse_formula("E x . (x = x & A y . y = y)"))

    def test_rejects_open_formula(self):
        with pytest.raises(NotASentence):
            model_check(MIX, parse_formula("E x . R(x,y)"))

    def test_matches_compositional_truth(self):
        from adif.semantics import is_true_sentence
        for text in ["E x . A[+{}] y . (x = y | ~(x = y))",
                     "A x . E[+{}] y . ~(x = y)",
                     "E x . E[+{x}] y . x = y"]:
            phi = parse_formula(text)
            assert model_check(BIN, phi) == is_true_sentence(BIN, phi)


class TestSkolemisationSearch:
    def test_witness_for_reversed_three_quantifier_sentence(self):
        prefix, matrix, _ = split_prenex(PHI7)
        meta = attach_prefix(hs_prefix(prefix), matrix)
        witness = skolemisation_search(BIN, meta)
        assert witness is not None
        # the innermost existential choice for z must be the identity on x
        z_table = witness.tables["z"]
        assert list(z_table.values()) == [IDENTITY_ON_X]
        dump = witness.describe()
        assert "F_z({x=0}) = 0" in dump and "F_z({x=1}) = 1" in dump

    def test_no_witness_for_false_sentence(self):
        prefix, matrix, _ = split_prenex(PHI3)
        meta = attach_prefix(hs_prefix(prefix), matrix)
        assert skolemisation_search(BIN, meta) is None

    def test_all_universal_prefix(self):
        phi = parse_formula("AA[+{}] x . x = x", mode="meta")
        witness = skolemisation_search(BIN, phi)
        assert witness is not None and witness.tables == {}
        refuted = parse_formula("AA[+{}] x . AA[+{}] y . x = y", mode="meta")
        assert skolemisation_search(BIN, refuted) is None

    def test_requires_meta_prenex(self):
        with pytest.raises(NotMetaPrenex):
            skolemisation_search(BIN, PHI4)

    def test_existence_tracks_meta_truth(self):
        texts = [
            "AA[+{}] x . EE[+{x}] y . x = y",
            "EE[+{}] y . AA[+{}] x . x = y",
            "AA[+{}] x . EE[+{}] y . x = y",
        ]
        for text in texts:
            phi = parse_formula(text, mode="meta")
            witness = skolemisation_search(BIN, phi)
            truth = sat_meta(BIN, EMPTY_FUNCTIONS, TRIVIAL, "EA", phi)
            assert (witness is not None) == truth, text


class TestGeneralizedFundamentals:
    def test_empty_and_null_with_environment(self):
        theta = FunctionAssignment.of({"z": UniformFunction.constant("1")})
        empty = Hyperteam((), frozenset({"x"}))
        null = Hyperteam(((),), frozenset({"x"}))
        for phi in (parse_formula("x = z"), parse_formula("true"),
                    parse_formula("E w . w = z")):
            assert not sat_meta(BIN, theta, empty, "EA", phi)
            assert sat_meta(BIN, theta, empty, "AE", phi)
            assert sat_meta(BIN, theta, null, "EA", phi)
            assert not sat_meta(BIN, theta, null, "AE", phi)

    def test_refinement_and_double_dualisation_with_environment(self):
        from adif.hyperteams import refines
        theta = FunctionAssignment.of({"z": IDENTITY_ON_X})
        formulas = [parse_formula("x = z"), parse_formula("R(x,z) | x = z"),
                    parse_formula("E w . (w = z & x = x)")]
        pool = list(enumerate_hyperteams(MIX, {"x"}, 2, 2))
        for phi in formulas:
            for x in pool:
                d = dualize(x)
                dd = dualize(d)
                for flag in ("EA", "AE"):
                    v = sat_meta(MIX, theta, x, flag, phi)
                    assert sat_meta(MIX, theta, d, dual_flag(flag), phi) == v
                    assert sat_meta(MIX, theta, dd, flag, phi) == v
            for x1 in pool:
                for x2 in pool:
                    if not refines(x1, x2, {"x"}):
                        continue
                    if sat_meta(MIX, theta, x1, "EA", phi):
                        assert sat_meta(MIX, theta, x2, "EA", phi)
                    if sat_meta(MIX, theta, x2, "AE", phi):
                        assert sat_meta(MIX, theta, x1, "AE", phi)
