import pytest
from hypothesis import given, settings, strategies as st

from adif.formulas import (
    And, Atom, Constraint, Eq, Exists, FalseF, Forall, Formula, MetaExists,
    MetaForall, Not, Or, ParseError, PrefixViolation, TrueF, VarSet,
    attach_prefix, free_vars, hs_prefix, is_acyclic, is_fol,
    is_quantifier_free, parse_formula, prefix_subformulae, print_formula,
    split_prenex, support_vars, to_nnf, transitive_closure,
)


class TestParser:
    def test_defaulted_quantifiers_desugar(self):
        phi = parse_formula("E x . A[+{}] y . ~(x = y)")
        assert isinstance(phi, Exists)
        assert phi.constraint == Constraint(True, frozenset())
        inner = phi.body
        assert isinstance(inner, Forall)
        assert inner.constraint == Constraint(True, frozenset())
        assert inner.body == Not(Eq("x", "y"))

    def test_constants(self):
        assert parse_formula("true") == TrueF()
        assert parse_formula("false") == FalseF()

    def test_negative_constraint(self):
        phi = parse_formula("A[-{x}] y . R(x,y)")
        assert phi == Forall(Constraint(False, frozenset({"x"})), "y",
                             Atom("R", ("x", "y")))

    def test_default_uses_support_of_body(self):
        phi = parse_formula("E x . A y . R(x,y)")
        assert phi.constraint.variables == frozenset()
        assert phi.body.constraint.variables == frozenset({"x"})

    def test_precedence(self):
        phi = parse_formula("~P(x) & Q(x) | R(x,x)")
        assert isinstance(phi, Or)
        assert isinstance(phi.left, And)
        assert phi.left.left == Not(Atom("P", ("x",)))

    def test_quantifier_extends_right(self):
        phi = parse_formula("E x . P(x) & Q(x)")
        assert isinstance(phi, Exists)
        assert isinstance(phi.body, And)

    def test_shadowing_rejected(self):
        with pytest.raises(ParseError):
            parse_formula("E x . E x . P(x)")

    def test_sibling_rebinding_allowed(self):
        phi = parse_formula("(E x . P(x)) & (E x . Q(x))")
        assert isinstance(phi, And)

    def test_meta_quantifiers_need_meta_mode(self):
        with pytest.raises(ParseError):
            parse_formula("EE[+{}] x . P(x)")
        phi = parse_formula("EE[+{}] x . P(x)", mode="meta")
        assert isinstance(phi, MetaExists)

    def test_syntax_error_reports_position(self):
        with pytest.raises(ParseError) as err:
            parse_formula("E x . (P(x)")
        assert err.value.line == 1

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_formula("P(x) Q(x)")


def _variables():
    return st.sampled_from(["x", "y", "z"])


def _formulas(max_depth=4):
    atoms = st.one_of(
        st.just(TrueF()),
        st.just(FalseF()),
        st.builds(Atom, st.just("P"), st.tuples(_variables())),
        st.builds(Atom, st.just("R"), st.tuples(_variables(), _variables())),
        st.builds(Eq, _variables(), _variables()),
    )

    def extend(children):
        constraint = st.builds(
            Constraint, st.booleans(),
            st.frozensets(_variables(), max_size=2))

        def quantifier(node):
            def build(c, v, body):
                if v in c.variables:
                    c = Constraint(c.positive, c.variables - {v})
                return node(c, v, body)
            return st.builds(build, constraint, st.sampled_from(["u", "v", "w"]),
                             children)

        return st.one_of(
            st.builds(Not, children),
            st.builds(And, children, children),
            st.builds(Or, children, children),
            quantifier(Exists),
            quantifier(Forall),
        )

    return st.recursive(atoms, extend, max_leaves=max_depth)


class TestPrinting:
    @given(_formulas())
    @settings(max_examples=300)
    def test_round_trip(self, phi: Formula):
        # shadowing can occur in generated nesting; printer output must still
        # round-trip whenever the parser accepts it
        text = print_formula(phi)
        try:
            again = parse_formula(text)
        except ParseError:
            return
        assert again == phi, f"{text} reparsed differently"

    def test_meta_round_trip(self):
        text = "EE[+{x}] z . AA[+{}] y . EE[+{}] x . (x = y & y = z)"
        phi = parse_formula(text, mode="meta")
        assert parse_formula(print_formula(phi), mode="meta") == phi


class TestVariableAnalyses:
    def test_pseudo_sentence_support_empty(self):
        phi = parse_formula("A[+{}] x . E[+{z}] y . x = y")
        assert support_vars(phi) == frozenset()
        assert free_vars(phi) == VarSet.finite({"z"})

    def test_support_union_of_atoms(self):
        phi = parse_formula("R(x,y) & S(y,z)")
        assert support_vars(phi) == frozenset({"x", "y", "z"})
        assert free_vars(phi) == VarSet.finite({"x", "y", "z"})

    def test_constants_have_no_support(self):
        assert support_vars(TrueF()) == frozenset()

    def test_cofinite_free_set(self):
        phi = parse_formula("A x . E[-{x}] y . x = y")
        fv = free_vars(phi)
        assert fv.cofinite and fv.names == frozenset({"x"})
        assert "z" in fv and "x" not in fv

    def test_atom_free(self):
        assert free_vars(parse_formula("P(x)")) == VarSet.finite({"x"})

    def test_support_subset_of_free(self):
        for text in ["A x . E[+{z}] y . x = y", "P(x) | E[-{y}] w . R(w,x)",
                     "E x . A[+{}] y . ~(x = y)"]:
            phi = parse_formula(text)
            sup, fv = support_vars(phi), free_vars(phi)
            assert all(v in fv for v in sup)

    def test_fol_fragment_support_equals_free(self):
        for text in ["A x . E y . R(x,y)", "E z . (P(z) & R(z,x))"]:
            phi = parse_formula(text)
            assert is_fol(phi)
            assert free_vars(phi) == VarSet.finite(support_vars(phi))

    def test_meta_free_variables_track_dependencies(self):
        # the function for z depends on x; x stays free through the meta
        # binder because z is used in an atom
        phi = parse_formula("EE[+{x}] z . P(z)", mode="meta")
        assert free_vars(phi) == VarSet.finite({"x"})
        # once x is itself meta-bound with no uses, nothing stays free
        whole = parse_formula("EE[+{x}] z . AA[+{}] y . EE[+{}] x . (x = y & y = z)",
                              mode="meta")
        assert free_vars(whole).is_empty()


class TestDependencyContexts:
    def test_two_step_chase(self):
        context = {"y": VarSet.finite({"x"}), "z": VarSet.finite({"y"})}
        closure = transitive_closure(context)
        assert closure["z"] == VarSet.finite({"x", "y"})
        assert closure["y"] == VarSet.finite({"x"})
        assert is_acyclic(context)

    def test_self_loop_cyclic(self):
        assert not is_acyclic({"x": VarSet.finite({"x"})})

    def test_empty_context(self):
        assert transitive_closure({}) == {}
        assert is_acyclic({})

    def test_cycle_through_chain(self):
        context = {"x": VarSet.finite({"y"}), "y": VarSet.finite({"x"})}
        assert not is_acyclic(context)

    def test_cofinite_dependency(self):
        context = {"y": VarSet.co_finite({"y"})}
        assert is_acyclic(context)
        assert not is_acyclic({"y": VarSet.co_finite({"x"})})


class TestNnf:
    def test_de_morgan(self):
        phi = parse_formula("~(P(x) | Q(x))")
        assert to_nnf(phi) == parse_formula("~P(x) & ~Q(x)")

    def test_negation_through_quantifier(self):
        phi = parse_formula("~(E[-{y}] x . P(x))")
        nnf = to_nnf(phi)
        assert isinstance(nnf, Forall)
        assert nnf.constraint == Constraint(False, frozenset({"y"}))
        assert nnf.body == Not(Atom("P", ("x",)))

    def test_double_negation(self):
        assert to_nnf(parse_formula("~~R(x,x)")) == Atom("R", ("x", "x"))

    @given(_formulas())
    @settings(max_examples=200)
    def test_nnf_shape_and_analyses(self, phi: Formula):
        nnf = to_nnf(phi)
        def check(f):
            if isinstance(f, Not):
                assert isinstance(f.body, (Atom, Eq))
            elif isinstance(f, (And, Or)):
                check(f.left), check(f.right)
            elif isinstance(f, (Exists, Forall)):
                check(f.body)
        check(nnf)
        assert support_vars(nnf) == support_vars(phi)
        assert free_vars(nnf) == free_vars(phi)


class TestPrefixes:
    def test_split(self):
        phi = parse_formula("E x . A[+{}] y . E[+{x}] z . (x = y & y = z)")
        prefix, matrix, qf = split_prenex(phi)
        assert len(prefix) == 3
        assert qf and matrix == parse_formula("x = y & y = z")

    def test_split_on_matrix_only(self):
        prefix, matrix, qf = split_prenex(parse_formula("R(x,x)"))
        assert prefix == () and qf

    def test_non_quantifier_free_matrix_flagged(self):
        phi = parse_formula("E x . (P(x) | A y . R(x,y))")
        prefix, matrix, qf = split_prenex(phi)
        assert len(prefix) == 1 and not qf

    def test_requantification_rejected(self):
        phi = Exists(Constraint(True, frozenset()), "x",
                     Exists(Constraint(True, frozenset()), "x", Atom("P", ("x",))))
        with pytest.raises(PrefixViolation):
            split_prenex(phi)

    def test_own_constraint_rejected(self):
        phi = Exists(Constraint(True, frozenset({"x"})), "x", Atom("P", ("x",)))
        with pytest.raises(PrefixViolation):
            split_prenex(phi)

    def test_scope_constraint_rejected(self):
        phi = parse_formula("E[+{y}] x . E[+{}] y . R(x,y)")
        with pytest.raises(PrefixViolation):
            split_prenex(phi)

    def test_negative_constraint_scope(self):
        # y in the scope of E[-{}] x has y inside the co-finite denotation
        phi = parse_formula("E[-{}] x . E[+{}] y . R(x,y)")
        with pytest.raises(PrefixViolation):
            split_prenex(phi)
        # but quantifying only variables inside W is fine
        split_prenex(parse_formula("E[-{y}] x . E[+{}] y . R(x,y)"))

    def test_hs_prefix_reverses_and_converts(self):
        phi = parse_formula("E x . A[+{}] y . E[+{x}] z . (x = y & y = z)")
        prefix, _, _ = split_prenex(phi)
        meta = hs_prefix(prefix)
        assert [s.kind for s in meta] == ["EE", "AA", "EE"]
        assert [s.var for s in meta] == ["z", "y", "x"]
        assert meta[0].constraint == Constraint(True, frozenset({"x"}))
        assert meta[1].constraint == Constraint(True, frozenset())

    def test_hs_prefix_empty_and_single(self):
        assert hs_prefix(()) == ()
        prefix, _, _ = split_prenex(parse_formula("A[-{x}] y . P(y)"))
        meta = hs_prefix(prefix)
        assert [s.kind for s in meta] == ["AA"]
        assert meta[0].constraint == Constraint(False, frozenset({"x"}))

    def test_hs_prefix_rejects_meta(self):
        prefix, _, _ = split_prenex(parse_formula("EE[+{}] x . P(x)", mode="meta"))
        with pytest.raises(PrefixViolation):
            hs_prefix(prefix)

    def test_hs_prefix_round_trip_through_attach(self):
        phi = parse_formula("E x . A[+{}] y . x = y")
        prefix, matrix, _ = split_prenex(phi)
        meta = attach_prefix(hs_prefix(prefix), matrix)
        again, matrix2, _ = split_prenex(meta)
        assert matrix2 == matrix and len(again) == 2

    def test_prefix_subformulae_chain(self):
        phi4 = parse_formula("E x . A[+{}] y . ~(x = y)")
        chain = prefix_subformulae(phi4)
        assert len(chain) == 3
        assert chain[0] == phi4
        assert chain[2] == parse_formula("~(x = y)")

    def test_prefix_subformulae_matrix_only(self):
        psi = parse_formula("P(x)")
        assert prefix_subformulae(psi) == [psi]

    def test_prefix_subformulae_length_four(self):
        phi7 = parse_formula("E x . A[+{}] y . E[+{x}] z . (x = y & y = z)")
        assert len(prefix_subformulae(phi7)) == 4


class TestVarSet:
    def test_operations_closed(self):
        fin = VarSet.finite({"x", "y"})
        cof = VarSet.co_finite({"y", "z"})
        assert fin.union(cof) == VarSet.co_finite({"z"})
        assert fin.intersect(cof) == VarSet.finite({"x"})
        assert cof.union(VarSet.co_finite({"y", "w"})) == VarSet.co_finite({"y"})
        assert cof.intersect(VarSet.co_finite({"w"})) == VarSet.co_finite({"w", "y", "z"})
        assert cof.remove("q") == VarSet.co_finite({"q", "y", "z"})

    def test_materialize(self):
        assert VarSet.co_finite({"x"}).materialize({"x", "y", "z"}) == {"y", "z"}
        assert VarSet.finite({"x"}).materialize({"x", "y"}) == {"x"}

    def test_membership(self):
        assert "a" in VarSet.co_finite({"b"})
        assert "b" not in VarSet.co_finite({"b"})
