import pytest

from adif.formulas import parse_formula
from adif.structures import (
    BINARY_EQUALITY, Structure, StructureError, parse_structure,
)


def test_domain_only_gives_pure_equality():
    structure = parse_structure("domain 0 1\n")
    assert structure.domain == ("0", "1")
    assert structure.holds("=", ("0", "0"))
    assert not structure.holds("=", ("0", "1"))
    assert structure == BINARY_EQUALITY


def test_unary_relation():
    structure = parse_structure("domain 0 1\nrelation P/1 { (0) }\n")
    assert structure.holds("P", ("0",))
    assert not structure.holds("P", ("1",))


def test_binary_relation_and_comments():
    text = """
    # a structure with a symmetric relation
    domain a b c
    relation R/2 { (a,b) (b,a) }
    """
    structure = parse_structure(text)
    assert structure.holds("R", ("a", "b"))
    assert not structure.holds("R", ("a", "c"))


def test_wrong_arity_tuple_rejected():
    with pytest.raises(StructureError):
        parse_structure("domain 0 1\nrelation P/1 { (0,1) }\n")


def test_empty_domain_rejected():
    with pytest.raises(StructureError):
        Structure.make([])
    with pytest.raises(StructureError):
        parse_structure("relation P/1 { (0) }\n")


def test_duplicate_domain_value_rejected():
    with pytest.raises(StructureError):
        Structure.make(["0", "0"])


def test_value_outside_domain_rejected():
    with pytest.raises(StructureError):
        parse_structure("domain 0 1\nrelation P/1 { (2) }\n")


def test_unparseable_line():
    with pytest.raises(StructureError):
        parse_structure("domain 0 1\nrelation P { (0) }\n")


def test_formula_arity_check():
    structure = parse_structure("domain 0 1\nrelation P/1 { (0) }\n")
    structure.check_formula(parse_formula("P(x)"))
    with pytest.raises(StructureError):
        structure.check_formula(parse_formula("P(x,y)"))
    with pytest.raises(StructureError):
        structure.check_formula(parse_formula("Q(x)"))


def test_unknown_relation_at_evaluation():
    with pytest.raises(StructureError):
        BINARY_EQUALITY.holds("P", ("0",))
