import random

import pytest
from hypothesis import given, strategies as st

from depchar.logic import TGD, FULL_TGD, canonicalize_dependency, classify, variable_budget
from depchar.model import Schema
from depchar.syntax import (ParseError, format_canonical, format_database, format_dependencies, format_dependency,
                            parse_database, parse_dependencies, parse_dependency, parse_schema)

from helpers import db, random_basic


def test_grammar_examples():
    d = parse_dependency("R(x,y), R(y,z) -> R(x,z).")
    assert classify(d) == FULL_TGD and variable_budget(d) == (3, 0)
    d = parse_dependency("R(x,y) -> exists z: R(y,z).")
    assert classify(d) == TGD and variable_budget(d) == (2, 1)


def test_unsafe_equality_is_reported_with_position():
    with pytest.raises(ParseError) as e:
        parse_dependency("R(x,y) -> w = y.")
    assert "w" in str(e.value) and str(e.value).startswith("1:")


def test_syntax_errors_carry_line_and_column():
    with pytest.raises(ParseError) as e:
        parse_dependencies("R(x,y) -> R(y,x).\nR(x,y) -> R(y x).\n")
    assert (e.value.line, e.value.col) == (2, 15)
    assert str(e.value) == "2:15: expected ')', found 'x'"


def test_arity_mismatch_against_declared_schema():
    with pytest.raises(ParseError):
        parse_dependencies("schema R/2.\nR(x) -> false.\n")


def test_comments_disjunctions_and_false():
    schema, deps = parse_dependencies("# a comment\nR(x,y) -> x = y | R(y,x). # trailing\n-> false.\n")
    assert schema == Schema.of(R=2)
    assert len(deps) == 2
    assert format_dependency(deps[1]) == "-> false."


def test_database_text_round_trip_with_padding():
    d = parse_database("schema R/2 P/1.\ndomain a b c.\nR(a,b).\nP(c).\n")
    assert d.domain == {"a", "b", "c"}
    assert parse_database(format_database(d)) == d


def test_database_rejects_constants_outside_declared_domain():
    with pytest.raises(ParseError):
        parse_database("domain a.\nR(a,b).\n")


def test_parse_schema_forms():
    assert parse_schema("R/2 P/1") == parse_schema("schema P/1 R/2.") == Schema.of(R=2, P=1)


@given(st.integers(0, 10 ** 6))
def test_print_parse_round_trip(seed):
    rng = random.Random(seed)
    s = Schema.of(R=2, P=1)
    dep = random_basic(rng, s, 3, 1)
    again = parse_dependency(format_dependency(dep))
    assert canonicalize_dependency(again) == canonicalize_dependency(dep)
    text = format_canonical(dep)
    assert format_canonical(parse_dependency(text)) == text


def test_dependency_file_round_trip():
    schema, deps = parse_dependencies("schema R/2 P/1.\nR(x,y) -> P(x).\nP(x), P(y) -> x = y.\n")
    assert parse_dependencies(format_dependencies(schema, deps)) == (schema, deps)
