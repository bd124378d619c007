import pytest

from depchar.algebra import enumerate_databases, enumerate_induced_subdatabases
from depchar.diagrams import (DiagramError, Pattern, diagram, format_diagram, holds_in, negate_to_dd, negate_to_edd,
                              relative_diagram, to_formula)
from depchar.logic import CONTRADICTION, classify, satisfies
from depchar.model import Fact, Schema, are_isomorphic
from depchar.properties import one_critical_database
from depchar.syntax import format_dependency

from helpers import db

R2 = Schema.of(R=2)


def test_plain_diagram_examples():
    s = diagram(db(R2, [("R", "a", "b")]))
    assert s.positive == {Fact("R", ("a", "b"))}
    assert s.negated_atoms == {Fact("R", ("a", "a")), Fact("R", ("b", "a")), Fact("R", ("b", "b"))}
    assert s.inequalities == {frozenset({"a", "b"})}
    s = diagram(db(R2, [("R", "a", "a")]))
    assert not s.negated_atoms and not s.inequalities
    crit = diagram(one_critical_database(Schema.of(R=2, P=1)))
    assert crit.positive == {Fact("R", ("c", "c")), Fact("P", ("c",))}
    assert not crit.negated_atoms and not crit.inequalities


def test_diagram_of_a_fact_free_database_is_an_error():
    with pytest.raises(DiagramError):
        diagram(db(R2, [], {"a"}))


def test_relative_diagram_examples():
    loop = db(R2, [("R", "a", "a")])
    assert relative_diagram(loop, loop, 0).forbidden_patterns == frozenset()
    empty = db(R2, [], set())
    s = relative_diagram(empty, db(R2, [("R", "b", "b")]), 0)
    assert not s.positive and not s.inequalities and not s.forbidden_patterns
    s = relative_diagram(db(R2, [], {"a"}), db(R2, [("R", "b", "b")], {"a", "b"}), 0)
    assert Pattern((), frozenset({Fact("R", ("a", "a"))})) in s.forbidden_patterns


def test_relative_diagram_needs_an_induced_subdatabase():
    with pytest.raises(DiagramError):
        relative_diagram(db(R2, [], {"a", "b"}), db(R2, [("R", "a", "b")]), 0)


def test_holds_in_examples():
    phi = to_formula(diagram(db(R2, [("R", "a", "b")])))
    assert holds_in(phi, db(R2, [("R", "u", "v")]))
    assert not holds_in(phi, db(R2, [("R", "u", "u")]))


def test_negate_to_dd_example():
    dd = negate_to_dd(to_formula(diagram(db(R2, [("R", "a", "b")]))))
    assert format_dependency(dd) == "R(x_a,x_b) -> x_a = x_b | R(x_a,x_a) | R(x_b,x_a) | R(x_b,x_b)."
    with pytest.raises(DiagramError):
        negate_to_dd(to_formula(diagram(one_critical_database(R2))))


def test_negated_dd_fails_exactly_on_databases_with_an_induced_copy():
    sources = [d for d in enumerate_databases(R2, 2) if d.facts and d.active_domain == d.domain]
    hosts = list(enumerate_databases(R2, 2, padded=True))
    for src in sources:
        phi = to_formula(diagram(src))
        if not diagram(src).negated_atoms and len(src.domain) == 1:
            continue
        dd = negate_to_dd(phi)
        for h in hosts:
            has_copy = any(len(e.domain) == len(src.domain) and are_isomorphic(e, src)
                           for e in enumerate_induced_subdatabases(h, len(src.domain)))
            assert satisfies(h, dd) == (not has_copy)


def test_negate_to_edd_examples():
    s = relative_diagram(db(R2, [], set()), one_critical_database(R2), 0)
    assert classify(negate_to_edd(to_formula(s), 0, 0)) == CONTRADICTION
    loop = db(R2, [("R", "a", "a")])
    edd = negate_to_edd(to_formula(relative_diagram(loop, loop, 0)))
    assert format_dependency(edd) == "R(x_a,x_a) -> false."


def test_negate_to_edd_requires_every_element_active():
    s = relative_diagram(db(R2, [], {"a"}), db(R2, [("R", "b", "b")], {"a", "b"}), 0)
    with pytest.raises(DiagramError):
        negate_to_edd(to_formula(s), 1, 0)


def test_negate_to_edd_respects_budgets():
    e = db(R2, [("R", "a", "b")])
    s = relative_diagram(e, e, 1, prune=True)
    with pytest.raises(DiagramError):
        negate_to_edd(to_formula(s), 1, 1)
    with pytest.raises(DiagramError):
        negate_to_edd(to_formula(s), 2, 0)


@pytest.mark.parametrize("level", [0, 1])
def test_relative_diagram_holds_in_its_host_and_its_negation_is_exact(level):
    hosts = list(enumerate_databases(R2, 2, padded=True))
    for host in hosts:
        for e in enumerate_induced_subdatabases(host, 2):
            if e.active_domain != e.domain:
                continue
            for prune in (False, True):
                s = relative_diagram(e, host, level, prune=prune)
                phi = to_formula(s)
                assert holds_in(phi, host)
                edd = negate_to_edd(phi)
                for other in hosts:
                    assert satisfies(other, edd) == (not holds_in(phi, other))


def test_pruning_keeps_the_meaning():
    host = db(R2, [("R", "a", "b"), ("R", "b", "c")])
    e = db(R2, [("R", "a", "b")])
    full = to_formula(relative_diagram(e, host, 1))
    pruned = to_formula(relative_diagram(e, host, 1, prune=True))
    for d in enumerate_databases(R2, 3, padded=True):
        assert holds_in(full, d) == holds_in(pruned, d)


def test_format_diagram():
    s = diagram(db(R2, [("R", "a", "b")]))
    assert format_diagram(s) == "R(a,b), a != b, ~R(a,a), ~R(b,a), ~R(b,b)."
    assert format_diagram(s, to_formula(s)).startswith("R(x_a,x_b), x_a != x_b")
