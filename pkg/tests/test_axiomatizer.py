import random

import pytest

from depchar.algebra import enumerate_databases
from depchar.axiomatizer import (DISAGREE, EXACT, CapExceeded, Elimination, EliminationFailure, PreconditionFailed,
                                 axiomatize, compute_sigma_vee, eliminate_disjunction, enumerate_dds, enumerate_edds,
                                 extract_axioms, is_dd_shaped, member_masks, negated_diagram, semantic_dedup,
                                 sigma_vee_core, valid_on)
from depchar.bounded import space_for
from depchar.logic import (CONTRADICTION, Edd, ExistsConj, Equality, canonical_key, canonicalize_dependency,
                           classify, satisfies, satisfies_all, variable_budget, vars_of)
from depchar.model import Schema, are_isomorphic
from depchar.properties import Extensional, Intensional, models_at_bound, one_critical_database
from depchar.syntax import format_dependency, parse_dependency as P

from helpers import db

R2 = Schema.of(R=2)
RP = Schema.of(R=2, P=1)
P1 = Schema.of(P=1)
TRANS = P("R(x,y), R(y,z) -> R(x,z).")
SYM = P("R(x,y) -> R(y,x).")
FUNC = P("R(x,y), R(x,z) -> y = z.")


def test_edd_space_for_one_unary_symbol():
    # bodies {} and {P(x)}; the only non-tautologies are "-> false" and "P(x) -> false"
    got = sorted(format_dependency(d) for d in enumerate_edds(P1, 1, 0).members)
    assert got == ["-> false.", "P(x0) -> false."]


def test_edd_members_respect_budgets_and_are_distinct():
    cls = enumerate_edds(P1, 2, 1)
    keys = set()
    for d in cls.members:
        n, m = variable_budget(d)
        assert n <= 2 and m <= 1
        e = d if isinstance(d, Edd) else None
        if e is not None:
            for dj in e.disjuncts:
                if isinstance(dj, ExistsConj):
                    assert len(vars_of(dj.atoms)) <= 3
        keys.add(canonical_key(d))
    assert len(keys) == len(cls.members)


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        enumerate_edds(R2, 3, 1, cap=1000)


def test_dd_shaped_edds_equal_the_independent_dd_enumeration():
    edds = {canonical_key(d) for d in enumerate_edds(R2, 2, 0, cap=10 ** 7).members if is_dd_shaped(d)}
    dds = {canonical_key(d) for d in enumerate_dds(R2, 2)}
    assert edds == dds


def test_sigma_vee_examples():
    crit = Extensional(R2, [one_critical_database(R2)], 1)
    sv = compute_sigma_vee(crit, 2, 0, 1, cap=10 ** 7)
    keys = {canonical_key(d) for d in sv.members}
    assert canonical_key(P("R(x,y) -> x = y.")) in keys
    everything = compute_sigma_vee(Intensional(R2, []), 2, 0, 2, cap=10 ** 7)
    assert all(classify(d) != CONTRADICTION for d in everything.members)
    rng = random.Random(2)
    sample = [d for d in enumerate_databases(R2, 3, padded=True)]
    for d in rng.sample(sample, 20):
        assert all(satisfies(d, x) for x in everything.members)


def test_sigma_vee_grows_when_the_collection_shrinks():
    big = compute_sigma_vee(Intensional(R2, [FUNC]), 2, 0, 2, cap=10 ** 7)
    small = compute_sigma_vee(Intensional(R2, [FUNC, SYM]), 2, 0, 2, cap=10 ** 7)
    assert {canonical_key(d) for d in big.members} <= {canonical_key(d) for d in small.members}


def test_eliminate_disjunction_picks_the_symmetric_disjunct():
    c = Intensional(R2, [SYM])
    r = eliminate_disjunction(P("R(x,y) -> x = y | R(y,x)."), c, 3)
    assert isinstance(r, Elimination)
    assert canonical_key(r.dependency) == canonical_key(SYM)


def test_single_disjunct_elimination_is_trivial():
    r = eliminate_disjunction(SYM, Intensional(R2, [SYM]), 2)
    assert isinstance(r, Elimination) and r.index == 0


def test_failed_elimination_comes_with_a_product_certificate():
    d1 = db(RP, [("R", "a", "b"), ("P", "a")])
    d2 = db(RP, [("R", "a", "b"), ("P", "b")])
    c = Extensional(RP, [d1, d2], 4)
    delta = P("R(x,y) -> P(x) | P(y).")
    r = eliminate_disjunction(delta, c, 2, certificate=True)
    assert isinstance(r, EliminationFailure)
    assert len(r.countermodels) == 2
    assert r.certificate_violates is True and not satisfies(r.certificate, delta)
    with pytest.raises(PreconditionFailed):
        eliminate_disjunction(delta, c, 2, check_closure=True)


def test_extract_axioms():
    sv = (canonicalize_dependency(P("R(x,y) -> x = y | R(y,x).")), canonicalize_dependency(SYM))
    assert extract_axioms(sv) == (canonicalize_dependency(SYM),)
    assert extract_axioms(()) == ()
    for d in extract_axioms(compute_sigma_vee(Intensional(R2, [SYM]), 2, 0, 2, cap=10 ** 7)):
        assert canonicalize_dependency(d) == d


def test_core_uses_negated_diagrams_of_non_embeddable_databases():
    c = models_at_bound([FUNC], R2, 3)
    members = member_masks(c, 3)
    direct = sigma_vee_core(c, 2, members)
    via = sigma_vee_core(c, 2, members, via_diagrams=True)
    assert [canonical_key(d) for *_, d in direct] == [canonical_key(d) for *_, d in via]
    for k, emask, delta in direct:
        assert valid_on(delta, R2, members)
        assert not satisfies(space_for(R2).decode(k, emask), delta)


def test_round_trip_for_transitivity():
    c = models_at_bound([TRANS], R2, 3)
    axioms, rep = axiomatize(c, 3, 0, 3)
    assert rep.verdict == EXACT and rep.exact
    assert not rep.uneliminated and rep.cross_check_mismatches == ()
    for d in enumerate_databases(R2, 3, padded=True):
        assert satisfies_all(d, axioms) == satisfies(d, TRANS)
    members = member_masks(c, 3)
    assert all(valid_on(a, R2, members) for a in axioms)


def test_all_databases_need_no_axioms():
    axioms, rep = axiomatize(Intensional(R2, []), 2, 0, 2)
    assert rep.exact and axioms == ()


def test_missing_one_critical_database_is_flagged():
    closed = models_at_bound([FUNC], R2, 2)
    crit = one_critical_database(R2)
    c = Extensional(R2, [d for d in closed.members if not are_isomorphic(d, crit)], 2)
    axioms, rep = axiomatize(c, 2, 0, 2)
    assert rep.verdict == DISAGREE
    hyp = {r.name: r.holds for r in rep.hypotheses}
    assert hyp["1-criticality"] is False
    assert any(are_isomorphic(d, crit) and not member for d, member in rep.disagreements)


def test_existential_round_trip():
    c = models_at_bound([P("R(x,y) -> exists z: R(y,z).")], R2, 2)
    axioms, rep = axiomatize(c, 2, 1, 2)
    assert rep.exact


def test_negated_diagram_matches_the_mask():
    sp = space_for(R2)
    for emask in sp.reps(2, full_active=True).tolist():
        delta = negated_diagram(2, emask, R2)
        for d in enumerate_databases(R2, 2, padded=True):
            has_copy = any(are_isomorphic(e, sp.decode(2, emask))
                           for e in _two_element_subdatabases(d))
            assert satisfies(d, delta) == (not has_copy)


def _two_element_subdatabases(d):
    from depchar.algebra import enumerate_induced_subdatabases
    return [e for e in enumerate_induced_subdatabases(d, 2) if len(e.domain) == 2]


def test_semantic_dedup_collapses_equivalent_axioms():
    a = P("R(x,y) -> R(y,x).")
    b = P("R(u,v) -> R(v,u).")
    t = P("R(x,y), R(y,z) -> R(x,z).")
    assert semantic_dedup((a, b, t), R2) == (a, t)
