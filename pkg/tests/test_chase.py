import random

import pytest

from depchar.bounded import database_key
from depchar.chase import (ChaseError, MarkedDatabase, brute_force_implies, chase_full, decide,
                           explain_full, find_countermodel, implies_full, semantically_equivalent)
from depchar.logic import satisfies
from depchar.model import Schema
from depchar.syntax import parse_dependency

from helpers import db, naive_satisfies, random_basic

E = Schema.of(E=2)
RP = Schema.of(R=2, P=1)


def dep(text):
    return parse_dependency(text)


def test_single_tgd_step():
    d = db(E, [("E", "a", "b"), ("E", "b", "c")])
    res = chase_full(MarkedDatabase.plain(d), [dep("E(x,y), E(y,z) -> E(x,z).")])
    assert len(res.steps) == 1
    assert [str(f) for f in res.steps[0].added] == ["E(a,c)"]
    assert res.fixpoint.base.facts == d.facts | {next(iter(res.steps[0].added))}
    assert res.trace()[0].endswith("add E(a,c)")


def test_egd_merges_into_least_constant():
    d = db(E, [("E", "a", "b"), ("E", "a", "c")])
    res = chase_full(MarkedDatabase.plain(d), [dep("E(x,y), E(x,z) -> y = z.")])
    assert len(res.steps) == 1
    assert res.steps[0].merged == ("b", "c")
    assert res.fixpoint.find("c") == "b"
    assert res.fixpoint.base.domain == frozenset({"a", "b"})
    assert res.fixpoint.classes() == [("a",), ("b", "c")]
    assert res.trace()[0].endswith("merge c into b")


def test_empty_sigma_is_a_fixpoint():
    d = db(E, [("E", "a", "b")])
    res = chase_full(MarkedDatabase.plain(d), [])
    assert res.steps == ()
    assert res.fixpoint.base == d


def test_fd_transitivity():
    fds = [dep("R(x,y,z), R(x,y2,z2) -> y = y2."), dep("R(x,y,z), R(x2,y,z2) -> z = z2.")]
    target = dep("R(x,y,z), R(x,y2,z2) -> z = z2.")
    assert implies_full(fds, target)
    assert brute_force_implies(fds, target, 4)
    assert not implies_full(fds[1:], target)


def test_sym_does_not_imply_cyc():
    sym, cyc = dep("E(x,y) -> E(y,x)."), dep("E(x,y), E(y,z) -> E(z,x).")
    ok, res = explain_full([sym], cyc)
    assert not ok
    cm = find_countermodel([sym], cyc, 3)
    assert cm is not None and len(cm.domain) == 2
    assert sorted(tuple(f.args) for f in cm.facts) == [("c0", "c1"), ("c1", "c0")]
    assert satisfies(cm, sym) and not satisfies(cm, cyc)


def test_trans_and_sym_imply_cyc():
    sym, trans = dep("E(x,y) -> E(y,x)."), dep("E(x,y), E(y,z) -> E(x,z).")
    cyc = dep("E(x,y), E(y,z) -> E(z,x).")
    ok, res = explain_full([sym, trans], cyc)
    assert ok and len(res.steps) >= 1


def test_egd_with_empty_sigma_has_two_element_countermodel():
    egd = dep("E(x,y) -> x = y.")
    assert not implies_full([], egd, E)
    cm = find_countermodel([], egd, 3, E)
    assert len(cm.domain) == 2 and len(cm.facts) == 1


def test_tautology_is_implied():
    t = dep("E(x,y) -> E(x,y).")
    assert implies_full([], t, E)
    assert brute_force_implies([], t, 3, E)


def test_non_full_input_rejected():
    with pytest.raises(ChaseError):
        implies_full([dep("E(x,y) -> exists z: E(y,z).")], dep("E(x,y) -> E(y,x)."))
    with pytest.raises(ChaseError):
        implies_full([], dep("E(x,y) -> exists z: E(y,z)."), E)


def test_semantic_equivalence():
    assert semantically_equivalent(dep("E(x,y) -> E(y,x)."), dep("E(u,v) -> E(v,u)."))
    assert semantically_equivalent(dep("E(x,y) -> E(x,y)."), dep("E(x,x) -> E(x,x)."))
    assert not semantically_equivalent(dep("R(x,y) -> P(x), P(y)."), dep("P(x), P(y) -> R(x,y)."))
    assert semantically_equivalent(dep("E(x,y) -> exists z: E(y,z)."), dep("E(u,v) -> exists w: E(v,w)."),
                                   bound=3)
    assert not semantically_equivalent(dep("E(x,y) -> exists z: E(y,z)."), dep("E(x,y) -> E(y,y)."), bound=3)
    with pytest.raises(ValueError):
        semantically_equivalent(dep("E(x,y) -> exists z: E(y,z)."), dep("E(x,y) -> E(y,y)."))


def _random_instance(rng, schema):
    sigma = [random_basic(rng, schema, 3, 0, full_only=True) for _ in range(rng.randint(1, 3))]
    return sigma, random_basic(rng, schema, 3, 0, full_only=True)


@pytest.mark.parametrize("schema", [E, RP])
def test_chase_agrees_with_bounded_search(schema):
    rng = random.Random(7)
    for _ in range(40):
        sigma, target = _random_instance(rng, schema)
        v = decide(sigma, target, method="brute", bound=3, schema=schema)
        assert v.complete
        assert implies_full(sigma, target, schema) == v.implied, (sigma, target)
        if not v.implied:
            cm = v.countermodel
            assert all(naive_satisfies(cm, s) for s in sigma)
            assert not naive_satisfies(cm, target)


def test_enumeration_and_sat_search_agree():
    rng = random.Random(11)
    for _ in range(30):
        sigma, target = _random_instance(rng, RP)
        a = find_countermodel(sigma, target, 3, RP, method="enumerate")
        b = find_countermodel(sigma, target, 3, RP, method="sat")
        assert (a is None) == (b is None)
        if a is not None:
            assert len(a.domain) == len(b.domain)


def test_confluence_across_orders():
    rng = random.Random(3)
    for _ in range(10):
        sigma, target = _random_instance(rng, E)
        start = MarkedDatabase.freeze(target.body, E)
        keys = {database_key(chase_full(start, sigma, order_seed=seed).fixpoint.base) for seed in range(10)}
        keys.add(database_key(chase_full(start, sigma).fixpoint.base))
        assert len(keys) == 1


def test_step_bound_respected():
    rng = random.Random(5)
    for _ in range(30):
        sigma, target = _random_instance(rng, RP)
        res = chase_full(MarkedDatabase.freeze(target.body, RP), sigma)
        assert len(res.steps) <= res.step_bound


def test_decide_marks_completeness():
    sym, cyc = dep("E(x,y) -> E(y,x)."), dep("E(x,y), E(y,z) -> E(z,x).")
    assert decide([sym], cyc).complete
    low = decide([sym, dep("E(x,y), E(y,z) -> E(x,z).")], cyc, method="brute", bound=2)
    assert low.implied and not low.complete
    neg = decide([sym], cyc, method="brute", bound=2)
    assert not neg.implied and neg.complete
    nonfull = decide([dep("E(x,y) -> exists z: E(y,z).")], dep("E(x,y) -> E(y,x)."), method="brute", bound=2)
    assert not nonfull.implied and nonfull.complete
