"""Chase for full tgds and egds, and implication Sigma |= sigma.

``implies_full`` is the exact procedure for the full fragment.  The bounded
oracle ``brute_force_implies`` searches every database with at most
``bound`` elements, either by enumerating masks or through a SAT encoding of
the same search space; it never uses the chase.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import count
from typing import Iterable, Sequence

import numpy as np
import pycosat

from .algebra import frozen_database
from .bounded import space_for
from .logic import (EGD, FULL_TGD, Dependency, Egd, Tgd, as_basic, atoms_of, classify, satisfies,
                    satisfies_all, vars_of)
from .model import Database, Fact, Schema, const_key, find_homomorphisms, restrict
from .syntax import format_canonical


class ChaseError(ValueError):
    pass


@dataclass(frozen=True)
class MarkedDatabase:
    """A database together with the variables frozen into it and the
    egd-forced merges; ``base`` is stated over class representatives."""
    base: Database
    frozen_map: tuple = ()
    equivalence: tuple = ()

    @classmethod
    def plain(cls, d: Database) -> "MarkedDatabase":
        return cls(d, (), tuple((c, c) for c in d.sorted_domain()))

    @classmethod
    def freeze(cls, body, schema: Schema | None = None) -> "MarkedDatabase":
        d, fmap = frozen_database(body, schema)
        return cls(d, tuple(sorted(fmap.items())), tuple((c, c) for c in d.sorted_domain()))

    def find(self, c):
        return dict(self.equivalence).get(c, c)

    def value_of(self, v):
        """Representative of the constant a frozen variable became."""
        return self.find(dict(self.frozen_map)[v])

    def classes(self) -> list[tuple]:
        groups: dict = {}
        for c, r in self.equivalence:
            groups.setdefault(r, []).append(c)
        return [tuple(sorted(g, key=const_key)) for _, g in sorted(groups.items(), key=lambda t: const_key(t[0]))]


@dataclass(frozen=True)
class ChaseStep:
    dependency: Dependency
    trigger: tuple
    added: tuple = ()
    merged: tuple = ()


@dataclass(frozen=True)
class ChaseResult:
    fixpoint: MarkedDatabase
    steps: tuple
    step_bound: int

    def trace(self) -> list[str]:
        out = []
        for i, st in enumerate(self.steps, 1):
            h = ", ".join(f"{v}->{c}" for v, c in st.trigger)
            if st.merged:
                what = f"merge {st.merged[1]} into {st.merged[0]}"
            else:
                what = "add " + ", ".join(str(f) for f in st.added)
            out.append(f"{i}. {format_canonical(st.dependency)} [{h}] {what}")
        return out


def _full_basic(dep: Dependency):
    """Tgd/Egd form of a full tgd or egd, else None."""
    if isinstance(dep, Tgd):
        return dep if dep.is_full else None
    if isinstance(dep, Egd):
        return dep
    if classify(dep) in (FULL_TGD, EGD):
        return as_basic(dep)
    return None


def _require_full(sigma: Iterable[Dependency]) -> list:
    out = []
    for dep in sigma:
        b = _full_basic(dep)
        if b is None:
            raise ChaseError(f"not a full tgd or egd: {format_canonical(dep)}")
        out.append(b)
    return out


def _step_bound(n: int, schema: Schema) -> int:
    # at most n-1 merges; between two merges every tgd step adds a new fact
    a = max(s.arity for s in schema)
    return (n - 1) + n * len(schema) * n ** a if n else 0


class _State:
    def __init__(self, d: MarkedDatabase):
        self.schema = d.base.schema
        self.parent = dict(d.equivalence)
        for c in d.base.domain:
            self.parent.setdefault(c, c)
        self.facts = set(d.base.facts)

    def find(self, c):
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def db(self) -> Database:
        reps = {c for c in self.parent if self.parent[c] == c}
        return Database(self.schema, frozenset(reps), frozenset(self.facts))

    def merge(self, a, b) -> tuple:
        a, b = self.find(a), self.find(b)
        keep, drop = sorted((a, b), key=const_key)
        self.parent[drop] = keep
        self.facts = {Fact(f.rel, tuple(keep if x == drop else x for x in f.args)) for f in self.facts}
        return keep, drop


def _head_facts(dep: Tgd, h: dict) -> tuple:
    return tuple(sorted({Fact(a.rel, tuple(h[v] for v in a.args)) for a in dep.head},
                        key=lambda f: (f.rel, tuple(const_key(x) for x in f.args))))


def _active(dep, h: dict, st: _State) -> bool:
    if isinstance(dep, Egd):
        return st.find(h[dep.lhs]) != st.find(h[dep.rhs])
    return any(f not in st.facts for f in _head_facts(dep, h))


def chase_full(d: MarkedDatabase, sigma: Iterable[Dependency], order_seed: int | None = None) -> ChaseResult:
    """Exhaustive chase with a FIFO queue of (dependency, trigger) pairs.

    The queue is refilled in canonical order whenever it runs dry; a seed
    shuffles each refill instead, which is how confluence is tested."""
    deps = _require_full(sigma)
    deps = sorted(set(deps), key=format_canonical)
    for dep in deps:
        for a in atoms_of(dep):
            d.base.schema.arity(a.rel)
    rng = random.Random(order_seed) if order_seed is not None else None
    st = _State(d)
    steps: list[ChaseStep] = []
    while True:
        cur = st.db()
        queue = []
        for i, dep in enumerate(deps):
            uv = sorted(vars_of(dep.body))
            for h in find_homomorphisms(dep.body, cur):
                if _active(dep, h, st):
                    queue.append((i, tuple((v, h[v]) for v in uv)))
        if not queue:
            break
        queue.sort(key=lambda t: (t[0], tuple(const_key(c) for _, c in t[1])))
        if rng is not None:
            rng.shuffle(queue)
        for i, trig in queue:
            dep = deps[i]
            h = {v: st.find(c) for v, c in trig}
            if not _active(dep, h, st):
                continue
            trig = tuple((v, h[v]) for v, _ in trig)
            if isinstance(dep, Egd):
                steps.append(ChaseStep(dep, trig, merged=st.merge(h[dep.lhs], h[dep.rhs])))
            else:
                new = tuple(f for f in _head_facts(dep, h) if f not in st.facts)
                st.facts.update(new)
                steps.append(ChaseStep(dep, trig, added=new))
    base = st.db()
    if not satisfies_all(base, deps):
        raise AssertionError("chase fixpoint violates an input dependency")
    bound = _step_bound(len(d.base.domain), d.base.schema)
    if len(steps) > bound:
        raise AssertionError("chase exceeded its step bound")
    equiv = tuple((c, st.find(c)) for c in sorted(st.parent, key=const_key))
    return ChaseResult(MarkedDatabase(base, d.frozen_map, equiv), tuple(steps), bound)


def _schema_of(deps: Sequence[Dependency], schema: Schema | None) -> Schema:
    if schema is not None:
        return schema
    atoms = [a for dep in deps for a in atoms_of(dep)]
    if not atoms:
        raise ChaseError("a schema is needed for dependencies without atoms")
    return Schema.infer(atoms)


def explain_full(sigma: Iterable[Dependency], target: Dependency,
                 schema: Schema | None = None) -> tuple[bool, ChaseResult]:
    """Verdict of :func:`implies_full` with the chase run that decided it."""
    sigma = _require_full(sigma)
    t = _full_basic(target)
    if t is None:
        raise ChaseError(f"target is not a full tgd or egd: {format_canonical(target)}")
    schema = _schema_of(sigma + [t], schema)
    res = chase_full(MarkedDatabase.freeze(t.body, schema), sigma)
    fp = res.fixpoint
    if isinstance(t, Egd):
        return fp.value_of(t.lhs) == fp.value_of(t.rhs), res
    ok = all(Fact(a.rel, tuple(fp.value_of(v) for v in a.args)) in fp.base.facts for a in t.head)
    return ok, res


def implies_full(sigma: Iterable[Dependency], target: Dependency, schema: Schema | None = None) -> bool:
    return explain_full(sigma, target, schema)[0]


# -- bounded oracle -----------------------------------------------------------

def _tests(sp, deps, s):
    return [sp.dependency_tests(dep, s) for dep in deps]


def _search_enumerate(sp, sigma, target, s):
    masks = sp.all_masks(s)
    ok = np.ones(masks.shape, dtype=bool)
    for dep in sigma:
        ok &= sp.sat_vector(dep, s, masks)
    ok &= ~sp.sat_vector(target, s, masks)
    hits = np.flatnonzero(ok)
    return int(masks[hits[0]]) if len(hits) else None


def _bits(mask: int) -> list[int]:
    out, j = [], 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def _search_sat(sp, sigma, target, s):
    nb = sp.nbits(s)
    fresh = count(nb + 1)
    clauses: list[list[int]] = []

    def conj_lit(alt: int) -> int:
        bs = _bits(alt)
        if len(bs) == 1:
            return bs[0] + 1
        a = next(fresh)
        clauses.extend([-a, b + 1] for b in bs)
        return a

    for tests in _tests(sp, sigma, s):
        for body, alts in tests:
            if alts is None:
                continue
            cl = [-(b + 1) for b in _bits(body)] + [conj_lit(a) for a in alts]
            if not cl:
                return None
            clauses.append(cl)
    pick = []
    for body, alts in sp.dependency_tests(target, s):
        if alts is None:
            continue
        v = next(fresh)
        pick.append(v)
        clauses.extend([-v, b + 1] for b in _bits(body))
        clauses.extend([-v] + [-(b + 1) for b in _bits(a)] for a in alts)
    if not pick:
        return None
    clauses.append(pick)
    sol = pycosat.solve(clauses)
    if sol == "UNSAT":
        return None
    return sum(1 << (lit - 1) for lit in sol if 0 < lit <= nb)


def _minimize(d: Database, sigma, target) -> Database:
    """Drop facts greedily while ``d`` stays a countermodel, then inactive elements."""
    facts = set(d.facts)
    for f in sorted(d.facts, key=lambda f: (f.rel, tuple(const_key(x) for x in f.args))):
        e = Database(d.schema, d.domain, frozenset(facts - {f}))
        if satisfies_all(e, sigma) and not satisfies(e, target):
            facts.discard(f)
    e = Database(d.schema, d.domain, frozenset(facts))
    return restrict(e, e.active_domain)


def find_countermodel(sigma: Iterable[Dependency], target: Dependency, bound: int,
                      schema: Schema | None = None, method: str = "auto") -> Database | None:
    """A smallest-domain database with at most ``bound`` elements that
    satisfies ``sigma`` and violates ``target``, or None."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    if method not in ("auto", "enumerate", "sat"):
        raise ValueError(f"unknown search method {method!r}")
    sigma = list(sigma)
    schema = _schema_of(sigma + [target], schema)
    sp = space_for(schema)
    for s in range(bound + 1):
        use_enum = method == "enumerate" or (method == "auto" and sp.vectorizable(s))
        mask = _search_enumerate(sp, sigma, target, s) if use_enum else _search_sat(sp, sigma, target, s)
        if mask is not None:
            return _minimize(sp.decode(s, mask), sigma, target)
    return None


def brute_force_implies(sigma: Iterable[Dependency], target: Dependency, bound: int,
                        schema: Schema | None = None, method: str = "auto") -> bool:
    """False iff some database with at most ``bound`` elements satisfies
    ``sigma`` and violates ``target``."""
    return find_countermodel(sigma, target, bound, schema, method) is None


def completeness_bound(target: Dependency) -> int:
    return len(vars_of(target.body))


def is_full_fragment(sigma: Iterable[Dependency], target: Dependency) -> bool:
    return all(_full_basic(d) is not None for d in list(sigma) + [target])


@dataclass(frozen=True)
class ImplicationVerdict:
    implied: bool
    method: str
    complete: bool
    bound: int | None = None
    countermodel: Database | None = None
    chase: ChaseResult | None = field(default=None, compare=False)


def decide(sigma: Iterable[Dependency], target: Dependency, method: str = "chase",
           bound: int | None = None, schema: Schema | None = None) -> ImplicationVerdict:
    """Implication verdict; a positive bounded verdict is marked complete
    only on the full fragment at or above the completeness bound."""
    sigma = list(sigma)
    if method == "chase":
        ok, res = explain_full(sigma, target, schema)
        return ImplicationVerdict(ok, "chase", True, chase=res)
    if method != "brute":
        raise ValueError(f"unknown method {method!r}")
    if bound is None:
        raise ValueError("the brute-force method needs a bound")
    cm = find_countermodel(sigma, target, bound, schema)
    complete = cm is not None or (is_full_fragment(sigma, target) and bound >= completeness_bound(target))
    return ImplicationVerdict(cm is None, "brute", complete, bound, cm)


def semantically_equivalent(d1: Dependency, d2: Dependency, bound: int | None = None,
                            schema: Schema | None = None) -> bool:
    """Mutual implication: exact by the chase when both are full tgds or
    egds, otherwise over databases with at most ``bound`` elements."""
    schema = _schema_of([d1, d2], schema)
    if _full_basic(d1) is not None and _full_basic(d2) is not None:
        return implies_full([d1], d2, schema) and implies_full([d2], d1, schema)
    if bound is None:
        raise ValueError("a bound is needed outside the full fragment")
    return brute_force_implies([d1], d2, bound, schema) and brute_force_implies([d2], d1, bound, schema)
