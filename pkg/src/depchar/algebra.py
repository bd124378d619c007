"""Products, intersections, subdatabases, neighbourhoods and enumeration."""
from __future__ import annotations

from itertools import combinations, product
from typing import Iterable, Iterator

from .bounded import space_for
from .logic import Atom, vars_of
from .model import Database, Fact, Schema, SchemaError, const_key, fact_contained, restrict


def _same_schema(d1: Database, d2: Database):
    if d1.schema != d2.schema:
        raise SchemaError("databases are over different schemas")


def direct_product(d1: Database, d2: Database) -> Database:
    """Domain is all pairs; R holds of pairs exactly when it holds componentwise."""
    _same_schema(d1, d2)
    domain = frozenset(product(d1.domain, d2.domain))
    facts = set()
    for name in d1.schema.names():
        r2 = d2.relation(name)
        for t1 in d1.relation(name):
            for t2 in r2:
                facts.add(Fact(name, tuple(zip(t1, t2))))
    return Database(d1.schema, domain, frozenset(facts))


def product_all(ds: Iterable[Database]) -> Database:
    """Left fold of :func:`direct_product`."""
    it = iter(ds)
    acc = next(it)
    for d in it:
        acc = direct_product(acc, d)
    return acc


def projection(d: Database, i: int) -> frozenset:
    """Facts obtained by taking the i-th component of every pair constant."""
    return frozenset(Fact(f.rel, tuple(a[i] for a in f.args)) for f in d.facts)


def intersection(d1: Database, d2: Database) -> Database:
    _same_schema(d1, d2)
    return Database(d1.schema, d1.domain & d2.domain, d1.facts & d2.facts)


def _subsets(elems: list, sizes: Iterable[int]) -> Iterator[tuple]:
    for k in sizes:
        yield from combinations(elems, k)


def enumerate_induced_subdatabases(d: Database, max_domain: int) -> Iterator[Database]:
    if max_domain < 0:
        raise ValueError("max_domain must be non-negative")
    elems = d.sorted_domain()
    for xs in _subsets(elems, range(min(max_domain, len(elems)) + 1)):
        yield restrict(d, xs)


def m_neighbourhood(base: Database, host: Database, radius: int) -> Iterator[Database]:
    """Induced subdatabases E of ``host`` with facts(base) contained in facts(E)
    and at most |adom(base)| + radius active elements."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if not fact_contained(base, host):
        raise ValueError("base is not fact-contained in host")
    core = base.active_domain
    limit = len(core) + radius
    rest = sorted(host.domain - core, key=const_key)
    for k in range(len(rest) + 1):
        for zs in combinations(rest, k):
            e = restrict(host, core | set(zs))
            if len(e.active_domain) <= limit:
                yield e


def frozen_database(body: Iterable[Atom], schema: Schema | None = None) -> tuple[Database, dict]:
    """Canonical database of a conjunction: each variable becomes the constant
    spelled like it."""
    body = frozenset(body)
    if schema is None:
        if not body:
            raise SchemaError("a schema is needed to freeze an empty conjunction")
        schema = Schema.infer(body)
    freeze = {v: v.name for v in sorted(vars_of(body))}
    facts = frozenset(Fact(a.rel, tuple(freeze[v] for v in a.args)) for a in body)
    return Database(schema, frozenset(freeze.values()), facts), freeze


def enumerate_databases(schema: Schema, max_domain: int, padded: bool = False) -> Iterator[Database]:
    """One representative per isomorphism class, by domain size then mask.

    Without ``padded`` only databases with dom = adom are produced (the empty
    database included); with it, every domain size up to ``max_domain``."""
    if max_domain < 0:
        raise ValueError("max_domain must be non-negative")
    sp = space_for(schema)
    for s in range(max_domain + 1):
        for m in sp.reps(s, full_active=not padded):
            yield sp.decode(s, int(m))
