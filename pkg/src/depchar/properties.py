"""Bounded checkers for the structural properties of database collections.

Every verdict is relative to explicit bounds which are stamped on the
report.  Collections are either intensional (models of a dependency set) or
extensional (an explicit list of databases, closed under isomorphism, with
membership defined only up to ``universe_bound`` elements).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterable

import numpy as np

from .algebra import direct_product, intersection, m_neighbourhood
from .bounded import Space, space_for
from .logic import Dependency, check_schema, satisfies_all
from .model import Database, Fact, Schema, find_homomorphisms, restrict

HOLDS = "holds-at-bound"
COUNTEREXAMPLE = "counterexample"
FAILS_AT_WITNESS_BOUND = "fails-at-witness-bound"


class BoundExceeded(ValueError):
    """Membership was asked for a database larger than the collection knows about."""


@dataclass(frozen=True)
class Intensional:
    schema: Schema
    deps: tuple

    def __post_init__(self):
        object.__setattr__(self, "deps", tuple(self.deps))
        for d in self.deps:
            check_schema(d, self.schema)

    def contains(self, d: Database) -> bool:
        return satisfies_all(d, self.deps)

    @property
    def size_limit(self):
        return None


@dataclass(frozen=True)
class Extensional:
    schema: Schema
    members: tuple
    universe_bound: int
    _keys: frozenset = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        sp = space_for(self.schema)
        seen, kept = set(), []
        for m in self.members:
            if m.schema != self.schema:
                raise ValueError("member over a different schema")
            if len(m.domain) > self.universe_bound:
                raise BoundExceeded(f"member with {len(m.domain)} elements exceeds the universe bound")
            k = sp.iso_key(m)
            if k not in seen:
                seen.add(k)
                kept.append(m)
        object.__setattr__(self, "members", tuple(kept))
        object.__setattr__(self, "_keys", frozenset(seen))

    def contains(self, d: Database) -> bool:
        if len(d.domain) > self.universe_bound:
            raise BoundExceeded(f"membership unknown beyond {self.universe_bound} elements")
        return space_for(self.schema).iso_key(d) in self._keys

    def ids_at(self, s: int) -> np.ndarray:
        return np.array(sorted(k[1] for k in self._keys if k[0] == s), dtype=np.uint64)

    @property
    def size_limit(self):
        return self.universe_bound


Collection = Intensional | Extensional


def member_many(c: Collection, s: int, masks: np.ndarray) -> np.ndarray:
    """Membership of the databases over [s] given by ``masks``."""
    sp = space_for(c.schema)
    masks = np.asarray(masks, dtype=np.uint64)
    if isinstance(c, Intensional):
        ok = np.ones(masks.shape, dtype=bool)
        for dep in c.deps:
            ok &= sp.sat_vector(dep, s, masks)
        return ok
    if s > c.universe_bound:
        raise BoundExceeded(f"membership unknown beyond {c.universe_bound} elements")
    return np.isin(sp.canon_many(s, masks), c.ids_at(s))


@lru_cache(maxsize=32)
def member_vector(c: Collection, s: int) -> np.ndarray:
    """Membership of every mask at level s (indexed by mask)."""
    return member_many(c, s, space_for(c.schema).all_masks(s))


def _limit(c: Collection, s: int) -> bool:
    return c.size_limit is None or s <= c.size_limit


@dataclass(frozen=True)
class PropertyReport:
    name: str
    verdict: str
    bounds: tuple
    witness: tuple = ()
    details: str = ""
    extras: tuple = ()

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_record(self) -> dict:
        from .syntax import format_database
        rec = {"property": self.name, "verdict": self.verdict, "bounds": dict(self.bounds),
               "witness": [format_database(w, with_schema=False) if isinstance(w, Database) else str(w)
                           for w in self.witness]}
        if self.details:
            rec["details"] = self.details
        return rec


def _report(name, bounds: dict, witness=(), details="", verdict=None, extras=()):
    if verdict is None:
        verdict = COUNTEREXAMPLE if witness else HOLDS
    return PropertyReport(name, verdict, tuple(sorted(bounds.items())), tuple(witness), details,
                          tuple(extras))


def one_critical_database(schema: Schema) -> Database:
    return Database(schema, frozenset({"c"}),
                    frozenset(Fact(r.name, ("c",) * r.arity) for r in schema))


def check_1_criticality(c: Collection) -> PropertyReport:
    d = one_critical_database(c.schema)
    if c.contains(d):
        return _report("1-criticality", {})
    return _report("1-criticality", {}, [d], "the 1-critical database is not a member")


def check_domain_independence(c: Collection, bound: int, max_size: int | None = None) -> PropertyReport:
    """Compare each class with at most ``bound`` elements against its paddings by
    one and two fresh elements, never going beyond ``max_size`` elements."""
    sp = space_for(c.schema)
    if max_size is None:
        max_size = bound + 2 if c.size_limit is None else c.size_limit
    name = "domain-independence"
    bounds = {"bound": bound, "max_size": max_size}
    for s in range(min(bound, max_size) + 1):
        reps = sp.reps(s)
        base = member_many(c, s, reps)
        for j in (1, 2):
            if s + j > max_size:
                break
            padded = member_many(c, s + j, reps)
            bad = np.nonzero(base != padded)[0]
            if bad.size:
                m = int(reps[bad[0]])
                d, dp = sp.decode(s, m), sp.decode(s + j, m)
                return _report(name, bounds, [d, dp],
                               f"same facts, membership {bool(base[bad[0]])} vs {bool(padded[bad[0]])}")
    return _report(name, bounds)


def check_modularity(c: Collection, n: int, bound: int) -> PropertyReport:
    sp = space_for(c.schema)
    bounds = {"n": n, "bound": bound}
    for s in range(bound + 1):
        reps = sp.reps(s)
        nonmem = reps[~member_many(c, s, reps)]
        if not nonmem.size:
            continue
        witnessed = np.zeros(nonmem.shape, dtype=bool)
        for k in range(min(n, s) + 1):
            for xs in combinations(range(s), k):
                sub = sp.restriction(s, xs)(nonmem)
                witnessed |= ~member_many(c, k, sub)
        bad = np.nonzero(~witnessed)[0]
        if bad.size:
            d = sp.decode(s, int(nonmem[bad[0]]))
            return _report("modularity", bounds, [d],
                           f"non-member whose induced subdatabases with at most {n} elements are all members")
    return _report("modularity", bounds)


def check_closure_subdatabases(c: Collection, bound: int) -> PropertyReport:
    sp = space_for(c.schema)
    bounds = {"bound": bound}
    for s in range(bound + 1):
        reps = sp.reps(s)
        mem = reps[member_many(c, s, reps)]
        for k in range(s):
            for xs in combinations(range(s), k):
                sub = sp.restriction(s, xs)(mem)
                bad = np.nonzero(~member_many(c, k, sub))[0]
                if bad.size:
                    d = sp.decode(s, int(mem[bad[0]]))
                    return _report("closure-subdatabases", bounds,
                                   [d, restrict(d, [f"c{x}" for x in xs])],
                                   "member with a non-member induced subdatabase")
    return _report("closure-subdatabases", bounds)


def _restriction_ids(c: Collection, sp: Space, k: int, bound: int) -> dict:
    """Canonical id -> (s, member mask, xs) for restrictions to k elements of members."""
    out: dict[int, tuple] = {}
    for s in range(k, bound + 1):
        reps = sp.reps(s)
        mem = reps[member_many(c, s, reps)]
        for xs in combinations(range(s), k):
            ids = sp.canon_many(k, sp.restriction(s, xs)(mem))
            for i, cid in enumerate(ids.tolist()):
                out.setdefault(cid, (s, int(mem[i]), xs))
    return out


def _realize(sp: Space, k: int, target: int, origin: tuple, tag: str) -> Database:
    """Copy of the member in ``origin`` whose restriction to xs is literally ``target``."""
    s, mask, xs = origin
    sub = sp.restriction(s, xs).scalar(mask)
    for perm in permutations(range(k)):
        if sp.permuter(k, perm).scalar(sub) == target:
            break
    names, fresh = {}, 0
    for i, x in enumerate(xs):
        names[x] = f"c{perm[i]}"
    for x in range(s):
        if x not in names:
            names[x] = f"{tag}{fresh}"
            fresh += 1
    return sp.decode(s, mask, [names[x] for x in range(s)])


def check_closure_intersections(c: Collection, bound: int, max_pairs: int = 20_000_000) -> PropertyReport:
    """D1 and D2 meet in O = dom(D1) & dom(D2) and D1 & D2 only depends on the
    restrictions of both to O, so it suffices to intersect pairs of member
    restrictions laid over a common domain [k]."""
    sp = space_for(c.schema)
    bounds = {"bound": bound}
    for k in range(bound + 1):
        origin = _restriction_ids(c, sp, k, bound)
        if not origin:
            continue
        ids = np.array(sorted(origin), dtype=np.uint64)
        allm = sp.all_masks(k)
        others = allm[np.isin(sp.canon_ids(k), ids)]
        if len(ids) * len(others) > max_pairs:
            raise BoundExceeded(f"{len(ids) * len(others)} restriction pairs at size {k}")
        for a in ids.tolist():
            inter = others & np.uint64(a)
            bad = np.nonzero(~member_many(c, k, inter))[0]
            if bad.size:
                b = int(others[bad[0]])
                d1 = _realize(sp, k, a, origin[a], "u")
                d2 = _realize(sp, k, b, origin[sp.canon_id(k, b)], "v")
                return _report("closure-intersections", bounds, [d1, d2, intersection(d1, d2)],
                               "two members whose intersection is not a member")
    return _report("closure-intersections", bounds)


def check_closure_products(c: Collection, bound: int) -> PropertyReport:
    sp = space_for(c.schema)
    members = []
    for s in range(bound + 1):
        reps = sp.reps(s)
        members += [sp.decode(s, int(m)) for m in reps[member_many(c, s, reps)]]
    bounds = {"bound": bound}
    skipped = 0
    for i, d1 in enumerate(members):
        for d2 in members[i:]:
            if not _limit(c, len(d1.domain) * len(d2.domain)):
                skipped += 1
                continue
            p = direct_product(d1, d2)
            if not c.contains(p):
                return _report("closure-products", bounds, [d1, d2, p],
                               "two members whose direct product is not a member")
    note = f"{skipped} products beyond the universe bound were not checked" if skipped else ""
    return _report("closure-products", bounds, details=note)


# -- locality -------------------------------------------------------------

def _embeddings_ok(sp: Space, s: int, k: int, cand: np.ndarray, xs_d: tuple,
                   t: int, dmask: int, m: int) -> np.ndarray:
    """For candidate D_E masks over [s] with E on [k], whether every
    neighbour D_E restricted to [k] + Z (|Z| <= m) maps into d fixing E."""
    ok = np.ones(cand.shape, dtype=bool)
    dact = sorted(sp.active_set(t, dmask))
    nb = sp.nbits(s)
    for size in range(min(m, s - k) + 1):
        for zs in combinations(range(k, s), size):
            positions = set(range(k)) | set(zs)
            inY = [j for j in range(nb) if set(sp.atoms[j][1]) <= positions]
            atomsY = 0
            for j in inY:
                atomsY |= 1 << j
            any_g = np.zeros(cand.shape, dtype=bool)
            for g in product(dact + [None], repeat=size):
                img = {i: xs_d[i] for i in range(k)}
                img.update(zip(zs, g))
                allowed = 0
                for j in inY:
                    ri, args = sp.atoms[j]
                    im = [img[a] for a in args]
                    if None not in im and dmask >> sp.index[(ri, tuple(im))] & 1:
                        allowed |= 1 << j
                forbidden = np.uint64(atomsY & ~allowed)
                any_g |= (cand & forbidden) == 0
            ok &= any_g
    return ok


def _neighbourhood_ok(c: Collection, e: Database, de: Database, d: Database, m: int) -> bool:
    ident = {x: x for x in e.active_domain}
    for nbr in m_neighbourhood(e, de, m):
        if next(find_homomorphisms(nbr.facts, d, frozen=ident), None) is None:
            return False
    return True


def _witness_levels(c: Collection, k: int, witness_bound: int) -> range:
    top = witness_bound if c.size_limit is None else min(witness_bound, c.size_limit)
    return range(k, top + 1)


def embeddable_pieces(sp: Space, t: int, dmask: int, n: int):
    """Subsets X of adom(d) with |X| <= n whose restriction E has adom(E) = X."""
    act = sorted(sp.active_set(t, dmask))
    for k in range(min(n, len(act)) + 1):
        for xs in combinations(act, k):
            emask = sp.restriction(t, xs).scalar(dmask)
            if len(sp.active_set(k, emask)) == k:
                yield xs, emask


def locally_embeddable(c: Collection, d: Database, n: int, m: int, witness_bound: int,
                       method: str = "restriction") -> PropertyReport:
    """(n,m)-local embeddability of ``c`` in ``d`` searching D_E among members
    with at most ``witness_bound`` elements.  ``method`` is "restriction"
    (vectorized, with the m = 0 shortcut) or "neighbourhood" (literal)."""
    if witness_bound < len(d.domain):
        raise ValueError("witness_bound must be at least |dom(d)|")
    sp = space_for(c.schema)
    t, dmask, order = sp.encode(d)
    bounds = {"n": n, "m": m, "witness_bound": witness_bound}
    for xs, emask in embeddable_pieces(sp, t, dmask, n):
        k = len(xs)
        if method == "restriction":
            found = _piece_embeds(c, sp, k, emask, xs, t, dmask, m, witness_bound)
        elif method == "neighbourhood":
            found = _piece_embeds_literal(c, sp, k, emask, xs, t, dmask, d, order, m, witness_bound)
        else:
            raise ValueError(f"unknown method {method!r}")
        if not found:
            e = restrict(d, [order[x] for x in xs])
            verdict = FAILS_AT_WITNESS_BOUND
            if c.size_limit is not None and witness_bound >= c.size_limit:
                verdict = COUNTEREXAMPLE
            return _report("local-embeddability", bounds, [d, e],
                           "no member within the witness bound serves this piece", verdict=verdict)
    return _report("local-embeddability", bounds)


@lru_cache(maxsize=4096)
def _piece_embeds_0(c: Collection, k: int, emask: int, witness_bound: int) -> bool:
    sp = space_for(c.schema)
    low = np.uint64((1 << sp.nbits(k)) - 1)
    for s in _witness_levels(c, k, witness_bound):
        cand = member_vector(c, s) & ((sp.all_masks(s) & low) == np.uint64(emask))
        if cand.any():
            return True
    return False


def _piece_embeds(c, sp, k, emask, xs, t, dmask, m, witness_bound) -> bool:
    if m == 0:
        return _piece_embeds_0(c, k, sp.canon_id(k, emask) if sp.vectorizable(k) else emask,
                               witness_bound)
    e64 = np.uint64(emask)
    for s in _witness_levels(c, k, witness_bound):
        masks = sp.all_masks(s)
        sel = member_vector(c, s) & ((masks & e64) == e64)
        cand = masks[sel]
        if cand.size and _embeddings_ok(sp, s, k, cand, xs, t, dmask, m).any():
            return True
    return False


def _piece_embeds_literal(c, sp, k, emask, xs, t, dmask, d, order, m, witness_bound) -> bool:
    names = [order[x] for x in xs]
    e = restrict(d, names)
    e64 = np.uint64(emask)
    for s in _witness_levels(c, k, witness_bound):
        masks = sp.all_masks(s)
        sel = member_vector(c, s) & ((masks & e64) == e64)
        for mk in masks[sel].tolist():
            de = sp.decode(s, mk, names + [("fresh", j) for j in range(s - k)])
            if _neighbourhood_ok(c, e, de, d, m):
                return True
    return False


def check_locality(c: Collection, n: int, m: int, bound: int, witness_bound: int) -> PropertyReport:
    """Every non-member within ``bound`` must fail local embeddability."""
    sp = space_for(c.schema)
    bounds = {"n": n, "m": m, "bound": bound, "witness_bound": witness_bound}
    for s in range(bound + 1):
        reps = sp.reps(s)
        for mk in reps[~member_many(c, s, reps)].tolist():
            d = sp.decode(s, mk)
            r = locally_embeddable(c, d, n, m, max(witness_bound, s))
            if r.holds:
                return _report("locality", bounds, [d],
                               "non-member in which the collection is locally embeddable")
    return _report("locality", bounds)


def check_n0_equivalence(c: Collection, n: int, bound: int) -> PropertyReport:
    """Domain independence + n-modularity + subdatabase closure versus (n,0)-locality."""
    di = check_domain_independence(c, bound, max_size=bound)
    mod = check_modularity(c, n, bound)
    sub = check_closure_subdatabases(c, bound)
    loc = check_locality(c, n, 0, bound, witness_bound=bound)
    left = di.holds and mod.holds and sub.holds
    agree = left == loc.holds
    parts = f"di={di.verdict} modularity={mod.verdict} subdatabases={sub.verdict} locality={loc.verdict}"
    witness = () if agree else next((r.witness for r in (di, mod, sub, loc) if r.witness), ())
    return _report("n0-equivalence", {"n": n, "bound": bound}, witness, parts,
                   verdict=HOLDS if agree else COUNTEREXAMPLE, extras=(di, mod, sub, loc))


def collection_from_databases(schema: Schema, dbs: Iterable[Database], universe_bound: int) -> Extensional:
    return Extensional(schema, tuple(dbs), universe_bound)


def models_at_bound(deps: Iterable[Dependency], schema: Schema, bound: int) -> Extensional:
    """Extensional snapshot of Mod(deps) over all classes with at most ``bound`` elements."""
    c = Intensional(schema, tuple(deps))
    sp = space_for(schema)
    members = []
    for s in range(bound + 1):
        reps = sp.reps(s)
        members += [sp.decode(s, int(mk)) for mk in reps[member_many(c, s, reps)]]
    return Extensional(schema, tuple(members), bound)
