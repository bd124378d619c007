"""Edd spaces, the valid-edd set Sigma-vee, disjunction elimination and
extraction of a tgd/egd axiomatization for a collection.

For m = 0 the axiomatizer does not enumerate edds.  Validity of every
candidate ``F -> alpha`` (F a conjunction over k variables, alpha an atom or
equality) is tabulated at once: each member M and map h: [k] -> [s] yield
the pullback P = h^-1(M), which refutes exactly the bodies F contained in P
when alpha fails under h.  Marking refuted pullbacks and closing downwards
over the subset lattice gives the validity of all bodies together.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations, permutations, product

import numpy as np

from .algebra import direct_product, enumerate_induced_subdatabases, intersection
from .bounded import VEC_BITS, BitGather, space_for
from .diagrams import negate_to_edd, relative_diagram, to_formula
from .logic import (EGD, FULL_TGD, TAUTOLOGY, TGD, Atom, Dd, Dependency, Equality, ExistsConj,
                    UnsafeDependency, Var, as_basic, as_edd, build_dependency, canonical_key,
                    canonicalize_dependency, classify, rebuild_canonical, satisfies, variable_budget, vars_of)
from .model import Database, Schema
from .properties import (HOLDS, Collection, Extensional, Intensional, PropertyReport,
                         check_1_criticality, check_closure_intersections, check_closure_products,
                         check_closure_subdatabases, check_domain_independence, check_modularity,
                         member_many)


class CapExceeded(ValueError):
    pass


class PreconditionFailed(ValueError):
    def __init__(self, msg: str, report: PropertyReport | None = None):
        super().__init__(msg)
        self.report = report


@dataclass(frozen=True)
class EddClass:
    schema: Schema
    n: int
    m: int
    members: tuple


@dataclass(frozen=True)
class SigmaVee:
    source: object
    n: int
    m: int
    members: tuple
    model_bound: int


def _xs(k: int) -> list[Var]:
    return [Var(f"x{i}") for i in range(k)]


def _atoms_over(schema: Schema, terms) -> list[Atom]:
    return [Atom(r.name, args) for r in schema for args in product(terms, repeat=r.arity)]


def _subsets(items, min_size=1):
    for k in range(min_size, len(items) + 1):
        yield from combinations(items, k)


def _bodies(schema: Schema, k: int):
    """Conjunctions over x0..x(k-1) mentioning every variable."""
    if k == 0:
        yield frozenset()
        return
    xs = _xs(k)
    for sub in _subsets(_atoms_over(schema, xs)):
        if len(vars_of(sub)) == k:
            yield frozenset(sub)


def _exists_disjuncts(schema: Schema, k: int, m: int) -> list[ExistsConj]:
    xs = _xs(k)
    out, seen = [], set()
    for j in range(m + 1):
        ys = [Var(f"y{i}") for i in range(j)]
        for sub in _subsets(_atoms_over(schema, xs + ys)):
            used = vars_of(sub)
            if not set(ys) <= used:
                continue
            key = min(tuple(sorted((a.rel, tuple(ren.get(v, v).name for v in a.args)) for a in sub))
                      for ren in ({ys[i]: ys[p[i]] for i in range(j)} for p in permutations(range(j))))
            if key not in seen:
                seen.add(key)
                out.append(ExistsConj(ys, sub))
    return out


def _projected(schema: Schema, n: int, m: int, cap: int) -> int:
    total = 0
    for k in range(n + 1):
        a_k = sum(k ** r.arity for r in schema)
        upper = k * (k - 1) // 2 + sum(2 ** sum((k + j) ** r.arity for r in schema) for j in range(m + 1))
        if upper > 62:
            raise CapExceeded(f"more than 2^62 candidate edds at {k} universal variables")
        total += 2 ** a_k * 2 ** upper
    return total


def _rename_universal(d, p: tuple):
    ren = {Var(f"x{i}"): Var(f"x{j}") for i, j in enumerate(p)}
    if isinstance(d, Equality):
        a, b = sorted((ren[d.left], ren[d.right]))
        return Equality(a, b)
    return ExistsConj(d.exist_vars, [Atom(a.rel, tuple(ren.get(v, v) for v in a.args)) for a in d.atoms])


def _disjunct_key(d) -> tuple:
    """Equal exactly for disjuncts that differ by renaming existential variables."""
    if isinstance(d, Equality):
        return ("eq",) + tuple(sorted((d.left.name, d.right.name)))
    ys = sorted(d.exist_vars)
    best = None
    for p in permutations(range(len(ys))):
        ren = {ys[i]: f"y{p[i]}" for i in range(len(ys))}
        key = tuple(sorted((a.rel, tuple(ren.get(v, v.name) for v in a.args)) for a in d.atoms))
        if best is None or key < best:
            best = key
    return ("ex",) + best


def _body_key(body) -> tuple:
    return tuple(sorted((a.rel, tuple(v.name for v in a.args)) for a in body))


def _orbit_reps(nbits: int, perms: list[list[int]]):
    """Subsets of range(nbits), as masks, that are least in their orbit under
    the given permutations of positions."""
    if not perms:
        yield from range(1 << nbits)
        return
    if nbits <= VEC_BITS:
        masks = np.arange(1 << nbits, dtype=np.uint64)
        keep = np.ones(masks.shape, dtype=bool)
        for p in perms:
            keep &= masks <= BitGather([(p[j], j) for j in range(nbits)], nbits)(masks)
        yield from (int(x) for x in masks[keep])
        return
    gathers = [BitGather([(p[j], j) for j in range(nbits)], nbits) for p in perms]
    for mask in range(1 << nbits):
        if all(mask <= g.scalar(mask) for g in gathers):
            yield mask


def _classes(schema: Schema, ks, cands_for, drop_tautologies: bool, nonempty: bool = False) -> dict:
    """Canonical dependencies ``body -> some candidate disjuncts`` over at most
    n variables.  Only bodies least in their orbit under variable permutations
    are expanded, and of their disjunct sets only those least under the
    body's automorphisms.  ``cands_for(k)`` gives the candidate disjuncts over
    k variables and a filter ``keep(disjunct, body)``."""
    found = {}
    for k in ks:
        perms = list(permutations(range(k)))
        allc, extra = cands_for(k)
        index = {_disjunct_key(d): i for i, d in enumerate(allc)}
        image = [[index[_disjunct_key(_rename_universal(d, p))] for d in allc] for p in perms]
        for body in _bodies(schema, k):
            key = _body_key(body)
            auts = []
            canonical = True
            for pi, p in enumerate(perms):
                ik = _body_key(_rename_universal(ExistsConj((), body), p).atoms)
                if ik < key:
                    canonical = False
                    break
                if ik == key and any(p[i] != i for i in range(k)):
                    auts.append(pi)
            if not canonical:
                continue
            cidx = [i for i, d in enumerate(allc) if extra(d, body)]
            pos = {i: j for j, i in enumerate(cidx)}
            local = [[pos[image[pi][i]] for i in cidx] for pi in auts]
            for mask in _orbit_reps(len(cidx), local):
                if nonempty and not mask:
                    continue
                ds = [allc[cidx[j]] for j in range(len(cidx)) if mask >> j & 1]
                try:
                    dep = build_dependency(body, ds)
                except UnsafeDependency:
                    continue
                if drop_tautologies and classify(dep) == TAUTOLOGY:
                    continue
                ck = canonical_key(dep)
                if ck not in found:
                    found[ck] = rebuild_canonical(ck)
    return found


def enumerate_edds(schema: Schema, n: int, m: int, cap: int = 10 ** 6,
                   drop_tautologies: bool = True) -> EddClass:
    """Every edd with at most n universal variables and at most m existential
    variables per disjunct, one per canonical form."""
    if n < 0 or m < 0:
        raise ValueError("n and m must be non-negative")
    proj = _projected(schema, n, m, cap)
    if proj > cap:
        raise CapExceeded(f"projected {proj} candidate edds exceed the cap {cap}")
    return _enumerate_edds(schema, n, m, drop_tautologies)


@lru_cache(maxsize=16)
def _enumerate_edds(schema: Schema, n: int, m: int, drop_tautologies: bool) -> EddClass:
    def cands_for(k):
        eqs = [Equality(a, b) for a, b in combinations(_xs(k), 2)]
        return eqs + _exists_disjuncts(schema, k, m), keep

    def keep(d, body):
        return not (drop_tautologies and isinstance(d, ExistsConj) and not d.exist_vars and d.atoms <= body)

    found = _classes(schema, range(n + 1), cands_for, drop_tautologies)
    return EddClass(schema, n, m, tuple(found[k] for k in sorted(found, key=repr)))


def is_dd_shaped(dep: Dependency) -> bool:
    e = as_edd(dep)
    return bool(e.body) and bool(e.disjuncts) and all(
        isinstance(d, Equality) or (not d.exist_vars and len(d.atoms) == 1) for d in e.disjuncts)


def enumerate_dds(schema: Schema, n: int, cap: int = 10 ** 6) -> tuple:
    """Independent enumeration of the dds over at most n variables (canonical forms)."""
    for k in range(1, n + 1):
        smallest = next(_bodies(schema, k), None)
        if smallest is None:
            continue
        free = k * (k - 1) // 2 + sum(k ** r.arity for r in schema) - len(smallest)
        if 2 ** free > cap:
            raise CapExceeded(f"up to {2 ** free} disjunct sets for one body exceed the cap")
    return _enumerate_dds(schema, n)


@lru_cache(maxsize=16)
def _enumerate_dds(schema: Schema, n: int) -> tuple:
    def cands_for(k):
        xs = _xs(k)
        eqs = [Equality(a, b) for a, b in combinations(xs, 2)]
        return eqs + [ExistsConj((), (a,)) for a in _atoms_over(schema, xs)], keep

    def keep(d, body):
        return isinstance(d, Equality) or not d.atoms <= body

    found = _classes(schema, range(1, n + 1), cands_for, False, nonempty=True)
    return tuple(found[k] for k in sorted(found, key=repr))


# -- members -------------------------------------------------------------

def member_masks(c: Collection, model_bound: int) -> dict[int, np.ndarray]:
    """Canonical masks of the members at each level up to ``model_bound``."""
    sp = space_for(c.schema)
    top = model_bound if c.size_limit is None else min(model_bound, c.size_limit)
    out = {}
    for s in range(top + 1):
        reps = sp.reps(s)
        out[s] = reps[member_many(c, s, reps)]
    return out


def valid_on(dep: Dependency, schema: Schema, members: dict) -> bool:
    sp = space_for(schema)
    return all(sp.sat_vector(dep, s, arr).all() for s, arr in members.items() if arr.size)


def first_violation(dep: Dependency, schema: Schema, members: dict):
    sp = space_for(schema)
    for s, arr in members.items():
        if not arr.size:
            continue
        bad = np.nonzero(~sp.sat_vector(dep, s, arr))[0]
        if bad.size:
            return sp.decode(s, int(arr[bad[0]]))
    return None


def compute_sigma_vee(c: Collection, n: int, m: int, model_bound: int, cap: int = 10 ** 6) -> SigmaVee:
    members = member_masks(c, model_bound)
    cls = enumerate_edds(c.schema, n, m, cap)
    valid = tuple(d for d in cls.members if valid_on(d, c.schema, members))
    return SigmaVee(c, n, m, valid, model_bound)


# -- disjunction elimination -----------------------------------------------

@dataclass(frozen=True)
class Elimination:
    delta: Dependency
    index: int

    @cached_property
    def dependency(self) -> Dependency:
        return single_disjunct(self.delta, self.index)


@dataclass(frozen=True)
class EliminationFailure:
    delta: Dependency
    countermodels: tuple
    certificate: Database | None = None
    certificate_violates: bool | None = None


def single_disjunct(delta: Dependency, j: int) -> Dependency:
    e = as_edd(delta)
    return build_dependency(e.body, [e.disjuncts[j]])


def _body_witness(dep: Dependency, d: Database):
    """A body match of ``dep`` in ``d`` under which no disjunct holds."""
    from .model import find_homomorphisms
    e = as_edd(dep)
    for h in find_homomorphisms(e.body, d):
        if not any(_holds(x, h, d) for x in e.disjuncts):
            return h
    return None


def _holds(x, h, d):
    from .model import find_homomorphisms
    if isinstance(x, Equality):
        return h[x.left] == h[x.right]
    return next(find_homomorphisms(x.atoms, d, frozen=h), None) is not None


def eliminate_disjunction(delta: Dependency, c: Collection, model_bound: int, variant: str = "product",
                          check_closure: bool = False, certificate: bool = False,
                          members: dict | None = None):
    """Least j (in canonical disjunct order) whose single-disjunct dependency
    holds in every member within ``model_bound``, or the countermodels."""
    if variant not in ("product", "intersection"):
        raise ValueError(f"unknown variant {variant!r}")
    if check_closure:
        chk = check_closure_products if variant == "product" else check_closure_intersections
        rep = chk(c, min(model_bound, 2) if variant == "product" else model_bound)
        if not rep.holds:
            raise PreconditionFailed(f"collection is not closed under {variant}s", rep)
    delta = canonicalize_dependency(delta)
    members = members if members is not None else member_masks(c, model_bound)
    e = as_edd(delta)
    singles = [single_disjunct(delta, j) for j in range(len(e.disjuncts))]
    for j, dep in enumerate(singles):
        if valid_on(dep, c.schema, members):
            return Elimination(delta, j)
    models = tuple(first_violation(dep, c.schema, members) for dep in singles)
    cert, violates = None, None
    if certificate and models:
        if variant == "product":
            cert = models[0]
            for d in models[1:]:
                cert = direct_product(cert, d)
        else:
            cert = _intersection_certificate(delta, singles, models)
        if cert is not None:
            violates = not satisfies(cert, delta)
    return EliminationFailure(delta, models, cert, violates)


def _intersection_certificate(delta, singles, models):
    """Countermodels glued along injective body matches, then intersected."""
    from .model import rename
    glued = []
    for j, (dep, d) in enumerate(zip(singles, models)):
        h = _body_witness(dep, d)
        if h is None or len(set(h.values())) != len(h):
            return None
        ren = {v: k.name for k, v in h.items()}
        for c in d.domain:
            ren.setdefault(c, f"w{j}_{c}")
        glued.append(rename(d, ren))
    out = glued[0]
    for d in glued[1:]:
        out = intersection(out, d)
    return out


def extract_axioms(sv: SigmaVee | tuple) -> tuple:
    members = sv.members if isinstance(sv, SigmaVee) else sv
    out = {}
    for d in members:
        if classify(d) in (TGD, FULL_TGD, EGD):
            b = canonicalize_dependency(as_basic(d))
            out.setdefault(canonical_key(b), b)
    return tuple(out[k] for k in sorted(out, key=repr))


def semantic_dedup(deps, schema: Schema, bound: int | None = None) -> tuple:
    """Keep the first of every group of mutually implying dependencies:
    exact on full tgds and egds, over databases with at most ``bound``
    elements otherwise."""
    from .chase import semantically_equivalent
    kept: list = []
    for d in deps:
        if not any(semantically_equivalent(k, d, bound, schema) for k in kept):
            kept.append(d)
    return tuple(kept)


# -- axiomatize --------------------------------------------------------------

@dataclass(frozen=True)
class AxiomatizationReport:
    verdict: str
    bounds: tuple
    disagreements: tuple = ()
    hypotheses: tuple = ()
    sigma_vee: tuple = ()
    eliminations: tuple = ()
    uneliminated: tuple = ()
    cross_checked: int = 0
    cross_check_mismatches: tuple = ()
    details: str = ""

    @property
    def exact(self) -> bool:
        return self.verdict == EXACT

    def to_record(self) -> dict:
        from .syntax import format_database, format_dependency
        return {"property": "axiomatization", "verdict": self.verdict, "bounds": dict(self.bounds),
                "disagreements": [{"database": format_database(d, with_schema=False), "member": mem}
                                  for d, mem in self.disagreements],
                "hypotheses": {r.name: r.verdict for r in self.hypotheses},
                "sigma_vee_size": len(self.sigma_vee),
                "uneliminated": [format_dependency(d) for d in self.uneliminated],
                "cross_checked": self.cross_checked,
                "cross_check_mismatches": len(self.cross_check_mismatches)}


EXACT = "exact-at-bound"
DISAGREE = "disagreement"


class _Tables:
    """Validity of F -> head for every body mask F over [k] and every head."""

    def __init__(self, c: Collection, n: int, members: dict):
        self.sp = sp = space_for(c.schema)
        self.bad: dict[tuple, np.ndarray] = {}
        for k in range(1, n + 1):
            nb = sp.nbits(k)
            if nb > 24:
                raise CapExceeded(f"{nb} atoms over {k} variables is too many for the validity tables")
            heads = [("atom", j) for j in range(nb)] + [("eq", a, b) for a, b in combinations(range(k), 2)]
            tabs = {hd: np.zeros(1 << nb, dtype=bool) for hd in heads}
            for s, mem in members.items():
                if not mem.size or s == 0:
                    continue
                for h in product(range(s), repeat=k):
                    pb = sp.pullback(k, s, h)(mem)
                    idx = pb.astype(np.intp)
                    for j in range(nb):
                        sel = ((pb >> np.uint64(j)) & np.uint64(1)) == 0
                        tabs[("atom", j)][idx[sel]] = True
                    for a, b in combinations(range(k), 2):
                        if h[a] != h[b]:
                            tabs[("eq", a, b)][idx] = True
            for hd, arr in tabs.items():
                for b in range(nb):
                    v = arr.reshape(-1, 2, 1 << b)
                    v[:, 0, :] |= v[:, 1, :]
                self.bad[(k,) + hd] = arr

    def head_vars(self, k: int, hd: tuple) -> set:
        if hd[0] == "eq":
            return {hd[1], hd[2]}
        return set(self.sp.atoms[hd[1]][1])

    def body_vars(self, k: int, f: int) -> set:
        return set(self.sp.active_set(k, f))

    def valid(self, k: int, f: int, hd: tuple) -> bool:
        if f == 0 or not self.head_vars(k, hd) <= self.body_vars(k, f):
            return False
        return not self.bad[(k,) + hd][f]

    def to_dependency(self, k: int, f: int, hd: tuple) -> Dependency:
        xs = _xs(k)
        body = [Atom(self.sp.rels[ri], tuple(xs[a] for a in args))
                for j, (ri, args) in enumerate(self.sp.atoms[:self.sp.nbits(k)]) if f >> j & 1]
        if hd[0] == "eq":
            return build_dependency(body, [Equality(xs[hd[1]], xs[hd[2]])])
        ri, args = self.sp.atoms[hd[1]]
        return build_dependency(body, [ExistsConj((), (Atom(self.sp.rels[ri], tuple(xs[a] for a in args)),))])


def _head_of(d, k: int, sp) -> tuple:
    if isinstance(d, Equality):
        a, b = sorted((int(d.left.name[1:]), int(d.right.name[1:])))
        return ("eq", a, b)
    atom = d if isinstance(d, Atom) else next(iter(d.atoms))
    return ("atom", sp.bit(atom.rel, tuple(int(v.name[1:]) for v in atom.args)))


def _hypotheses(c: Collection, n: int, m: int, model_bound: int) -> tuple:
    reps = [check_1_criticality(c)]
    if m == 0:
        reps += [check_domain_independence(c, model_bound, max_size=model_bound),
                 check_modularity(c, n, model_bound),
                 check_closure_subdatabases(c, model_bound)]
    return tuple(reps)


def _compare(c: Collection, axioms, model_bound: int):
    sp = space_for(c.schema)
    top = model_bound if c.size_limit is None else min(model_bound, c.size_limit)
    out = []
    for s in range(top + 1):
        reps = sp.reps(s)
        mem = member_many(c, s, reps)
        ok = np.ones(reps.shape, dtype=bool)
        for ax in axioms:
            ok &= sp.sat_vector(ax, s, reps)
        for i in np.nonzero(ok != mem)[0]:
            out.append((sp.decode(s, int(reps[i])), bool(mem[i])))
    return tuple(out)


def negated_diagram(k: int, emask: int, schema: Schema) -> Dependency:
    """Negation of the diagram of the database over [k] given by ``emask``
    (every element active), built straight from the mask."""
    sp = space_for(schema)
    xs = _xs(k)
    body, missing = [], []
    for j in range(sp.nbits(k)):
        ri, args = sp.atoms[j]
        a = Atom(sp.rels[ri], tuple(xs[i] for i in args))
        (body if emask >> j & 1 else missing).append(a)
    eqs = [Equality(a, b) for a, b in combinations(xs, 2)]
    return build_dependency(body, eqs + [ExistsConj((), (a,)) for a in missing])


def sigma_vee_core(c: Collection, n: int, members: dict, via_diagrams: bool = False) -> tuple:
    """Canonical negated diagrams of the small databases (all elements active)
    that embed in no member; every such edd is valid on the collection.

    ``via_diagrams`` builds each one through the relative diagram of the
    database in itself instead of directly from its mask."""
    sp = space_for(c.schema)
    core = []
    for k in range(0, n + 1):
        seen = set()
        for s, mem in members.items():
            if s < k or not mem.size:
                continue
            for xs in combinations(range(s), k):
                seen.update(sp.canon_many(k, sp.restriction(s, xs)(mem)).tolist())
        for e in sp.reps(k, full_active=True).tolist():
            if e in seen:
                continue
            if via_diagrams:
                db = sp.decode(k, e)
                delta = negate_to_edd(to_formula(relative_diagram(db, db, 0, prune=True)))
            else:
                delta = negated_diagram(k, e, c.schema)
            core.append((k, e, canonicalize_dependency(delta)))
    return tuple(core)


def axiomatize(c: Collection, n: int, m: int, model_bound: int, cap: int = 10 ** 6,
               sample: int = 50, seed: int = 0, hypotheses: bool = True):
    """Tgd/egd axioms valid on ``c`` within ``model_bound`` together with a
    report comparing their models with the collection."""
    if isinstance(c, Intensional):
        from .properties import models_at_bound
        c = models_at_bound(c.deps, c.schema, model_bound)
    members = member_masks(c, model_bound)
    bounds = (("m", m), ("model_bound", model_bound), ("n", n))
    if m == 0:
        axioms, core, elims, unelim, checked, mism = _axiomatize_m0(c, n, model_bound, members, sample, seed)
    else:
        axioms, core, elims, unelim = _axiomatize_general(c, n, m, model_bound, members)
        checked, mism = 0, ()
    dis = _compare(c, axioms, model_bound)
    hyps = _hypotheses(c, n, m, model_bound) if hypotheses else ()
    bad_h = [r.name for r in hyps if r.verdict != HOLDS]
    details = f"hypotheses failing: {', '.join(bad_h)}" if bad_h else ""
    rep = AxiomatizationReport(EXACT if not dis else DISAGREE, bounds, dis, hyps, core, elims,
                               unelim, checked, mism, details)
    return axioms, rep


def _axiomatize_m0(c, n, model_bound, members, sample, seed):
    sp = space_for(c.schema)
    tables = _Tables(c, n, members)
    core = sigma_vee_core(c, n, members)
    found, elims, unelim = {}, [], []
    shrunk = set()
    for k, emask, delta in core:
        disjuncts = delta.disjuncts if isinstance(delta, Dd) else as_edd(delta).disjuncts
        if k == 0 or not disjuncts:
            unelim.append(delta)
            continue
        f = sp.atom_mask(delta.body, {x: i for i, x in enumerate(_xs(k))})
        j = next((i for i, d in enumerate(disjuncts) if tables.valid(k, f, _head_of(d, k, sp))), None)
        if j is None:
            unelim.append(delta)
            continue
        hd = _head_of(disjuncts[j], k, sp)
        elims.append(Elimination(delta, j))
        for bit in range(sp.nbits(k)):
            if f >> bit & 1 and tables.valid(k, f & ~(1 << bit), hd):
                f &= ~(1 << bit)
        if (k, f, hd) in shrunk:
            continue
        shrunk.add((k, f, hd))
        ax = canonicalize_dependency(tables.to_dependency(k, f, hd))
        found.setdefault(canonical_key(ax), ax)
    axioms = tuple(found[k] for k in sorted(found, key=repr))
    rng = random.Random(seed)
    pool = [x for x in elims]
    picked = rng.sample(pool, min(sample, len(pool)))
    mism = []
    for el in picked:
        r = eliminate_disjunction(el.delta, c, model_bound, members=members)
        if not isinstance(r, Elimination) or r.index != el.index:
            mism.append(el.delta)
    return axioms, tuple(d for _, _, d in core), tuple(elims), tuple(unelim), len(picked), tuple(mism)


def _axiomatize_general(c, n, m, model_bound, members):
    sp = space_for(c.schema)
    deltas = {}
    for s in range(0, model_bound + 1):
        reps = sp.reps(s)
        if c.size_limit is not None and s > c.size_limit:
            break
        for mk in reps[~member_many(c, s, reps)].tolist():
            d = sp.decode(s, mk)
            for e in enumerate_induced_subdatabases(d, n):
                if e.domain != e.active_domain:
                    continue
                delta = canonicalize_dependency(
                    negate_to_edd(to_formula(relative_diagram(e, d, m, prune=True)), n, m))
                key = canonical_key(delta)
                if key not in deltas and valid_on(delta, c.schema, members):
                    deltas[key] = delta
    core = tuple(deltas[k] for k in sorted(deltas, key=repr))
    found, elims, unelim = {}, [], []
    for delta in core:
        r = eliminate_disjunction(delta, c, model_bound, members=members)
        if isinstance(r, Elimination):
            elims.append(r)
            b = canonicalize_dependency(as_basic(r.dependency))
            found.setdefault(canonical_key(b), b)
        else:
            unelim.append(delta)
    axioms = tuple(found[k] for k in sorted(found, key=repr))
    return axioms, core, tuple(elims), tuple(unelim)
