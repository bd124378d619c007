"""Shared builders and naive oracles for the test suite."""
from itertools import product

from depchar.logic import Atom, Egd, Equality, ExistsConj, Tgd, Var, as_edd
from depchar.model import Database, Fact, Schema

X, Y, Z, W = (Var(n) for n in "xyzw")


def db(schema, facts, domain=None):
    return Database.build(schema, [(f[0],) + tuple(f[1:]) for f in facts], domain)


def A(rel, *names):
    return Atom(rel, tuple(Var(n) for n in names))


def naive_satisfies(d: Database, dep) -> bool:
    """All assignments of the universal variables, then of each disjunct's
    existential block; no indexing, no pruning."""
    e = as_edd(dep)
    uv = sorted({v for a in e.body for v in a.args})
    dom = sorted(d.domain, key=str)

    def holds(atoms, h):
        return all(Fact(a.rel, tuple(h[v] for v in a.args)) in d.facts for a in atoms)

    for vals in product(dom, repeat=len(uv)):
        h = dict(zip(uv, vals))
        if not holds(e.body, h):
            continue
        ok = False
        for dj in e.disjuncts:
            if isinstance(dj, Equality):
                ok = h[dj.left] == h[dj.right]
            else:
                ex = sorted(dj.exist_vars)
                ok = any(holds(dj.atoms, {**h, **dict(zip(ex, ev))}) for ev in product(dom, repeat=len(ex)))
            if ok:
                break
        if not ok:
            return False
    return True


def random_basic(rng, schema: Schema, n: int, m: int, full_only: bool = False):
    """Random tgd or egd with at most n universal and m existential variables."""
    xs = [Var(f"x{i}") for i in range(n)]
    ys = [Var(f"y{i}") for i in range(m)]
    rels = list(schema)
    while True:
        body = [Atom(r.name, tuple(rng.choice(xs) for _ in range(r.arity)))
                for r in (rng.choice(rels) for _ in range(rng.randint(1, 3)))]
        bv = sorted({v for a in body for v in a.args})
        if len(bv) >= 2 and rng.random() < 0.35:
            a, b = rng.sample(bv, 2)
            return Egd(body, a, b)
        pool = bv + ([] if full_only else ys)
        head = [Atom(r.name, tuple(rng.choice(pool) for _ in range(r.arity)))
                for r in (rng.choice(rels) for _ in range(rng.randint(1, 2)))]
        return Tgd(body, head)
