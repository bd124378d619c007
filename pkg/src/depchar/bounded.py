"""Bitmask encoding of databases over the domain [s] = {0, ..., s-1}.

Atoms are numbered globally in the order (max argument, relation, args), so
the atoms over [s] form a prefix of the numbering and a database over [s]
keeps its mask when its domain is padded to [s+1].  All bounded searches in
the package (enumeration, property checks, axiomatization, brute-force
implication) go through this module; numpy is used whenever a level has at
most ``VEC_BITS`` atoms, so every mask of that level fits in one array.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product

import numpy as np

from .logic import Dependency, Equality, as_edd, check_schema
from .model import Database, Fact, Schema, canonical_form

VEC_BITS = 22
SCALAR_CANON_MAX = 7


class BitGather:
    """out bit d = OR of input bits s over the (d, s) pairs, via byte tables."""

    def __init__(self, pairs, nsrc: int):
        self.nchunks = max(1, (nsrc + 7) // 8)
        contrib = np.zeros((self.nchunks, 8), dtype=np.uint64)
        for d, s in pairs:
            contrib[s // 8, s % 8] |= np.uint64(1) << np.uint64(d)
        v = np.arange(256)
        self.tables = np.zeros((self.nchunks, 256), dtype=np.uint64)
        for c in range(self.nchunks):
            for b in range(8):
                self.tables[c, ((v >> b) & 1) == 1] |= contrib[c, b]
        self._py = [[int(x) for x in t] for t in self.tables]

    def __call__(self, masks: np.ndarray) -> np.ndarray:
        masks = masks.astype(np.uint64, copy=False)
        out = np.zeros(masks.shape, dtype=np.uint64)
        for c in range(self.nchunks):
            out |= self.tables[c][((masks >> np.uint64(8 * c)) & np.uint64(255)).astype(np.intp)]
        return out

    def scalar(self, mask: int) -> int:
        out = 0
        for c in range(self.nchunks):
            out |= self._py[c][(mask >> (8 * c)) & 255]
        return out


class Space:
    def __init__(self, schema: Schema):
        self.schema = schema
        self.rels = schema.names()
        self.arity = [schema.arity(r) for r in self.rels]
        self.atoms: list[tuple[int, tuple]] = []
        self.index: dict[tuple[int, tuple], int] = {}
        self._counts = [0]
        self._gather_cache: dict = {}
        self._canon_cache: dict = {}

    def _grow(self, s: int):
        while len(self._counts) <= s:
            t = len(self._counts) - 1
            for ri, a in enumerate(self.arity):
                for args in product(range(t + 1), repeat=a):
                    if max(args) == t:
                        self.index[(ri, args)] = len(self.atoms)
                        self.atoms.append((ri, args))
            self._counts.append(len(self.atoms))

    def nbits(self, s: int) -> int:
        self._grow(s)
        return self._counts[s]

    def bit(self, rel: str | int, args: tuple) -> int:
        ri = self.rels.index(rel) if isinstance(rel, str) else rel
        if args:
            self._grow(max(args) + 1)
        return self.index[(ri, tuple(args))]

    def vectorizable(self, s: int) -> bool:
        return self.nbits(s) <= VEC_BITS

    def all_masks(self, s: int) -> np.ndarray:
        if not self.vectorizable(s):
            raise ValueError(f"level {s} has {self.nbits(s)} atoms, too many to enumerate")
        return np.arange(1 << self.nbits(s), dtype=np.uint64)

    # -- gathers ---------------------------------------------------------
    def pullback(self, k: int, s: int, h: tuple) -> BitGather:
        """Mask over [k] of h^-1(M) for M over [s], where h: [k] -> [s]."""
        key = ("pb", k, s, tuple(h))
        g = self._gather_cache.get(key)
        if g is None:
            nk, ns = self.nbits(k), self.nbits(s)
            pairs = []
            for j in range(nk):
                ri, args = self.atoms[j]
                pairs.append((j, self.index[(ri, tuple(h[a] for a in args))]))
            g = BitGather(pairs, ns)
            self._gather_cache[key] = g
        return g

    def restriction(self, s: int, xs: tuple) -> BitGather:
        """Restriction of masks over [s] to the sorted subset ``xs``, relabelled to [|xs|]."""
        return self.pullback(len(xs), s, tuple(xs))

    def permuter(self, s: int, perm: tuple) -> BitGather:
        """Image of masks over [s] under the permutation i -> perm[i]."""
        inv = [0] * s
        for i, p in enumerate(perm):
            inv[p] = i
        return self.pullback(s, s, tuple(inv))

    def elem_bits(self, s: int) -> list[int]:
        """For each element e < s, the mask of atoms over [s] mentioning e."""
        key = ("elem", s)
        if key in self._gather_cache:
            return self._gather_cache[key]
        out = [0] * s
        for j in range(self.nbits(s)):
            for a in set(self.atoms[j][1]):
                out[a] |= 1 << j
        self._gather_cache[key] = out
        return out

    def active_count(self, s: int, masks: np.ndarray) -> np.ndarray:
        masks = masks.astype(np.uint64, copy=False)
        cnt = np.zeros(masks.shape, dtype=np.int64)
        for eb in self.elem_bits(s):
            cnt += (masks & np.uint64(eb)) != 0
        return cnt

    def active_set(self, s: int, mask: int) -> frozenset:
        return frozenset(e for e, eb in enumerate(self.elem_bits(s)) if mask & eb)

    # -- canonical ids ---------------------------------------------------
    def canon_ids(self, s: int) -> np.ndarray:
        """Canonical id (minimum image over permutations) of every mask at level s."""
        key = ("vec", s)
        if key not in self._canon_cache:
            masks = self.all_masks(s)
            best = masks.copy()
            for perm in permutations(range(s)):
                np.minimum(best, self.permuter(s, perm)(masks), out=best)
            self._canon_cache[key] = best
        return self._canon_cache[key]

    def canon_id(self, s: int, mask: int) -> int:
        if self.vectorizable(s):
            return int(self.canon_ids(s)[mask])
        if s > SCALAR_CANON_MAX:
            raise ValueError(f"level {s} is too large for permutation canonicalization")
        return min(self.permuter(s, p).scalar(mask) for p in permutations(range(s)))

    def canon_many(self, s: int, masks: np.ndarray) -> np.ndarray:
        if self.vectorizable(s):
            return self.canon_ids(s)[masks.astype(np.intp)]
        best = masks.astype(np.uint64).copy()
        for perm in permutations(range(s)):
            np.minimum(best, self.permuter(s, perm)(masks), out=best)
        return best

    def reps(self, s: int, full_active: bool = False) -> np.ndarray:
        """Sorted canonical ids of the isomorphism classes at level s."""
        key = ("reps", s, full_active)
        if key not in self._canon_cache:
            ids = np.unique(self.canon_ids(s))
            if full_active:
                ids = ids[self.active_count(s, ids) == s]
            self._canon_cache[key] = ids
        return self._canon_cache[key]

    def class_count(self, s: int) -> int:
        return len(self.reps(s))

    # -- conversion ------------------------------------------------------
    def decode(self, s: int, mask: int, names=None) -> Database:
        names = names or [f"c{i}" for i in range(s)]
        facts = []
        for j in range(self.nbits(s)):
            if mask >> j & 1:
                ri, args = self.atoms[j]
                facts.append(Fact(self.rels[ri], tuple(names[a] for a in args)))
        return Database(self.schema, frozenset(names[:s]), frozenset(facts))

    def encode(self, d: Database, order=None) -> tuple[int, int, list]:
        order = list(order) if order is not None else d.sorted_domain()
        pos = {c: i for i, c in enumerate(order)}
        s = len(order)
        self._grow(s)
        mask = 0
        for f in d.facts:
            mask |= 1 << self.bit(f.rel, tuple(pos[a] for a in f.args))
        return s, mask, order

    def iso_key(self, d: Database):
        """Hashable key, equal exactly for isomorphic databases."""
        s = len(d.domain)
        if s <= SCALAR_CANON_MAX and self.nbits(s) <= 63:
            _, mask, _ = self.encode(d)
            return (s, self.canon_id(s, mask))
        c = canonical_form(d)
        return (s, tuple(sorted((f.rel, f.args) for f in c.facts)))

    # -- satisfaction ----------------------------------------------------
    def atom_mask(self, atoms, h: dict) -> int:
        m = 0
        for a in atoms:
            m |= 1 << self.bit(a.rel, tuple(h[v] for v in a.args))
        return m

    def dependency_tests(self, dep: Dependency, s: int):
        """List of (body mask, alternatives) for every body assignment into [s];
        ``alternatives`` is None when an equality disjunct already holds,
        otherwise the masks of which at least one must be contained."""
        return _dependency_tests(self, dep, s)

    def sat_vector(self, dep: Dependency, s: int, masks: np.ndarray) -> np.ndarray:
        """Boolean array: which masks at level s (domain [s]) satisfy ``dep``."""
        if self.nbits(s) > 63:
            raise ValueError(f"level {s} has too many atoms for vectorized satisfaction")
        masks = masks.astype(np.uint64, copy=False)
        ok = np.ones(masks.shape, dtype=bool)
        for body, alts in self.dependency_tests(dep, s):
            if alts is None:
                continue
            b = np.uint64(body)
            viol = (masks & b) == b
            for alt in alts:
                a = np.uint64(alt)
                viol &= (masks & a) != a
            ok &= ~viol
        return ok

    def sat_scalar(self, dep: Dependency, s: int, mask: int) -> bool:
        for body, alts in self.dependency_tests(dep, s):
            if alts is None or mask & body != body:
                continue
            if not any(mask & a == a for a in alts):
                return False
        return True


def _dependency_tests(space: Space, dep: Dependency, s: int):
    key = ("tests", dep, s)
    cached = space._gather_cache.get(key)
    if cached is not None:
        return cached
    check_schema(dep, space.schema)
    e = as_edd(dep)
    uv = sorted(e.universal_vars)
    seen = set()
    tests = []
    for vals in product(range(s), repeat=len(uv)):
        h = dict(zip(uv, vals))
        body = space.atom_mask(e.body, h)
        alts: list[int] | None = []
        for d in e.disjuncts:
            if isinstance(d, Equality):
                if h[d.left] == h[d.right]:
                    alts = None
                    break
                continue
            ex = sorted(d.exist_vars)
            for evals in product(range(s), repeat=len(ex)):
                g = dict(h)
                g.update(zip(ex, evals))
                alts.append(space.atom_mask(d.atoms, g))
        if alts is not None:
            if any(a & ~body == 0 for a in alts):
                alts = None
            else:
                alts = tuple(sorted(set(alts)))
        item = (body, alts)
        if item not in seen:
            seen.add(item)
            tests.append(item)
    space._gather_cache[key] = tests
    return tests


@lru_cache(maxsize=None)
def space_for(schema: Schema) -> Space:
    return Space(schema)


def database_key(d: Database):
    """Isomorphism key of ``d`` (see :meth:`Space.iso_key`)."""
    return space_for(d.schema).iso_key(d)
