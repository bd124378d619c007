"""Schemas, databases, homomorphisms and isomorphism.

Constants are plain hashable values: strings for named constants and
tuples for pair constants produced by direct products.  Variables live in
:mod:`depchar.logic` and are a distinct type, so the two namespaces never
collide.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Mapping

Constant = Hashable

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class SchemaError(ValueError):
    pass


def const_key(c) -> tuple:
    """Stable total order over constants of mixed kinds."""
    if isinstance(c, tuple):
        return (2, tuple(const_key(x) for x in c))
    if isinstance(c, int):
        return (1, c)
    return (0, str(c))


def constant_name(c) -> str:
    """Identifier spelling of a constant; pairs are encoded reversibly."""
    if isinstance(c, tuple):
        left, right = constant_name(c[0]), constant_name(c[1])
        return f"pair{len(left)}_{left}_{right}"
    return str(c)


def decode_constant(name: str):
    """Inverse of :func:`constant_name` for pair encodings."""
    m = re.match(r"pair(\d+)_", name)
    if not m:
        return name
    n = int(m.group(1))
    rest = name[m.end():]
    left, sep, right = rest[:n], rest[n:n + 1], rest[n + 1:]
    if sep != "_" or len(left) != n:
        return name
    return (decode_constant(left), decode_constant(right))


@dataclass(frozen=True, order=True)
class RelationSymbol:
    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 1:
            raise SchemaError(f"relation {self.name} must have positive arity")
        if not _IDENT.match(self.name):
            raise SchemaError(f"bad relation name {self.name!r}")

    def __str__(self):
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Schema:
    symbols: tuple[RelationSymbol, ...]
    _arity: Mapping[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        syms = tuple(sorted(set(self.symbols)))
        if not syms:
            raise SchemaError("schema must contain at least one relation symbol")
        arity = {}
        for s in syms:
            if s.name in arity:
                raise SchemaError(f"relation {s.name} declared twice")
            arity[s.name] = s.arity
        object.__setattr__(self, "symbols", syms)
        object.__setattr__(self, "_arity", arity)

    @classmethod
    def of(cls, **arities: int) -> "Schema":
        return cls(tuple(RelationSymbol(n, a) for n, a in arities.items()))

    @classmethod
    def infer(cls, items: Iterable) -> "Schema":
        """Schema from anything carrying ``rel`` and ``args``."""
        arity: dict[str, int] = {}
        for it in items:
            prev = arity.setdefault(it.rel, len(it.args))
            if prev != len(it.args):
                raise SchemaError(f"relation {it.rel} used with arities {prev} and {len(it.args)}")
        return cls(tuple(RelationSymbol(n, a) for n, a in arity.items()))

    def arity(self, name: str) -> int:
        try:
            return self._arity[name]
        except KeyError:
            raise SchemaError(f"relation {name} not in schema") from None

    def __contains__(self, name) -> bool:
        return name in self._arity

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    def __str__(self):
        return " ".join(str(s) for s in self.symbols)


@dataclass(frozen=True)
class Fact:
    rel: str
    args: tuple

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        return f"{self.rel}({','.join(constant_name(a) for a in self.args)})"


def fact_key(f) -> tuple:
    return (f.rel, tuple(const_key(a) for a in f.args))


@dataclass(frozen=True)
class Database:
    schema: Schema
    domain: frozenset
    facts: frozenset

    def __post_init__(self):
        object.__setattr__(self, "domain", frozenset(self.domain))
        object.__setattr__(self, "facts", frozenset(self.facts))
        for f in self.facts:
            if len(f.args) != self.schema.arity(f.rel):
                raise SchemaError(f"fact {f} does not match arity of {f.rel}")
            for a in f.args:
                if a not in self.domain:
                    raise SchemaError(f"constant {constant_name(a)} of {f} not in domain")

    @classmethod
    def build(cls, schema: Schema, facts: Iterable, domain: Iterable | None = None) -> "Database":
        facts = frozenset(f if isinstance(f, Fact) else Fact(f[0], tuple(f[1:])) for f in facts)
        if domain is None:
            domain = {a for f in facts for a in f.args}
        return cls(schema, frozenset(domain), facts)

    @classmethod
    def empty(cls, schema: Schema) -> "Database":
        return cls(schema, frozenset(), frozenset())

    @property
    def active_domain(self) -> frozenset:
        return frozenset(a for f in self.facts for a in f.args)

    def relation(self, name: str) -> frozenset:
        return frozenset(f.args for f in self.facts if f.rel == name)

    def sorted_domain(self) -> list:
        return sorted(self.domain, key=const_key)

    def sorted_facts(self) -> list:
        return sorted(self.facts, key=fact_key)

    def __str__(self):
        dom = " ".join(constant_name(c) for c in self.sorted_domain())
        facts = ", ".join(str(f) for f in self.sorted_facts())
        return f"({{{dom}}}, {{{facts}}})"


def _same_schema(d1: Database, d2: Database):
    if d1.schema != d2.schema:
        raise SchemaError("databases are over different schemas")


def active_domain(d: Database) -> frozenset:
    return d.active_domain


def restrict(d: Database, s: Iterable) -> Database:
    s = frozenset(s)
    if not s <= d.domain:
        extra = sorted((constant_name(c) for c in s - d.domain))
        raise ValueError(f"constants outside the domain: {extra}")
    return Database(d.schema, s, frozenset(f for f in d.facts if all(a in s for a in f.args)))


def is_induced_subdatabase(d_sub: Database, d: Database) -> bool:
    _same_schema(d_sub, d)
    if not d_sub.domain <= d.domain:
        return False
    return d_sub.facts == restrict(d, d_sub.domain).facts


def fact_contained(d1: Database, d2: Database) -> bool:
    _same_schema(d1, d2)
    return d1.facts <= d2.facts


def index_facts(facts: Iterable) -> dict[str, list[tuple]]:
    idx: dict[str, list[tuple]] = {}
    for f in sorted(facts, key=fact_key):
        idx.setdefault(f.rel, []).append(f.args)
    return idx


def match_atoms(atoms: list, index: Mapping[str, list], binding: dict,
                injective: bool = False) -> Iterator[dict]:
    """Backtracking join of ``atoms`` (terms may be anything hashable)
    against an index built by :func:`index_facts`.

    Picks the atom with the most bound terms next, ties broken by fewest
    candidate tuples.  Each extension of ``binding`` is yielded once.
    """
    if not atoms:
        yield dict(binding)
        return
    best, best_score = 0, None
    for i, a in enumerate(atoms):
        score = (-sum(t in binding for t in a.args), len(index.get(a.rel, ())))
        if best_score is None or score < best_score:
            best, best_score = i, score
    atom = atoms[best]
    rest = atoms[:best] + atoms[best + 1:]
    used = set(binding.values()) if injective else None
    for tup in index.get(atom.rel, ()):
        new = {}
        ok = True
        for t, v in zip(atom.args, tup):
            cur = binding.get(t, new.get(t))
            if cur is None and t not in binding and t not in new:
                if injective and (v in used or v in new.values()):
                    ok = False
                    break
                new[t] = v
            elif cur != v:
                ok = False
                break
        if not ok:
            continue
        binding.update(new)
        yield from match_atoms(rest, index, binding, injective)
        for t in new:
            del binding[t]


def find_homomorphisms(source_facts: Iterable, target: Database,
                       frozen: Mapping | None = None,
                       injective: bool = False) -> Iterator[dict]:
    """Every map h on the terms of ``source_facts`` extending ``frozen``
    with h(source_facts) contained in facts(target)."""
    atoms = sorted(set(source_facts), key=lambda a: (a.rel, tuple(map(str, a.args))))
    terms = {t for a in atoms for t in a.args}
    binding = {k: v for k, v in (frozen or {}).items() if k in terms}
    if injective and len(set(binding.values())) != len(binding):
        return
    for h in match_atoms(atoms, index_facts(target.facts), binding, injective):
        yield h


def are_isomorphic(d1: Database, d2: Database) -> bool:
    _same_schema(d1, d2)
    if len(d1.domain) != len(d2.domain) or len(d1.facts) != len(d2.facts):
        return False
    if len(d1.active_domain) != len(d2.active_domain):
        return False
    for name in d1.schema.names():
        if len(d1.relation(name)) != len(d2.relation(name)):
            return False
    for _ in find_homomorphisms(d1.facts, d2, injective=True):
        return True
    return False


def _refine(elems: list, colors: dict, occ: dict) -> dict:
    """Colour refinement; colours are ranks of label-free signatures."""
    ncolors = len(set(colors.values()))
    while True:
        sig = {}
        for e in elems:
            nb = sorted((rel, pos, tuple(colors[a] for a in args)) for rel, pos, args in occ[e])
            sig[e] = (colors[e], tuple(nb))
        ranks = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        colors = {e: ranks[sig[e]] for e in elems}
        if len(ranks) == ncolors:
            return colors
        ncolors = len(ranks)


def _canon_leaf(elems, colors, facts):
    order = sorted(elems, key=lambda e: colors[e])
    pos = {e: i for i, e in enumerate(order)}
    code = tuple(sorted((f.rel, tuple(pos[a] for a in f.args)) for f in facts))
    return code, order


def _canon_search(elems, colors, occ, facts):
    colors = _refine(elems, colors, occ)
    cells: dict[int, list] = {}
    for e in elems:
        cells.setdefault(colors[e], []).append(e)
    target = next((c for c in sorted(cells) if len(cells[c]) > 1), None)
    if target is None:
        return _canon_leaf(elems, colors, facts)
    best = None
    for v in sorted(cells[target], key=const_key):
        split = {e: 2 * c + (1 if c == target and e != v else 0) for e, c in colors.items()}
        res = _canon_search(elems, split, occ, facts)
        if best is None or res[0] < best[0]:
            best = res
    return best


def canonical_labeling(d: Database) -> list:
    """Domain of ``d`` listed in canonical order (active elements first)."""
    active = sorted(d.active_domain, key=const_key)
    occ = {e: [] for e in active}
    for f in d.facts:
        for i, a in enumerate(f.args):
            occ[a].append((f.rel, i, f.args))
    order = []
    if active:
        _, order = _canon_search(active, {e: 0 for e in active}, occ, d.facts)
    inactive = sorted(d.domain - d.active_domain, key=const_key)
    return list(order) + inactive


def canonical_form(d: Database) -> Database:
    """Isomorphic copy over c0, c1, ... that is equal for isomorphic inputs."""
    order = canonical_labeling(d)
    ren = {c: f"c{i}" for i, c in enumerate(order)}
    return Database(d.schema, frozenset(ren.values()),
                    frozenset(Fact(f.rel, tuple(ren[a] for a in f.args)) for f in d.facts))


def rename(d: Database, mapping: Mapping) -> Database:
    """Apply an injective renaming of constants."""
    return Database(d.schema, frozenset(mapping.get(c, c) for c in d.domain),
                    frozenset(Fact(f.rel, tuple(mapping.get(a, a) for a in f.args)) for f in d.facts))
