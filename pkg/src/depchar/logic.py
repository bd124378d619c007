"""Dependency ASTs (tgds, egds, dds, edds) and their satisfaction."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Iterable, Union

from .model import Database, SchemaError, find_homomorphisms


class UnsafeDependency(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple

    def __post_init__(self):
        args = tuple(self.args)
        for a in args:
            if not isinstance(a, Var):
                raise TypeError(f"atom arguments must be variables, got {a!r}")
        object.__setattr__(self, "args", args)

    @property
    def vars(self) -> frozenset:
        return frozenset(self.args)

    def __str__(self):
        return f"{self.rel}({','.join(v.name for v in self.args)})"


def atom_sort_key(a: Atom):
    return (a.rel, tuple(v.name for v in a.args))


def vars_of(atoms: Iterable[Atom]) -> frozenset:
    return frozenset(v for a in atoms for v in a.args)


@dataclass(frozen=True)
class Equality:
    left: Var
    right: Var

    def __str__(self):
        return f"{self.left} = {self.right}"


@dataclass(frozen=True)
class ExistsConj:
    """``exists ys: atoms``; the quantified block is recomputed by the
    owning :class:`Edd` as the atom variables that are not universal."""
    exist_vars: frozenset
    atoms: frozenset

    def __post_init__(self):
        object.__setattr__(self, "exist_vars", frozenset(self.exist_vars))
        object.__setattr__(self, "atoms", frozenset(self.atoms))


Disjunct = Union[Equality, ExistsConj]


@dataclass(frozen=True)
class Tgd:
    body: frozenset
    head: frozenset

    def __post_init__(self):
        object.__setattr__(self, "body", frozenset(self.body))
        object.__setattr__(self, "head", frozenset(self.head))
        if not self.head:
            raise UnsafeDependency("tgd head must be non-empty")

    @property
    def universal_vars(self) -> frozenset:
        return vars_of(self.body)

    @property
    def existential_vars(self) -> frozenset:
        return vars_of(self.head) - vars_of(self.body)

    @property
    def is_full(self) -> bool:
        return not self.existential_vars


@dataclass(frozen=True)
class Egd:
    body: frozenset
    lhs: Var
    rhs: Var

    def __post_init__(self):
        object.__setattr__(self, "body", frozenset(self.body))
        if not self.body:
            raise UnsafeDependency("egd body must be non-empty")
        bv = vars_of(self.body)
        for v in (self.lhs, self.rhs):
            if v not in bv:
                raise UnsafeDependency(f"variable {v} of the equality does not occur in the body")

    @property
    def universal_vars(self) -> frozenset:
        return vars_of(self.body)


def _check_equality(eq: Equality, bv: frozenset):
    for v in (eq.left, eq.right):
        if v not in bv:
            raise UnsafeDependency(f"variable {v} of the equality does not occur in the body")


@dataclass(frozen=True)
class Edd:
    body: frozenset
    disjuncts: tuple

    def __post_init__(self):
        body = frozenset(self.body)
        object.__setattr__(self, "body", body)
        bv = vars_of(body)
        out = []
        for d in self.disjuncts:
            if isinstance(d, Equality):
                _check_equality(d, bv)
                out.append(d)
            elif isinstance(d, ExistsConj):
                if d.exist_vars & bv:
                    raise UnsafeDependency("existential variables must not occur in the body")
                used = vars_of(d.atoms)
                stray = used - bv - d.exist_vars
                if stray:
                    raise UnsafeDependency(
                        f"variable {min(stray)} is neither in the body nor existentially quantified")
                out.append(ExistsConj(used - bv, d.atoms))
            else:
                raise TypeError(f"not a disjunct: {d!r}")
        object.__setattr__(self, "disjuncts", tuple(out))

    @property
    def universal_vars(self) -> frozenset:
        return vars_of(self.body)


@dataclass(frozen=True)
class Dd:
    """Disjunctive dependency: equalities and single atoms over body variables."""
    body: frozenset
    disjuncts: tuple

    def __post_init__(self):
        body = frozenset(self.body)
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "disjuncts", tuple(self.disjuncts))
        if not body:
            raise UnsafeDependency("dd body must be non-empty")
        bv = vars_of(body)
        for d in self.disjuncts:
            if isinstance(d, Equality):
                _check_equality(d, bv)
            elif isinstance(d, Atom):
                if not d.vars <= bv:
                    raise UnsafeDependency(f"atom {d} uses variables outside the body")
            else:
                raise TypeError(f"not a dd disjunct: {d!r}")

    @property
    def universal_vars(self) -> frozenset:
        return vars_of(self.body)

    def as_edd(self) -> Edd:
        return Edd(self.body, tuple(d if isinstance(d, Equality) else ExistsConj((), (d,))
                                    for d in self.disjuncts))


Dependency = Union[Tgd, Egd, Dd, Edd]


def build_dependency(body, disjuncts) -> Dependency:
    """Most specific AST for ``body -> d1 | ... | dk``."""
    body, disjuncts = frozenset(body), list(disjuncts)
    if len(disjuncts) == 1:
        (d,) = disjuncts
        if isinstance(d, Equality) and body:
            return Egd(body, d.left, d.right)
        if isinstance(d, ExistsConj) and d.atoms:
            return Tgd(body, d.atoms)
    if body and len(disjuncts) > 1 and all(
            isinstance(d, Equality) or (not d.exist_vars and len(d.atoms) == 1) for d in disjuncts):
        return Dd(body, [d if isinstance(d, Equality) else next(iter(d.atoms)) for d in disjuncts])
    return Edd(body, tuple(disjuncts))


def normalize(dep: Dependency) -> Dependency:
    """Most specific AST with the same meaning."""
    if isinstance(dep, (Tgd, Egd)) or (isinstance(dep, Dd) and len(dep.disjuncts) > 1):
        return dep
    e = as_edd(dep)
    return build_dependency(e.body, e.disjuncts)


def as_edd(dep: Dependency) -> Edd:
    """Uniform edd view of any dependency."""
    if isinstance(dep, Edd):
        return dep
    if isinstance(dep, Dd):
        return dep.as_edd()
    if isinstance(dep, Tgd):
        return Edd(dep.body, (ExistsConj(dep.existential_vars, dep.head),))
    if isinstance(dep, Egd):
        return Edd(dep.body, (Equality(dep.lhs, dep.rhs),))
    raise TypeError(f"not a dependency: {dep!r}")


def atoms_of(dep: Dependency) -> list[Atom]:
    e = as_edd(dep)
    out = list(e.body)
    for d in e.disjuncts:
        if isinstance(d, ExistsConj):
            out.extend(d.atoms)
    return out


def check_schema(dep: Dependency, schema) -> None:
    for a in atoms_of(dep):
        if len(a.args) != schema.arity(a.rel):
            raise SchemaError(f"atom {a} does not match arity of {a.rel}")


def _disjunct_holds(d: Disjunct, h: dict, db: Database) -> bool:
    if isinstance(d, Equality):
        return h[d.left] == h[d.right]
    if not d.atoms:
        return True
    for _ in find_homomorphisms(d.atoms, db, frozen=h):
        return True
    return False


def satisfies(d: Database, dep: Dependency) -> bool:
    check_schema(dep, d.schema)
    e = as_edd(dep)
    for h in find_homomorphisms(e.body, d):
        if not any(_disjunct_holds(x, h, d) for x in e.disjuncts):
            return False
    return True


def satisfies_all(d: Database, deps: Iterable[Dependency]) -> bool:
    return all(satisfies(d, dep) for dep in deps)


def variable_budget(dep: Dependency) -> tuple[int, int]:
    """(universal, existential) counts; for edds the existential count is
    the largest block of any single disjunct."""
    if isinstance(dep, Tgd):
        return len(dep.universal_vars), len(dep.existential_vars)
    if isinstance(dep, (Egd, Dd)):
        return len(dep.universal_vars), 0
    ex = [len(d.exist_vars) for d in dep.disjuncts if isinstance(d, ExistsConj)]
    return len(dep.universal_vars), max(ex, default=0)


FULL_TGD, TGD, EGD, DD, EDD = "full-tgd", "tgd", "egd", "dd", "edd"
CONTRADICTION, TAUTOLOGY = "contradiction", "tautology"


def classify(dep: Dependency) -> str:
    if isinstance(dep, Tgd):
        return FULL_TGD if dep.is_full else TGD
    if isinstance(dep, Egd):
        return EGD
    e = as_edd(dep)
    if not e.body and not e.disjuncts:
        return CONTRADICTION
    for d in e.disjuncts:
        if isinstance(d, Equality) and d.left == d.right:
            return TAUTOLOGY
        if isinstance(d, ExistsConj) and (not d.atoms or (not d.exist_vars and d.atoms <= e.body)):
            return TAUTOLOGY
    if len(e.disjuncts) == 1:
        (d,) = e.disjuncts
        if isinstance(d, Equality):
            return EGD
        return TGD if d.exist_vars else FULL_TGD
    if e.body and e.disjuncts and all(
            isinstance(d, Equality) or (not d.exist_vars and len(d.atoms) == 1) for d in e.disjuncts):
        return DD
    return EDD


def as_basic(dep: Dependency) -> Dependency:
    """Tgd/Egd object for a dependency classified as a tgd or egd."""
    kind = classify(dep)
    if isinstance(dep, (Tgd, Egd)):
        return dep
    if kind not in (TGD, FULL_TGD, EGD):
        raise ValueError(f"a {kind} is not a tgd or egd")
    (d,) = as_edd(dep).disjuncts
    if isinstance(d, Equality):
        return Egd(dep.body, d.left, d.right)
    return Tgd(dep.body, d.atoms)


# -- canonical forms ---------------------------------------------------------
# Variables are first replaced by integers; a universal variable becomes
# (0, i) and an existential one (1, j) under the renaming being tried.

def _ex_block_key(atoms: list, nex: int, uperm: tuple) -> tuple:
    """Least sorted atom list over the orderings of an existential block.
    ``atoms`` holds (rel, terms) with terms (0, i) universal or (1, j) existential."""
    best = None
    for eperm in permutations(range(nex)):
        key = tuple(sorted((rel, tuple((0, uperm[t[1]]) if t[0] == 0 else (1, eperm[t[1]]) for t in args))
                           for rel, args in atoms))
        if best is None or key < best:
            best = key
    return best


def _index_block(atoms, upos: dict, ex: list) -> tuple[list, int]:
    epos = {v: j for j, v in enumerate(ex)}
    return [(a.rel, tuple((0, upos[v]) if v in upos else (1, epos[v]) for v in a.args))
            for a in atoms], len(ex)


def _canon_parts(dep: Dependency):
    uv = sorted(dep.universal_vars)
    upos = {v: i for i, v in enumerate(uv)}
    body = [(a.rel, tuple(upos[v] for v in a.args)) for a in dep.body]
    if isinstance(dep, Tgd):
        return "T", len(uv), body, [_index_block(dep.head, upos, sorted(dep.existential_vars))]
    if isinstance(dep, Egd):
        return "E", len(uv), body, [(upos[dep.lhs], upos[dep.rhs])]
    rest = []
    for d in dep.disjuncts:
        if isinstance(d, Equality):
            rest.append(("eq", upos[d.left], upos[d.right]))
        elif isinstance(d, Atom):
            rest.append(("atom", d.rel, tuple(upos[v] for v in d.args)))
        else:
            rest.append(("ex",) + _index_block(d.atoms, upos, sorted(d.exist_vars)))
    return ("D" if isinstance(dep, Dd) else "X"), len(uv), body, rest


def _key_under(kind, body, rest, perm) -> tuple:
    bk = tuple(sorted((rel, tuple((0, perm[i]) for i in args)) for rel, args in body))
    if kind == "T":
        return (kind, bk, _ex_block_key(rest[0][0], rest[0][1], perm))
    if kind == "E":
        a, b = rest[0]
        return (kind, bk, tuple(sorted(((0, perm[a]), (0, perm[b])))))
    ds = set()
    for r in rest:
        if r[0] == "eq":
            ds.add((0, tuple(sorted(((0, perm[r[1]]), (0, perm[r[2]]))))))
        elif r[0] == "atom":
            ds.add((1, (r[1], tuple((0, perm[i]) for i in r[2]))))
        else:
            ds.add((1, _ex_block_key(r[1], r[2], perm)))
    return (kind, bk, tuple(sorted(ds)))


@lru_cache(maxsize=None)
def _var(key: tuple) -> Var:
    return Var(("x" if key[0] == 0 else "y") + str(key[1]))


def rebuild_canonical(key) -> Dependency:
    """The canonical dependency whose :func:`canonical_key` is ``key``."""
    kind, body, rest = key
    mk = lambda ak: Atom(ak[0], tuple(_var(k) for k in ak[1]))
    b = [mk(a) for a in body]
    if kind == "T":
        return Tgd(b, [mk(a) for a in rest])
    if kind == "E":
        return Egd(b, _var(rest[0]), _var(rest[1]))
    out = []
    for tag, val in rest:
        if tag == 0:
            out.append(Equality(_var(val[0]), _var(val[1])))
        elif kind == "D":
            out.append(ExistsConj((), (mk(val),)))
        else:
            atoms = [mk(a) for a in val]
            out.append(ExistsConj(vars_of(atoms) - vars_of(b), atoms))
    return build_dependency(b, out)


def canonical_key(dep: Dependency):
    kind, n, body, rest = _canon_parts(normalize(dep))
    best = None
    for perm in permutations(range(n)):
        key = _key_under(kind, body, rest, perm)
        if best is None or key < best:
            best = key
    return best


def canonicalize_dependency(dep: Dependency) -> Dependency:
    """Variables renamed to x0.. (universal) and y0.. (existential), atoms and
    disjuncts sorted and deduplicated; alpha-variants map to equal values."""
    return rebuild_canonical(canonical_key(dep))
