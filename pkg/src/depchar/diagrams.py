"""Robinson diagrams, relative diagrams and their negations as dds/edds."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product

from .logic import Atom, Dd, Edd, Equality, ExistsConj, Var
from .model import (Database, Fact, const_key, constant_name, fact_key, find_homomorphisms,
                    is_induced_subdatabase)


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Pattern:
    """Conjunction over diagram constants and the variables ``ys`` (y1, y2, ...)."""
    ys: tuple
    atoms: frozenset

    def __str__(self):
        body = ", ".join(_show_fact(f) for f in sorted(self.atoms, key=_term_key))
        if self.ys:
            return f"exists {', '.join(v.name for v in self.ys)}: {body}"
        return body


def _show_term(t) -> str:
    return t.name if isinstance(t, Var) else constant_name(t)


def _show_fact(f) -> str:
    return f"{f.rel}({','.join(_show_term(a) for a in f.args)})"


def _tk(t):
    return (1, t.name) if isinstance(t, Var) else (0, const_key(t))


def _term_key(f) -> tuple:
    return (f.rel, tuple(_tk(a) for a in f.args))


def canonical_pattern(atoms) -> Pattern:
    """Rename the variables of a conjunction to y1.. minimizing the sorted atom list."""
    atoms = frozenset(atoms)
    ys = sorted({a for f in atoms for a in f.args if isinstance(a, Var)})
    best = None
    for perm in permutations(range(len(ys))):
        ren = {v: Var(f"y{perm[i] + 1}") for i, v in enumerate(ys)}
        new = frozenset(Fact(f.rel, tuple(ren.get(a, a) for a in f.args)) for f in atoms)
        key = sorted(_term_key(f) for f in new)
        if best is None or key < best[0]:
            best = (key, new)
    new = best[1] if best else atoms
    return Pattern(tuple(Var(f"y{i + 1}") for i in range(len(ys))), new)


@dataclass(frozen=True)
class DiagramSentence:
    kind: str
    schema: object
    domain: tuple
    positive: frozenset
    inequalities: frozenset
    negated_atoms: frozenset = frozenset()
    forbidden_patterns: frozenset = frozenset()
    level: int = 0


@dataclass(frozen=True)
class DiagramFormula:
    base: DiagramSentence
    renaming: tuple

    @property
    def rename_map(self) -> dict:
        return dict(self.renaming)


def _all_atoms(schema, terms) -> list[Fact]:
    return [Fact(r.name, args) for r in schema for args in product(terms, repeat=r.arity)]


def _inequalities(domain) -> frozenset:
    return frozenset(frozenset(p) for p in combinations(domain, 2))


def diagram(d: Database) -> DiagramSentence:
    if not d.facts:
        raise DiagramError("the diagram is only defined for databases with facts")
    dom = tuple(d.sorted_domain())
    negated = frozenset(_all_atoms(d.schema, dom)) - d.facts
    return DiagramSentence("plain", d.schema, dom, d.facts, _inequalities(dom), negated, level=0)


def _satisfied(pattern_atoms, host: Database, frozen: dict) -> bool:
    return next(find_homomorphisms(pattern_atoms, host, frozen=frozen), None) is not None


def relative_diagram(e: Database, host: Database, level: int, prune: bool = False) -> DiagramSentence:
    """Facts of e, its inequalities, and the negation of every conjunction over
    dom(e) and y1..y_level that has no match in ``host`` fixing dom(e).

    With ``prune`` only minimal unmatched conjunctions are kept; the others
    are implied by them."""
    if level < 0:
        raise ValueError("level must be non-negative")
    if not is_induced_subdatabase(e, host):
        raise DiagramError("e is not an induced subdatabase of host")
    dom = tuple(e.sorted_domain())
    ys = [Var(f"y{i + 1}") for i in range(level)]
    alphabet = _all_atoms(e.schema, list(dom) + ys)
    alphabet.sort(key=_term_key)
    forbidden: set[Pattern] = set()
    if level == 0:
        unmatched = [f for f in alphabet if f not in e.facts]
        if prune:
            forbidden = {Pattern((), frozenset({f})) for f in unmatched}
        else:
            for k in range(1, len(alphabet) + 1):
                for gamma in combinations(alphabet, k):
                    if any(f not in e.facts for f in gamma):
                        forbidden.add(Pattern((), frozenset(gamma)))
    else:
        ident = {c: c for c in dom}
        seen: dict[Pattern, bool] = {}
        minimal: list[frozenset] = []
        for k in range(1, len(alphabet) + 1):
            for gamma in combinations(alphabet, k):
                g = frozenset(gamma)
                if prune and any(mn <= g for mn in minimal):
                    continue
                p = canonical_pattern(g)
                ok = seen.get(p)
                if ok is None:
                    ok = _satisfied(p.atoms, host, ident)
                    seen[p] = ok
                if not ok:
                    forbidden.add(p)
                    if prune:
                        minimal.append(g)
    return DiagramSentence("relative", e.schema, dom, e.facts, _inequalities(dom),
                           forbidden_patterns=frozenset(forbidden), level=level)


def to_formula(s: DiagramSentence) -> DiagramFormula:
    ren = tuple((c, Var(f"x_{constant_name(c)}")) for c in s.domain)
    return DiagramFormula(s, ren)


def _rename_fact(f, ren: dict) -> Atom:
    return Atom(f.rel, tuple(a if isinstance(a, Var) else ren[a] for a in f.args))


def holds_in(phi: DiagramFormula, d: Database) -> bool:
    """Whether some injective assignment of the x-variables into dom(d)
    realizes the positive part and none of the negative parts."""
    s = phi.base
    dom = list(s.domain)
    active = sorted({a for f in s.positive for a in f.args}, key=const_key)
    rest = [c for c in dom if c not in set(active)]
    targets = d.sorted_domain()
    for h in find_homomorphisms(s.positive, d, injective=True):
        used = set(h.values())
        free = [t for t in targets if t not in used]
        for ext in permutations(free, len(rest)):
            g = dict(h)
            g.update(zip(rest, ext))
            if _negatives_hold(s, g, d):
                return True
    return False


def _negatives_hold(s: DiagramSentence, g: dict, d: Database) -> bool:
    for f in s.negated_atoms:
        if Fact(f.rel, tuple(g[a] for a in f.args)) in d.facts:
            return False
    for p in s.forbidden_patterns:
        if _satisfied(p.atoms, d, g):
            return False
    return True


def negate_to_dd(phi: DiagramFormula) -> Dd:
    """The dd equivalent to the negation of a plain diagram formula."""
    s = phi.base
    if s.kind != "plain":
        raise DiagramError("negate_to_dd needs a plain diagram")
    if not s.positive:
        raise DiagramError("the diagram has no positive facts")
    active = {a for f in s.positive for a in f.args}
    if active != set(s.domain):
        raise DiagramError("every domain element must occur in a fact")
    ren = phi.rename_map
    eqs = [Equality(*sorted((ren[a], ren[b]))) for a, b in
           sorted((tuple(sorted(p, key=const_key)) for p in s.inequalities),
                  key=lambda t: (const_key(t[0]), const_key(t[1])))]
    atoms = [_rename_fact(f, ren) for f in sorted(s.negated_atoms, key=fact_key)]
    if not eqs and not atoms:
        raise DiagramError("the diagram of a 1-critical database has no negative part")
    return Dd([_rename_fact(f, ren) for f in s.positive], eqs + atoms)


def negate_to_edd(phi: DiagramFormula, n: int | None = None, m: int | None = None) -> Edd:
    """The edd equivalent to the negation of a (relative) diagram formula:
    body = positive facts, disjuncts = equalities and one existential
    conjunction per forbidden pattern."""
    s = phi.base
    active = {a for f in s.positive for a in f.args}
    if active != set(s.domain):
        raise DiagramError("every domain element must occur in a fact")
    if n is not None and len(s.domain) > n:
        raise DiagramError(f"{len(s.domain)} universal variables exceed n = {n}")
    if m is not None and s.level > m:
        raise DiagramError(f"diagram level {s.level} exceeds m = {m}")
    ren = phi.rename_map
    body = [_rename_fact(f, ren) for f in s.positive]
    eqs = sorted((Equality(*sorted((ren[a], ren[b]))) for a, b in (tuple(p) for p in s.inequalities)),
                 key=lambda q: (q.left, q.right))
    pats = s.forbidden_patterns
    if s.kind == "plain":
        pats = frozenset(Pattern((), frozenset({f})) for f in s.negated_atoms)
    conj = [ExistsConj(p.ys, [_rename_fact(f, ren) for f in p.atoms])
            for p in sorted(pats, key=lambda p: sorted(_term_key(f) for f in p.atoms))]
    return Edd(body, tuple(eqs + conj))


def format_diagram(s: DiagramSentence, phi: DiagramFormula | None = None) -> str:
    """One conjunction; ``!=`` for inequalities and ``~`` for negated parts."""
    ren = phi.rename_map if phi else None
    show = (lambda c: ren[c].name) if ren else constant_name

    def fact(f):
        return f"{f.rel}({','.join(a.name if isinstance(a, Var) else show(a) for a in f.args)})"

    parts = [fact(f) for f in sorted(s.positive, key=fact_key)]
    pairs = sorted((tuple(sorted(p, key=const_key)) for p in s.inequalities),
                   key=lambda t: (const_key(t[0]), const_key(t[1])))
    parts += [f"{show(a)} != {show(b)}" for a, b in pairs]
    parts += [f"~{fact(f)}" for f in sorted(s.negated_atoms, key=fact_key)]
    for p in sorted(s.forbidden_patterns, key=lambda p: sorted(_term_key(f) for f in p.atoms)):
        inner = ", ".join(fact(f) for f in sorted(p.atoms, key=_term_key))
        if p.ys:
            inner = f"exists {', '.join(v.name for v in p.ys)}: {inner}"
        parts.append(f"~[{inner}]")
    return (", ".join(parts) if parts else "true") + "."
