"""Text formats for dependencies and databases.

Dependencies::

    R(x,y), R(y,z) -> R(x,z).
    R(x,y) -> exists z: S(y,z).
    R(x,y), R(x,z) -> y = z.
    R(x,y) -> x = y | exists z: R(y,z).
    R(x,x) -> false.
    -> false.

Databases::

    domain a b c.
    R(a,b).

Both may start with ``schema R/2 P/1.``; ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .logic import (Atom, Dd, Dependency, Edd, Egd, Equality, ExistsConj, Tgd,
                    UnsafeDependency, Var, atom_sort_key, atoms_of, build_dependency,
                    canonicalize_dependency, vars_of)
from .model import (Database, Fact, RelationSymbol, Schema, SchemaError, constant_name, decode_constant,
                    fact_key)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<arrow>->)
  | (?P<neq>!=)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<sym>[(),.:|=/~\[\]])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind != "ws":
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        return ParseError(msg, t.line, t.col)

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"

    def eat(self, text: str) -> Token:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            shown = self.tok.text or "end of input"
            raise self.error(f"expected identifier, found {shown!r}")
        t = self.tok
        self.i += 1
        return t

    def peek_is(self, offset: int, text: str) -> bool:
        j = self.i + offset
        return j < len(self.toks) and self.toks[j].text == text

    def schema_decl(self) -> Schema | None:
        if not (self.at("schema") and self.toks[self.i + 1].kind == "ident"
                and self.peek_is(2, "/")):
            return None
        start = self.eat("schema")
        syms = []
        while not self.at("."):
            name = self.ident()
            self.eat("/")
            if self.tok.kind != "int":
                raise self.error("expected arity")
            try:
                syms.append(RelationSymbol(name.text, int(self.tok.text)))
            except SchemaError as e:
                raise self.error(str(e), name) from None
            self.i += 1
        self.eat(".")
        try:
            return Schema(tuple(syms))
        except SchemaError as e:
            raise self.error(str(e), start) from None

    def term_list(self) -> list[Token]:
        self.eat("(")
        args = [self.ident()]
        while self.at(","):
            self.eat(",")
            args.append(self.ident())
        self.eat(")")
        return args

    def atom(self) -> tuple[Atom, Token]:
        name = self.ident()
        args = self.term_list()
        return Atom(name.text, tuple(Var(a.text) for a in args)), name

    def conjunction(self, stop: tuple) -> list[tuple[Atom, Token]]:
        atoms = []
        if self.tok.text in stop:
            return atoms
        atoms.append(self.atom())
        while self.at(","):
            self.eat(",")
            atoms.append(self.atom())
        return atoms

    def disjunct(self, body_vars: frozenset):
        start = self.tok
        if self.at("true") and not self.peek_is(1, "("):
            self.i += 1
            return ExistsConj((), ())
        if self.tok.kind == "ident" and self.peek_is(1, "="):
            left = self.ident()
            self.eat("=")
            right = self.ident()
            for t in (left, right):
                if Var(t.text) not in body_vars:
                    raise self.error(f"variable {t.text} of the equality does not occur in the body", t)
            return Equality(Var(left.text), Var(right.text))
        ex = []
        if self.at("exists") and not self.peek_is(1, "("):
            self.eat("exists")
            ex.append(self.ident())
            while self.at(","):
                self.eat(",")
                ex.append(self.ident())
            self.eat(":")
        for t in ex:
            if Var(t.text) in body_vars:
                raise self.error(f"existential variable {t.text} also occurs in the body", t)
        exv = frozenset(Var(t.text) for t in ex)
        atoms = self.conjunction(("|", "."))
        if not atoms:
            raise self.error("expected a conjunction of atoms", start)
        for a, tok in atoms:
            for v in a.args:
                if v not in body_vars and v not in exv:
                    raise self.error(
                        f"variable {v} is neither in the body nor existentially quantified", tok)
        return ExistsConj(exv, [a for a, _ in atoms])

    def dependency(self) -> Dependency:
        first = self.tok
        body = self.conjunction(("->",))
        self.eat("->")
        bv = vars_of(a for a, _ in body)
        atoms = [a for a, _ in body]
        if self.at("false") and not self.peek_is(1, "("):
            self.i += 1
            disjuncts = []
        else:
            disjuncts = [self.disjunct(bv)]
            while self.at("|"):
                self.eat("|")
                disjuncts.append(self.disjunct(bv))
        self.eat(".")
        try:
            return build_dependency(atoms, disjuncts)
        except UnsafeDependency as e:
            raise self.error(str(e), first) from None


def _check_against(deps: list, schema: Schema | None) -> None:
    atoms = [a for dep in deps for a in atoms_of(dep)]
    if schema is None:
        if atoms:
            Schema.infer(atoms)
        return
    for a in atoms:
        if len(a.args) != schema.arity(a.rel):
            raise SchemaError(f"atom {a} does not match arity of {a.rel}")


def parse_dependency(text: str) -> Dependency:
    p = _Parser(text)
    dep = p.dependency()
    if p.tok.kind != "eof":
        raise p.error("trailing input after dependency")
    try:
        _check_against([dep], None)
    except SchemaError as e:
        raise ParseError(str(e), 1, 1) from None
    return dep


def parse_dependencies(text: str, schema: Schema | None = None) -> tuple[Schema, list[Dependency]]:
    """Schema (declared, given or inferred) and the dependencies of a file."""
    p = _Parser(text)
    declared = p.schema_decl()
    deps = []
    while p.tok.kind != "eof":
        tok = p.tok
        dep = p.dependency()
        try:
            _check_against([dep], declared or schema)
        except SchemaError as e:
            raise ParseError(str(e), tok.line, tok.col) from None
        deps.append(dep)
    if declared is None and schema is None:
        if not deps:
            raise ParseError("no dependencies and no schema declaration")
        try:
            return Schema.infer([a for d in deps for a in atoms_of(d)]), deps
        except SchemaError as e:
            raise ParseError(str(e)) from None
    return (declared or schema), deps


def parse_database(text: str, schema: Schema | None = None) -> Database:
    p = _Parser(text)
    declared = p.schema_decl()
    schema = declared or schema
    domain, explicit, facts = set(), False, []
    while p.tok.kind != "eof":
        if p.at("domain") and not p.peek_is(1, "("):
            p.eat("domain")
            explicit = True
            while not p.at("."):
                domain.add(decode_constant(p.ident().text))
            p.eat(".")
            continue
        name = p.ident()
        args = p.term_list()
        p.eat(".")
        facts.append((Fact(name.text, tuple(decode_constant(a.text) for a in args)), name))
    if schema is None:
        if not facts:
            raise ParseError("cannot infer a schema from a database without facts")
        try:
            schema = Schema.infer([f for f, _ in facts])
        except SchemaError as e:
            raise ParseError(str(e)) from None
    for f, tok in facts:
        try:
            if len(f.args) != schema.arity(f.rel):
                raise SchemaError(f"fact {f} does not match arity of {f.rel}")
        except SchemaError as e:
            raise ParseError(str(e), tok.line, tok.col) from None
        if explicit:
            for a in f.args:
                if a not in domain:
                    raise ParseError(f"constant {constant_name(a)} of {f} not in the declared domain", tok.line, tok.col)
    fs = frozenset(f for f, _ in facts)
    if not explicit:
        domain = {a for f in fs for a in f.args}
    return Database(schema, frozenset(domain), fs)


# -- printing ---------------------------------------------------------------

def format_atoms(atoms) -> str:
    return ", ".join(str(a) for a in sorted(atoms, key=atom_sort_key))


def _format_disjunct(d) -> str:
    if isinstance(d, Equality):
        return f"{d.left} = {d.right}"
    if isinstance(d, Atom):
        return str(d)
    if not d.atoms:
        return "true"
    prefix = ""
    if d.exist_vars:
        prefix = "exists " + ", ".join(v.name for v in sorted(d.exist_vars)) + ": "
    return prefix + format_atoms(d.atoms)


def format_dependency(dep: Dependency) -> str:
    body = format_atoms(dep.body)
    lead = f"{body} -> " if body else "-> "
    if isinstance(dep, Tgd):
        return lead + _format_disjunct(ExistsConj(dep.existential_vars, dep.head)) + "."
    if isinstance(dep, Egd):
        return lead + f"{dep.lhs} = {dep.rhs}."
    if not dep.disjuncts:
        return lead + "false."
    return lead + " | ".join(_format_disjunct(d) for d in dep.disjuncts) + "."


def format_canonical(dep: Dependency) -> str:
    return format_dependency(canonicalize_dependency(dep))


def format_schema(schema: Schema) -> str:
    return f"schema {schema}."


def format_database(d: Database, with_schema: bool = True) -> str:
    lines = [format_schema(d.schema)] if with_schema else []
    lines.append("domain " + " ".join(constant_name(c) for c in d.sorted_domain()) + "."
                 if d.domain else "domain.")
    lines.extend(f"{f}." for f in sorted(d.facts, key=fact_key))
    return "\n".join(lines) + "\n"


def format_dependencies(schema: Schema, deps) -> str:
    return "\n".join([format_schema(schema)] + [format_dependency(d) for d in deps]) + "\n"


def parse_schema(text: str) -> Schema:
    """``schema R/2 P/1.``; the leading keyword and final dot may be omitted."""
    text = text.strip()
    if not text.startswith("schema"):
        text = "schema " + text
    if not text.endswith("."):
        text += "."
    p = _Parser(text)
    s = p.schema_decl()
    if s is None or p.tok.kind != "eof":
        raise p.error("expected a schema declaration")
    return s
