"""Command-line front end.

Every subcommand produces a list of records (plain dicts).  ``--format
records`` prints them as JSON lines with sorted keys; the human format is a
rendering of the same records.  Exit status: 0 for a positive or exact
verdict, 1 for a negative one, 2 for usage, input and bound errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .algebra import enumerate_databases, intersection, m_neighbourhood, product_all
from .axiomatizer import CapExceeded, EXACT, axiomatize, enumerate_dds, enumerate_edds, semantic_dedup
from .chase import ChaseError, decide
from .diagrams import (DiagramError, diagram, format_diagram, negate_to_dd, negate_to_edd, relative_diagram,
                       to_formula)
from .logic import UnsafeDependency, satisfies
from .model import Database, SchemaError, const_key
from .properties import (HOLDS, BoundExceeded, Extensional, Intensional, check_1_criticality,
                         check_closure_intersections, check_closure_products, check_closure_subdatabases,
                         check_domain_independence, check_locality, check_modularity)
from .syntax import (ParseError, format_database, format_dependencies, format_dependency, parse_database,
                     parse_dependencies, parse_schema)

WORKERS_ENV = "DEPCHAR_WORKERS"
PROPERTIES = ("1-criticality", "domain-independence", "modularity", "closure-subdatabases",
              "closure-intersections", "closure-products", "locality")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class SessionConfig:
    command: str
    inputs: tuple = ()
    n: int | None = None
    m: int | None = None
    model_bound: int | None = None
    witness_bound: int | None = None
    output_format: str = "human"
    seed: int = 0
    workers: int = 1
    options: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("n", "m", "model_bound", "witness_bound"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise UsageError(f"{name} must be non-negative")
        if self.workers < 1:
            raise UsageError("the worker count must be positive")
        if self.output_format not in ("human", "records"):
            raise UsageError(f"unknown output format {self.output_format!r}")
        for p in self.inputs:
            if not Path(p).exists():
                raise UsageError(f"no such file or directory: {p}")


def workers_from_env() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def _map(fn, items, workers: int) -> list:
    """Results in input order whatever the completion order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# -- input ---------------------------------------------------------------

def _read(path) -> str:
    return Path(path).read_text()


def _schema_arg(value):
    if value is None:
        return None
    return parse_schema(_read(value) if Path(value).is_file() else value)


def _database(path, schema=None) -> Database:
    return parse_database(_read(path), schema)


def _dependencies(path, schema=None):
    return parse_dependencies(_read(path), schema)


def _extensional(directory, schema, universe_bound) -> Extensional:
    root = Path(directory)
    if not root.is_dir():
        raise UsageError(f"{directory} is not a directory")
    if schema is None:
        decl = sorted(root.glob("*.schema"))
        if not decl:
            raise UsageError("an extensional collection needs --schema or a .schema file")
        schema = parse_schema(decl[0].read_text())
    dbs = [parse_database(p.read_text(), schema) for p in sorted(root.glob("*.facts"))]
    if universe_bound is None:
        universe_bound = max((len(d.domain) for d in dbs), default=0)
    return Extensional(schema, dbs, universe_bound)


def _collection(cfg: SessionConfig):
    o = cfg.options
    schema = _schema_arg(o.get("schema"))
    if bool(o.get("deps")) == bool(o.get("extensional")):
        raise UsageError("give exactly one of --deps and --extensional")
    if o.get("deps"):
        schema, deps = _dependencies(o["deps"], schema)
        return Intensional(schema, deps)
    return _extensional(o["extensional"], schema, o.get("universe_bound"))


def _db_text(d: Database) -> str:
    return format_database(d)


def _flag_empty(rec: dict, *dbs: Database) -> dict:
    if any(not d.domain for d in dbs):
        rec["empty_domain"] = True
    return rec


# -- commands --------------------------------------------------------------

def cmd_check_sat(cfg):
    db_path, dep_path = cfg.inputs
    schema, deps = _dependencies(dep_path, _schema_arg(cfg.options.get("schema")))
    d = _database(db_path, schema)
    violated = [format_dependency(dep) for dep in deps if not satisfies(d, dep)]
    rec = {"command": "check-sat", "satisfied": not violated, "dependencies": len(deps),
           "violated": violated}
    return [_flag_empty(rec, d)], 0 if not violated else 1


def cmd_product(cfg):
    schema = _schema_arg(cfg.options.get("schema"))
    first = _database(cfg.inputs[0], schema)
    dbs = [first] + [_database(p, first.schema) for p in cfg.inputs[1:]]
    p = product_all(dbs)
    _write_opt(cfg, _db_text(p))
    return [_flag_empty({"command": "product", "database": _db_text(p)}, p)], 0


def cmd_intersect(cfg):
    schema = _schema_arg(cfg.options.get("schema"))
    d1 = _database(cfg.inputs[0], schema)
    d2 = _database(cfg.inputs[1], d1.schema)
    r = intersection(d1, d2)
    _write_opt(cfg, _db_text(r))
    return [_flag_empty({"command": "intersect", "database": _db_text(r)}, r)], 0


def cmd_neighbourhood(cfg):
    schema = _schema_arg(cfg.options.get("schema"))
    base = _database(cfg.inputs[0], schema)
    host = _database(cfg.inputs[1], base.schema)
    found = sorted(m_neighbourhood(base, host, cfg.m),
                   key=lambda e: (len(e.domain), sorted(const_key(c) for c in e.domain)))
    recs = [{"command": "neighbourhood", "index": i, "database": _db_text(e)} for i, e in enumerate(found)]
    recs.append({"command": "neighbourhood", "count": len(found), "radius": cfg.m})
    return recs, 0


def cmd_diagram(cfg):
    o = cfg.options
    schema = _schema_arg(o.get("schema"))
    e = _database(cfg.inputs[0], schema)
    if o.get("host"):
        s = relative_diagram(e, _database(o["host"], e.schema), o.get("level") or 0, prune=o.get("prune"))
    else:
        s = diagram(e)
    phi = to_formula(s)
    if o.get("as_edd"):
        text, form = format_dependency(negate_to_edd(phi)), "edd"
    elif o.get("as_dd"):
        text, form = format_dependency(negate_to_dd(phi)), "dd"
    else:
        text, form = format_diagram(s, phi), "diagram"
    return [{"command": "diagram", "kind": s.kind, "level": s.level, "form": form, "text": text}], 0


def cmd_implies(cfg):
    o = cfg.options
    schema, sigma = _dependencies(cfg.inputs[0], _schema_arg(o.get("schema")))
    _, targets = _dependencies(cfg.inputs[1], schema)
    if not targets:
        raise UsageError("the target file has no dependency")

    def one(t):
        return decide(sigma, t, o.get("method", "chase"), cfg.model_bound, schema)

    recs, code = [], 0
    for t, v in zip(targets, _map(one, targets, cfg.workers)):
        rec = {"command": "implies", "target": format_dependency(t), "implied": v.implied,
               "method": v.method, "complete": v.complete}
        if v.bound is not None:
            rec["bound"] = v.bound
        if v.chase is not None:
            rec["trace"] = v.chase.trace()
            rec["steps"] = len(v.chase.steps)
        if v.countermodel is not None:
            rec["countermodel"] = _db_text(v.countermodel)
        recs.append(rec)
        code = code or (0 if v.implied else 1)
    if o.get("certificate"):
        Path(o["certificate"]).write_text("".join(
            "\n".join(r.get("trace", [])) + "\n" if "trace" in r else r.get("countermodel", "")
            for r in recs))
    return recs, code


def _property_runner(cfg, c):
    n, m, b, wb = cfg.n, cfg.m, cfg.model_bound, cfg.witness_bound
    return {
        "1-criticality": lambda: check_1_criticality(c),
        "domain-independence": lambda: check_domain_independence(c, b),
        "modularity": lambda: check_modularity(c, n, b),
        "closure-subdatabases": lambda: check_closure_subdatabases(c, b),
        "closure-intersections": lambda: check_closure_intersections(c, b),
        "closure-products": lambda: check_closure_products(c, b),
        "locality": lambda: check_locality(c, n, m, b, wb),
    }


def cmd_verify_properties(cfg):
    o = cfg.options
    c = _collection(cfg)
    wanted = o.get("properties") or PROPERTIES
    unknown = [p for p in wanted if p not in PROPERTIES]
    if unknown:
        raise UsageError(f"unknown properties: {', '.join(unknown)}")
    runners = _property_runner(cfg, c)
    reports = _map(lambda p: runners[p](), wanted, cfg.workers)
    recs = []
    wdir = Path(o["witness_dir"]) if o.get("witness_dir") else None
    for rep in reports:
        rec = {"command": "verify-properties", **rep.to_record()}
        if wdir is not None and rep.witness:
            wdir.mkdir(parents=True, exist_ok=True)
            paths = []
            for i, w in enumerate(rep.witness):
                p = wdir / f"{rep.name}-{i}.facts"
                p.write_text(format_database(w) if isinstance(w, Database) else f"{w}\n")
                paths.append(str(p))
            rec["witness_paths"] = paths
        recs.append(rec)
    return recs, 0 if all(r.verdict == HOLDS for r in reports) else 1


def cmd_axiomatize(cfg):
    o = cfg.options
    c = _collection(cfg)
    axioms, rep = axiomatize(c, cfg.n, cfg.m, cfg.model_bound, cap=o.get("cap") or 10 ** 6,
                             sample=o.get("sample", 50), seed=cfg.seed)
    if o.get("semantic_dedup"):
        axioms = semantic_dedup(axioms, c.schema, cfg.model_bound)
    if o.get("output"):
        Path(o["output"]).write_text(format_dependencies(c.schema, axioms))
    recs = [{"command": "axiomatize", "index": i, "axiom": format_dependency(a)} for i, a in enumerate(axioms)]
    recs.append({"command": "axiomatize", "axioms": len(axioms), **rep.to_record()})
    return recs, 0 if rep.verdict == EXACT else 1


def cmd_enumerate(cfg):
    o = cfg.options
    schema = _schema_arg(o.get("schema"))
    if schema is None:
        raise UsageError("enumerate needs --schema")
    kind = o["kind"]
    cap = o.get("cap") or 10 ** 6
    if kind == "databases":
        if cfg.model_bound is None:
            raise UsageError("enumerate databases needs --bound")
        texts = [format_database(d, with_schema=False)
                 for d in enumerate_databases(schema, cfg.model_bound, padded=o.get("padded", False))]
    elif kind == "edds":
        texts = [format_dependency(d) for d in enumerate_edds(schema, cfg.n or 0, cfg.m or 0, cap).members]
    else:
        texts = [format_dependency(d) for d in enumerate_dds(schema, cfg.n or 0, cap)]
    recs = [{"command": "enumerate", "kind": kind, "index": i, "text": t} for i, t in enumerate(texts)]
    recs.append({"command": "enumerate", "kind": kind, "count": len(texts)})
    return recs, 0


COMMANDS = {
    "check-sat": cmd_check_sat, "product": cmd_product, "intersect": cmd_intersect,
    "neighbourhood": cmd_neighbourhood, "diagram": cmd_diagram, "implies": cmd_implies,
    "verify-properties": cmd_verify_properties, "axiomatize": cmd_axiomatize, "enumerate": cmd_enumerate,
}


def _write_opt(cfg, text: str):
    if cfg.options.get("output"):
        Path(cfg.options["output"]).write_text(text)


# -- output ----------------------------------------------------------------

def render_records(recs) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in recs)


def _human_value(v, indent: str) -> list[str]:
    if isinstance(v, str) and "\n" in v.rstrip("\n"):
        return [indent + line for line in v.rstrip("\n").split("\n")]
    if isinstance(v, list):
        out = []
        for x in v:
            sub = _human_value(x, indent + "  ")
            out.append(indent + "- " + sub[0].lstrip())
            out.extend(sub[1:])
        return out or [indent + "(none)"]
    if isinstance(v, dict):
        return [indent + f"{k}: {json.dumps(x, sort_keys=True)}" for k, x in sorted(v.items())]
    if isinstance(v, str):
        return [indent + v.rstrip("\n")]
    return [indent + json.dumps(v)]


def render_human(recs) -> str:
    blocks = []
    for r in recs:
        lines = [f"[{r.get('command', '?')}]"]
        for k in sorted(r):
            if k == "command":
                continue
            body = _human_value(r[k], "  ")
            if len(body) == 1 and not isinstance(r[k], (list, dict)):
                lines.append(f"{k}: {body[0].strip()}")
            else:
                lines.append(f"{k}:")
                lines.extend(body)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# -- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "records"), default="human")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--schema", help="schema text such as 'R/2 P/1' or a .schema file")

    coll = argparse.ArgumentParser(add_help=False)
    coll.add_argument("--deps", help="dependency file defining the collection")
    coll.add_argument("--extensional", help="directory of .facts files listing the members")
    coll.add_argument("--universe-bound", type=int, dest="universe_bound")

    p = argparse.ArgumentParser(prog="depchar", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-sat", parents=[common], help="does a database satisfy the dependencies")
    s.add_argument("database")
    s.add_argument("deps")

    for name, what in (("product", "direct product"), ("intersect", "intersection")):
        s = sub.add_parser(name, parents=[common], help=f"{what} of databases")
        s.add_argument("databases", nargs="+" if name == "product" else 2)
        s.add_argument("--output")

    s = sub.add_parser("neighbourhood", parents=[common], help="m-neighbourhood of a base in a host")
    s.add_argument("base")
    s.add_argument("host")
    s.add_argument("--radius", "--m", type=int, required=True, dest="m")

    s = sub.add_parser("diagram", parents=[common], help="diagram or relative diagram of a database")
    s.add_argument("database")
    s.add_argument("--host")
    s.add_argument("--level", type=int, default=0)
    s.add_argument("--prune", action="store_true")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--as-edd", action="store_true", dest="as_edd")
    g.add_argument("--as-dd", action="store_true", dest="as_dd")

    s = sub.add_parser("implies", parents=[common], help="does sigma imply the target")
    s.add_argument("sigma")
    s.add_argument("target")
    s.add_argument("--method", choices=("chase", "brute"), default="chase")
    s.add_argument("--bound", type=int)
    s.add_argument("--certificate", help="write the chase trace or the countermodel here")

    s = sub.add_parser("verify-properties", parents=[common, coll], help="structural property report")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--witness-bound", type=int, dest="witness_bound")
    s.add_argument("--properties", type=lambda t: tuple(x for x in t.split(",") if x))
    s.add_argument("--witness-dir", dest="witness_dir")

    s = sub.add_parser("axiomatize", parents=[common, coll], help="synthesize tgd/egd axioms")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--cap", type=int)
    s.add_argument("--sample", type=int, default=50)
    s.add_argument("--semantic-dedup", action="store_true", dest="semantic_dedup",
                   help="collapse axioms that imply each other")
    s.add_argument("--output")

    s = sub.add_parser("enumerate", parents=[common], help="list databases, edds or dds")
    s.add_argument("kind", choices=("databases", "edds", "dds"))
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--bound", type=int)
    s.add_argument("--padded", action="store_true")
    s.add_argument("--cap", type=int)
    return p


_INPUTS = {"check-sat": ("database", "deps"), "neighbourhood": ("base", "host"),
           "diagram": ("database",), "implies": ("sigma", "target")}


def config_from_args(ns: argparse.Namespace) -> SessionConfig:
    opts = {k: v for k, v in vars(ns).items() if v is not None}
    if ns.command in ("product", "intersect"):
        inputs = tuple(ns.databases)
    else:
        inputs = tuple(getattr(ns, k) for k in _INPUTS.get(ns.command, ()))
    for k in ("deps", "extensional", "host"):
        if ns.command not in ("check-sat",) and opts.get(k):
            inputs += (opts[k],)
    bound = getattr(ns, "bound", None)
    wb = getattr(ns, "witness_bound", None)
    if ns.command == "verify-properties" and wb is None:
        wb = bound
    return SessionConfig(ns.command, inputs, getattr(ns, "n", None), getattr(ns, "m", None), bound, wb,
                         ns.format, ns.seed, workers_from_env(), opts)


def run(cfg: SessionConfig) -> tuple[list[dict], int]:
    return COMMANDS[cfg.command](cfg)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        # argparse has already printed usage or help
        return e.code if isinstance(e.code, int) else 2
    try:
        cfg = config_from_args(ns)
        recs, code = run(cfg)
    except (UsageError, ParseError, SchemaError, UnsafeDependency, DiagramError, ChaseError,
            BoundExceeded, CapExceeded, OSError, ValueError) as e:
        print(f"depchar {ns.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    out = render_records(recs) if cfg.output_format == "records" else render_human(recs)
    sys.stdout.write(out)
    return code
