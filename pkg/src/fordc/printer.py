"""Deterministic pretty-printer; the单 output channel for transformed code.

One declaration per block separated by a blank line, two-space indentation
for constructor rows and clauses, and a single canonical spelling per form:
dependent products print as `Pi (x : A) -> B`, non-dependent ones as
`A -> B`, lambda runs merge, and constructor references are qualified
exactly when the bare name is ambiguous within the module.
"""

from __future__ import annotations

from .decls import (AxiomDecl, Binder, Clause, CtorDecl, DataDecl, FunDecl,
                    MutualBlock, PatCtor, PatInacc, PatRefl, Pattern, PatVar,
                    SourceModule)
from .terms import (App, AxiomRef, CtorRef, DataRef, FunRef, IdType, JElim,
                    Lam, Pi, Refl, Term, Univ, Var, free_vars)

LOW, APP, ATOM = 0, 1, 2


def ambiguous_ctors(m: SourceModule) -> frozenset[str]:
    seen: dict[str, int] = {}
    for d in m.data_decls():
        for c in d.ctors:
            seen[c.name] = seen.get(c.name, 0) + 1
    return frozenset(n for n, k in seen.items() if k > 1)


def print_term(t: Term, prec: int = LOW, qual: frozenset[str] = frozenset()) -> str:
    text, level = _term(t, qual)
    if level < prec:
        return f"({text})"
    return text


def _term(t: Term, qual: frozenset[str]) -> tuple[str, int]:
    match t:
        case Var(x):
            return x, ATOM
        case Univ(level):
            return f"Type{level}", ATOM
        case DataRef(n) | FunRef(n) | AxiomRef(n):
            return n, ATOM
        case CtorRef(d, n):
            return (f"{d}.{n}" if n in qual else n), ATOM
        case Refl():
            return "refl", ATOM
        case App(f, a):
            return f"{print_term(f, APP, qual)} {print_term(a, ATOM, qual)}", APP
        case IdType(c, l, r):
            parts = [print_term(x, ATOM, qual) for x in (c, l, r)]
            return "Id " + " ".join(parts), APP
        case JElim(m, b, p):
            parts = [print_term(x, ATOM, qual) for x in (m, b, p)]
            return "J " + " ".join(parts), APP
        case Lam(_, _):
            names = []
            while isinstance(t, Lam):
                names.append(t.binder)
                t = t.body
            return f"\\{' '.join(names)} => {print_term(t, LOW, qual)}", LOW
        case Pi(x, dom, cod):
            if x == "_" or x not in free_vars(cod):
                lhs = print_term(dom, APP, qual)
                return f"{lhs} -> {print_term(cod, LOW, qual)}", LOW
            groups = []
            while (isinstance(t, Pi) and t.binder != "_"
                   and t.binder in free_vars(t.codomain)):
                groups.append(f"({t.binder} : {print_term(t.domain, LOW, qual)})")
                t = t.codomain
            return f"Pi {' '.join(groups)} -> {print_term(t, LOW, qual)}", LOW
    raise AssertionError(f"unprintable term {t!r}")


def print_pattern(p: Pattern, qual: frozenset[str] = frozenset(),
                  atom: bool = False) -> str:
    match p:
        case PatVar(x):
            return x
        case PatRefl():
            return "refl"
        case PatInacc(t):
            return f".({print_term(t, LOW, qual)})"
        case PatCtor(d, n, args):
            head = f"{d}.{n}" if n in qual else n
            if not args:
                return head
            inner = " ".join(print_pattern(a, qual, atom=True) for a in args)
            text = f"{head} {inner}"
            return f"({text})" if atom else text
    raise AssertionError(f"unprintable pattern {p!r}")


def _binder_groups(tele: tuple[Binder, ...], qual: frozenset[str]) -> str:
    return " ".join(f"({b.name} : {print_term(b.type, LOW, qual)})" for b in tele)


def _print_ctor(c: CtorDecl, qual: frozenset[str]) -> str:
    if c.is_path:
        return f"  | {c.name} : {print_term(c.path_type, LOW, qual)}"
    parts = [f"  | {c.name}"]
    if c.availability:
        row = ", ".join(print_pattern(p, qual) for p in c.availability)
        parts.append(f"[{row}]")
    if c.args:
        parts.append(_binder_groups(c.args, qual))
    return " ".join(parts)


def _print_data(d: DataDecl, qual: frozenset[str]) -> str:
    head = f"data {d.name}"
    if d.params:
        head += " " + _binder_groups(d.params, qual)
    if d.indices:
        head += " : " + _binder_groups(d.indices, qual)
    lines = [head]
    lines.extend(_print_ctor(c, qual) for c in d.ctors)
    return "\n".join(lines)


def _print_clause(c: Clause, qual: frozenset[str]) -> str:
    pats = " ".join(print_pattern(p, qual, atom=True) for p in c.pats)
    return f"  | {pats} => {print_term(c.rhs, LOW, qual)}"


def _print_fun(f: FunDecl, qual: frozenset[str]) -> str:
    head = "partial def" if f.partial else "def"
    head += f" {f.name}"
    if f.binders:
        head += " " + _binder_groups(f.binders, qual)
    head += f" : {print_term(f.ret, LOW, qual)}"
    lines = [head]
    if f.body is not None:
        lines.append(f"  => {print_term(f.body, LOW, qual)}")
    else:
        lines.extend(_print_clause(c, qual) for c in f.clauses)
    return "\n".join(lines)


def print_module(m: SourceModule) -> str:
    """Canonical text for a module; empty module prints as empty text."""
    qual = ambiguous_ctors(m)
    blocks = []
    for d in m.decls:
        if isinstance(d, DataDecl):
            blocks.append(_print_data(d, qual))
        elif isinstance(d, FunDecl):
            blocks.append(_print_fun(d, qual))
        elif isinstance(d, AxiomDecl):
            blocks.append(f"axiom {d.name} : {print_term(d.type, LOW, qual)}")
        elif isinstance(d, MutualBlock):
            inner = "\n".join(_print_data(x, qual) for x in d.decls)
            blocks.append(f"mutual\n{inner}\nend")
        else:
            raise AssertionError(f"unprintable declaration {d!r}")
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"
