"""Fording: de-indexing a datatype through explicit equality witnesses.

Every constrained availability pattern becomes an equality argument
`Id A <pattern-as-term> <row-variable>`: pattern variables are hoisted to
leading ordinary arguments, the equality proofs come next, and the
original arguments follow, with recursive occurrences renamed to the
forded family. The generated converters translate both ways and eliminate
the equality proofs by matching refl.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .decls import (Binder, Clause, CtorDecl, DataDecl, FunDecl, PatCtor,
                    PatRefl, PatVar, SourceModule)
from .diagnostics import TransformError
from .printer import print_module, print_term
from .signature import Signature, telescope_vars
from .terms import (REFL, CtorRef, DataRef, FunRef, IdType, Term, Var,
                    free_vars, fresh_name, map_term, mk_app, spine,
                    subst_term)


@dataclass
class CtorFordInfo:
    name: str
    # one equation per constrained index: (position, row var, index term)
    equations: list[tuple[int, str, Term]] = field(default_factory=list)
    row_vars: list[str] = field(default_factory=list)


@dataclass
class FordPlan:
    target: str
    forded: str
    per_ctor: list[CtorFordInfo]
    to_name: str
    from_name: str

    def report(self) -> dict:
        return {
            "target": self.target,
            "forded": self.forded,
            "constructors": {c.name: c.name for c in self.per_ctor},
            "equations": {
                c.name: [{"index": v, "value": print_term(t)}
                         for (_, v, t) in c.equations]
                for c in self.per_ctor
            },
            "converters": {"toFord": self.to_name, "fromFord": self.from_name},
        }


def _rename_data(t: Term, old: str, new: str) -> Term:
    return map_term(t, lambda u: DataRef(new)
                    if isinstance(u, DataRef) and u.name == old else u)


def ford_data(d: DataDecl, sig: Signature, suffix: str = "F"
              ) -> tuple[DataDecl, FordPlan]:
    """Rewrite a checked, indexed datatype into its index-free form."""
    if not d.indices:
        raise TransformError(f"datatype {d.name} has no indices to ford",
                             code="E-FORD-NO-INDICES")
    bound: set[str] = set()
    for b in d.indices:
        if free_vars(b.type) & bound:
            raise TransformError(
                f"datatype {d.name} has a dependent index telescope, which "
                "fording does not support", code="E-FORD-TARGET")
        bound.add(b.name)
    new_name = d.name + suffix
    if sig.has_name(new_name):
        raise TransformError(
            f"forded name {new_name!r} collides with an existing "
            "declaration; pick another --suffix", code="E-NAME-CLASH")
    info = sig.datas[d.name]
    globals_ = sig.all_names() | {new_name}
    ctors: list[CtorDecl] = []
    plan_ctors: list[CtorFordInfo] = []
    for c in d.ctors:
        if c.is_path:
            if d.name in _named_datas(c.path_type):
                raise TransformError(
                    f"path constructor {c.name} mentions {d.name} itself; "
                    "its endpoints cannot be transported to the forded "
                    "family", code="E-FORD-TARGET")
            ctors.append(CtorDecl(c.name, is_path=True,
                                  path_type=c.path_type))
            continue
        ci = info.ctors[c.name]
        taken = (globals_ | {b.name for b in ci.patvars}
                 | {b.name for b in ci.args} | {b.name for b in d.params})
        cf = CtorFordInfo(c.name)
        row = []
        eqs: list[Binder] = []
        for pos, (idx, pat, val) in enumerate(
                zip(d.indices, ci.avail_pats, ci.avail_terms)):
            if isinstance(pat, PatVar):
                row.append(pat)  # already unconstrained; keep the variable
                cf.row_vars.append(pat.name)
                continue
            v = fresh_name(idx.name, taken)
            taken.add(v)
            row.append(PatVar(v))
            cf.row_vars.append(v)
            eq = fresh_name("eq", taken)
            taken.add(eq)
            eqs.append(Binder(eq, IdType(idx.type, val, Var(v))))
            cf.equations.append((pos, v, val))
        args = (tuple(ci.patvars) + tuple(eqs)
                + tuple(Binder(b.name, _rename_data(b.type, d.name, new_name))
                        for b in ci.args))
        ctors.append(CtorDecl(c.name, tuple(row), args))
        plan_ctors.append(cf)
    forded = DataDecl(new_name, d.params, d.indices, tuple(ctors))
    avoid = globals_
    to_name = fresh_name(f"to{new_name}", avoid)
    from_name = fresh_name(f"from{new_name}", avoid | {to_name})
    return forded, FordPlan(d.name, new_name, plan_ctors, to_name, from_name)


def _convert_arg(sig: Signature, plan: FordPlan, ty: Term, var: Term,
                 ren: dict[str, Term], fun: str) -> Term:
    """Wrap an argument in a recursive converter call when its type is the
    family being forded."""
    head, args = spine(ty)
    if isinstance(head, DataRef) and head.name == plan.target:
        call_args = [subst_term(a, ren) for a in args]
        return mk_app(FunRef(fun), *call_args, var)
    if plan.target in _named_datas(ty):
        raise TransformError(
            f"argument type {print_term(ty)} mentions {plan.target} in a "
            "nested position; converter generation does not support this",
            code="E-FORD-TARGET")
    return var


def _named_datas(t: Term) -> set[str]:
    out: set[str] = set()
    map_term(t, lambda u: (out.add(u.name), u)[1]
             if isinstance(u, DataRef) else u)
    return out


def gen_converters(plan: FordPlan, sig: Signature
                   ) -> tuple[FunDecl, FunDecl]:
    """Generate the two conversion functions between a datatype in the
    signature and its forded counterpart (also in the signature)."""
    d = sig.datas[plan.target]
    params, indices = d.params, d.indices
    binder_names = {b.name for b in params} | {b.name for b in indices}
    globals_ = sig.all_names()
    scrut = fresh_name("v", binder_names | globals_)
    orig_ty = sig.data_applied(plan.target, telescope_vars(params),
                               telescope_vars(indices))
    ford_ty = sig.data_applied(plan.forded, telescope_vars(params),
                               telescope_vars(indices))
    lead = [PatVar(b.name) for b in params] + [PatVar(b.name) for b in indices]

    to_clauses = []
    from_clauses = []
    for cf in plan.per_ctor:
        ci = sig.datas[plan.target].ctors[cf.name]
        taken = set(binder_names) | globals_ | {scrut}
        ren: dict[str, Term] = {}
        local: dict[str, str] = {}
        for b in ci.patvars + ci.args:
            n2 = fresh_name(b.name, taken)
            taken.add(n2)
            local[b.name] = n2
            ren[b.name] = Var(n2)

        # original -> forded
        sub = [PatVar(local[b.name]) for b in ci.patvars + ci.args]
        pat_row = lead + [PatCtor(plan.target, cf.name, tuple(sub))]
        rhs_args: list[Term] = [Var(b.name) for b in params]
        rhs_args += [subst_term(t, ren) for t in ci.avail_terms]
        rhs_args += [Var(local[b.name]) for b in ci.patvars]
        rhs_args += [REFL] * len(cf.equations)
        for b in ci.args:
            rhs_args.append(_convert_arg(sig, plan, b.type,
                                         Var(local[b.name]), ren,
                                         plan.to_name))
        to_clauses.append(Clause(tuple(pat_row),
                                 mk_app(CtorRef(plan.forded, cf.name),
                                        *rhs_args)))

        # forded -> original: row variables first, refl for each equation
        row_locals = []
        fsub: list = []
        for v in cf.row_vars:
            n2 = fresh_name(v, taken)
            taken.add(n2)
            row_locals.append(n2)
            fsub.append(PatVar(n2))
        fsub += [PatVar(local[b.name]) for b in ci.patvars]
        fsub += [PatRefl()] * len(cf.equations)
        fsub += [PatVar(local[b.name]) for b in ci.args]
        fpat_row = lead + [PatCtor(plan.forded, cf.name, tuple(fsub))]
        frhs_args: list[Term] = [Var(b.name) for b in params]
        frhs_args += [Var(local[b.name]) for b in ci.patvars]
        for b in ci.args:
            frhs_args.append(_convert_arg(sig, plan, b.type,
                                          Var(local[b.name]), ren,
                                          plan.from_name))
        from_clauses.append(Clause(tuple(fpat_row),
                                   mk_app(CtorRef(plan.target, cf.name),
                                          *frhs_args)))

    to_fun = FunDecl(plan.to_name,
                     params + indices + (Binder(scrut, orig_ty),),
                     ford_ty, clauses=tuple(to_clauses))
    from_fun = FunDecl(plan.from_name,
                       params + indices + (Binder(scrut, ford_ty),),
                       orig_ty, clauses=tuple(from_clauses))
    return to_fun, from_fun


def ford_module(m: SourceModule, sig: Signature, name: str,
                suffix: str = "F") -> tuple[SourceModule, FordPlan]:
    """Extend a checked module with the forded family and converters.

    The result is printed and re-parsed so qualification is resolved the
    way any reader of the output would see it; the caller re-checks it."""
    d = m.find_data(name)
    if d is None:
        raise TransformError(f"no datatype named {name!r} in the module",
                             code="E-FORD-TARGET")
    for decl in m.decls:
        if getattr(decl, "decls", None) and d in decl.decls:
            raise TransformError(
                f"{name} belongs to a mutual block; fording mutual members "
                "is not supported", code="E-FORD-TARGET")
    forded, plan = ford_data(d, sig, suffix)
    sig2 = sig.copy()
    from .kernel import Checker
    Checker(sig2).check_data(forded)
    to_fun, from_fun = gen_converters(plan, sig2)
    out = SourceModule(m.decls + (forded, to_fun, from_fun))
    from .parser import parse
    from .kernel import prelude_signature
    reparsed = parse(print_module(out), prelude_signature().name_env())
    return reparsed, plan
