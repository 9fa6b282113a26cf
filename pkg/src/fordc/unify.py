"""First-order index unification.

Rigid-rigid constructor heads decompose, flexible variables solve with an
occurs check, and anything with a neutral head (a stuck function call, an
axiom, a path constructor) blocks the problem: matching against such an
index is reported Stuck, never silently rejected or accepted.

Mismatch is reserved for genuinely distinct rigid constructor heads; an
occurs-check failure is conservatively Stuck.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .decls import Pattern, PatCtor, PatInacc, PatRefl, PatVar
from .normalize import Normalizer
from .signature import Signature
from .terms import (CtorRef, Refl, Term, Var, alpha_eq, free_vars, fresh_name,
                    mk_app, spine, subst_term)


@dataclass
class UnifySuccess:
    subst: dict[str, Term] = field(default_factory=dict)


@dataclass
class UnifyMismatch:
    lhs: Term
    rhs: Term


@dataclass
class UnifyStuck:
    blocker: Term


UnifyResult = UnifySuccess | UnifyMismatch | UnifyStuck


def _rigid_ctor(sig: Signature, t: Term):
    """Point-constructor spine (head, args), or None."""
    head, args = spine(t)
    if isinstance(head, CtorRef) and not sig.ctor(head.data, head.name).is_path:
        return head, args
    return None


def unify_terms(sig: Signature, nrm: Normalizer,
                pairs: list[tuple[Term, Term]],
                flex_row: set[str], flex_ctx: set[str]) -> UnifyResult:
    """Solve pairs left to right; solutions on row variables are preferred
    when both sides are flexible."""
    sub: dict[str, Term] = {}
    work = list(pairs)

    def solve(x: str, t: Term) -> UnifyResult | None:
        if x in free_vars(t):
            return UnifyStuck(t)
        for k in list(sub):
            sub[k] = subst_term(sub[k], {x: t})
        sub[x] = t
        return None

    while work:
        a, b = work.pop(0)
        a = nrm.normalize(subst_term(a, sub))
        b = nrm.normalize(subst_term(b, sub))
        if alpha_eq(a, b):
            continue
        a_var = a.name if isinstance(a, Var) else None
        b_var = b.name if isinstance(b, Var) else None
        a_flex = a_var is not None and (a_var in flex_row or a_var in flex_ctx)
        b_flex = b_var is not None and (b_var in flex_row or b_var in flex_ctx)
        if a_flex and b_flex:
            # tie-break toward the availability-row variable
            if b_var in flex_row and a_var not in flex_row:
                a, b = b, a
                a_var = a.name
            fail = solve(a_var, b)
        elif a_flex:
            fail = solve(a_var, b)
        elif b_flex:
            fail = solve(b_var, a)
        else:
            ra, rb = _rigid_ctor(sig, a), _rigid_ctor(sig, b)
            if ra and rb:
                (ha, aas), (hb, bas) = ra, rb
                if (ha.data, ha.name) != (hb.data, hb.name) or len(aas) != len(bas):
                    return UnifyMismatch(a, b)
                work = list(zip(aas, bas)) + work
            elif isinstance(a, Refl) and isinstance(b, Refl):
                continue
            elif (ra or isinstance(a, Refl)) and (rb or isinstance(b, Refl)):
                return UnifyMismatch(a, b)
            else:
                return UnifyStuck(b if ra or isinstance(a, Refl) else a)
            fail = None
        if fail is not None:
            return fail
    return UnifySuccess(sub)


def pattern_term(sig: Signature, p: Pattern,
                 rename: dict[str, str] | None = None) -> Term:
    """Read a pattern back as a term over its own variables. Constructor
    patterns must belong to parameterless datatypes here; elaborated rows
    with parameters are handled inside the kernel."""
    rename = rename or {}
    match p:
        case PatVar(x):
            return Var(rename.get(x, x))
        case PatCtor(d, c, args):
            if sig.datas[d].params:
                raise ValueError(
                    f"pattern over parameterized datatype {d} needs elaboration")
            return mk_app(CtorRef(d, c),
                          *(pattern_term(sig, a, rename) for a in args))
        case PatRefl():
            return Refl()
        case PatInacc(t):
            return subst_term(t, {k: Var(v) for k, v in rename.items()})
    raise AssertionError(f"unknown pattern {p!r}")


def unify_indices(sig: Signature, expected: list[Term],
                  availability: list[Pattern],
                  flex_ctx: set[str] | frozenset[str] = frozenset(),
                  nrm: Normalizer | None = None) -> UnifyResult:
    """Unify a scrutinee's index values against a constructor's
    availability row. Row variables are always flexible; context variables
    listed in flex_ctx may be rewritten (eager dependent matching)."""
    nrm = nrm or Normalizer(sig)
    avoid = set(flex_ctx)
    for t in expected:
        avoid |= free_vars(t)
    rename: dict[str, str] = {}
    row_vars: set[str] = set()
    from .decls import pattern_vars
    for p in availability:
        for v in pattern_vars(p):
            fresh = fresh_name(v, avoid | row_vars)
            rename[v] = fresh
            row_vars.add(fresh)
    row_terms = [pattern_term(sig, p, rename) for p in availability]
    res = unify_terms(sig, nrm, list(zip(expected, row_terms)),
                      row_vars, set(flex_ctx))
    if isinstance(res, UnifySuccess):
        back = {v: k for k, v in rename.items()}
        res = UnifySuccess({back.get(k, k): t for k, t in res.subst.items()})
    return res
