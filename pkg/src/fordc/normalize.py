"""Normalization: beta, J-on-refl, aliases, and first-match clause
evaluation, under a configurable step budget.

A neutral scrutinee never skips a clause: if a pattern requires a
constructor and the value has a neutral head, the whole application stays
stuck, preserving first-match semantics.
"""

from __future__ import annotations

from .decls import PatCtor, PatInacc, PatRefl, Pattern, PatVar
from .diagnostics import StepBudgetExceeded
from .signature import FunInfo, Signature
from .terms import (App, CtorRef, FunRef, IdType, JElim, Lam, Pi, Refl, Term,
                    alpha_eq, mk_app, spine, subst_term)

DEFAULT_STEP_BUDGET = 100000

_NOMATCH = "nomatch"
_STUCK = "stuck"


class Normalizer:
    def __init__(self, sig: Signature, step_budget: int = DEFAULT_STEP_BUDGET):
        self.sig = sig
        self.budget = step_budget
        self.steps = 0

    def normalize(self, t: Term) -> Term:
        """Fully normalize; each call gets a fresh step budget."""
        self.steps = 0
        return self._nf(t)

    def convertible(self, a: Term, b: Term) -> bool:
        return alpha_eq(self.normalize(a), self.normalize(b))

    def _step(self):
        self.steps += 1
        if self.steps > self.budget:
            raise StepBudgetExceeded(
                f"normalization exceeded the step budget of {self.budget}")

    def _nf(self, t: Term) -> Term:
        match t:
            case App(_, _) | FunRef(_) | JElim(_, _, _):
                head, args = spine(t)
                return self._apply(head, [self._nf(a) for a in args])
            case Pi(x, d, c):
                return Pi(x, self._nf(d), self._nf(c))
            case Lam(x, body):
                return Lam(x, self._nf(body))
            case IdType(c, l, r):
                return IdType(self._nf(c), self._nf(l), self._nf(r))
            case _:
                return t

    def _apply(self, head: Term, args: list[Term]) -> Term:
        """Iterative head reduction; unbounded unfolding chains consume the
        step budget instead of the interpreter stack."""
        while True:
            if isinstance(head, App):
                h2, extra = spine(head)
                head = h2
                args = [self._nf(a) for a in extra] + args
                continue
            if isinstance(head, Lam) and args:
                self._step()
                head = subst_term(head.body, {head.binder: args[0]})
                args = args[1:]
                continue
            if isinstance(head, JElim):
                pn = self._nf(head.path)
                if isinstance(pn, Refl):
                    self._step()
                    head = head.base
                    continue
                head = JElim(self._nf(head.motive), self._nf(head.base), pn)
                break
            if isinstance(head, FunRef):
                info = self.sig.funs.get(head.name)
                if info is not None and len(args) >= info.arity:
                    fired = self._match_clauses(info, args[:info.arity])
                    if fired is not None:
                        bindings, rhs = fired
                        self._step()
                        head = subst_term(rhs, bindings)
                        args = args[info.arity:]
                        continue
            break
        if isinstance(head, (Lam, Pi, IdType)):
            head = self._nf(head)
        return mk_app(head, *args)

    def _match_clauses(self, info: FunInfo, args: list[Term]):
        for clause in info.clauses:
            bindings: dict[str, Term] = {}
            outcome = "ok"
            for pat, val in zip(clause.pats, args):
                r = self._match(pat, val, bindings)
                if r == _NOMATCH:
                    outcome = _NOMATCH
                    break
                if r == _STUCK:
                    outcome = _STUCK
            if outcome == "ok":
                return bindings, clause.rhs
            if outcome == _STUCK:
                return None  # first-match: cannot skip past a stuck clause
        return None

    def _match(self, pat: Pattern, val: Term, bindings: dict[str, Term]) -> str:
        match pat:
            case PatVar(x):
                if x != "_":
                    bindings[x] = val
                return "ok"
            case PatInacc(_):
                return "ok"
            case PatRefl():
                return "ok" if isinstance(val, Refl) else _STUCK
            case PatCtor(d, c, subs):
                head, vargs = spine(val)
                if isinstance(head, CtorRef):
                    if self.sig.ctor(head.data, head.name).is_path:
                        return _STUCK
                    if (head.data, head.name) != (d, c):
                        return _NOMATCH
                    n_params = len(self.sig.datas[d].params)
                    slots = vargs[n_params:]
                    if len(slots) != len(subs):
                        return _STUCK
                    worst = "ok"
                    for sp, sv in zip(subs, slots):
                        r = self._match(sp, sv, bindings)
                        if r == _NOMATCH:
                            return _NOMATCH
                        if r == _STUCK:
                            worst = _STUCK
                    return worst
                if isinstance(head, Refl):
                    return _NOMATCH
                return _STUCK
        raise AssertionError(f"unknown pattern {pat!r}")
