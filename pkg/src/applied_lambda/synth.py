"""Derivation synthesis for prenex (rank-1) typeable terms.

Used to produce the bundled evidence files; whatever it builds is checked
again by :func:`typesystem.check_derivation`, so a bug here can only cause
a refusal, never a false certificate.
"""

from __future__ import annotations

import itertools
from typing import Mapping

from .syntax import Abs, App, Const, Constr, Term, Var
from .typesystem import (
    BOOLE,
    NAT,
    Arrow,
    ConstTyping,
    Derivation,
    Forall,
    ListT,
    Prod,
    TVar,
    Type,
    all_tvars,
    free_tvars,
    type_subst,
)


class SynthesisError(ValueError):
    pass


def _is_meta(t: Type) -> bool:
    return isinstance(t, TVar) and t.name.startswith("?")


class _Unifier:
    def __init__(self):
        self.s: dict[str, Type] = {}
        self.counter = itertools.count()

    def fresh(self) -> TVar:
        return TVar(f"?{next(self.counter)}")

    def walk(self, t: Type) -> Type:
        while _is_meta(t) and t.name in self.s:
            t = self.s[t.name]
        return t

    def zonk(self, t: Type) -> Type:
        t = self.walk(t)
        match t:
            case ListT(e):
                return ListT(self.zonk(e))
            case Arrow(a, b):
                return Arrow(self.zonk(a), self.zonk(b))
            case Prod(a, b):
                return Prod(self.zonk(a), self.zonk(b))
            case Forall(p, b):
                return Forall(p, self.zonk(b))
        return t

    def unify(self, a: Type, b: Type) -> None:
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return
        if _is_meta(a):
            self.bind(a.name, b)
        elif _is_meta(b):
            self.bind(b.name, a)
        elif isinstance(a, ListT) and isinstance(b, ListT):
            self.unify(a.elem, b.elem)
        elif isinstance(a, Arrow) and isinstance(b, Arrow):
            self.unify(a.dom, b.dom)
            self.unify(a.cod, b.cod)
        elif isinstance(a, Prod) and isinstance(b, Prod):
            self.unify(a.left, b.left)
            self.unify(a.right, b.right)
        else:
            raise SynthesisError(f"cannot unify {a} with {b}")

    def bind(self, m: str, t: Type) -> None:
        if isinstance(t, Forall):
            raise SynthesisError("impredicative instantiation is not synthesised")
        if m in {v for v in all_tvars(self.zonk(t))}:
            raise SynthesisError("occurs check failed")
        self.s[m] = t


def _infer(u: _Unifier, delta: ConstTyping, ctx: dict[str, Type], t: Term) -> Derivation:
    match t:
        case Var(x):
            if x not in ctx:
                raise SynthesisError(f"free variable {x}")
            return Derivation("Var", ctx, t, ctx[x])
        case Const(c):
            ty = delta.get(c)
            if ty is None:
                raise SynthesisError(f"constant {c} has no type")
            d = Derivation("Const", ctx, t, ty)
            while isinstance(d.type, Forall):
                m = u.fresh()
                d = Derivation("Inst", ctx, t, type_subst(d.type.body, m, d.type.var), (d,), inst=m)
            return d
        case Abs(x, body):
            m = u.fresh()
            inner = dict(ctx)
            inner[x] = m
            kid = _infer(u, delta, inner, body)
            return Derivation("Abs", ctx, t, Arrow(m, kid.type), (kid,))
        case App(f, a):
            df = _infer(u, delta, ctx, f)
            da = _infer(u, delta, ctx, a)
            r = u.fresh()
            u.unify(df.type, Arrow(da.type, r))
            return Derivation("App", ctx, t, r, (df, da))
        case Constr(name, args):
            kids = tuple(_infer(u, delta, ctx, a) for a in args)
            match name, len(args):
                case "T", 0:
                    return Derivation("TrueI", ctx, t, BOOLE)
                case "F", 0:
                    return Derivation("FalseI", ctx, t, BOOLE)
                case "0", 0:
                    return Derivation("ZeroI", ctx, t, NAT)
                case "S", 1:
                    u.unify(kids[0].type, NAT)
                    return Derivation("SuccI", ctx, t, NAT, kids)
                case "nil", 0:
                    return Derivation("NilI", ctx, t, ListT(u.fresh()))
                case "cons", 2:
                    u.unify(kids[1].type, ListT(kids[0].type))
                    return Derivation("ConsI", ctx, t, kids[1].type, kids)
                case "pr", 2:
                    return Derivation("PairI", ctx, t, Prod(kids[0].type, kids[1].type), kids)
            raise SynthesisError(f"no typing rule for constructor {name}")
    raise SynthesisError(f"not a term: {t!r}")


def _finish(d: Derivation, tsub: Mapping[str, Type], u: _Unifier) -> Derivation:
    def fix(t: Type) -> Type:
        t = u.zonk(t)
        for m in sorted(free_tvars(t)):
            if m in tsub:
                t = type_subst(t, tsub[m], m)
        return t

    return Derivation(
        d.rule,
        {x: fix(ty) for x, ty in d.ctx.items()},
        d.term,
        fix(d.type),
        tuple(_finish(k, tsub, u) for k in d.children),
        d.tvar,
        fix(d.inst) if d.inst is not None else None,
    )


def _metas(d: Derivation, u: _Unifier, out: list) -> None:
    def add(t):
        for v in sorted(free_tvars(u.zonk(t))):
            if v.startswith("?") and v not in out:
                out.append(v)

    add(d.type)
    for ty in d.ctx.values():
        add(ty)
    if d.inst is not None:
        add(d.inst)
    for k in d.children:
        _metas(k, u, out)


_NAMES = ("p", "q", "r", "s", "t")


def _rigid_names(metas: list[str], avoid: set[str]) -> dict[str, Type]:
    out = {}
    fresh = (n if i == 0 else f"{n}{i}" for i in itertools.count() for n in _NAMES)
    for m in metas:
        n = next(fresh)
        while n in avoid:
            n = next(fresh)
        out[m] = TVar(n)
    return out


def synthesize(delta: ConstTyping, term: Term, *, expected: Type | None = None, generalize: bool = True) -> Derivation:
    """A derivation of ``⊢ term : ρ`` with the most general prenex ρ.

    Remaining type variables become schematic names p, q, ...; with
    ``generalize`` they are closed off by Gen nodes.  ``expected`` (which
    may contain rigid variables) constrains the result type.
    """
    u = _Unifier()
    d = _infer(u, delta, {}, term)
    if expected is not None:
        u.unify(d.type, expected)
    metas: list[str] = []
    _metas(d, u, metas)
    avoid = all_tvars(expected) if expected is not None else set()
    # result-type variables get the first names so schemes read p, q, ...
    head = sorted((v for v in free_tvars(u.zonk(d.type)) if v.startswith("?")), key=metas.index)
    order = head + [m for m in metas if m not in head]
    d = _finish(d, _rigid_names(order, avoid), u)
    if generalize:
        for p in sorted(free_tvars(d.type), reverse=True):
            d = Derivation("Gen", d.ctx, d.term, Forall(p, d.type), (d,), tvar=p)
    return d
