"""Extended System F: types, a derivation checker and the SN certification pipeline.

Typing is checked, never inferred: a :class:`Derivation` is a proof tree
whose every node must be an instance of one typing rule.  Free type
variables in a checked tree are schematic; the tree certifies each of its
closed instances.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .syntax import (
    Abs,
    App,
    Const,
    Constr,
    Signature,
    SyntaxErrorWithPos,
    Term,
    Var,
    alpha_eq,
    parse_term,
    print_term,
    split_level,
)


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True, slots=True)
class TVar:
    name: str


@dataclass(frozen=True, slots=True)
class Boole:
    pass


@dataclass(frozen=True, slots=True)
class Nat:
    pass


@dataclass(frozen=True, slots=True)
class ListT:
    elem: "Type"


@dataclass(frozen=True, slots=True)
class Arrow:
    dom: "Type"
    cod: "Type"


@dataclass(frozen=True, slots=True)
class Forall:
    var: str
    body: "Type"


@dataclass(frozen=True, slots=True)
class Prod:
    left: "Type"
    right: "Type"


Type = Union[TVar, Boole, Nat, ListT, Arrow, Forall, Prod]
BOOLE = Boole()
NAT = Nat()


def arrows(*ts: Type) -> Type:
    """``arrows(a, b, c)`` is ``a -> b -> c``."""
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = Arrow(t, out)
    return out


def free_tvars(t: Type) -> set[str]:
    match t:
        case TVar(p):
            return {p}
        case ListT(e):
            return free_tvars(e)
        case Arrow(a, b) | Prod(a, b):
            return free_tvars(a) | free_tvars(b)
        case Forall(p, body):
            return free_tvars(body) - {p}
    return set()


def all_tvars(t: Type) -> set[str]:
    match t:
        case TVar(p):
            return {p}
        case ListT(e):
            return all_tvars(e)
        case Arrow(a, b) | Prod(a, b):
            return all_tvars(a) | all_tvars(b)
        case Forall(p, body):
            return all_tvars(body) | {p}
    return set()


def is_closed(t: Type) -> bool:
    return not free_tvars(t)


def type_subst(rho: Type, sigma: Type, p: str) -> Type:
    """rho[sigma/p], renaming bound variables that would capture."""
    return _tsubst(rho, {p: sigma})


def _tsubst(t: Type, s: dict[str, Type]) -> Type:
    match t:
        case TVar(p):
            return s.get(p, t)
        case ListT(e):
            return ListT(_tsubst(e, s))
        case Arrow(a, b):
            return Arrow(_tsubst(a, s), _tsubst(b, s))
        case Prod(a, b):
            return Prod(_tsubst(a, s), _tsubst(b, s))
        case Forall(p, body):
            inner = {k: v for k, v in s.items() if k != p and k in free_tvars(body)}
            if not inner:
                return t
            fv = set().union(*(free_tvars(v) for v in inner.values()))
            if p in fv:
                avoid = fv | all_tvars(body) | set(inner)
                q = p + "'"
                while q in avoid:
                    q += "'"
                inner[p] = TVar(q)
                return Forall(q, _tsubst(body, inner))
            return Forall(p, _tsubst(body, inner))
    return t


def _tcanon(t: Type, env: dict, depth: int):
    match t:
        case TVar(p):
            return ("b", depth - 1 - env[p]) if p in env else ("v", p)
        case Boole():
            return ("boole",)
        case Nat():
            return ("nat",)
        case ListT(e):
            return ("list", _tcanon(e, env, depth))
        case Arrow(a, b):
            return ("->", _tcanon(a, env, depth), _tcanon(b, env, depth))
        case Prod(a, b):
            return ("*", _tcanon(a, env, depth), _tcanon(b, env, depth))
        case Forall(p, body):
            env2 = dict(env)
            env2[p] = depth
            return ("all", _tcanon(body, env2, depth + 1))
    raise TypeError(f"not a type: {t!r}")


def type_eq(a: Type, b: Type) -> bool:
    """Alpha-equivalence of types."""
    return _tcanon(a, {}, 0) == _tcanon(b, {}, 0)


# type syntax: boole | nat | list T | T * T | T -> T | forall p. T | p | (T)

_TTOK = re.compile(r"\s*(->|forall\b|[A-Za-z_][A-Za-z0-9_']*|[().*])")


def parse_type(text: str) -> Type:
    toks = []
    i = 0
    text = text.rstrip()
    while i < len(text):
        m = _TTOK.match(text, i)
        if m is None:
            raise SyntaxErrorWithPos(f"unexpected character {text[i]!r} in type", i)
        toks.append((m.group(1), m.start(1)))
        i = m.end()
    toks.append(("", len(text)))
    pos = 0

    def peek():
        return toks[pos][0]

    def take(expected=None):
        nonlocal pos
        tok, at = toks[pos]
        if expected is not None and tok != expected:
            raise SyntaxErrorWithPos(f"expected {expected!r} in type, found {tok or 'end of input'!r}", at)
        pos += 1
        return tok

    def arrow():
        if peek() == "forall":
            take()
            names = []
            while peek() not in (".", ""):
                names.append(take())
            if not names:
                raise SyntaxErrorWithPos("forall needs a type variable", toks[pos][1])
            take(".")
            body = arrow()
            for p in reversed(names):
                body = Forall(p, body)
            return body
        left = product()
        if peek() == "->":
            take()
            return Arrow(left, arrow())
        return left

    def product():
        left = prefix()
        while peek() == "*":
            take()
            left = Prod(left, prefix())
        return left

    def prefix():
        tok = peek()
        if tok == "list":
            take()
            return ListT(prefix())
        return atom()

    def atom():
        tok, at = toks[pos]
        if tok == "(":
            take()
            t = arrow()
            take(")")
            return t
        if tok == "boole":
            take()
            return BOOLE
        if tok == "nat":
            take()
            return NAT
        if tok and (tok[0].isalpha() or tok[0] == "_") and tok not in ("forall", "list"):
            take()
            return TVar(tok)
        raise SyntaxErrorWithPos(f"unexpected {tok or 'end of input'!r} in type", at)

    t = arrow()
    if peek() != "":
        raise SyntaxErrorWithPos(f"trailing input {peek()!r} in type", toks[pos][1])
    return t


def print_type(t: Type, ctx: int = 0) -> str:
    # ctx: 0 top, 1 left of arrow, 2 product operand, 3 list argument
    match t:
        case TVar(p):
            return p
        case Boole():
            return "boole"
        case Nat():
            return "nat"
        case ListT(e):
            s = "list " + print_type(e, 3)
            return f"({s})" if ctx >= 3 else s
        case Prod(a, b):
            s = f"{print_type(a, 2)} * {print_type(b, 3)}"
            return f"({s})" if ctx >= 2 else s
        case Arrow(a, b):
            s = f"{print_type(a, 1)} -> {print_type(b, 0)}"
            return f"({s})" if ctx >= 1 else s
        case Forall():
            names = []
            body = t
            while isinstance(body, Forall):
                names.append(body.var)
                body = body.body
            s = f"forall {' '.join(names)}. {print_type(body, 0)}"
            return f"({s})" if ctx >= 1 else s
    raise TypeError(f"not a type: {t!r}")


# ---------------------------------------------------------------------------
# Constant typings


class ConstTyping:
    """Constant name -> closed type.  A lifted typing answers c#n with the type of c."""

    def __init__(self, types: Mapping[str, Type] | None = None, *, lifted: bool = False):
        self.types = dict(types or {})
        self.lifted = lifted
        for c, t in self.types.items():
            if not is_closed(t):
                raise ValueError(f"type of constant {c} must be closed: {print_type(t)}")

    def get(self, name: str) -> Type | None:
        if self.lifted:
            base, lvl = split_level(name)
            return self.types.get(base) if lvl is not None else None
        return self.types.get(name)

    def __contains__(self, name: str) -> bool:
        return self.get(name) is not None

    def __getitem__(self, name: str) -> Type:
        t = self.get(name)
        if t is None:
            raise KeyError(name)
        return t

    def __len__(self):
        return len(self.types)

    def names(self) -> list[str]:
        return list(self.types)

    def to_text(self) -> str:
        return "".join(f"{c} : {print_type(t)};\n" for c, t in self.types.items())


def lift_typing_to_omega(delta: ConstTyping) -> ConstTyping:
    """Typing of the leveled constants: (c#n) gets the type of c, for every n."""
    return ConstTyping(delta.types, lifted=True)


def parse_types_file(text: str) -> ConstTyping:
    """Lines ``name : type;``; ``--`` starts a comment."""
    types = {}
    # '->' is an arrow, not a comment
    body = re.sub(r"--(?!>)[^\n]*", "", text)
    for stmt in body.split(";"):
        if not stmt.strip():
            continue
        name, sep, ty = stmt.partition(":")
        if not sep:
            raise SyntaxErrorWithPos(f"expected 'name : type', got {stmt.strip()!r}")
        name = name.strip()
        if name in types:
            raise ValueError(f"duplicate type for {name}")
        types[name] = parse_type(ty.strip())
    return ConstTyping(types)


# ---------------------------------------------------------------------------
# Derivations

RULES = ("Var", "Const", "Abs", "App", "Gen", "Inst", "TrueI", "FalseI", "ZeroI", "SuccI", "NilI", "ConsI", "PairI")


@dataclass(frozen=True)
class Derivation:
    rule: str
    ctx: Mapping[str, Type]
    term: Term
    type: Type
    children: tuple["Derivation", ...] = ()
    tvar: str | None = None
    inst: Type | None = None

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def to_json(self) -> dict:
        out = {
            "rule": self.rule,
            "ctx": {x: print_type(t) for x, t in self.ctx.items()},
            "term": print_term(self.term),
            "type": print_type(self.type),
            "children": [c.to_json() for c in self.children],
        }
        if self.tvar is not None:
            out["tvar"] = self.tvar
        if self.inst is not None:
            out["inst"] = print_type(self.inst)
        return out

    @staticmethod
    def from_json(data: dict, sig: Signature) -> "Derivation":
        try:
            return Derivation(
                rule=data["rule"],
                ctx={x: parse_type(t) for x, t in data.get("ctx", {}).items()},
                term=parse_term(data["term"], sig),
                type=parse_type(data["type"]),
                children=tuple(Derivation.from_json(c, sig) for c in data.get("children", [])),
                tvar=data.get("tvar"),
                inst=parse_type(data["inst"]) if data.get("inst") is not None else None,
            )
        except KeyError as e:
            raise ValueError(f"derivation node lacks field {e}") from None


@dataclass(frozen=True)
class Judgement:
    ctx: Mapping[str, Type]
    term: Term
    type: Type

    def __str__(self):
        ctx = ", ".join(f"{x}:{print_type(t)}" for x, t in self.ctx.items())
        return f"{ctx} ⊢ {print_term(self.term)} : {print_type(self.type)}"


@dataclass(frozen=True)
class TypingViolation:
    path: tuple[int, ...]
    rule: str
    message: str

    def __str__(self):
        where = "root" if not self.path else "node " + ".".join(map(str, self.path))
        return f"{where} [{self.rule}]: {self.message}"


@dataclass
class CheckResult:
    judgement: Judgement | None
    violations: list[TypingViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _ctx_eq(a: Mapping[str, Type], b: Mapping[str, Type]) -> bool:
    return set(a) == set(b) and all(type_eq(a[x], b[x]) for x in a)


def _ctx_ftv(ctx: Mapping[str, Type]) -> set[str]:
    return set().union(*(free_tvars(t) for t in ctx.values())) if ctx else set()


def check_derivation(deriv: Derivation, delta: ConstTyping, *, closed_root: bool = True) -> CheckResult:
    """Check every node against its typing rule.

    With ``closed_root`` the root must additionally have an empty context
    and a closed type (a claim of closed typeability).
    """
    out: list[TypingViolation] = []
    _check(deriv, delta, (), out)
    if closed_root:
        if deriv.ctx:
            out.append(TypingViolation((), deriv.rule, "top-level context must be empty"))
        if not is_closed(deriv.type):
            out.append(TypingViolation((), deriv.rule, f"top-level type {print_type(deriv.type)} is not closed"))
    if out:
        return CheckResult(None, out)
    return CheckResult(Judgement(deriv.ctx, deriv.term, deriv.type))


_CONSTR_RULES = {"TrueI": ("T", 0), "FalseI": ("F", 0), "ZeroI": ("0", 0), "SuccI": ("S", 1),
                 "NilI": ("nil", 0), "ConsI": ("cons", 2), "PairI": ("pr", 2)}


def _check(d: Derivation, delta: ConstTyping, path: tuple, out: list) -> None:
    def bad(msg):
        out.append(TypingViolation(path, d.rule, msg))

    kids = d.children

    def arity(n):
        if len(kids) != n:
            bad(f"expects {n} premise(s), has {len(kids)}")
            return False
        return True

    def same_ctx(i):
        if not _ctx_eq(kids[i].ctx, d.ctx):
            bad(f"premise {i + 1} changes the context")
            return False
        return True

    def premise_term(i, expected):
        if kids[i].term != expected:
            bad(f"premise {i + 1} is about {print_term(kids[i].term)}, expected {print_term(expected)}")
            return False
        return True

    def premise_type(i, expected):
        if not type_eq(kids[i].type, expected):
            bad(f"premise {i + 1} has type {print_type(kids[i].type)}, expected {print_type(expected)}")

    r = d.rule
    t = d.term
    if r not in RULES:
        bad(f"unknown rule {r!r}")
    elif r == "Var":
        if arity(0):
            if not isinstance(t, Var):
                bad("term is not a variable")
            elif t.name not in d.ctx:
                bad(f"variable {t.name} not in context")
            elif not type_eq(d.ctx[t.name], d.type):
                bad(f"context gives {t.name} : {print_type(d.ctx[t.name])}, not {print_type(d.type)}")
    elif r == "Const":
        if arity(0):
            if not isinstance(t, Const):
                bad("term is not a constant")
            elif t.name not in delta:
                bad(f"constant {t.name} has no type")
            elif not type_eq(delta[t.name], d.type):
                bad(f"constant {t.name} has type {print_type(delta[t.name])}, not {print_type(d.type)}")
    elif r == "Abs":
        if arity(1):
            if not isinstance(t, Abs):
                bad("term is not an abstraction")
            elif not isinstance(d.type, Arrow):
                bad(f"type {print_type(d.type)} is not an arrow")
            else:
                ext = dict(d.ctx)
                ext[t.var] = d.type.dom
                if not _ctx_eq(kids[0].ctx, ext):
                    bad(f"premise context must extend the conclusion's with {t.var}:{print_type(d.type.dom)}")
                premise_term(0, t.body)
                premise_type(0, d.type.cod)
    elif r == "App":
        if arity(2):
            if not isinstance(t, App):
                bad("term is not an application")
            else:
                same_ctx(0)
                same_ctx(1)
                premise_term(0, t.fun)
                premise_term(1, t.arg)
                ft = kids[0].type
                if not isinstance(ft, Arrow):
                    bad(f"function premise has non-arrow type {print_type(ft)}")
                else:
                    if not type_eq(ft.cod, d.type):
                        bad(f"result type {print_type(ft.cod)} differs from {print_type(d.type)}")
                    premise_type(1, ft.dom)
    elif r == "Gen":
        if arity(1):
            same_ctx(0)
            premise_term(0, t)
            if not isinstance(d.type, Forall):
                bad(f"type {print_type(d.type)} is not a forall")
            else:
                p = d.type.var
                if d.tvar is not None and d.tvar != p:
                    bad(f"generalised variable {d.tvar} does not match {p}")
                premise_type(0, d.type.body)
                if p in _ctx_ftv(d.ctx):
                    bad(f"side condition violated: {p} is free in the context")
    elif r == "Inst":
        if arity(1):
            same_ctx(0)
            premise_term(0, t)
            pt = kids[0].type
            if not isinstance(pt, Forall):
                bad(f"premise type {print_type(pt)} is not a forall")
            elif d.inst is None:
                bad("instantiation type missing")
            else:
                want = type_subst(pt.body, d.inst, pt.var)
                if not type_eq(want, d.type):
                    bad(f"instantiation gives {print_type(want)}, not {print_type(d.type)}")
    else:
        name, n = _CONSTR_RULES[r]
        if not isinstance(t, Constr) or t.name != name or len(t.args) != n:
            bad(f"term is not {name} with {n} argument(s)")
        elif arity(n):
            for i in range(n):
                same_ctx(i)
                premise_term(i, t.args[i])
            ty = d.type
            if r in ("TrueI", "FalseI"):
                if not isinstance(ty, Boole):
                    bad("type must be boole")
            elif r == "ZeroI":
                if not isinstance(ty, Nat):
                    bad("type must be nat")
            elif r == "SuccI":
                if not isinstance(ty, Nat):
                    bad("type must be nat")
                premise_type(0, NAT)
            elif r == "NilI":
                if not isinstance(ty, ListT):
                    bad("type must be a list type")
            elif r == "ConsI":
                if not isinstance(ty, ListT):
                    bad("type must be a list type")
                else:
                    premise_type(0, ty.elem)
                    premise_type(1, ty)
            elif r == "PairI":
                if not isinstance(ty, Prod):
                    bad("type must be a product type")
                else:
                    premise_type(0, ty.left)
                    premise_type(1, ty.right)
    for i, k in enumerate(kids):
        _check(k, delta, path + (i,), out)


def rename_constants(deriv: Derivation, theta: Mapping[str, str]) -> Derivation:
    """Apply a constant renaming to every term of a derivation."""
    from .syntax import apply_const_subst

    return Derivation(
        deriv.rule, deriv.ctx, apply_const_subst(deriv.term, func=lambda c: theta.get(c, c)), deriv.type,
        tuple(rename_constants(k, theta) for k in deriv.children), deriv.tvar, deriv.inst,
    )


# ---------------------------------------------------------------------------
# Rule type-soundness


def abstract_rule(rule) -> tuple[Term, Term]:
    """(λx⃗.L, λx⃗.R) with x⃗ the pattern variables in order."""
    lhs, rhs = rule.lhs, rule.rhs
    for x in reversed(rule.variables()):
        lhs = Abs(x, lhs)
        rhs = Abs(x, rhs)
    return lhs, rhs


@dataclass
class SoundnessVerdict:
    rule: str
    type: Type | None
    schematic: list[str] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_rule_type_sound(delta: ConstTyping, rule, rho: Type, lhs_deriv: Derivation, rhs_deriv: Derivation) -> SoundnessVerdict:
    lam_l, lam_r = abstract_rule(rule)
    v = SoundnessVerdict(str(rule), rho, sorted(free_tvars(rho)))
    for label, d, want in (("lhs", lhs_deriv, lam_l), ("rhs", rhs_deriv, lam_r)):
        if not alpha_eq(d.term, want):
            v.violations.append(f"{label} derivation concludes {print_term(d.term)}, expected {print_term(want)}")
        if d.ctx:
            v.violations.append(f"{label} derivation has a non-empty context")
        if not type_eq(d.type, rho):
            v.violations.append(f"{label} derivation has type {print_type(d.type)}, expected {print_type(rho)}")
        res = check_derivation(d, delta, closed_root=False)
        v.violations.extend(f"{label}: {x}" for x in res.violations)
    return v


# ---------------------------------------------------------------------------
# Totality attestations

ATTESTATION_KINDS = ("PrimitiveRecursive", "ModifiedBarRecursion", "UserAttested")


@dataclass(frozen=True)
class Attest:
    kind: str
    note: str = ""

    def __post_init__(self):
        if self.kind not in ATTESTATION_KINDS:
            raise ValueError(f"unknown attestation kind {self.kind!r}; expected one of {ATTESTATION_KINDS}")


class TotalityAttestation(dict):
    """Constant name -> :class:`Attest`."""

    @classmethod
    def from_json(cls, data: Mapping) -> "TotalityAttestation":
        out = cls()
        for c, entry in data.items():
            if isinstance(entry, str):
                out[c] = Attest(entry)
            else:
                out[c] = Attest(entry["kind"], entry.get("note", ""))
        return out

    def to_json(self) -> dict:
        return {c: ({"kind": a.kind, "note": a.note} if a.note else {"kind": a.kind}) for c, a in self.items()}


# ---------------------------------------------------------------------------
# Pipeline


@dataclass
class RuleEvidence:
    rule_index: int
    type: Type
    lhs: Derivation
    rhs: Derivation

    def to_json(self, rule=None) -> dict:
        out = {"rule": self.rule_index, "type": print_type(self.type), "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json()}
        if rule is not None:
            out["text"] = str(rule)
        return out

    @staticmethod
    def from_json(data: dict, sig: Signature) -> "RuleEvidence":
        return RuleEvidence(int(data["rule"]), parse_type(data["type"]),
                            Derivation.from_json(data["lhs"], sig), Derivation.from_json(data["rhs"], sig))


@dataclass
class Certificate:
    term: Term
    type: Type
    premises: list[str]
    schematic_rules: list[str]
    cross_checks: dict = field(default_factory=dict)
    conclusion: str = "every reduction sequence from the term terminates"
    justification: str = ("closed typeability in extended System F + type-sound rewrite rules + "
                          "total constant interpretations => strong normalisation")

    def to_json(self) -> dict:
        return {
            "verdict": "certificate",
            "term": print_term(self.term),
            "type": print_type(self.type),
            "premises": self.premises,
            "schematic_rules": self.schematic_rules,
            "justification": self.justification,
            "conclusion": self.conclusion,
            "cross_checks": self.cross_checks,
        }


@dataclass
class Refusal:
    premise: str
    reasons: list[str]

    def to_json(self) -> dict:
        return {"verdict": "refusal", "premise": self.premise, "reasons": self.reasons}


def pipeline_sn(system, delta: ConstTyping, evidence: Iterable[RuleEvidence], attestation: Mapping[str, Attest],
                term: Term, deriv: Derivation, *, cross_validate: bool = False, max_states: int = 100_000,
                level: int = 12, fuel: int = 1_000_000) -> Certificate | Refusal:
    """Certify strong normalisation of ``term`` from typing, rule soundness and totality."""
    res = check_derivation(deriv, delta, closed_root=True)
    if not res.ok:
        return Refusal("typeability", [str(v) for v in res.violations])
    if not alpha_eq(deriv.term, term):
        return Refusal("typeability", [f"derivation is about {print_term(deriv.term)}, not {print_term(term)}"])

    missing_types = [c for c in system.sig.constants if c not in delta]
    if missing_types:
        return Refusal("type-soundness", [f"no type for constant {c}" for c in missing_types])
    by_index: dict[int, list[RuleEvidence]] = {}
    for ev in evidence:
        by_index.setdefault(ev.rule_index, []).append(ev)
    problems = []
    schematic = []
    for i, rule in enumerate(system.rules):
        items = by_index.get(i)
        if not items:
            problems.append(f"rule {i} ({rule}) has no type-soundness evidence")
            continue
        verdicts = [check_rule_type_sound(delta, rule, ev.type, ev.lhs, ev.rhs) for ev in items]
        good = [v for v in verdicts if v.ok]
        if not good:
            problems.extend(f"rule {i} ({rule}): {msg}" for v in verdicts for msg in v.violations)
        elif good[0].schematic:
            schematic.append(f"rule {i} at {print_type(good[0].type)} (schematic in {', '.join(good[0].schematic)})")
    if problems:
        return Refusal("type-soundness", problems)

    unattested = [c for c in system.sig.constants if c not in attestation]
    if unattested:
        return Refusal("totality", [f"constant {c} has no totality attestation" for c in unattested])

    premises = [
        f"typeable: ⊢ {print_term(term)} : {print_type(deriv.type)} ({deriv.size()} derivation nodes checked)",
        f"type-sound: all {len(system.rules)} rules carry checked evidence",
        "total: " + ", ".join(f"{c} [{attestation[c].kind}]" for c in system.sig.constants),
    ]
    cert = Certificate(term, deriv.type, premises, schematic)
    if cross_validate:
        from .rewrite import sn_search
        from .semantics import Det, eval_term, observe
        from .semantics import Bot

        rep = sn_search(system, term, max_states)
        cert.cross_checks["sn_search"] = type(rep).__name__
        out = eval_term(system, term, level=level, fuel=fuel)
        if isinstance(out, Det):
            cert.cross_checks["eval"] = {"level": level, "value": str(observe(out.value, 8)), "non_bot": out.value is not Bot}
        else:
            cert.cross_checks["eval"] = {"level": level, "value": "unknown"}
    return cert


def load_evidence(text: str, sig: Signature) -> list[RuleEvidence]:
    data = json.loads(text)
    if isinstance(data, dict):
        data = data["evidence"]
    return [RuleEvidence.from_json(d, sig) for d in data]
