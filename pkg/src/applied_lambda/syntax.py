"""Terms, constructor patterns, substitution and the surface grammar.

Terms are immutable named trees.  Alpha-equivalence goes through a
canonical nameless encoding (see :func:`canonical`), which is also the node
identity used by the reduction-graph search.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class SyntaxErrorWithPos(ValueError):
    """Parse failure; ``pos`` is a character offset into the source text."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)


class ArityError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Term and pattern trees


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Const:
    name: str


@dataclass(frozen=True, slots=True)
class Constr:
    name: str
    args: tuple["Term", ...] = ()


@dataclass(frozen=True, slots=True)
class Abs:
    var: str
    body: "Term"


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"


Term = Union[Var, Const, Constr, Abs, App]


@dataclass(frozen=True, slots=True)
class PVar:
    name: str


@dataclass(frozen=True, slots=True)
class PConstr:
    name: str
    args: tuple["Pattern", ...] = ()


Pattern = Union[PVar, PConstr]


BUILTIN_CONSTRUCTORS: dict[str, int] = {"T": 0, "F": 0, "0": 0, "S": 1, "nil": 0, "cons": 2}


@dataclass
class Signature:
    """Constructor and constant arities.  Built-in constructors are always present."""

    constructors: dict[str, int] = field(default_factory=dict)
    constants: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        merged = dict(BUILTIN_CONSTRUCTORS)
        merged.update(self.constructors)
        self.constructors = merged
        clash = set(self.constructors) & set(self.constants)
        if clash:
            raise ValueError(f"names declared both as constructor and constant: {sorted(clash)}")
        for name, k in {**self.constructors, **self.constants}.items():
            if k < 0:
                raise ValueError(f"negative arity for {name}")
            if "#" in name:
                raise ValueError(f"'#' is reserved for leveled constants: {name}")

    def constant_arity(self, name: str) -> int | None:
        """Arity of ``name``; leveled copies ``c#n`` inherit the arity of ``c``."""
        if name in self.constants:
            return self.constants[name]
        base, level = split_level(name)
        if level is not None:
            return self.constants.get(base)
        return None

    def merged(self, other: "Signature") -> "Signature":
        return Signature({**self.constructors, **other.constructors}, {**self.constants, **other.constants})


def split_level(name: str) -> tuple[str, int | None]:
    """``"get#3"`` -> ``("get", 3)``; plain names give level ``None``."""
    base, sep, lvl = name.rpartition("#")
    if sep and lvl.isdigit() and base:
        return base, int(lvl)
    return name, None


def leveled(name: str, level: int) -> str:
    return f"{name}#{level}"


# ---------------------------------------------------------------------------
# Structural helpers


def free_vars(term: Term) -> set[str]:
    out: set[str] = set()
    _free_vars(term, frozenset(), out)
    return out


def _free_vars(t: Term, bound: frozenset, out: set) -> None:
    while True:
        match t:
            case Var(name):
                if name not in bound:
                    out.add(name)
                return
            case Const():
                return
            case Constr(_, args):
                for a in args:
                    _free_vars(a, bound, out)
                return
            case Abs(x, body):
                bound = bound | {x}
                t = body
            case App(f, a):
                _free_vars(f, bound, out)
                t = a


def pattern_vars(p: Pattern) -> list[str]:
    """Variables of a pattern in left-to-right order (with repetitions)."""
    out: list[str] = []
    stack = [p]
    while stack:
        q = stack.pop()
        if isinstance(q, PVar):
            out.append(q.name)
        else:
            stack.extend(reversed(q.args))
    return out


def pattern_to_term(p: Pattern) -> Term:
    if isinstance(p, PVar):
        return Var(p.name)
    return Constr(p.name, tuple(pattern_to_term(a) for a in p.args))


def term_to_pattern(t: Term) -> Pattern:
    match t:
        case Var(name):
            return PVar(name)
        case Constr(name, args):
            return PConstr(name, tuple(term_to_pattern(a) for a in args))
    raise ValueError(f"not a constructor pattern: {print_term(t)}")


def all_names(term: Term) -> set[str]:
    """Every variable name occurring in ``term``, free or bound."""
    out: set[str] = set()
    stack = [term]
    while stack:
        t = stack.pop()
        match t:
            case Var(name):
                out.add(name)
            case Constr(_, args):
                stack.extend(args)
            case Abs(x, body):
                out.add(x)
                stack.append(body)
            case App(f, a):
                stack.append(f)
                stack.append(a)
    return out


def constants_of(term: Term) -> set[str]:
    out: set[str] = set()
    stack = [term]
    while stack:
        t = stack.pop()
        match t:
            case Const(name):
                out.add(name)
            case Constr(_, args):
                stack.extend(args)
            case Abs(_, body):
                stack.append(body)
            case App(f, a):
                stack.append(f)
                stack.append(a)
    return out


def fresh_name(base: str, avoid: set[str] | frozenset[str]) -> str:
    """Deterministic fresh variant of ``base``: x -> x' -> x'' ..."""
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def substitute(term: Term, subst: Mapping[str, Term]) -> Term:
    """Simultaneous capture-avoiding substitution."""
    if not subst:
        return term
    fv_images: set[str] = set()
    for v in subst.values():
        fv_images |= free_vars(v)
    return _subst(term, dict(subst), fv_images)


def _subst(t: Term, s: dict, fv_images: set) -> Term:
    match t:
        case Var(name):
            return s.get(name, t)
        case Const():
            return t
        case Constr(name, args):
            return Constr(name, tuple(_subst(a, s, fv_images) for a in args))
        case App(f, a):
            return App(_subst(f, s, fv_images), _subst(a, s, fv_images))
        case Abs(x, body):
            inner = {k: v for k, v in s.items() if k != x}
            if not inner:
                return t
            body_fv = free_vars(body)
            used = {k: v for k, v in inner.items() if k in body_fv}
            if not used:
                return t
            used_fv: set[str] = set()
            for v in used.values():
                used_fv |= free_vars(v)
            if x in used_fv:
                avoid = used_fv | body_fv | set(used) | all_names(body)
                y = fresh_name(x, avoid)
                used[x] = Var(y)
                return Abs(y, _subst(body, used, used_fv | {y}))
            return Abs(x, _subst(body, used, used_fv))
    raise TypeError(f"not a term: {t!r}")


def apply_const_subst(term: Term, theta: Mapping[str, str] | None = None, *, func=None) -> Term:
    """Rename every constant via ``theta`` (or the callable ``func``).

    Raises ``KeyError`` naming the first unmapped constant.
    """
    if func is None:
        def func(c):
            try:
                return theta[c]
            except KeyError:
                raise KeyError(f"constant substitution undefined on {c!r}") from None

    def go(t: Term) -> Term:
        match t:
            case Const(name):
                return Const(func(name))
            case Var():
                return t
            case Constr(name, args):
                return Constr(name, tuple(go(a) for a in args))
            case Abs(x, body):
                return Abs(x, go(body))
            case App(f, a):
                return App(go(f), go(a))
        raise TypeError(f"not a term: {t!r}")

    return go(term)


# ---------------------------------------------------------------------------
# Nameless form and alpha-equivalence

# Tags shared with the reduction kernels.
VAR, FREE, CONST, CON, LAM, APP, META = range(7)


def canonical(term: Term) -> tuple:
    """De Bruijn encoding as nested tuples; alpha-equivalent terms map to equal keys."""
    return _canon(term, {}, 0)


def _canon(t: Term, env: dict, depth: int) -> tuple:
    match t:
        case Var(name):
            lvl = env.get(name)
            if lvl is None:
                return (FREE, name)
            return (VAR, depth - 1 - lvl)
        case Const(name):
            return (CONST, name)
        case Constr(name, args):
            return (CON, name, tuple(_canon(a, env, depth) for a in args))
        case Abs(x, body):
            old = env.get(x)
            env[x] = depth
            out = (LAM, _canon(body, env, depth + 1))
            if old is None:
                del env[x]
            else:
                env[x] = old
            return out
        case App(f, a):
            return (APP, _canon(f, env, depth), _canon(a, env, depth))
    raise TypeError(f"not a term: {t!r}")


_BINDER_NAMES = "xyzuvwabcdefghk"


def from_canonical(key: tuple, avoid: Iterable[str] = ()) -> Term:
    """Rebuild a named term from its nameless form; binder names are x, y, z, ..."""
    avoid_set = set(avoid) | _free_names_of_key(key)
    names: list[str] = []

    def pick(depth: int) -> str:
        base = _BINDER_NAMES[depth % len(_BINDER_NAMES)]
        name = base if depth < len(_BINDER_NAMES) else f"{base}{depth // len(_BINDER_NAMES)}"
        while name in avoid_set or name in names:
            name += "'"
        return name

    def go(k: tuple) -> Term:
        tag = k[0]
        if tag == VAR:
            return Var(names[len(names) - 1 - k[1]])
        if tag == FREE:
            return Var(k[1])
        if tag == CONST:
            return Const(k[1])
        if tag == CON:
            return Constr(k[1], tuple(go(a) for a in k[2]))
        if tag == LAM:
            x = pick(len(names))
            names.append(x)
            body = go(k[1])
            names.pop()
            return Abs(x, body)
        if tag == APP:
            return App(go(k[1]), go(k[2]))
        raise ValueError(f"bad nameless node {k!r}")

    return go(key)


def _free_names_of_key(key: tuple) -> set[str]:
    out = set()
    stack = [key]
    while stack:
        k = stack.pop()
        tag = k[0]
        if tag == FREE:
            out.add(k[1])
        elif tag == CON:
            stack.extend(k[2])
        elif tag == LAM:
            stack.append(k[1])
        elif tag == APP:
            stack.append(k[1])
            stack.append(k[2])
    return out


def alpha_eq(a: Term, b: Term) -> bool:
    return canonical(a) == canonical(b)


# ---------------------------------------------------------------------------
# Application spines and positions


def spine(term: Term) -> tuple[Term, list[Term]]:
    """``f a1 ... an`` -> ``(f, [a1, ..., an])``."""
    args = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fun
    args.reverse()
    return term, args


def apply_spine(head: Term, args: Iterable[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def subterm_at(term: Term, pos: tuple[int, ...]) -> Term:
    """Positions index children: App 0=fun 1=arg, Abs 0=body, Constr i=i-th argument."""
    for i in pos:
        match term:
            case App(f, a):
                term = (f, a)[i]
            case Abs(_, body):
                if i != 0:
                    raise IndexError(pos)
                term = body
            case Constr(_, args):
                term = args[i]
            case _:
                raise IndexError(pos)
    return term


def replace_at(term: Term, pos: tuple[int, ...], new: Term) -> Term:
    if not pos:
        return new
    i, rest = pos[0], pos[1:]
    match term:
        case App(f, a):
            return App(replace_at(f, rest, new), a) if i == 0 else App(f, replace_at(a, rest, new))
        case Abs(x, body):
            return Abs(x, replace_at(body, rest, new))
        case Constr(name, args):
            lst = list(args)
            lst[i] = replace_at(lst[i], rest, new)
            return Constr(name, tuple(lst))
    raise IndexError(pos)


def term_size(term: Term) -> int:
    n = 0
    stack = [term]
    while stack:
        t = stack.pop()
        n += 1
        match t:
            case Constr(_, args):
                stack.extend(args)
            case Abs(_, body):
                stack.append(body)
            case App(f, a):
                stack.append(f)
                stack.append(a)
    return n


# ---------------------------------------------------------------------------
# Sugar


def numeral(k: int) -> Term:
    t: Term = Constr("0")
    for _ in range(k):
        t = Constr("S", (t,))
    return t


def as_numeral(t: Term) -> int | None:
    k = 0
    while isinstance(t, Constr) and t.name == "S" and len(t.args) == 1:
        k += 1
        t = t.args[0]
    if isinstance(t, Constr) and t.name == "0" and not t.args:
        return k
    return None


def list_term(items: Iterable[Term]) -> Term:
    out: Term = Constr("nil")
    for it in reversed(list(items)):
        out = Constr("cons", (it, out))
    return out


def as_list(t: Term) -> list[Term] | None:
    items = []
    while isinstance(t, Constr) and t.name == "cons" and len(t.args) == 2:
        items.append(t.args[0])
        t = t.args[1]
    if isinstance(t, Constr) and t.name == "nil" and not t.args:
        return items
    return None


# ---------------------------------------------------------------------------
# Lexer / parser

INFIX_OPS = {"<": 1, "++": 2}  # precedence; application binds tighter than both

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<arrow>->)
  | (?P<op>(?:\+\+|<)(?:\#\d+)?)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*(?:\#\d+)?)
  | (?P<punct>[\\.(),\[\];/:*])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise SyntaxErrorWithPos(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), i))
        i = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class TermParser:
    """Recursive-descent parser for the term grammar.

    Identifiers are classified against the signature: declared constructors,
    declared constants (``c#n`` when ``leveled`` is set), and otherwise
    variables.  A bare constructor of arity k consumes the next k atoms, so
    ``S 0`` reads as ``S(0)``.
    """

    def __init__(self, tokens: list[Token], sig: Signature, leveled: bool = False):
        self.toks = tokens
        self.i = 0
        self.sig = sig
        self.leveled = leveled

    # token helpers
    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise SyntaxErrorWithPos(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return tok

    def at_atom_start(self) -> bool:
        tok = self.peek()
        return tok.kind in ("num", "ident") or tok.text in ("(", "[", "\\")

    # grammar
    def parse_term(self) -> Term:
        if self.peek().text == "\\":
            return self.parse_lambda()
        return self.parse_infix(1)

    def parse_lambda(self) -> Term:
        self.expect("\\")
        names = []
        while self.peek().kind == "ident":
            tok = self.next()
            if self.classify(tok) != "var":
                raise SyntaxErrorWithPos(f"cannot bind non-variable {tok.text!r}", tok.pos)
            names.append(tok.text)
        if not names:
            raise SyntaxErrorWithPos("expected a bound variable", self.peek().pos)
        self.expect(".")
        body = self.parse_term()
        for x in reversed(names):
            body = Abs(x, body)
        return body

    def parse_infix(self, level: int) -> Term:
        if level > max(INFIX_OPS.values()):
            return self.parse_app()
        left = self.parse_infix(level + 1)
        tok = self.peek()
        if tok.kind == "op" and INFIX_OPS[split_level(tok.text)[0]] == level:
            self.next()
            op = self.op_const(tok)
            if split_level(tok.text)[0] == "++":  # right associative
                right = self.parse_infix(level)
            else:
                right = self.parse_infix(level + 1)
                nxt = self.peek()
                if nxt.kind == "op" and INFIX_OPS[split_level(nxt.text)[0]] == level:
                    raise SyntaxErrorWithPos("'<' is non-associative; add parentheses", nxt.pos)
            return App(App(op, left), right)
        return left

    def op_const(self, tok: Token) -> Const:
        base, lvl = split_level(tok.text)
        if base not in self.sig.constants:
            raise SyntaxErrorWithPos(f"operator {base!r} is not a declared constant", tok.pos)
        if lvl is not None and not self.leveled:
            raise SyntaxErrorWithPos(f"leveled constant {tok.text!r} not allowed here", tok.pos)
        return Const(tok.text)

    def parse_app(self) -> Term:
        if not self.at_atom_start():
            tok = self.peek()
            raise SyntaxErrorWithPos(f"expected a term, found {tok.text or 'end of input'!r}", tok.pos)
        t = self.parse_atom()
        while self.at_atom_start():
            if self.peek().text == "\\":
                t = App(t, self.parse_lambda())
                break
            t = App(t, self.parse_atom())
        return t

    def classify(self, tok: Token) -> str:
        name = tok.text
        if name in self.sig.constructors:
            return "constr"
        if name in self.sig.constants:
            return "const"
        base, lvl = split_level(name)
        if lvl is not None:
            if base in self.sig.constants:
                if not self.leveled:
                    raise SyntaxErrorWithPos(f"leveled constant {name!r} not allowed here", tok.pos)
                return "const"
            raise SyntaxErrorWithPos(f"unknown constant {base!r} in {name!r}", tok.pos)
        if name[0].isupper():
            raise SyntaxErrorWithPos(f"unknown constructor {name!r}", tok.pos)
        return "var"

    def parse_atom(self) -> Term:
        tok = self.next()
        if tok.kind == "num":
            return numeral(int(tok.text))
        if tok.text == "(":
            nxt = self.peek()
            if nxt.kind == "op" and self.toks[self.i + 1].text == ")":
                self.next()
                self.next()
                return self.op_const(nxt)
            t = self.parse_term()
            self.expect(")")
            return t
        if tok.text == "[":
            items = []
            if self.peek().text != "]":
                items.append(self.parse_term())
                while self.peek().text == ",":
                    self.next()
                    items.append(self.parse_term())
            self.expect("]")
            return list_term(items)
        if tok.kind == "ident":
            kind = self.classify(tok)
            if kind == "var":
                return Var(tok.text)
            if kind == "const":
                return Const(tok.text)
            return self.parse_constr(tok)
        raise SyntaxErrorWithPos(f"unexpected token {tok.text or 'end of input'!r}", tok.pos)

    def parse_constr(self, tok: Token) -> Term:
        arity = self.sig.constructors[tok.text]
        if self.peek().text == "(" and arity > 0:
            self.next()
            args = [self.parse_term()]
            while self.peek().text == ",":
                self.next()
                args.append(self.parse_term())
            self.expect(")")
        else:
            args = []
            for _ in range(arity):
                if not self.at_atom_start() or self.peek().text == "\\":
                    break
                args.append(self.parse_atom())
        if len(args) != arity:
            raise ArityError(f"constructor {tok.text} expects {arity} argument(s), got {len(args)} (at offset {tok.pos})")
        return Constr(tok.text, tuple(args))


def parse_term(text: str, sig: Signature | None = None, *, leveled: bool = False) -> Term:
    sig = sig or Signature()
    p = TermParser(tokenize(text), sig, leveled=leveled)
    t = p.parse_term()
    tok = p.peek()
    if tok.kind != "eof":
        raise SyntaxErrorWithPos(f"unexpected trailing input {tok.text!r}", tok.pos)
    check_arities(t, sig)
    return t


def check_arities(term: Term, sig: Signature) -> None:
    for t in iter_subterms(term):
        if isinstance(t, Constr):
            k = sig.constructors.get(t.name)
            if k is None:
                raise ArityError(f"unknown constructor {t.name}")
            if k != len(t.args):
                raise ArityError(f"constructor {t.name} expects {k} argument(s), got {len(t.args)}")


def iter_subterms(term: Term) -> Iterator[Term]:
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        match t:
            case Constr(_, args):
                stack.extend(args)
            case Abs(_, body):
                stack.append(body)
            case App(f, a):
                stack.append(f)
                stack.append(a)


# ---------------------------------------------------------------------------
# Printer


def _is_infix(t: Term) -> tuple[str, Term, Term] | None:
    if isinstance(t, App) and isinstance(t.fun, App) and isinstance(t.fun.fun, Const):
        name = t.fun.fun.name
        if split_level(name)[0] in INFIX_OPS:
            return name, t.fun.arg, t.arg
    return None


def print_term(term: Term, sugar: bool = True) -> str:
    return _pr(term, 0, sugar)


# context precedences: 0 = anywhere, 1/2 = operand of infix, 3 = function position, 4 = argument
def _pr(t: Term, ctx: int, sugar: bool) -> str:
    match t:
        case Var(name):
            return name
        case Const(name):
            if split_level(name)[0] in INFIX_OPS:
                return f"({name})"
            return name
        case Constr(name, args):
            if sugar:
                k = as_numeral(t)
                if k is not None:
                    return str(k)
                items = as_list(t)
                if items is not None and items:
                    return "[" + ", ".join(_pr(a, 0, sugar) for a in items) + "]"
            if not args:
                return name
            return f"{name}(" + ", ".join(_pr(a, 0, sugar) for a in args) + ")"
        case Abs():
            names = []
            body = t
            while isinstance(body, Abs):
                names.append(body.var)
                body = body.body
            s = "\\" + ". \\".join(names) + ". " + _pr(body, 0, sugar)
            return f"({s})" if ctx > 0 else s
        case App():
            inf = _is_infix(t)
            if inf is not None:
                name, a, b = inf
                prec = INFIX_OPS[split_level(name)[0]]
                if prec == 2:
                    s = f"{_pr(a, prec + 1, sugar)} {name} {_pr(b, prec, sugar)}"
                else:
                    s = f"{_pr(a, prec + 1, sugar)} {name} {_pr(b, prec + 1, sugar)}"
                return f"({s})" if ctx > prec or (ctx == prec and prec == 1) else s
            head, args = spine(t)
            parts = [_pr(head, 3, sugar)] + [_pr(a, 4, sugar) for a in args]
            s = " ".join(parts)
            return f"({s})" if ctx >= 4 else s
    raise TypeError(f"not a term: {t!r}")


def print_pattern(p: Pattern) -> str:
    return print_term(pattern_to_term(p))
