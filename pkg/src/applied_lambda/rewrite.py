"""Pattern-matching rewrite systems: validation, reduction and SN search."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

from . import kernel
from .syntax import (
    CON,
    CONST,
    FREE,
    META,
    Abs,
    App,
    Const,
    Constr,
    Pattern,
    PConstr,
    PVar,
    Signature,
    SyntaxErrorWithPos,
    Term,
    TermParser,
    Var,
    apply_spine,
    canonical,
    check_arities,
    constants_of,
    free_vars,
    from_canonical,
    pattern_to_term,
    pattern_vars,
    print_term,
    replace_at,
    spine,
    substitute,
    subterm_at,
    term_to_pattern,
    tokenize,
)


@dataclass(frozen=True)
class Rule:
    head: str
    patterns: tuple[Pattern, ...]
    rhs: Term

    @property
    def lhs(self) -> Term:
        return apply_spine(Const(self.head), (pattern_to_term(p) for p in self.patterns))

    def variables(self) -> list[str]:
        """Pattern variables in left-to-right order, i.e. FV(L) as a vector."""
        out = []
        for p in self.patterns:
            out.extend(pattern_vars(p))
        return out

    def __str__(self) -> str:
        return f"{print_term(self.lhs)} -> {print_term(self.rhs)}"


@dataclass(frozen=True)
class Violation:
    rule_index: int | None
    reason: str
    detail: str = ""

    def __str__(self) -> str:
        where = f"rule {self.rule_index}" if self.rule_index is not None else "system"
        return f"{where}: {self.reason}" + (f" ({self.detail})" if self.detail else "")


class ValidationError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


# ---------------------------------------------------------------------------
# Unification and matching


def _resolve(t: Pattern, s: dict) -> Pattern:
    while isinstance(t, PVar) and t.name in s:
        t = s[t.name]
    return t


def _occurs(name: str, t: Pattern, s: dict) -> bool:
    t = _resolve(t, s)
    if isinstance(t, PVar):
        return t.name == name
    return any(_occurs(name, a, s) for a in t.args)


def _zonk(t: Pattern, s: dict) -> Pattern:
    t = _resolve(t, s)
    if isinstance(t, PVar):
        return t
    return PConstr(t.name, tuple(_zonk(a, s) for a in t.args))


def unifiable_patterns(ps: list[Pattern] | tuple, qs: list[Pattern] | tuple) -> dict[str, Pattern] | None:
    """Most general unifier of two pattern vectors (assumed renamed apart), or ``None``."""
    if len(ps) != len(qs):
        return None
    s: dict[str, Pattern] = {}
    work = list(zip(ps, qs))
    while work:
        a, b = work.pop()
        a, b = _resolve(a, s), _resolve(b, s)
        if isinstance(a, PVar) and isinstance(b, PVar) and a.name == b.name:
            continue
        if isinstance(a, PVar) or isinstance(b, PVar):
            var, other = (a, b) if isinstance(a, PVar) else (b, a)
            if _occurs(var.name, other, s):
                return None
            s[var.name] = other
            continue
        if a.name != b.name or len(a.args) != len(b.args):
            return None
        work.extend(zip(a.args, b.args))
    return {k: _zonk(v, s) for k, v in s.items()}


def match_pattern(p: Pattern, t: Term, out: dict[str, Term]) -> bool:
    if isinstance(p, PVar):
        out[p.name] = t
        return True
    if not isinstance(t, Constr) or t.name != p.name or len(t.args) != len(p.args):
        return False
    return all(match_pattern(q, a, out) for q, a in zip(p.args, t.args))


def match_rule(rule: Rule, args: list[Term] | tuple) -> dict[str, Term] | None:
    """The substitution instantiating the rule's patterns to ``args``, if any."""
    if len(args) != len(rule.patterns):
        return None
    out: dict[str, Term] = {}
    for p, a in zip(rule.patterns, args):
        if not match_pattern(p, a, out):
            return None
    return out


def _rename_apart(rule: Rule, taken: set[str]) -> tuple[Pattern, ...]:
    ren = {}
    for v in rule.variables():
        if v in taken:
            w = v + "'"
            while w in taken or w in ren.values():
                w += "'"
            ren[v] = w

    def go(p: Pattern) -> Pattern:
        if isinstance(p, PVar):
            return PVar(ren.get(p.name, p.name))
        return PConstr(p.name, tuple(go(a) for a in p.args))

    return tuple(go(p) for p in rule.patterns)


# ---------------------------------------------------------------------------
# Systems


class RuleSource:
    """Anything that can answer arity and rule queries for constants."""

    sig: Signature

    def rules_for(self, name: str) -> list[Rule]:
        raise NotImplementedError

    def arity(self, name: str) -> int | None:
        return self.sig.constant_arity(name)

    def lookup(self, name: str):
        """Kernel view: ``None`` for rule-less constants, else ``(arity, compiled rules)``."""
        cache = self.__dict__.setdefault("_kcache", {})
        try:
            return cache[name]
        except KeyError:
            pass
        rules = self.rules_for(name)
        entry = None
        if rules:
            entry = (len(rules[0].patterns), tuple(compile_rule(r) for r in rules))
        cache[name] = entry
        return entry


@dataclass
class RewriteSystem(RuleSource):
    sig: Signature
    rules: list[Rule]
    name: str = "system"
    _by_head: dict[str, list[Rule]] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        for r in self.rules:
            self._by_head.setdefault(r.head, []).append(r)

    def rules_for(self, name: str) -> list[Rule]:
        return self._by_head.get(name, [])

    def constants(self) -> list[str]:
        return sorted(self.sig.constants)

    def extended(self, sig: Signature, rules: list[Rule], name: str | None = None) -> "RewriteSystem":
        return validate_system(self.sig.merged(sig), self.rules + list(rules), name=name or self.name)

    def parse(self, text: str) -> Term:
        from .syntax import parse_term

        return parse_term(text, self.sig)


def compile_pattern(p: Pattern):
    if isinstance(p, PVar):
        return (0, p.name)
    return (1, p.name, tuple(compile_pattern(a) for a in p.args))


def compile_rule(rule: Rule):
    pvars = set(rule.variables())
    return tuple(compile_pattern(p) for p in rule.patterns), _template(canonical(rule.rhs), pvars)


def _template(key: tuple, pvars: set):
    tag = key[0]
    if tag == FREE:
        return (META, key[1]) if key[1] in pvars else key
    if tag == CON:
        return (CON, key[1], tuple(_template(a, pvars) for a in key[2]))
    if tag == 4:
        return (4, _template(key[1], pvars))
    if tag == 5:
        return (5, _template(key[1], pvars), _template(key[2], pvars))
    return key


def check_system(sig: Signature, rules: list[Rule]) -> list[Violation]:
    out: list[Violation] = []
    for i, r in enumerate(rules):
        arity = sig.constants.get(r.head)
        if arity is None:
            out.append(Violation(i, "undeclared constant", r.head))
        elif arity != len(r.patterns):
            out.append(Violation(i, "arity mismatch", f"{r.head} has arity {arity}, rule gives {len(r.patterns)} pattern(s)"))
        seen: dict[str, int] = {}
        for j, p in enumerate(r.patterns):
            try:
                check_arities(pattern_to_term(p), sig)
            except ValueError as e:
                out.append(Violation(i, "bad pattern", str(e)))
            for v in pattern_vars(p):
                if v in seen:
                    if seen[v] == j:
                        out.append(Violation(i, "non-linear", f"variable {v} occurs twice in pattern {j + 1}"))
                    else:
                        out.append(Violation(i, "non-linear", f"patterns {seen[v] + 1} and {j + 1} share variable {v}"))
                else:
                    seen[v] = j
        extra = free_vars(r.rhs) - set(seen)
        if extra:
            out.append(Violation(i, "FV(rhs) not contained in FV(lhs)", ", ".join(sorted(extra))))
        try:
            check_arities(r.rhs, sig)
        except ValueError as e:
            out.append(Violation(i, "bad right-hand side", str(e)))
        undeclared = {c for c in constants_of(r.rhs) if sig.constant_arity(c) is None}
        if undeclared:
            out.append(Violation(i, "undeclared constant in right-hand side", ", ".join(sorted(undeclared))))
    for i, r in enumerate(rules):
        for j in range(i + 1, len(rules)):
            q = rules[j]
            if q.head != r.head or len(q.patterns) != len(r.patterns):
                continue
            qs = _rename_apart(q, set(r.variables()))
            u = unifiable_patterns(r.patterns, qs)
            if u is not None:
                shown = ", ".join(f"{k}:={print_term(pattern_to_term(v))}" for k, v in sorted(u.items()))
                out.append(Violation(j, f"left-hand side unifiable with rule {i}", shown or "identical"))
    return out


def validate_system(sig: Signature, rules: list[Rule], name: str = "system") -> RewriteSystem:
    violations = check_system(sig, rules)
    if violations:
        raise ValidationError(violations)
    return RewriteSystem(sig, list(rules), name=name)


# ---------------------------------------------------------------------------
# One-step reduction on named terms


def root_redexes(system: RuleSource, term: Term) -> list[Term]:
    """Contracta of the redexes located at the root of ``term`` (beta first)."""
    out = []
    if isinstance(term, App) and isinstance(term.fun, Abs):
        out.append(substitute(term.fun.body, {term.fun.var: term.arg}))
    head, args = spine(term)
    if isinstance(head, Const):
        rules = system.rules_for(head.name)
        if rules and len(rules[0].patterns) == len(args):
            for r in rules:
                s = match_rule(r, args)
                if s is not None:
                    out.append(substitute(r.rhs, s))
                    break
    return out


def _positions(term: Term, pos: tuple = ()) -> Iterator[tuple[tuple, Term]]:
    yield pos, term
    match term:
        case App(f, a):
            yield from _positions(f, pos + (0,))
            yield from _positions(a, pos + (1,))
        case Abs(_, body):
            yield from _positions(body, pos + (0,))
        case Constr(_, args):
            for i, a in enumerate(args):
                yield from _positions(a, pos + (i,))


def redexes(system: RuleSource, term: Term) -> list[tuple[tuple[int, ...], Term]]:
    """All ``(position, reduct)`` pairs, positions in pre-order (outermost, leftmost first)."""
    out = []
    for pos, sub in _positions(term):
        for c in root_redexes(system, sub):
            out.append((pos, replace_at(term, pos, c)))
    return out


def is_normal(system: RuleSource, term: Term) -> bool:
    return all(not root_redexes(system, sub) for _, sub in _positions(term))


@dataclass
class NormalForm:
    term: Term
    steps: int
    trace: list[Term] = field(default_factory=list)


@dataclass
class Timeout:
    last: Term
    steps: int
    trace: list[Term] = field(default_factory=list)


STRATEGIES = ("leftmost-outermost", "leftmost-innermost")


def _select(system: RuleSource, term: Term, strategy: str) -> tuple[tuple, Term] | None:
    if strategy == "leftmost-outermost":
        for pos, sub in _positions(term):
            cs = root_redexes(system, sub)
            if cs:
                return pos, cs[0]
        return None
    if strategy == "leftmost-innermost":
        found = [(pos, cs) for pos, sub in _positions(term) if (cs := root_redexes(system, sub))]
        if not found:
            return None
        positions = [p for p, _ in found]
        for pos, cs in found:
            if not any(len(q) > len(pos) and q[: len(pos)] == pos for q in positions):
                return pos, cs[0]
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def step(system: RuleSource, term: Term, strategy: str = "leftmost-outermost") -> tuple[tuple, Term] | None:
    """One reduction step under ``strategy``: ``(position, new term)`` or ``None`` at a normal form."""
    sel = _select(system, term, strategy)
    if sel is None:
        return None
    pos, c = sel
    return pos, replace_at(term, pos, c)


def normalize(system: RuleSource, term: Term, strategy: str = "leftmost-outermost",
              step_budget: int = 10_000, keep_trace: bool = False) -> NormalForm | Timeout:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    trace = [term] if keep_trace else []
    for n in range(step_budget + 1):
        nxt = step(system, term, strategy)
        if nxt is None:
            return NormalForm(term, n, trace)
        if n == step_budget:
            break
        term = nxt[1]
        if keep_trace:
            trace.append(term)
    return Timeout(term, step_budget, trace)


# ---------------------------------------------------------------------------
# Strong normalisation by exhaustive search


@dataclass
class CertifiedSN:
    states: int
    longest: int
    edges: int = 0


@dataclass
class NotSN:
    cycle: list[Term]
    states: int
    edges: int = 0


@dataclass
class Exhausted:
    states: int
    edges: int = 0


SNReport = CertifiedSN | NotSN | Exhausted


def sn_search(system: RuleSource, term: Term, max_states: int = 100_000) -> SNReport:
    """Explore the reduction graph of ``term`` up to ``max_states`` alpha-classes.

    ``CertifiedSN`` proves that every reduction sequence terminates, ``NotSN``
    carries a reduction cycle, ``Exhausted`` is inconclusive.
    """
    if max_states < 1:
        raise ValueError("max_states must be >= 1")
    names = free_vars(term)
    status, states, data, edges = kernel.impl.explore(canonical(term), system.lookup, max_states)
    if status == "sn":
        return CertifiedSN(states, data, edges)
    if status == "cycle":
        return NotSN([from_canonical(k, names) for k in data], states, edges)
    return Exhausted(states, edges)


def check_cycle(system: RuleSource, cycle: list[Term]) -> bool:
    """True iff each element reduces in one step to the next and the cycle closes."""
    if len(cycle) < 2 or canonical(cycle[0]) != canonical(cycle[-1]):
        return False
    for a, b in zip(cycle, cycle[1:]):
        kb = canonical(b)
        if not any(canonical(r) == kb for _, r in redexes(system, a)):
            return False
    return True


# ---------------------------------------------------------------------------
# .rwl files


def _split_statements(text: str):
    toks = tokenize(text)
    stmt = []
    for tok in toks:
        if tok.kind == "eof":
            break
        if tok.text == ";":
            if stmt:
                yield stmt
            stmt = []
        else:
            stmt.append(tok)
    if stmt:
        raise SyntaxErrorWithPos("missing ';' at end of statement", stmt[0].pos)


def parse_rwl(text: str, name: str = "system") -> RewriteSystem:
    """Parse and validate a rewrite-system file.

    Grammar::

        file   ::= (decl | rule)*
        decl   ::= "constructor" NAME "/" NUM ";" | "const" NAME "/" NUM ";"
        rule   ::= term "->" term ";"      -- lhs: constant applied to patterns
        comment: "--" to end of line

    NAME may be an identifier or one of the infix operators ``<`` and ``++``.
    """
    constructors: dict[str, int] = {}
    constants: dict[str, int] = {}
    rule_stmts = []
    for stmt in _split_statements(text):
        if stmt[0].text in ("constructor", "const") and len(stmt) == 4 and stmt[2].text == "/":
            if stmt[3].kind != "num":
                raise SyntaxErrorWithPos("arity must be a number", stmt[3].pos)
            table = constructors if stmt[0].text == "constructor" else constants
            nm = stmt[1].text
            if nm in constructors or nm in constants:
                raise SyntaxErrorWithPos(f"duplicate declaration of {nm!r}", stmt[1].pos)
            table[nm] = int(stmt[3].text)
        else:
            rule_stmts.append(stmt)
    sig = Signature(constructors, constants)
    rules = []
    for stmt in rule_stmts:
        arrows = [i for i, t in enumerate(stmt) if t.kind == "arrow"]
        if len(arrows) != 1:
            raise SyntaxErrorWithPos("a rule needs exactly one '->'", stmt[0].pos)
        k = arrows[0]
        lhs = _parse_tokens(stmt[:k], sig, stmt[k].pos)
        rhs = _parse_tokens(stmt[k + 1:], sig, stmt[-1].pos)
        head, args = spine(lhs)
        if not isinstance(head, Const):
            raise SyntaxErrorWithPos("rule left-hand side must start with a constant", stmt[0].pos)
        try:
            pats = tuple(term_to_pattern(a) for a in args)
        except ValueError as e:
            raise SyntaxErrorWithPos(str(e), stmt[0].pos) from None
        rules.append(Rule(head.name, pats, rhs))
    return validate_system(sig, rules, name=name)


def _parse_tokens(toks, sig, end_pos):
    from .syntax import Token

    if not toks:
        raise SyntaxErrorWithPos("empty term", end_pos)
    p = TermParser(list(toks) + [Token("eof", "", end_pos)], sig)
    t = p.parse_term()
    if p.peek().kind != "eof":
        raise SyntaxErrorWithPos(f"unexpected {p.peek().text!r}", p.peek().pos)
    return t


def load_rwl(path: str | Path) -> RewriteSystem:
    path = Path(path)
    return parse_rwl(path.read_text(encoding="utf-8"), name=path.stem)


def format_rwl(system: RewriteSystem, header: str = "") -> str:
    lines = []
    if header:
        lines += [f"-- {h}" if h else "--" for h in header.splitlines()]
    for nm, k in system.sig.constructors.items():
        from .syntax import BUILTIN_CONSTRUCTORS

        if nm not in BUILTIN_CONSTRUCTORS:
            lines.append(f"constructor {nm}/{k};")
    for nm, k in system.sig.constants.items():
        lines.append(f"const {nm}/{k};")
    lines.append("")
    for r in system.rules:
        lines.append(f"{r};")
    return "\n".join(lines) + "\n"
