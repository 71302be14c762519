"""Finite approximation of the strict domain model.

Constants are interpreted at a *level*: level n stands for the n-th
iterate of the constant-interpretation functional starting from bottom,
so constants at level 0 (and constants without rules) denote bottom and a
saturated constant at level n+1 evaluates its matching right-hand side at
level n.  Every recursive evaluation step spends one unit of *fuel*; running
out yields ``Unknown`` rather than a wrong answer.

Determinate results are lower bounds of the true denotation: a ``Det``
value other than ``Bot`` certifies that the term does not denote bottom.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Union

from .rewrite import RuleSource
from .syntax import Abs, App, Const, Constr, Pattern, PVar, Term, Var


class _Bot:
    __slots__ = ()

    def __repr__(self):
        return "Bot"


class _Dummy:
    __slots__ = ()

    def __repr__(self):
        return "DummyV"


Bot = _Bot()
DummyV = _Dummy()


@dataclass(frozen=True)
class ConstrV:
    name: str
    args: tuple["Value", ...] = ()


@dataclass(frozen=True, eq=False)
class FunV:
    var: str
    body: Term
    env: Mapping[str, "Value"]
    level: int


@dataclass(frozen=True, eq=False)
class ConstFunV:
    name: str
    level: int
    args: tuple["Value", ...] = ()


Value = Union[_Bot, _Dummy, ConstrV, FunV, ConstFunV]


class BotStatus(Enum):
    NON_BOT = "NonBot"
    BOT_CERTIFIED = "BotCertified"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class Matched:
    env: dict


class _NoMatch:
    def __repr__(self):
        return "NoMatch"


class _Undetermined:
    def __repr__(self):
        return "Undetermined"


NoMatch = _NoMatch()
Undetermined = _Undetermined()
MatchResult = Union[Matched, _NoMatch, _Undetermined]


@dataclass(frozen=True)
class Det:
    value: Value


@dataclass(frozen=True)
class Unknown:
    reason: str = "fuel exhausted"


EvalOutcome = Union[Det, Unknown]


class UnboundVariable(KeyError):
    pass


class _OutOfFuel(Exception):
    pass


def pat_inverse(patterns: list[Pattern] | tuple, values: list[Value] | tuple) -> MatchResult:
    """Pattern dispatch in the model.

    Works through the patterns left to right; the first constructor
    pattern decides: bottom there gives ``Undetermined``, a different
    constructor or a function value gives ``NoMatch``.  Function values are
    assumed already known to be non-bottom.
    """
    if len(patterns) != len(values):
        raise ValueError("pattern and value vectors differ in length")
    env: dict[str, Value] = {}
    stack = list(zip(patterns, values))
    stack.reverse()
    while stack:
        p, v = stack.pop()
        if isinstance(p, PVar):
            env[p.name] = v
            continue
        if v is Bot:
            return Undetermined
        if isinstance(v, ConstrV):
            if v.name != p.name or len(v.args) != len(p.args):
                return NoMatch
            stack.extend(reversed(list(zip(p.args, v.args))))
            continue
        return NoMatch
    return Matched(env)


@dataclass
class Evaluator:
    """One evaluation session: a fuel counter, probe memo and diagnostics."""

    system: RuleSource
    fuel: int = 100_000
    diagnostics: list[str] = field(default_factory=list)
    _probes: dict = field(default_factory=dict, repr=False)
    used: int = 0

    def tick(self):
        if self.used >= self.fuel:
            raise _OutOfFuel
        self.used += 1

    # -- evaluation -------------------------------------------------------

    def eval(self, term: Term, env: Mapping[str, Value], level: int) -> Value:
        self.tick()
        match term:
            case Var(name):
                try:
                    return env[name]
                except KeyError:
                    raise UnboundVariable(name) from None
            case Const(name):
                return self.constant(name, level)
            case Abs(x, body):
                return FunV(x, body, env, level)
            case App(f, a):
                fv = self.eval(f, env, level)
                if fv is Bot:
                    return Bot
                av = self.eval(a, env, level)
                return self.apply(fv, av)
            case Constr(name, args):
                vals = []
                for a in args:
                    v = self.eval(a, env, level)
                    if self.status(v) is BotStatus.BOT_CERTIFIED:
                        return Bot
                    vals.append(v)
                return ConstrV(name, tuple(vals))
        raise TypeError(f"not a term: {term!r}")

    def constant(self, name: str, level: int) -> Value:
        rules = self.system.rules_for(name)
        if level <= 0 or not rules:
            return Bot
        v = ConstFunV(name, level)
        if len(rules[0].patterns) == 0:
            return self.dispatch(v)
        return v

    def apply(self, f: Value, a: Value) -> Value:
        self.tick()
        if f is Bot:
            return Bot
        if self.status(a) is BotStatus.BOT_CERTIFIED:
            return Bot
        if f is DummyV:
            return DummyV
        if isinstance(f, FunV):
            env = dict(f.env)
            env[f.var] = a
            return self.eval(f.body, env, f.level)
        if isinstance(f, ConstFunV):
            g = ConstFunV(f.name, f.level, f.args + (a,))
            if len(g.args) == len(self.system.rules_for(f.name)[0].patterns):
                return self.dispatch(g)
            return g
        self.diagnostics.append(f"applied constructor value {f.name} as a function; taken as bottom")
        return Bot

    def dispatch(self, f: ConstFunV) -> Value:
        undetermined = False
        for rule in self.system.rules_for(f.name):
            m = pat_inverse(rule.patterns, f.args)
            if isinstance(m, Matched):
                return self.eval(rule.rhs, m.env, f.level - 1)
            if m is Undetermined:
                undetermined = True
        return Bot if undetermined else DummyV

    # -- bottom detection -------------------------------------------------

    def status(self, v: Value) -> BotStatus:
        """Raises ``_OutOfFuel`` instead of answering Unresolved."""
        if v is Bot:
            return BotStatus.BOT_CERTIFIED
        if not isinstance(v, FunV):
            return BotStatus.NON_BOT
        hit = self._probes.get(id(v))
        if hit is not None:
            return hit[1]
        env = dict(v.env)
        env[v.var] = DummyV
        r = self.eval(v.body, env, v.level)
        st = self.status(r)
        self._probes[id(v)] = (v, st)
        return st

    def probe(self, v: Value) -> BotStatus:
        try:
            return self.status(v)
        except (_OutOfFuel, RecursionError):
            return BotStatus.UNRESOLVED

    def run(self, thunk) -> EvalOutcome:
        try:
            v = thunk()
            if isinstance(v, FunV) and self.status(v) is BotStatus.BOT_CERTIFIED:
                v = Bot
            return Det(v)
        except _OutOfFuel:
            return Unknown("fuel exhausted")
        except RecursionError:
            return Unknown("recursion depth exceeded")


def _ensure_stack():
    if sys.getrecursionlimit() < 20_000:
        sys.setrecursionlimit(20_000)


def eval_term(system: RuleSource, term: Term, env: Mapping[str, Value] | None = None,
              level: int = 10, fuel: int = 100_000) -> EvalOutcome:
    """Strict evaluation with constants interpreted at ``level``.

    A function-valued result is probed once more, so ``Det`` of a function
    value also asserts non-bottom.
    """
    _ensure_stack()
    ev = Evaluator(system, fuel)
    return ev.run(lambda: ev.eval(term, env or {}, level))


def is_bot_probe(system: RuleSource, v: Value, fuel: int = 100_000) -> BotStatus:
    """Bottom status of a value; a function value is judged by applying it to dummy."""
    _ensure_stack()
    return Evaluator(system, fuel).probe(v)


def apply_value(system: RuleSource, f: Value, a: Value, fuel: int = 100_000) -> EvalOutcome:
    """Strict semantic application.  Function values carry their own level."""
    _ensure_stack()
    ev = Evaluator(system, fuel)
    return ev.run(lambda: ev.apply(f, a))


# ---------------------------------------------------------------------------
# Observations


@dataclass(frozen=True)
class Obs:
    kind: str  # "con", "bot", "fun", "dummy", "cut"
    name: str | None = None
    args: tuple["Obs", ...] = ()

    def to_json(self):
        if self.kind == "con":
            return {"con": self.name, "args": [a.to_json() for a in self.args]}
        return self.kind

    @staticmethod
    def from_json(data) -> "Obs":
        if isinstance(data, str):
            if data not in ("bot", "fun", "dummy", "cut"):
                raise ValueError(f"bad observation leaf {data!r}")
            return Obs(data)
        return Obs("con", data["con"], tuple(Obs.from_json(a) for a in data.get("args", [])))

    def __str__(self):
        if self.kind == "con":
            if not self.args:
                return self.name
            return f"{self.name}(" + ", ".join(str(a) for a in self.args) + ")"
        return self.kind


BOT_OBS = Obs("bot")


def observe(v: Value, depth: int) -> Obs:
    if v is Bot:
        return BOT_OBS
    if v is DummyV:
        return Obs("dummy")
    if isinstance(v, (FunV, ConstFunV)):
        return Obs("fun")
    if isinstance(v, ConstrV):
        if v.args and depth <= 0:
            return Obs("cut")
        return Obs("con", v.name, tuple(observe(a, depth - 1) for a in v.args))
    raise TypeError(f"not a value: {v!r}")


def obs_leq(a: Obs, b: Obs) -> bool:
    if a.kind in ("bot", "cut"):
        return True
    if a.kind != b.kind:
        return False
    if a.kind != "con":
        return True
    return a.name == b.name and len(a.args) == len(b.args) and all(obs_leq(x, y) for x, y in zip(a.args, b.args))


def outcome_obs(out: EvalOutcome, depth: int) -> Obs | None:
    return observe(out.value, depth) if isinstance(out, Det) else None
