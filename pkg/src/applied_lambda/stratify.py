"""Stratified approximations: leveled constants c#n and the system they induce.

``StratSystem(R)`` behaves like an ordinary rewrite system over the
infinite constant set {c#n}: ``c#(n+1) P -> R^(n)`` for every rule
``c P -> R`` of R, and no rules at all for ``c#0``.  Rules are produced on
demand.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .rewrite import RewriteSystem, Rule, RuleSource, root_redexes, redexes
from .syntax import (
    Const,
    Signature,
    Term,
    alpha_eq,
    apply_const_subst,
    constants_of,
    leveled,
    print_term,
    replace_at,
    spine,
    split_level,
    subterm_at,
)


class SimulationError(RuntimeError):
    pass


def stratified_constants(system: RuleSource, constants=None) -> set[str]:
    """Least set S such that c is in S when every rule for c has a right-hand side over S."""
    names = sorted(constants if constants is not None else system.sig.constants)
    deps = {c: set().union(*(constants_of(r.rhs) for r in system.rules_for(c))) for c in names}
    s: set[str] = set()
    changed = True
    while changed:
        changed = False
        for c in names:
            if c not in s and deps[c] <= s:
                s.add(c)
                changed = True
    return s


def strat_term(term: Term, n: int) -> Term:
    """M^(n): every constant c replaced by c#n."""
    if n < 0:
        raise ValueError("level must be >= 0")

    def lift(c: str) -> str:
        if split_level(c)[1] is not None:
            raise ValueError(f"term already contains leveled constant {c}")
        return leveled(c, n)

    return apply_const_subst(term, func=lift)


def erase(term: Term) -> Term:
    """Drop all levels: c#n -> c."""
    return apply_const_subst(term, func=lambda c: split_level(c)[0])


def approx(a: Term, m: Term) -> bool:
    """A ⪯ M: erasing the levels of A gives M (up to alpha)."""
    return alpha_eq(erase(a), m)


@dataclass
class StratSystem(RuleSource):
    source: RewriteSystem
    _memo: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    @property
    def sig(self) -> Signature:
        return self.source.sig

    @property
    def name(self) -> str:
        return f"{self.source.name}ω"

    def rules_for(self, name: str) -> list[Rule]:
        try:
            return self._memo[name]
        except KeyError:
            pass
        base, lvl = split_level(name)
        if lvl is None or lvl == 0:
            rules = []
        else:
            rules = [Rule(name, r.patterns, strat_term(r.rhs, lvl - 1)) for r in self.source.rules_for(base)]
        with self._lock:
            return self._memo.setdefault(name, rules)

    def leveled_constants(self, max_level: int) -> list[str]:
        return [leveled(c, n) for c in sorted(self.source.sig.constants) for n in range(max_level + 1)]

    def materialize(self, max_level: int) -> dict[str, list[Rule]]:
        """The finite fragment of rules for constants c#0 .. c#max_level."""
        return {c: self.rules_for(c) for c in self.leveled_constants(max_level)}


def omega_rules_for(strat: StratSystem, c: str) -> list[Rule]:
    return strat.rules_for(c)


def simulate_step(strat: StratSystem, a: Term, step: tuple[Term, tuple[int, ...], Term]) -> Term:
    """Replay the step M -> N (at ``pos``) on A ⪯ M, yielding B with A -> B and B ⪯ N."""
    m, pos, n = step
    if not approx(a, m):
        raise SimulationError("precondition A ⪯ M fails")
    try:
        subterm_at(m, pos)
        sub_a = subterm_at(a, pos)
    except (IndexError, TypeError):
        raise SimulationError(f"no subterm at position {pos}") from None
    source = strat.source
    if not any(alpha_eq(r, n) for p, r in redexes(source, m) if p == pos):
        raise SimulationError(f"{print_term(m)} does not reduce to {print_term(n)} at {pos}")
    contracta = root_redexes(strat, sub_a)
    if not contracta:
        head, _ = spine(sub_a)
        if isinstance(head, Const) and split_level(head.name)[1] == 0:
            raise SimulationError(f"level-0 constant {head.name} blocks the redex at {pos}")
        raise SimulationError(f"no corresponding redex at {pos} in {print_term(a)}")
    for c in contracta:
        b = replace_at(a, pos, c)
        if approx(b, n):
            return b
    raise SimulationError("simulated contractum does not erase to the target")
