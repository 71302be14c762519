import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from applied_lambda.library import bundle
from applied_lambda.rewrite import (
    CertifiedSN,
    Exhausted,
    NormalForm,
    NotSN,
    Rule,
    Timeout,
    ValidationError,
    check_cycle,
    check_system,
    format_rwl,
    is_normal,
    match_rule,
    normalize,
    parse_rwl,
    redexes,
    sn_search,
    unifiable_patterns,
    validate_system,
)
from applied_lambda.syntax import PConstr, PVar, Signature, numeral, parse_term, print_term
from strategies import linear_patterns

CORE = bundle("CORE").system
REC = bundle("REC").system


def P(s, system=CORE):
    return parse_term(s, system.sig)


def test_core_validates():
    assert len(CORE.rules) == 11
    assert check_system(CORE.sig, CORE.rules) == []


def test_overlap_is_reported_with_unifier():
    sys_text = "const c/1;\nc 0 -> 0;\nc x -> 0;\n"
    with pytest.raises(ValidationError) as e:
        parse_rwl(sys_text)
    (v,) = e.value.violations
    assert "unifiable" in v.reason
    assert "x:=0" in v.detail


@pytest.mark.parametrize(
    "rules, reason",
    [
        ("c x x -> 0;", "non-linear"),
        ("c x y -> z;", "FV(rhs)"),
        ("c x -> 0;", "arity"),
    ],
)
def test_invalid_rules(rules, reason):
    with pytest.raises(ValidationError) as e:
        parse_rwl("const c/2;\n" + rules)
    assert any(reason in str(v) for v in e.value.violations)


@given(linear_patterns(n=2), linear_patterns(n=2))
@settings(max_examples=200)
def test_unifier_really_unifies(ps, qs):
    qs = tuple(_rename(q) for q in qs)
    s = unifiable_patterns(ps, qs)
    if s is not None:
        from applied_lambda.rewrite import _zonk

        assert [_zonk(p, s) for p in ps] == [_zonk(q, s) for q in qs]


def _rename(p):
    if isinstance(p, PVar):
        return PVar(p.name + "_r")
    return PConstr(p.name, tuple(_rename(a) for a in p.args))


def test_undeclared_head_is_a_parse_error():
    from applied_lambda.syntax import SyntaxErrorWithPos

    with pytest.raises(SyntaxErrorWithPos):
        parse_rwl("const c/2;\nd x y -> 0;")


def test_match_rule():
    r = CORE.rules_for("get")[1]
    assert match_rule(r, [P("[0, 1]"), P("1")]) is not None
    assert match_rule(r, [P("[0, 1]"), P("0")]) is None


def test_normalize_examples():
    assert normalize(CORE, P("lh [0]")) == NormalForm(numeral(1), 2, [])
    assert normalize(CORE, P("[0] ++ [1]")).term == P("[0, 1]")
    assert normalize(CORE, P("get [0, 1, 2] 2")).term == numeral(2)
    assert normalize(CORE, P("2 < 3")).term == P("T")
    res = normalize(CORE, P("lh [0]"), keep_trace=True)
    assert res.trace[0] == P("lh [0]") and res.trace[-1] == numeral(1)


def test_strategies_agree_on_normal_forms():
    t = P("if (1 < lh [0, 0]) (get [2] 0) 0")
    lo = normalize(CORE, t, "leftmost-outermost")
    li = normalize(CORE, t, "leftmost-innermost")
    assert lo.term == li.term == numeral(2)


def test_timeout_on_omega():
    res = normalize(CORE, P(r"(\x. x x) (\x. x x)"), step_budget=50)
    assert isinstance(res, Timeout) and res.steps == 50


def test_redexes_are_preorder():
    t = P(r"(\x. x) (lh nil)")
    positions = [p for p, _ in redexes(CORE, t)]
    assert positions == [(), (1,)]
    assert is_normal(CORE, numeral(3))


def test_sn_search_verdicts():
    rep = sn_search(CORE, P(r"(\x. x x) (\x. x x)"), 100)
    assert isinstance(rep, NotSN) and len(rep.cycle) == 2
    assert check_cycle(CORE, rep.cycle)
    rep = sn_search(CORE, P("if T 0 (S 0)"))
    assert rep == CertifiedSN(1 + 1, 1, 1) or (isinstance(rep, CertifiedSN) and rep.longest == 1)
    assert isinstance(sn_search(CORE, P(r"(\x. y) ((\x. x x) (\x. x x))")), NotSN)


def test_sn_search_exhausts():
    # (\x. x x x) applied to itself grows without cycling
    rep = sn_search(CORE, P(r"(\x. x x x) (\x. x x x)"), 20)
    assert isinstance(rep, Exhausted) and rep.states == 20


def test_longest_reduction_matches_brute_force():
    # oracle: maximal reduction length by explicit recursion over named reducts
    t = P("if (0 < 1) (lh [0]) ((\\x. x) 2)")

    def longest(u):
        return max((1 + longest(r) for _, r in redexes(CORE, u)), default=0)

    assert sn_search(CORE, t).longest == longest(t)


def test_rwl_round_trip():
    again = parse_rwl(format_rwl(REC), name="REC")
    assert [str(r) for r in again.rules] == [str(r) for r in REC.rules]
    assert again.sig.constants == REC.sig.constants


def test_operator_declarations_parse():
    s = parse_rwl("const </2;\nn < 0 -> F;\n0 < S(m) -> T;\nS(n) < S(m) -> n < m;\n")
    assert normalize(s, parse_term("2 < 3", s.sig)).term == parse_term("T")


def test_validate_system_direct():
    sig = Signature({}, {"c": 1})
    ok = validate_system(sig, [Rule("c", (PConstr("0"),), numeral(0))])
    assert ok.rules_for("c")
    assert print_term(ok.rules[0].lhs) == "c 0"
