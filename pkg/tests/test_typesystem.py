import json
import random

import pytest
from hypothesis import given

from applied_lambda.library import bundle, rule_evidence, with_omega
from applied_lambda.synth import SynthesisError, synthesize
from applied_lambda.syntax import Abs, Constr, Var, parse_term
from applied_lambda.typesystem import (
    BOOLE,
    NAT,
    Arrow,
    Attest,
    Certificate,
    ConstTyping,
    Derivation,
    Forall,
    ListT,
    Refusal,
    TotalityAttestation,
    TVar,
    check_derivation,
    check_rule_type_sound,
    free_tvars,
    is_closed,
    lift_typing_to_omega,
    parse_type,
    parse_types_file,
    pipeline_sn,
    print_type,
    rename_constants,
    type_eq,
    type_subst,
)
from strategies import types

p, q = TVar("p"), TVar("q")
EMPTY = ConstTyping()


@given(types)
def test_type_print_parse_round_trip(t):
    assert parse_type(print_type(t)) == t


def test_type_substitution_examples():
    assert type_subst(Arrow(p, p), NAT, "p") == Arrow(NAT, NAT)
    assert type_subst(Forall("p", Arrow(p, q)), NAT, "q") == Forall("p", Arrow(p, NAT))
    assert type_subst(Forall("p", p), NAT, "p") == Forall("p", p)
    # capture: (forall p. p -> q)[p/q] renames the binder
    out = type_subst(Forall("p", Arrow(p, q)), p, "q")
    assert type_eq(out, parse_type("forall r. r -> p"))


@given(types, types)
def test_substitution_removes_the_variable(t, s):
    out = type_subst(t, s, "p")
    if "p" not in free_tvars(s):
        assert "p" not in free_tvars(out)


def test_closedness_and_alpha():
    assert is_closed(parse_type("forall p. p -> p"))
    assert not is_closed(parse_type("p -> nat"))
    assert type_eq(parse_type("forall p. p -> p"), parse_type("forall q. q -> q"))
    assert not type_eq(parse_type("forall p. p -> q"), parse_type("forall q. q -> q"))


def test_arrow_is_right_associative():
    assert parse_type("nat -> nat -> boole") == Arrow(NAT, Arrow(NAT, BOOLE))
    assert print_type(parse_type("(nat -> nat) -> list nat")) == "(nat -> nat) -> list nat"


def test_types_file_and_closedness_requirement():
    d = parse_types_file("-- comment\nid : forall p. p -> p;\nz : nat;")
    assert d["z"] == NAT
    with pytest.raises(ValueError):
        ConstTyping({"bad": TVar("p")})


def identity_derivation():
    x = Var("x")
    lam = Abs("x", x)
    var = Derivation("Var", {"x": p}, x, p)
    abs_ = Derivation("Abs", {}, lam, Arrow(p, p), (var,))
    return Derivation("Gen", {}, lam, Forall("p", Arrow(p, p)), (abs_,), tvar="p")


def test_identity_is_polymorphic():
    res = check_derivation(identity_derivation(), EMPTY)
    assert res.ok
    assert print_type(res.judgement.type) == "forall p. p -> p"


def test_open_root_needs_flag():
    d = identity_derivation().children[0]
    assert not check_derivation(d, EMPTY).ok
    assert check_derivation(d, EMPTY, closed_root=False).ok


def test_gen_side_condition():
    x = Var("x")
    var = Derivation("Var", {"x": p}, x, p)
    bad = Derivation("Gen", {"x": p}, x, Forall("p", p), (var,), tvar="p")
    res = check_derivation(bad, EMPTY, closed_root=False)
    assert not res.ok
    assert any("free in the context" in str(v) for v in res.violations)


def test_cons_zero_nil():
    t = parse_term("cons(0, nil)")
    d = Derivation("ConsI", {}, t, ListT(NAT), (
        Derivation("ZeroI", {}, Constr("0"), NAT),
        Derivation("NilI", {}, Constr("nil"), ListT(NAT)),
    ))
    assert check_derivation(d, EMPTY).ok
    wrong = Derivation("ConsI", {}, t, ListT(BOOLE), d.children)
    assert not check_derivation(wrong, EMPTY).ok


def test_inst_rule():
    d = identity_derivation()
    inst = Derivation("Inst", {}, d.term, Arrow(NAT, NAT), (d,), inst=NAT)
    assert check_derivation(inst, EMPTY).ok
    bad = Derivation("Inst", {}, d.term, Arrow(NAT, BOOLE), (d,), inst=NAT)
    assert not check_derivation(bad, EMPTY).ok


def test_wrong_premise_shapes_are_reported():
    t = parse_term("S(0)")
    d = Derivation("SuccI", {}, t, NAT, ())
    (v,) = check_derivation(d, EMPTY).violations
    assert "premise" in v.message
    d = Derivation("App", {}, t, NAT, ())
    assert not check_derivation(d, EMPTY).ok
    d = Derivation("Magic", {}, t, NAT, ())
    assert not check_derivation(d, EMPTY).ok


def test_derivation_json_round_trip():
    d = identity_derivation()
    data = json.loads(json.dumps(d.to_json()))
    assert Derivation.from_json(data, bundle("CORE").system.sig) == d


def test_synthesis_refuses_self_application():
    with pytest.raises(SynthesisError):
        synthesize(EMPTY, parse_term(r"\x. x x"))


def test_rule_soundness_examples():
    b = bundle("CORE")
    rules = b.system.rules
    (if_t,) = [i for i, r in enumerate(rules) if str(r) == "if T x y -> x"]
    ev = rule_evidence(b.system, b.delta, if_t)
    assert print_type(ev.type) == "p -> p -> p"
    assert check_rule_type_sound(b.delta, rules[if_t], ev.type, ev.lhs, ev.rhs).ok
    (lh_nil,) = [i for i, r in enumerate(rules) if str(r) == "lh nil -> 0"]
    ev = rule_evidence(b.system, b.delta, lh_nil)
    assert ev.type == NAT
    # the rhs derivation for "if F x y -> y" does not prove the lhs type of "if T x y -> x" at a wrong type
    wrong = check_rule_type_sound(b.delta, rules[if_t], BOOLE, ev.lhs, ev.rhs)
    assert not wrong.ok


def test_deliberately_ill_typed_rule_has_no_evidence():
    from applied_lambda.rewrite import parse_rwl

    s = parse_rwl("const c/1;\nc x -> T;\n")
    delta = ConstTyping({"c": parse_type("nat -> nat")})
    with pytest.raises(SynthesisError):
        rule_evidence(s, delta, 0)


def test_evidence_lifts_to_stratified_system():
    from applied_lambda.stratify import StratSystem
    from applied_lambda.typesystem import RuleEvidence

    b = bundle("REC")
    strat = StratSystem(b.system)
    lifted = lift_typing_to_omega(b.delta)
    for level in (1, 3):
        for ev in b.evidence:
            rule = b.system.rules[ev.rule_index]
            theta_l = {c: f"{c}#{level}" for c in b.system.sig.constants}
            theta_r = {c: f"{c}#{level - 1}" for c in b.system.sig.constants}
            lrule = [r for r in strat.rules_for(f"{rule.head}#{level}") if r.patterns == rule.patterns][0]
            v = check_rule_type_sound(lifted, lrule, ev.type, rename_constants(ev.lhs, theta_l),
                                      rename_constants(ev.rhs, theta_r))
            assert v.ok, v.violations


def test_stable_under_type_respecting_renaming():
    b = bundle("MBR")
    rng = random.Random(7)
    names = list(b.delta.types)
    # rename constants with equal types onto fresh names
    for _ in range(5):
        theta = {c: f"{c}_{rng.randint(0, 99)}" for c in names}
        delta2 = ConstTyping({theta[c]: t for c, t in b.delta.types.items()})
        d2 = rename_constants(b.demo_derivation, theta)
        assert check_derivation(d2, delta2).ok


def test_pipeline_certificate_and_refusals():
    b = bundle("MBR")
    cert = pipeline_sn(b.system, b.delta, b.evidence, b.attestation, b.demo_term, b.demo_derivation)
    assert isinstance(cert, Certificate)
    assert len(cert.premises) == 3

    missing = TotalityAttestation({c: a for c, a in b.attestation.items() if c != "Psi"})
    r = pipeline_sn(b.system, b.delta, b.evidence, missing, b.demo_term, b.demo_derivation)
    assert isinstance(r, Refusal) and r.premise == "totality"

    r = pipeline_sn(b.system, b.delta, b.evidence[1:], b.attestation, b.demo_term, b.demo_derivation)
    assert isinstance(r, Refusal) and r.premise == "type-soundness"

    selfapp = parse_term(r"\x. x x")
    fake = Derivation("Abs", {}, selfapp, Arrow(NAT, NAT), (Derivation("Var", {"x": NAT}, Var("x"), NAT),))
    r = pipeline_sn(b.system, b.delta, b.evidence, b.attestation, selfapp, fake)
    assert isinstance(r, Refusal) and r.premise == "typeability"


def test_pipeline_omega_refusal():
    w = with_omega(bundle("CORE"))
    t = w.parse("if T 0 (omega 0)")
    r = pipeline_sn(w.system, w.delta, w.evidence, w.attestation, t, synthesize(w.delta, t))
    assert isinstance(r, Refusal) and r.premise == "totality"
    assert "omega" in r.reasons[0]
    attested = TotalityAttestation({**w.attestation, "omega": Attest("UserAttested", "wrong on purpose")})
    assert isinstance(pipeline_sn(w.system, w.delta, w.evidence, attested, t, synthesize(w.delta, t)), Certificate)


def test_attestation_json():
    a = TotalityAttestation({"f": Attest("UserAttested", "why"), "g": Attest("PrimitiveRecursive")})
    assert TotalityAttestation.from_json(a.to_json()) == a
    with pytest.raises(ValueError):
        Attest("Magic")
