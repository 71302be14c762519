import json
import shutil

import pytest

from applied_lambda import library
from applied_lambda.library import (
    BUNDLES,
    SampleSpec,
    add_term,
    builtin_systems,
    bundle,
    load_bundle,
    mbr_demo,
    probe_totality,
    write_generated_assets,
)
from applied_lambda.rewrite import CertifiedSN, check_system, normalize, sn_search
from applied_lambda.syntax import numeral, print_term
from applied_lambda.typesystem import check_derivation, check_rule_type_sound, print_type


def test_all_bundles_present():
    assert [b.name for b in builtin_systems()] == list(BUNDLES)


@pytest.mark.parametrize("name", BUNDLES)
def test_bundle_is_consistent(name):
    b = bundle(name)
    assert check_system(b.system.sig, b.system.rules) == []
    assert set(b.delta.names()) == set(b.system.sig.constants)
    assert set(b.attestation) == set(b.system.sig.constants)
    assert sorted(e.rule_index for e in b.evidence) == list(range(len(b.system.rules)))
    for ev in b.evidence:
        v = check_rule_type_sound(b.delta, b.system.rules[ev.rule_index], ev.type, ev.lhs, ev.rhs)
        assert v.ok, (name, ev.rule_index, v.violations)
    assert check_derivation(b.demo_derivation, b.delta).ok
    assert normalize(b.system, b.demo_term).term == b.demo_normal_form


@pytest.mark.parametrize("name", BUNDLES)
def test_shipped_assets_match_regeneration(tmp_path, name):
    for ext in ("rwl", "types"):
        shutil.copy(library.PACKAGE_ASSETS / f"{name}.{ext}", tmp_path)
    write_generated_assets(tmp_path, names=[name])
    for ext in ("evidence.json", "attest.json", "demo.json"):
        fresh = json.loads((tmp_path / f"{name}.{ext}").read_text())
        shipped = json.loads((library.PACKAGE_ASSETS / f"{name}.{ext}").read_text())
        assert fresh == shipped


def test_mbr_typing_of_phi():
    b = bundle("MBR")
    assert print_type(b.delta["Phi"]) == (
        "forall p. ((nat -> p) -> nat) -> (nat -> (p -> nat) -> p) -> list p -> nat")


def test_mbr_demo():
    term, nf = mbr_demo()
    assert print_term(term) == r"Phi (\a. a 2) (\k. \h. k) nil"
    assert nf == numeral(2)
    res = normalize(bundle("MBR").system, term)
    assert res.term == numeral(2)


@pytest.mark.parametrize("name", ["REC", "BBC", "OPEN", "CORE"])
def test_small_demos_are_sn(name):
    b = bundle(name)
    assert isinstance(sn_search(b.system, b.demo_term), CertifiedSN)


def test_addition_normalizes():
    assert normalize(bundle("REC").system, add_term(3, 4)).term == numeral(7)


def test_take_builds_initial_segments():
    b = bundle("OPEN")
    t = b.parse(r"take 3 (\k. S(k))")
    assert print_term(normalize(b.system, t).term) == "[1, 2, 3]"


def test_bbc_lookup():
    b = bundle("BBC")
    t = b.parse("lookup 1 [pr(0, 5), pr(1, 7)]")
    assert normalize(b.system, t).term == numeral(7)


def test_probe_less_than():
    b = bundle("CORE")
    r = probe_totality(b.system, b.delta, "<", SampleSpec(max_nat=5))
    assert len(r.samples) == 36 and r.clean
    for s in r.samples:
        m, n = (int(a) for a in s.args)
        assert s.observation == ("T" if m < n else "F")


def test_probe_length():
    b = bundle("CORE")
    r = probe_totality(b.system, b.delta, "lh", SampleSpec(max_nat=1, max_len=4))
    assert r.clean
    for s in r.samples:
        length = 0 if s.args[0] == "nil" else s.args[0].count(",") + 1
        obs = s.observation
        assert obs.count("S(") == length


def test_probe_phi():
    b = bundle("MBR")
    r = probe_totality(b.system, b.delta, "Phi", SampleSpec(max_nat=2, max_len=1, max_samples=40))
    assert r.samples and r.clean
    assert json.loads(json.dumps(r.to_json()))["clean"]


def test_probe_reports_bottom_for_unattested_loop():
    b = library.with_omega(bundle("CORE"))
    r = probe_totality(b.system, b.delta, "omega", SampleSpec(max_nat=1), level=6, fuel=20_000)
    assert not r.clean


def test_assets_env_override(tmp_path, monkeypatch):
    for f in library.PACKAGE_ASSETS.iterdir():
        shutil.copy(f, tmp_path)
    monkeypatch.setenv("APPLIED_LAMBDA_ASSETS", str(tmp_path))
    assert library.assets_dir() == tmp_path
    assert load_bundle("CORE").system.name == "CORE"


def test_mbr_demo_needs_eleven_levels_under_strict_application():
    # the argument \x. Phi y g (s ++ [x]) of g must itself be non-bottom
    from applied_lambda.semantics import Bot, Det, eval_term, observe

    b = bundle("MBR")
    assert eval_term(b.system, b.demo_term, level=10, fuel=1_000_000) == Det(Bot)
    out = eval_term(b.system, b.demo_term, level=11, fuel=1_000_000)
    assert str(observe(out.value, 4)) == "S(S(0))"
