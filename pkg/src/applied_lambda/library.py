"""Bundled systems with their typings, rule evidence, totality attestations and demos.

Assets live in a versioned directory (``assets/v1`` in the package,
overridable with ``APPLIED_LAMBDA_ASSETS``).  Each bundle NAME ships

* ``NAME.rwl``            the rewrite system
* ``NAME.types``          closed types of its constants
* ``NAME.evidence.json``  type-soundness derivations, one entry per rule
* ``NAME.attest.json``    totality attestations
* ``NAME.demo.json``      demo term, expected normal form and a typing derivation

Everything except the .rwl and .types sources is regenerated by
``python -m applied_lambda.library``.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from .rewrite import RewriteSystem, Rule, load_rwl
from .semantics import Bot, Det, eval_term, observe
from .syntax import (
    Abs,
    App,
    Const,
    Constr,
    PVar,
    Signature,
    Term,
    Var,
    apply_spine,
    list_term,
    numeral,
    parse_term,
    print_term,
)
from .synth import synthesize
from .typesystem import (
    Arrow,
    Attest,
    Boole,
    ConstTyping,
    Derivation,
    Forall,
    ListT,
    Nat,
    Prod,
    RuleEvidence,
    TotalityAttestation,
    TVar,
    Type,
    abstract_rule,
    load_evidence,
    parse_types_file,
    print_type,
    type_subst,
)

BUNDLES = ("CORE", "REC", "MBR", "BBC", "OPEN")
PACKAGE_ASSETS = Path(__file__).parent / "assets" / "v1"


def assets_dir() -> Path:
    env = os.environ.get("APPLIED_LAMBDA_ASSETS")
    return Path(env) if env else PACKAGE_ASSETS


_ATTEST = {
    "CORE": {c: Attest("PrimitiveRecursive") for c in ("if", "<", "lh", "get", "++")},
    "REC": {c: Attest("PrimitiveRecursive") for c in ("if", "<", "lh", "get", "++", "natrec", "listrec")},
    "MBR": {
        **{c: Attest("PrimitiveRecursive") for c in ("if", "<", "lh", "get", "++", "natrec", "listrec")},
        "Phi": Attest("ModifiedBarRecursion"),
        "Psi": Attest("ModifiedBarRecursion"),
    },
    "BBC": {
        **{c: Attest("PrimitiveRecursive") for c in ("if", "<", "lh", "get", "++", "eqn", "member", "lookup")},
        "Phi": Attest("UserAttested", "demand-driven bar recursion over finite graphs; totality argued by bar induction, not mechanised"),
        "Psi": Attest("UserAttested", "demand-driven bar recursion over finite graphs; totality argued by bar induction, not mechanised"),
    },
    "OPEN": {
        **{c: Attest("PrimitiveRecursive") for c in ("if", "<", "lh", "get", "++", "prec", "take", "at")},
        "Phi": Attest("UserAttested", "open recursion along prec = <; typing and totality supplied by the library author"),
        "Psi": Attest("UserAttested", "open recursion along prec = <; typing and totality supplied by the library author"),
    },
}

# name -> (term text, expected normal form text)
_DEMOS = {
    "CORE": ("get ([0, 1] ++ [2]) (lh [0, 0])", "2"),
    "REC": (r"(\m n. natrec m (\k r. S(r)) n) 3 4", "7"),
    "MBR": (r"Phi (\a. a 2) (\k. \h. k) nil", "2"),
    "BBC": (r"Phi (\a. a 3) (\k. \h. h k) nil", "3"),
    "OPEN": (r"Phi (\a. \h. h 0 0 (\k. k)) (\k. 1)", "0"),
}

ADD = r"\m n. natrec m (\k r. S(r)) n"


@dataclass
class BundledSystem:
    name: str
    system: RewriteSystem
    delta: ConstTyping
    evidence: list[RuleEvidence]
    attestation: TotalityAttestation
    demo_term: Term | None = None
    demo_normal_form: Term | None = None
    demo_derivation: Derivation | None = None
    notes: list[str] = field(default_factory=list)

    def parse(self, text: str) -> Term:
        return parse_term(text, self.system.sig)


def load_bundle(name: str, directory: Path | str | None = None) -> BundledSystem:
    d = Path(directory) if directory is not None else assets_dir()
    system = load_rwl(d / f"{name}.rwl")
    delta = parse_types_file((d / f"{name}.types").read_text(encoding="utf-8"))
    ev_path = d / f"{name}.evidence.json"
    evidence = load_evidence(ev_path.read_text(encoding="utf-8"), system.sig) if ev_path.exists() else []
    at_path = d / f"{name}.attest.json"
    attestation = (TotalityAttestation.from_json(json.loads(at_path.read_text(encoding="utf-8")))
                   if at_path.exists() else TotalityAttestation())
    b = BundledSystem(name, system, delta, evidence, attestation)
    demo_path = d / f"{name}.demo.json"
    if demo_path.exists():
        data = json.loads(demo_path.read_text(encoding="utf-8"))
        b.demo_term = parse_term(data["term"], system.sig)
        b.demo_normal_form = parse_term(data["normal_form"], system.sig)
        if data.get("derivation"):
            b.demo_derivation = Derivation.from_json(data["derivation"], system.sig)
    return b


@lru_cache(maxsize=None)
def _cached_bundle(name: str, directory: str) -> BundledSystem:
    return load_bundle(name, directory)


def bundle(name: str) -> BundledSystem:
    """Load a bundle by name (cached per assets directory)."""
    name = name.upper()
    if name not in BUNDLES:
        raise KeyError(f"unknown bundle {name!r}; choose from {', '.join(BUNDLES)}")
    return _cached_bundle(name, str(assets_dir()))


def builtin_systems() -> list[BundledSystem]:
    return [bundle(n) for n in BUNDLES]


def mbr_demo() -> tuple[Term, Term]:
    """Phi y g nil with y = λa. a 2 and g = λk. λh. k; normal form 2."""
    b = bundle("MBR")
    return b.demo_term, b.demo_normal_form


def demo(name: str) -> tuple[Term, Term]:
    b = bundle(name)
    return b.demo_term, b.demo_normal_form


def add_term(m: int, n: int, system: RewriteSystem | None = None) -> Term:
    """natrec-defined addition applied to two numerals."""
    sig = (system or bundle("REC").system).sig
    return App(App(parse_term(ADD, sig), numeral(m)), numeral(n))


# ---------------------------------------------------------------------------
# Evidence generation


def rule_evidence(system: RewriteSystem, delta: ConstTyping, index: int) -> RuleEvidence:
    """Derivations for λx⃗.L and λx⃗.R at the most general type of λx⃗.L."""
    rule = system.rules[index]
    lam_l, lam_r = abstract_rule(rule)
    dl = synthesize(delta, lam_l, generalize=False)
    dr = synthesize(delta, lam_r, expected=dl.type, generalize=False)
    return RuleEvidence(index, dl.type, dl, dr)


def generate_evidence(system: RewriteSystem, delta: ConstTyping) -> list[RuleEvidence]:
    return [rule_evidence(system, delta, i) for i in range(len(system.rules))]


def _dump(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


def write_generated_assets(directory: Path | str | None = None, names=BUNDLES) -> list[Path]:
    """Regenerate evidence, attestation and demo files from the .rwl and .types sources."""
    d = Path(directory) if directory is not None else PACKAGE_ASSETS
    written = []
    for name in names:
        system = load_rwl(d / f"{name}.rwl")
        delta = parse_types_file((d / f"{name}.types").read_text(encoding="utf-8"))
        ev = generate_evidence(system, delta)
        p = d / f"{name}.evidence.json"
        _dump(p, {"system": name, "evidence": [e.to_json(system.rules[e.rule_index]) for e in ev]})
        written.append(p)
        p = d / f"{name}.attest.json"
        _dump(p, TotalityAttestation(_ATTEST[name]).to_json())
        written.append(p)
        text, nf = _DEMOS[name]
        term = parse_term(text, system.sig)
        deriv = synthesize(delta, term)
        p = d / f"{name}.demo.json"
        _dump(p, {"term": print_term(term), "normal_form": nf, "derivation": deriv.to_json()})
        written.append(p)
    return written


# ---------------------------------------------------------------------------
# A typeable but non-terminating constant

OMEGA_RULE = "omega x -> omega x"


def with_omega(b: BundledSystem) -> BundledSystem:
    """``b`` plus ``omega : nat -> nat`` with ``omega x -> omega x``; omega is not attested total."""
    sig = Signature({}, {"omega": 1})
    rule = Rule("omega", (PVar("x"),), App(Const("omega"), Var("x")))
    system = b.system.extended(sig, [rule], name=b.name + "+omega")
    delta = ConstTyping({**b.delta.types, "omega": Arrow(Nat(), Nat())})
    evidence = list(b.evidence) + [rule_evidence(system, delta, len(system.rules) - 1)]
    out = BundledSystem(system.name, system, delta, evidence, TotalityAttestation(b.attestation),
                        notes=["omega is typeable but has no totality attestation"])
    # normalises under leftmost-outermost, but the omega 0 branch loops
    out.demo_term = out.parse("if T 0 (omega 0)")
    out.demo_normal_form = numeral(0)
    out.demo_derivation = synthesize(delta, out.demo_term)
    return out


# ---------------------------------------------------------------------------
# Totality probing


@dataclass
class SampleSpec:
    max_nat: int = 3
    max_len: int = 2
    max_samples: int = 200
    functions_per_type: int = 4


@dataclass
class ProbeSample:
    args: list[str]
    outcome: str  # "NonBot" | "Bot" | "Unresolved"
    observation: str | None = None


@dataclass
class TotalityProbeReport:
    constant: str
    type: str
    level: int
    fuel: int
    samples: list[ProbeSample] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        """Every sample reached a non-bottom value.  Evidence, not proof."""
        return all(s.outcome == "NonBot" for s in self.samples)

    def to_json(self) -> dict:
        return {
            "constant": self.constant, "type": self.type, "level": self.level, "fuel": self.fuel,
            "clean": self.clean,
            "samples": [{"args": s.args, "outcome": s.outcome, "observation": s.observation} for s in self.samples],
        }


def _ground(t: Type) -> Type:
    """Strip prenex quantifiers and instantiate their variables with nat."""
    while isinstance(t, Forall):
        t = type_subst(t.body, Nat(), t.var)
    return t


def sample_terms(t: Type, spec: SampleSpec, sig: Signature, depth: int = 0) -> list[Term]:
    """Closed total terms of type ``t`` from a fixed family; a sampling limitation."""
    match t:
        case Nat():
            return [numeral(k) for k in range(spec.max_nat + 1)]
        case Boole():
            return [parse_term("T"), parse_term("F")]
        case ListT(e):
            elems = sample_terms(e, spec, sig, depth)[: spec.max_nat + 1]
            out = []
            for n in range(spec.max_len + 1):
                out.extend(list_term(xs) for xs in itertools.product(elems, repeat=n))
            return out
        case Prod(a, b):
            return [Constr("pr", (x, y)) for x in sample_terms(a, spec, sig, depth)[:3] for y in sample_terms(b, spec, sig, depth)[:3]]
        case Arrow(a, b):
            return _function_family(a, b, spec, sig, depth)
        case TVar():
            return sample_terms(Nat(), spec, sig, depth)
    raise ValueError(f"cannot sample type {t}")


def _function_family(a: Type, b: Type, spec: SampleSpec, sig: Signature, depth: int) -> list[Term]:
    x = "xyzuvw"[depth % 6] + "'" * (depth // 6)
    out: list[Term] = []
    # projections: λx. x, and λx. x c1 .. ck when x's type ends in b
    if a == b:
        out.append(Abs(x, Var(x)))
    args = []
    cur = a
    while isinstance(cur, Arrow):
        args.append(cur.dom)
        cur = cur.cod
        if cur == b and args:
            for picks in itertools.product(*(sample_terms(d, spec, sig, depth + 1)[:2] for d in args)):
                out.append(Abs(x, apply_spine(Var(x), picks)))
    # constant functions
    out.extend(Abs(x, v) for v in sample_terms(b, spec, sig, depth + 1)[:2])
    seen, uniq = set(), []
    for f in out:
        k = print_term(f)
        if k not in seen:
            seen.add(k)
            uniq.append(f)
    return uniq[: spec.functions_per_type]


def probe_totality(system: RewriteSystem, delta: ConstTyping, constant: str, spec: SampleSpec | None = None,
                   level: int = 12, fuel: int = 200_000) -> TotalityProbeReport:
    """Apply ``constant`` to sampled total arguments and record whether a non-bottom value appears."""
    spec = spec or SampleSpec()
    ty = _ground(delta[constant])
    doms = []
    while isinstance(ty, Arrow):
        doms.append(ty.dom)
        ty = ty.cod
    pools = [sample_terms(d, spec, system.sig) for d in doms]

    report = TotalityProbeReport(constant, print_type(delta[constant]), level, fuel)
    for args in itertools.islice(itertools.product(*pools), spec.max_samples):
        term = apply_spine(Const(constant), args)
        out = eval_term(system, term, level=level, fuel=fuel)
        shown = [print_term(a) for a in args]
        if isinstance(out, Det):
            if out.value is Bot:
                report.samples.append(ProbeSample(shown, "Bot", "bot"))
            else:
                report.samples.append(ProbeSample(shown, "NonBot", str(observe(out.value, 6))))
        else:
            report.samples.append(ProbeSample(shown, "Unresolved"))
    return report


def main() -> None:
    for p in write_generated_assets():
        print(p)


if __name__ == "__main__":
    main()
