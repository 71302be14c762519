"""Command-line front end.

Exit codes: 0 positive verdict, 1 negative verdict, 2 inconclusive
(Unknown / Exhausted / step budget hit), 3 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import kernel
from .library import BUNDLES, assets_dir, bundle, with_omega
from .rewrite import (
    STRATEGIES,
    CertifiedSN,
    Exhausted,
    NormalForm,
    NotSN,
    RewriteSystem,
    ValidationError,
    load_rwl,
    normalize,
    sn_search,
    step,
)
from .semantics import Bot, Det, eval_term, observe
from .stratify import StratSystem, strat_term
from .syntax import ArityError, Signature, SyntaxErrorWithPos, Term, parse_term, print_term
from .typesystem import (
    ConstTyping,
    Derivation,
    TotalityAttestation,
    check_derivation,
    load_evidence,
    parse_type,
    parse_types_file,
    pipeline_sn,
    print_type,
)

EXIT_OK, EXIT_NEG, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- input resolution -------------------------------------------------------


def resolve_system(spec: str) -> RewriteSystem:
    """A path to a .rwl file, or a bundle name such as ``CORE`` or ``CORE.rwl``."""
    p = Path(spec)
    if p.is_file():
        return load_rwl(p)
    stem = p.name[:-4] if p.name.lower().endswith(".rwl") else p.name
    if stem.upper() in BUNDLES and (assets_dir() / f"{stem.upper()}.rwl").is_file():
        return load_rwl(assets_dir() / f"{stem.upper()}.rwl")
    raise UsageError(f"no such system file or bundle: {spec}")


def read_text_arg(spec: str) -> str:
    """``@path`` reads the file; anything else is taken literally."""
    if spec.startswith("@"):
        return Path(spec[1:]).read_text(encoding="utf-8")
    return spec


def read_file(spec: str) -> str:
    p = Path(spec)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    alt = assets_dir() / spec
    if alt.is_file():
        return alt.read_text(encoding="utf-8")
    raise UsageError(f"no such file: {spec}")


def parse_cli_term(system: RewriteSystem, text: str, leveled: bool = False) -> Term:
    return parse_term(read_text_arg(text).strip(), system.sig, leveled=leveled)


def emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, ensure_ascii=False, indent=1))
    else:
        for line in lines:
            print(line)


def _sn_json(rep) -> dict:
    match rep:
        case CertifiedSN(states, longest, edges):
            return {"verdict": "CertifiedSN", "states": states, "longest": longest, "edges": edges}
        case NotSN(cycle, states, edges):
            return {"verdict": "NotSN", "states": states, "edges": edges, "cycle": [print_term(t) for t in cycle]}
        case Exhausted(states, edges):
            return {"verdict": "Exhausted", "states": states, "edges": edges}
    raise TypeError(rep)


def _sn_lines(rep) -> list[str]:
    match rep:
        case CertifiedSN(states, longest, edges):
            return [f"CertifiedSN: {states} states, {edges} edges, longest reduction {longest}"]
        case NotSN(cycle, states, _):
            return [f"NotSN: cycle of length {len(cycle) - 1} found after {states} states"] + [
                f"  {print_term(t)}" for t in cycle]
        case Exhausted(states, _):
            return [f"Exhausted: no verdict within {states} states"]
    raise TypeError(rep)


def _sn_code(rep) -> int:
    return {CertifiedSN: EXIT_OK, NotSN: EXIT_NEG, Exhausted: EXIT_UNKNOWN}[type(rep)]


# -- subcommands ------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        system = resolve_system(args.system)
    except ValidationError as e:
        emit(args, {"valid": False, "violations": [str(v) for v in e.violations]},
             ["invalid:"] + [f"  {v}" for v in e.violations])
        return EXIT_NEG
    emit(args, {"valid": True, "name": system.name, "rules": len(system.rules), "constants": system.constants()},
         [f"valid: {system.name} ({len(system.rules)} rules, constants {', '.join(system.constants())})"])
    return EXIT_OK


def cmd_reduce(args) -> int:
    system = resolve_system(args.system)
    term = parse_cli_term(system, args.term)
    trace = [{"term": print_term(term)}]
    lines = [f"   {print_term(term)}"]
    for _ in range(args.steps):
        nxt = step(system, term, args.strategy)
        if nxt is None:
            break
        pos, term = nxt
        trace.append({"position": list(pos), "term": print_term(term)})
        lines.append(f"-> {print_term(term)}    at {list(pos)}")
    normal = step(system, term, args.strategy) is None
    lines.append("normal form" if normal else f"stopped after {len(trace) - 1} steps")
    emit(args, {"trace": trace, "normal": normal, "steps": len(trace) - 1}, lines)
    return EXIT_OK if normal else EXIT_UNKNOWN


def cmd_normalize(args) -> int:
    system = resolve_system(args.system)
    term = parse_cli_term(system, args.term)
    res = normalize(system, term, args.strategy, step_budget=args.steps)
    if isinstance(res, NormalForm):
        emit(args, {"verdict": "NormalForm", "term": print_term(res.term), "steps": res.steps},
             [print_term(res.term), f"({res.steps} steps, {args.strategy})"])
        return EXIT_OK
    emit(args, {"verdict": "Timeout", "last": print_term(res.last), "steps": res.steps},
         [f"Timeout after {res.steps} steps; last term:", print_term(res.last)])
    return EXIT_UNKNOWN


def cmd_sn(args) -> int:
    system = resolve_system(args.system)
    term = parse_cli_term(system, args.term)
    rep = sn_search(system, term, args.max_states)
    emit(args, {**_sn_json(rep), "backend": kernel.BACKEND}, _sn_lines(rep))
    return _sn_code(rep)


def cmd_stratify(args) -> int:
    system = resolve_system(args.system)
    term = parse_cli_term(system, args.term)
    strat = StratSystem(system)
    lifted = strat_term(term, args.level)
    payload = {"level": args.level, "term": print_term(lifted)}
    lines = [print_term(lifted)]
    code = EXIT_OK
    res = normalize(strat, lifted, args.strategy, step_budget=args.steps)
    if isinstance(res, NormalForm):
        payload["normal_form"] = print_term(res.term)
        payload["steps"] = res.steps
        lines.append(f"normal form under the stratified system: {print_term(res.term)} ({res.steps} steps)")
    else:
        payload["normal_form"] = None
        lines.append(f"no normal form within {res.steps} steps")
        code = EXIT_UNKNOWN
    if args.sn:
        rep = sn_search(strat, lifted, args.max_states)
        payload["sn"] = _sn_json(rep)
        lines += _sn_lines(rep)
        code = max(code, _sn_code(rep))
    emit(args, payload, lines)
    return code


def cmd_eval(args) -> int:
    system = resolve_system(args.system)
    term = parse_cli_term(system, args.term)
    out = eval_term(system, term, level=args.level, fuel=args.fuel)
    if isinstance(out, Det):
        obs = observe(out.value, args.depth)
        emit(args, {"outcome": "Det", "observation": obs.to_json(), "shown": str(obs), "level": args.level},
             [f"Det {obs}"])
        return EXIT_NEG if out.value is Bot else EXIT_OK
    emit(args, {"outcome": "Unknown", "reason": out.reason, "level": args.level}, [f"Unknown ({out.reason})"])
    return EXIT_UNKNOWN


def _load_derivation_file(text: str, sig: Signature | None, delta: ConstTyping | None):
    data = json.loads(text)
    if "derivation" in data:
        if sig is None and "constructors" in data:
            sig = Signature(data["constructors"], {})
        if delta is None and "types" in data:
            types = data["types"]
            delta = parse_types_file(types) if isinstance(types, str) else ConstTyping(
                {c: parse_type(t) for c, t in types.items()})
        data = data["derivation"]
    return Derivation.from_json(data, sig or Signature()), delta or ConstTyping()


def cmd_typecheck(args) -> int:
    sig = resolve_system(args.system).sig if args.system else None
    delta = parse_types_file(read_file(args.types)) if args.types else None
    deriv, delta = _load_derivation_file(read_file(args.deriv), sig, delta)
    res = check_derivation(deriv, delta, closed_root=not args.open)
    if res.ok:
        emit(args, {"ok": True, "judgement": str(res.judgement), "type": print_type(deriv.type)},
             [f"ok: {res.judgement}"])
        return EXIT_OK
    emit(args, {"ok": False, "violations": [str(v) for v in res.violations]},
         ["rejected:"] + [f"  {v}" for v in res.violations])
    return EXIT_NEG


def cmd_pipeline(args) -> int:
    system = resolve_system(args.system)
    delta = parse_types_file(read_file(args.delta))
    evidence = load_evidence(read_file(args.evidence), system.sig)
    attest = TotalityAttestation.from_json(json.loads(read_file(args.attest)))
    term = parse_cli_term(system, args.term)
    deriv, _ = _load_derivation_file(read_file(args.deriv), system.sig, delta)
    res = pipeline_sn(system, delta, evidence, attest, term, deriv, cross_validate=args.cross_validate,
                      max_states=args.max_states, level=args.level, fuel=args.fuel)
    payload = res.to_json()
    if payload["verdict"] == "certificate":
        lines = [f"SN certificate for {payload['term']} : {payload['type']}"] + [f"  {p}" for p in payload["premises"]]
        lines.append(f"  by: {payload['justification']}")
        for k, v in payload["cross_checks"].items():
            lines.append(f"  cross-check {k}: {v}")
        emit(args, payload, lines)
        return EXIT_OK
    emit(args, payload, [f"refused: premise '{res.premise}' not established"] + [f"  {r}" for r in res.reasons])
    return EXIT_NEG


def cmd_demo(args) -> int:
    b = bundle(args.name)
    if args.omega:
        b = with_omega(b)
    term = b.demo_term
    res = normalize(b.system, term, keep_trace=True, step_budget=args.steps)
    lines = [f"{b.name} demo: {print_term(term)}"]
    lines += [f"  -> {print_term(t)}" for t in res.trace[1:]]
    ok = isinstance(res, NormalForm) and res.term == b.demo_normal_form
    lines.append(f"normal form {print_term(res.trace[-1])} in {res.steps} steps"
                 + ("" if ok else f" (expected {print_term(b.demo_normal_form)})"))
    rep = sn_search(b.system, term, args.max_states)
    lines += _sn_lines(rep)
    out = eval_term(b.system, term, level=args.level, fuel=args.fuel)
    shown = str(observe(out.value, 6)) if isinstance(out, Det) else f"Unknown ({out.reason})"
    lines.append(f"eval at level {args.level}: {shown}")
    cert = pipeline_sn(b.system, b.delta, b.evidence, b.attestation, term, b.demo_derivation)
    lines.append("pipeline: " + ("certificate" if cert.to_json()["verdict"] == "certificate"
                                 else f"refused ({cert.premise})"))
    payload = {
        "bundle": b.name, "term": print_term(term), "trace": [print_term(t) for t in res.trace],
        "normal_form": print_term(res.trace[-1]), "expected": print_term(b.demo_normal_form),
        "sn": _sn_json(rep), "eval": {"level": args.level, "shown": shown}, "pipeline": cert.to_json(),
    }
    emit(args, payload, lines)
    return EXIT_OK if ok and isinstance(rep, CertifiedSN) else EXIT_NEG


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS on the subcommand copy keeps a leading --json from being reset
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    p = argparse.ArgumentParser(prog="applied-lambda", description="Applied lambda calculus toolkit.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(fn=fn)
        return sp

    def strategy(sp, steps=10_000):
        sp.add_argument("--strategy", choices=STRATEGIES, default="leftmost-outermost")
        sp.add_argument("--steps", type=_positive, default=steps, help=f"step budget (default {steps})")

    sp = add("validate", cmd_validate, "check a rewrite system")
    sp.add_argument("system")

    sp = add("reduce", cmd_reduce, "print a reduction trace")
    sp.add_argument("system")
    sp.add_argument("term", help="term text, or @file")
    strategy(sp, 100)

    sp = add("normalize", cmd_normalize, "reduce to normal form")
    sp.add_argument("system")
    sp.add_argument("term")
    strategy(sp)

    sp = add("sn", cmd_sn, "search the reduction graph for strong normalisation")
    sp.add_argument("system")
    sp.add_argument("term")
    sp.add_argument("--max-states", type=_positive, default=100_000)

    sp = add("stratify", cmd_stratify, "lift a term to level n and reduce it in the stratified system")
    sp.add_argument("system")
    sp.add_argument("term")
    sp.add_argument("--level", type=_natural, required=True)
    sp.add_argument("--sn", action="store_true", help="also run the SN search on the lifted term")
    sp.add_argument("--max-states", type=_positive, default=100_000)
    strategy(sp)

    sp = add("eval", cmd_eval, "strict semantic evaluation at a level")
    sp.add_argument("system")
    sp.add_argument("term")
    sp.add_argument("--level", type=_natural, default=10)
    sp.add_argument("--fuel", type=_positive, default=100_000)
    sp.add_argument("--depth", type=_natural, default=8, help="observation depth")

    sp = add("typecheck", cmd_typecheck, "check a typing derivation (JSON)")
    sp.add_argument("deriv")
    sp.add_argument("--system", help="system whose signature the terms use")
    sp.add_argument("--types", help="constant types file")
    sp.add_argument("--open", action="store_true", help="do not require an empty context and closed type")

    sp = add("pipeline", cmd_pipeline, "certify strong normalisation from typing and totality")
    for a in ("system", "delta", "evidence", "attest", "term", "deriv"):
        sp.add_argument(a)
    sp.add_argument("--cross-validate", action="store_true")
    sp.add_argument("--max-states", type=_positive, default=100_000)
    sp.add_argument("--level", type=_natural, default=12)
    sp.add_argument("--fuel", type=_positive, default=1_000_000)

    sp = add("demo", cmd_demo, "run a bundled demo end to end")
    sp.add_argument("name", type=str.lower, choices=[b.lower() for b in BUNDLES])
    sp.add_argument("--omega", action="store_true", help="add the unattested looping constant omega")
    sp.add_argument("--level", type=_natural, default=12)
    sp.add_argument("--fuel", type=_positive, default=1_000_000)
    sp.add_argument("--max-states", type=_positive, default=100_000)
    sp.add_argument("--steps", type=_positive, default=10_000)
    return p


def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _natural(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.fn(args)
    except (UsageError, SyntaxErrorWithPos, ArityError, OSError, json.JSONDecodeError, KeyError, ValueError) as e:
        if isinstance(e, ValidationError):
            print("invalid system:", file=sys.stderr)
            for v in e.violations:
                print(f"  {v}", file=sys.stderr)
        else:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
