"""Command-line front end.

Exit status: 0 when every check passes, 1 when a verification fails,
2 on usage or input errors.  Inputs are inline text or ``@path``.
With ``--format structured`` each output line is a flat JSON record.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import amalgam, automorphism, jvdk, rewrite, words
from .automorphism import NotInvertible, PolyMap, compose, invert, nagata
from .poly import PolynomialError, parse_poly

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Out:
    def __init__(self, fmt: str, stream=None):
        self.structured = fmt == "structured"
        self.stream = stream or sys.stdout

    def __call__(self, text: str, **record):
        if self.structured:
            if record:
                print(json.dumps(record, sort_keys=True), file=self.stream)
        else:
            print(text, file=self.stream)


def read_input(arg: str) -> str:
    if arg.startswith("@"):
        try:
            with open(arg[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {arg[1:]}: {exc.strerror}") from None
    return arg


def parse_map_arg(arg: str) -> PolyMap:
    return PolyMap.parse(read_input(arg).strip())


def _cmd_compose(args, out: Out) -> int:
    if len(args.inputs) < 2:
        raise UsageError("compose needs at least two maps")
    maps = [parse_map_arg(a) for a in args.inputs]
    if len({m.n for m in maps}) != 1:
        raise UsageError("maps have different numbers of variables")
    result = maps[0]
    for m in maps[1:]:
        result = compose(result, m)
    out(str(result), verb="compose", result=str(result))
    return EXIT_OK


def _cmd_invert(args, out: Out) -> int:
    if len(args.inputs) != 1:
        raise UsageError("invert takes exactly one map")
    phi = parse_map_arg(args.inputs[0])
    try:
        inv = invert(phi)
    except NotInvertible as exc:
        out(f"NotInvertible: {exc}", verb="invert", ok=False, reason=str(exc))
        return EXIT_FAIL
    out(str(inv), verb="invert", ok=True, inverse=str(inv))
    return EXIT_OK


def _cmd_check(args, out: Out) -> int:
    if len(args.inputs) != 1:
        raise UsageError("check takes exactly one map")
    phi = parse_map_arg(args.inputs[0])
    try:
        inv = invert(phi)
    except NotInvertible as exc:
        out(f"not an automorphism: NotInvertible: {exc}", verb="check", ok=False, reason=str(exc))
        return EXIT_FAIL
    out(f"automorphism, inverse = {inv}", verb="check", ok=True, inverse=str(inv))
    return EXIT_OK


def _cmd_factor2(args, out: Out) -> int:
    if len(args.inputs) != 1:
        raise UsageError("factor2 takes exactly one map")
    phi = parse_map_arg(args.inputs[0])
    if args.ring:
        if phi.n != 3 or phi.components[0] != parse_poly("X1", 3):
            raise UsageError("ring mode needs a map (X1; F2; F3)")
        steps = jvdk.factor_ta2_ring(phi)
        if steps is None:
            out("unknown", verb="factor2", mode="ring", verdict="unknown")
            return EXIT_OK
        for s in steps:
            out(str(s), verb="factor2", mode="ring", letter=str(s))
        out(f"yes, {len(steps)} steps", verb="factor2", mode="ring", verdict="yes", steps=len(steps))
        return EXIT_OK
    if phi.n != 2:
        raise UsageError("factor2 expects a plane map (F1; F2); use --ring for (X1; F2; F3)")
    try:
        letters = jvdk.factor_ga2(phi)
    except jvdk.NotAutomorphism as exc:
        out(f"NotAutomorphism: {exc}", verb="factor2", ok=False, reason=str(exc))
        return EXIT_FAIL
    for l in letters:
        out(str(l), verb="factor2", kind=l.kind.value, element=str(l.element))
    if jvdk.recompose(letters) != phi:
        out("recomposition differs from the input", verb="factor2", ok=False)
        return EXIT_FAIL
    return EXIT_OK


def _cmd_psi(args, out: Out) -> int:
    if len(args.inputs) != 1:
        raise UsageError("psi takes exactly one word")
    w = words.parse_word(read_input(args.inputs[0]))
    image = rewrite.psi(w)
    for l in image:
        rec = {"verb": "psi", "factor": str(l.factor), "element": str(l.element)}
        if l.certificate is not None:
            rec["cert"] = str(l.certificate)
        out(str(l), **rec)
    if amalgam.phi_map(image) != words.evaluate(w):
        out("image does not evaluate back to the word", verb="psi", ok=False)
        return EXIT_FAIL
    return EXIT_OK


def _cmd_verify_relations(args, out: Out) -> int:
    samples = 1000 if args.samples is None else args.samples
    max_deg = 6 if args.max_deg is None else args.max_deg
    bound = 9 if args.coeff_bound is None else args.coeff_bound
    out(f"verify-relations seed={args.seed} samples={samples} max-deg={max_deg} coeff-bound={bound}"
        f"{' psi' if args.psi else ''}",
        verb="verify-relations", seed=args.seed, samples=samples, max_deg=max_deg, coeff_bound=bound)
    total = passed = 0
    first_failure = None
    for kind in words.RELATION_KINDS:
        cases = words.relation_cases(kind)
        ok = 0
        for s in range(samples):
            seed = (args.seed, kind, s)
            r = words.random_relation(repr(seed), kind, max_deg, bound, case=cases[s % len(cases)])
            good = words.check_relation(r)
            if good and args.psi:
                good = rewrite.verify_relation_respect(r)
            ok += good
            if not good and first_failure is None:
                first_failure = (kind, s, r)
        out(f"{kind}: {ok}/{samples} pass", verb="verify-relations", kind=kind, passed=ok, total=samples)
        total += samples
        passed += ok
    out(f"total: {passed}/{total} pass", verb="verify-relations", kind="total", passed=passed, total=total)
    if first_failure is not None:
        kind, s, r = first_failure
        out(f"first failure: {kind} sample {s}: {r.lhs} = {r.rhs}",
            verb="verify-relations", failure=kind, sample=s)
        return EXIT_FAIL
    return EXIT_OK


def _cmd_replay_proof(args, out: Out) -> int:
    samples = 50 if args.samples is None else args.samples
    max_deg = 3 if args.max_deg is None else args.max_deg
    bound = 5 if args.coeff_bound is None else args.coeff_bound
    out(f"replay-proof seed={args.seed} samples={samples} max-deg={max_deg} coeff-bound={bound}",
        verb="replay-proof", seed=args.seed, samples=samples, max_deg=max_deg, coeff_bound=bound)
    records = rewrite.replay_all(args.seed, samples, max_deg, bound)
    chains: dict[str, list] = {}
    for rec in records:
        chains.setdefault(rec.label, []).append(rec)
    failed = 0
    for label, recs in chains.items():
        bad = [r for r in recs if not r.result]
        failed += len(bad)
        if bad:
            r = bad[0]
            status = f"FailedStep(index={r.result.index}, reason={r.result.reason})"
        else:
            r = recs[0]
            status = "Verified"
        out(f"{label}  seed={r.seed}  steps={r.steps}  {status}",
            verb="replay-proof", chain=label, seed=r.seed, steps=r.steps,
            samples=len(recs), failed=len(bad), status="verified" if not bad else "failed")
    summary = {"chains": len(chains), "replays": len(records),
               "verified": len(records) - failed, "failed": failed}
    out("summary " + json.dumps(summary, sort_keys=True), verb="replay-proof", summary=True, **summary)
    return EXIT_OK if failed == 0 else EXIT_FAIL


def _cmd_nagata(args, out: Out) -> int:
    phi = nagata()
    x1, x2, x3 = parse_poly("X1", 3), parse_poly("X2", 3), parse_poly("X3", 3)
    delta = x2 * x3 + x1 * x1
    inv = phi.inverse
    ident = PolyMap.identity(3)
    inverse_ok = compose(phi, inv) == ident and compose(inv, phi) == ident
    delta_ok = automorphism.apply_to_poly(delta, phi) == delta
    h3, h2 = amalgam.membership_H3(phi), amalgam.membership_H2(phi)
    t13 = automorphism.tau(1, 3)
    conj = compose(t13, compose(phi, t13))
    h1t = amalgam.membership_H1T(conj).verdict
    out(f"nagata = {phi}", verb="nagata", map=str(phi))
    out(f"inverse = {inv}", verb="nagata", inverse=str(inv), inverse_ok=inverse_ok)
    out(f"inverse check: {'ok' if inverse_ok else 'FAILED'}", verb="nagata", check="inverse", ok=inverse_ok)
    out(f"X2*X3 + X1^2 preserved: {'yes' if delta_ok else 'no'}", verb="nagata", check="delta", ok=delta_ok)
    out(f"H3: {str(h3).lower()}", verb="nagata", check="H3", member=h3)
    out(f"H2: {str(h2).lower()}", verb="nagata", check="H2", member=h2)
    out(f"t13-conjugate in H1T: {h1t.value}", verb="nagata", check="H1T-conjugate", verdict=h1t.value)
    expected = inverse_ok and delta_ok and not h3 and not h2 and h1t is amalgam.Verdict.UNKNOWN
    return EXIT_OK if expected else EXIT_FAIL


VERBS = {
    "compose": _cmd_compose,
    "invert": _cmd_invert,
    "check": _cmd_check,
    "factor2": _cmd_factor2,
    "psi": _cmd_psi,
    "verify-relations": _cmd_verify_relations,
    "replay-proof": _cmd_replay_proof,
    "nagata": _cmd_nagata,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tame3", description="Exact computations in the tame group of affine 3-space.")
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("inputs", nargs="*", help="maps '(F1; F2; F3)' or sigma-words, inline or @file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int)
    p.add_argument("--max-deg", type=int)
    p.add_argument("--coeff-bound", type=int)
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--ring", action="store_true", help="factor2: treat (X1; F2; F3) over K[X1]")
    p.add_argument("--psi", action="store_true", help="verify-relations: also check the rewriting map")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_intermixed_args(argv)
    out = Out(args.format)
    for name in ("samples", "max_deg", "coeff_bound"):
        v = getattr(args, name)
        if v is not None and v < (0 if name == "samples" else 1):
            parser.print_usage(sys.stderr)
            print(f"tame3: error: --{name.replace('_', '-')} out of range", file=sys.stderr)
            return EXIT_USAGE
    if args.seed < 0:
        print("tame3: error: --seed must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return VERBS[args.verb](args, out)
    except (UsageError, PolynomialError, ValueError) as exc:
        print(f"tame3: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
