"""``gt`` command line.

Exit codes: 0 when every check passes, 2 on a conformance failure, 1 on a
usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from gtyes import adaptive as ad
from gtyes import bounds as bd
from gtyes import harness as hs
from gtyes import verify as vf
from gtyes.designs import SamplerConfig, SamplingError, build_explicit, sample_design
from gtyes.model import DefectiveSet, Design, DomainError, respond
from gtyes.pipeline import decode_cover, run_two_stage

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


def _json_default(o):
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _clean(x):
    """inf/nan become strings so the JSON stays standard."""
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def emit(obj, out=None) -> None:
    text = obj if isinstance(obj, str) else json.dumps(_clean(obj), indent=2, default=_json_default) + "\n"
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _hidden(n, d, args):
    if args.mode == "exhaustive":
        total = ad.count_hidden_sets(n, d)
        if total > args.cap:
            raise DomainError(f"{total} hidden sets exceed the exhaustive cap {args.cap}; use --mode sampled")
        return ad.hidden_sets(n, d)
    return ad.sampled_hidden_sets(n, d, args.seed, args.trials)


# subcommands -------------------------------------------------------------------

def cmd_bounds(args) -> int:
    q = bd.BoundQuery(n=args.n, d=args.d, t=args.t, y=args.y, p=args.p, s=args.s)
    emit(bd.evaluate(args.theorem, q).to_dict(), args.out)
    return EXIT_OK


def cmd_adaptive(args) -> int:
    row = hs.adaptive_row(args.n, args.d, args.t, args.f, args.strategy, args.mode, args.seed, args.trials, args.cap)
    if row.error:
        raise DomainError(row.error)
    checks = {}
    for name, (m, op, b) in hs.FLAG_RULES["adaptive"].items():
        if row.flags[name] is None:
            continue
        checks[name] = {"measured": row.measured[m], "op": "<=" if op == "le" else ">=",
                        "bound": row.bounds[b], "pass": row.flags[name]}
    out = {
        "strategy": {"kind": row.params["strategy"], "f": row.params["f"]},
        "max_tests": row.measured["max_tests"],
        "max_yes": row.measured["max_yes"],
        "instances": row.measured["instances"],
        "bound_checks": checks,
        "findings": row.findings,
    }
    emit(out, args.out)
    return EXIT_OK if row.passed else EXIT_FAIL


def cmd_gen_random(args) -> int:
    cfg = SamplerConfig(t=args.t, n=args.n, d=args.d, p=args.p, s=args.s, z=args.z, seed=args.seed,
                        max_attempts=args.max_attempts)
    res = sample_design(cfg)
    emit(res.design.to_text(), args.out)
    logging.info("verified after %d attempts (z=%.6g)", res.attempts, cfg.z)
    return EXIT_OK


def cmd_gen_explicit(args) -> int:
    design = build_explicit(args.d, args.q, args.m, k=args.k)
    emit(design.to_text(), args.out)
    logging.info("n=%d t=%d k=%d", design.n, design.t, design.meta["k"])
    return EXIT_OK


def _meta_or(design: Design, key: str, value):
    if value is not None:
        return value
    if key in design.meta:
        return design.meta[key]
    return None


def cmd_verify(args) -> int:
    design = Design.load(args.file)
    d = _meta_or(design, "d", args.d)
    p = _meta_or(design, "p", args.p) or 1
    s = _meta_or(design, "s", args.s)
    if d is None:
        raise UsageError("--d is required when the design file declares no d")
    rep = vf.check(design, args.property, p=p, d=d, s=s, sample=args.sample, seed=args.seed)
    emit(rep.to_dict(), args.out)
    return EXIT_OK if rep.holds else EXIT_FAIL


def cmd_nonadaptive(args) -> int:
    """Decode every hidden set of size <= d from the design's responses."""
    design = Design.load(args.design)
    d = _meta_or(design, "d", args.d)
    if d is None:
        raise UsageError("--d is required when the design file declares no d")
    s = _meta_or(design, "s", args.s)
    max_yes, wrong, count = 0, [], 0
    for h in _hidden(design.n, d, args):
        r = respond(design, h)
        count += 1
        max_yes = max(max_yes, r.weight)
        if decode_cover(design, r) != frozenset(h):
            wrong.append(DefectiveSet(h).external())
    lower = None
    if design.n >= d:
        lower = bd.nonadaptive_yes_lower(bd.BoundQuery(n=design.n, d=d, t=design.t, y=max_yes)).value
    checks = {"correct": not wrong}
    if s is not None:
        checks["yes_le_s"] = max_yes <= s
    if lower is not None:
        checks["yes_ge_nonadaptive_lower"] = max_yes >= lower
    out = {"n": design.n, "t": design.t, "d": d, "s": s, "instances": count, "max_yes": max_yes,
           "wrong": wrong[:20], "nonadaptive_lower": lower, "checks": checks}
    emit(out, args.out)
    return EXIT_OK if all(checks.values()) else EXIT_FAIL


def cmd_twostage(args) -> int:
    design = Design.load(args.design)
    if args.n is not None and args.n != design.n:
        raise UsageError(f"--n {args.n} does not match the design's n={design.n}")
    d = _meta_or(design, "d", args.d)
    p = _meta_or(design, "p", args.p) or 1
    s = _meta_or(design, "s", args.s)
    if d is None or s is None:
        raise UsageError("--d and --s are required when the design file does not declare them")
    try:
        cert = vf.certify(design, p, d, s)
    except vf.VerificationError as e:
        emit({"certified": False, "reason": str(e), "witness": e.report.to_dict() if e.report else None}, args.out)
        return EXIT_FAIL
    agg = {"max_candidates": 0, "max_stage1_yeses": 0, "max_stage2_yeses": 0, "max_total_yeses": 0,
           "max_total_tests": 0}
    wrong, count = [], 0
    for h in _hidden(design.n, d, args):
        session = ad.OracleSession(design.n, DefectiveSet(h))
        o = run_two_stage(cert, session)
        count += 1
        agg["max_candidates"] = max(agg["max_candidates"], len(o.candidates))
        agg["max_stage1_yeses"] = max(agg["max_stage1_yeses"], o.stage1_yeses)
        agg["max_stage2_yeses"] = max(agg["max_stage2_yeses"], o.stage2_yeses)
        agg["max_total_yeses"] = max(agg["max_total_yeses"], o.total_yeses)
        agg["max_total_tests"] = max(agg["max_total_tests"], o.total_tests)
        if set(o.confirmed.members) != set(h):
            wrong.append(DefectiveSet(h).external())
    checks = {
        "correct": not wrong,
        "candidates_le_p_d_1": agg["max_candidates"] <= p + d - 1,
        "stage1_yes_le_s": agg["max_stage1_yeses"] <= s,
        "total_yes_le_s_d": agg["max_total_yeses"] <= s + d,
    }
    out = dict(certified=True, n=design.n, t=design.t, d=d, p=p, s=s, instances=count, **agg,
               wrong=wrong[:20], checks=checks)
    emit(out, args.out)
    return EXIT_OK if all(checks.values()) else EXIT_FAIL


SWEEP_FLAGS = ("kind", "n", "d", "t", "f", "p", "s", "q", "m", "z", "strategy", "mode", "seed", "trials",
               "cap", "max_attempts", "workers", "out", "format")


def cmd_sweep(args) -> int:
    conf = {}
    if args.config:
        with open(args.config) as fh:
            conf = hs.parse_config(fh.read())
    for key in SWEEP_FLAGS:
        v = getattr(args, key, None)
        if v is not None:
            conf[key] = v  # flags win over the config file
    spec = hs.SweepSpec(**conf)
    rows = hs.sweep(spec)
    text = hs.report(rows, spec.format, kind=spec.kind)
    if spec.out:
        with open(spec.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


# parser -----------------------------------------------------------------------

def _int_list(text):
    try:
        return hs.parse_int_list(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _sampling_args(p, default_mode="exhaustive"):
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default=default_mode)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--cap", type=int, default=ad.EXHAUSTIVE_CAP)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gt", description="Group testing with a limited number of positive responses.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="evaluate a closed-form bound")
    p.add_argument("--theorem", required=True, choices=bd.THEOREMS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--y", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("adaptive", help="measure an adaptive strategy")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--f", type=int)
    p.add_argument("--strategy", choices=hs.STRATEGIES)
    _sampling_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_adaptive)

    p = sub.add_parser("design", help="generate or verify pooling designs")
    dsub = p.add_subparsers(dest="design_command", required=True)
    g = dsub.add_parser("gen-random", help="seeded sampler with verified retry")
    g.add_argument("--t", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--p", type=int, default=1)
    g.add_argument("--s", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--z", type=float)
    g.add_argument("--max-attempts", type=int, default=1000)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_random)
    g = dsub.add_parser("gen-explicit", help="code-based construction")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_explicit)
    g = dsub.add_parser("verify", help="check one property of a design file")
    g.add_argument("--file", required=True)
    g.add_argument("--property", required=True, choices=vf.PROPERTIES)
    g.add_argument("--p", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--s", type=int)
    g.add_argument("--sample", action="store_true")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_verify)

    p = sub.add_parser("nonadaptive", help="decode all hidden sets from a design's responses")
    p.add_argument("--design", required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--s", type=int)
    _sampling_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_nonadaptive)

    p = sub.add_parser("twostage", help="run the two-stage strategy over a design")
    p.add_argument("--design", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--s", type=int)
    _sampling_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_twostage)

    p = sub.add_parser("sweep", help="run a parameter grid and report conformance")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--kind", choices=hs.KINDS)
    for key in ("n", "d", "t", "f", "p", "s", "q", "m"):
        p.add_argument(f"--{key}", type=_int_list, help="list like 8,16 or range like 4..8")
    p.add_argument("--z", type=float)
    p.add_argument("--strategy", choices=hs.STRATEGIES)
    p.add_argument("--mode", choices=["exhaustive", "sampled"])
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--max-attempts", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=["json", "csv"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "strategy", "x") is None and args.command == "adaptive":
        args.strategy = "auto" if args.t is not None else ("staged" if args.f is not None else "hwang")
    try:
        return args.func(args)
    except (UsageError, DomainError, SamplingError, OSError) as e:
        print(f"gt: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
