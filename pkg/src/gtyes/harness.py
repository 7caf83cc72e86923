"""Parameter sweeps that measure strategies and designs against the bounds.

A sweep yields ConformanceRows.  Each row keeps its parameters, measured
maxima, bound values and pass/fail flags; every flag is a comparison of two
numbers stored in the same row, so it can be recomputed from a saved report.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import comb
from typing import Sequence

from gtyes import adaptive as ad
from gtyes import bounds as bd
from gtyes.designs import SamplerConfig, SamplingError, build_explicit, sample_design
from gtyes.model import DefectiveSet, DomainError, respond
from gtyes.pipeline import decode_cover, run_two_stage
from gtyes.verify import certify

log = logging.getLogger(__name__)

KINDS = ("adaptive", "explicit", "random")
STRATEGIES = ("auto", "individual", "staged", "hwang")

# flag -> (measured key, op, bound key); op "le" is an upper bound, "ge" a lower one
FLAG_RULES = {
    "adaptive": {
        "correct": ("wrong", "le", "zero"),
        "yes_le_strategy": ("max_yes", "le", "strategy_yes"),
        "tests_le_strategy": ("max_tests", "le", "strategy_tests"),
        "tests_le_t": ("max_tests", "le", "t_budget"),
        "yes_ge_counting": ("max_yes", "ge", "min_yes_exact"),
        "yes_ge_adaptive_lower": ("max_yes", "ge", "adaptive_lower"),
    },
    "explicit": {
        "correct": ("wrong", "le", "zero"),
        "yes_le_s": ("max_yes", "le", "s_budget"),
        "candidates_le_p_d_1": ("max_candidates", "le", "p_plus_d_minus_1"),
        "twostage_yes_le_s_d": ("max_yes_twostage", "le", "s_plus_d"),
        "n_le_cff_size": ("n", "le", "cff_size_upper"),
        "yes_ge_nonadaptive_lower": ("max_yes", "ge", "nonadaptive_lower"),
    },
    "random": {
        "correct": ("wrong", "le", "zero"),
        "yes_le_s": ("max_yes", "le", "s_budget"),
        "n_le_cff_pd_size": ("n", "le", "cff_pd_size_upper"),
    },
}

PARAM_KEYS = {
    "adaptive": ("n", "d", "t", "f", "strategy", "mode"),
    "explicit": ("d", "q", "m", "k", "n", "t", "s", "mode"),
    "random": ("t", "n", "d", "p", "s", "z", "seed"),
}
MEASURED_KEYS = {
    "adaptive": ("max_tests", "max_yes", "wrong", "instances"),
    "explicit": ("max_tests", "max_yes", "max_yes_twostage", "max_candidates", "wrong", "instances"),
    "random": ("max_tests", "max_yes", "wrong", "instances", "attempts"),
}
BOUND_KEYS = {
    "adaptive": ("zero", "strategy_yes", "strategy_tests", "t_budget", "min_yes_exact", "adaptive_lower",
                 "adaptive_upper", "hwang_target"),
    "explicit": ("zero", "s_budget", "p_plus_d_minus_1", "s_plus_d", "cff_size_upper", "nonadaptive_lower",
                 "nonadaptive_upper", "twostage_upper"),
    "random": ("zero", "s_budget", "cff_pd_size_upper", "cff_pd_exists"),
}


def sig12(x):
    """Round floats to 12 significant digits; ints and None pass through."""
    if isinstance(x, float) and math.isfinite(x):
        return float(f"{x:.12g}")
    return x


def _cmp(measured, op, bound) -> bool | None:
    if measured is None or bound is None:
        return None
    return measured <= bound if op == "le" else measured >= bound


@dataclass
class ConformanceRow:
    kind: str
    params: dict
    measured: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)
    error: str | None = None

    def finalize(self) -> "ConformanceRow":
        self.params = {k: sig12(v) for k, v in self.params.items()}
        self.measured = {k: sig12(v) for k, v in self.measured.items()}
        self.bounds = {k: sig12(v) for k, v in self.bounds.items()}
        self.flags = recompute_flags(self)
        return self

    @property
    def passed(self) -> bool:
        return self.error is None and all(v is not False for v in self.flags.values())

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ConformanceRow":
        return cls(**data)


def recompute_flags(row: ConformanceRow) -> dict:
    if row.error is not None:
        return {name: None for name in FLAG_RULES[row.kind]}
    values = dict(row.measured, **row.bounds, **{k: v for k, v in row.params.items() if k == "n"})
    return {name: _cmp(values.get(m), op, values.get(b)) for name, (m, op, b) in FLAG_RULES[row.kind].items()}


# adaptive rows --------------------------------------------------------------

def _strategy_for(n, d, t, f, strategy) -> ad.Strategy:
    if strategy == "auto":
        if t is None:
            raise DomainError("strategy auto needs t")
        return ad.choose_strategy(n, d, t)
    if strategy == "individual":
        return ad.Strategy("individual", d)
    if strategy == "staged":
        if f is None:
            raise DomainError("staged needs f")
        return ad.staged(n, d, f)
    if strategy == "hwang":
        return ad.Strategy("hwang", d)
    raise DomainError(f"unknown strategy {strategy!r}")


def hwang_target(n: int, d: int) -> int:
    return bd.ceil_log2(comb(n, d)) + d - 1


def counting_minimum(n: int, d: int) -> int:
    """Fewest tests any correct up-to-d strategy needs in the worst case."""
    return bd.ceil_log2(ad.count_hidden_sets(n, d))


def adaptive_row(n, d, t=None, f=None, strategy="auto", mode="exhaustive", seed=0, trials=1000,
                 cap=ad.EXHAUSTIVE_CAP) -> ConformanceRow:
    params = {"n": n, "d": d, "t": t, "f": f, "strategy": strategy, "mode": mode}
    row = ConformanceRow("adaptive", params)
    try:
        strat = _strategy_for(n, d, t, f, strategy)
        params["strategy"] = strat.kind
        params["f"] = strat.f
        m = ad.measure_max_yes(strat, n, d, mode, seed=seed, trials=trials, cap=cap)
    except DomainError as e:
        row.error = f"{type(e).__name__}: {e}"
        return row.finalize()
    row.measured = {"max_tests": m.max_tests, "max_yes": m.max_yes, "wrong": len(m.wrong), "instances": m.instances}
    strategy_yes = strategy_tests = None
    if strat.kind == "individual":
        strategy_yes, strategy_tests = d, n
    elif strat.kind == "staged":
        strategy_yes, strategy_tests = strat.f * d, ad.staged_test_bound(n, d, strat.f)
    mye = bd.min_yes_exact(n, d, m.max_tests)
    q = bd.BoundQuery(n=n, d=d, t=m.max_tests, y=m.max_yes)
    row.bounds = {
        "zero": 0,
        "strategy_yes": strategy_yes,
        "strategy_tests": strategy_tests,
        "t_budget": t if strategy == "auto" else None,
        # infeasible means no correct strategy fits, so any measurement contradicts it
        "min_yes_exact": mye if mye is not None else math.inf,
        "adaptive_lower": bd.adaptive_yes_lower(q).value,
        "adaptive_upper": bd.adaptive_yes_upper(bd.BoundQuery(n=n, d=d, t=t if t else m.max_tests, y=m.max_yes)).value,
        "hwang_target": hwang_target(n, d) if strat.kind == "hwang" else None,
    }
    if strat.kind == "hwang" and m.max_tests > hwang_target(n, d):
        forced = counting_minimum(n, d) > hwang_target(n, d)
        row.findings.append(
            f"hidden {list(DefectiveSet(m.worst_tests).external())} took {m.max_tests} tests > target {hwang_target(n, d)}"
            + (f"; forced, counting minimum is {counting_minimum(n, d)}" if forced else "; not forced by counting")
        )
    return row.finalize()


# design rows ----------------------------------------------------------------

def _measure_design(cert, d, p, mode, seed, trials, cap):
    design = cert.design
    n = design.n
    if mode == "exhaustive":
        total = ad.count_hidden_sets(n, d)
        if total > cap:
            raise DomainError(f"{total} hidden sets exceed the exhaustive cap {cap}")
        hidden = ad.hidden_sets(n, d)
    else:
        hidden = ad.sampled_hidden_sets(n, d, seed, trials)
    out = {"max_tests": 0, "max_yes": 0, "max_yes_twostage": 0, "max_candidates": 0, "wrong": 0, "instances": 0}
    for h in hidden:
        r = respond(design, h)
        found = decode_cover(design, r)
        session = ad.OracleSession(n, DefectiveSet(h))
        o = run_two_stage(cert, session)
        out["instances"] += 1
        out["max_yes"] = max(out["max_yes"], r.weight)
        out["max_yes_twostage"] = max(out["max_yes_twostage"], o.total_yeses)
        out["max_candidates"] = max(out["max_candidates"], len(o.candidates))
        out["max_tests"] = max(out["max_tests"], o.total_tests)
        # p = 1 designs decode exactly; p > 1 may leave up to p - 1 extras
        if set(o.confirmed.members) != set(h) or (p == 1 and found != frozenset(h)):
            out["wrong"] += 1
    return out


def explicit_row(d, q, m, k=None, mode="exhaustive", seed=0, trials=1000, cap=ad.EXHAUSTIVE_CAP) -> ConformanceRow:
    params = {"d": d, "q": q, "m": m, "k": k, "n": None, "t": None, "s": d * m, "mode": mode}
    row = ConformanceRow("explicit", params)
    try:
        design = build_explicit(d, q, m, k=k)
        params.update(k=design.meta["k"], n=design.n, t=design.t)
        s = d * m
        cert = certify(design, 1, d, s)
        row.measured = _measure_design(cert, d, 1, mode, seed, trials, cap)
    except (DomainError, RuntimeError) as e:
        row.error = f"{type(e).__name__}: {e}"
        return row.finalize()
    n, t = design.n, design.t
    y = row.measured["max_yes"]
    twostage = None
    if t >= 2 * d and n >= 2 * d:
        twostage = bd.twostage_yes_upper(bd.BoundQuery(n=n, d=d, t=t, p=d, y=row.measured["max_yes_twostage"])).value
    row.bounds = {
        "zero": 0,
        "s_budget": s,
        "p_plus_d_minus_1": d,
        "s_plus_d": s + d,
        "cff_size_upper": bd.cff_size_upper(bd.BoundQuery(n=n, d=d, t=t, s=s)).value,
        "nonadaptive_lower": bd.nonadaptive_yes_lower(bd.BoundQuery(n=n, d=d, t=t, y=y)).value,
        "nonadaptive_upper": bd.nonadaptive_yes_upper(bd.BoundQuery(n=n, d=d, t=t, y=y)).value,
        "twostage_upper": twostage,
    }
    return row.finalize()


def random_row(t, n, d, p=1, s=None, z=None, seed=0, max_attempts=1000, mode="exhaustive", trials=1000,
               cap=ad.EXHAUSTIVE_CAP) -> ConformanceRow:
    params = {"t": t, "n": n, "d": d, "p": p, "s": s, "z": z, "seed": seed}
    row = ConformanceRow("random", params)
    try:
        cfg = SamplerConfig(t=t, n=n, d=d, p=p, s=s, z=z, seed=seed, max_attempts=max_attempts)
        params.update(s=cfg.s, z=cfg.z)
        res = sample_design(cfg)
        meas = _measure_design(res.certificate, d, p, mode, seed, trials, cap)
    except (DomainError, SamplingError) as e:
        row.error = f"{type(e).__name__}: {e}"
        return row.finalize()
    row.measured = {k: meas[k] for k in ("max_tests", "max_yes", "wrong", "instances")}
    row.measured["attempts"] = res.attempts
    q = bd.BoundQuery(n=n, d=d, t=t, p=p, s=cfg.s)
    row.bounds = {
        "zero": 0,
        "s_budget": cfg.s,
        "cff_pd_size_upper": bd.cff_pd_size_upper(q).value,
        "cff_pd_exists": bd.cff_pd_exists(q).value,
    }
    return row.finalize()


# sweeps -----------------------------------------------------------------------

@dataclass
class SweepSpec:
    kind: str = "adaptive"
    n: Sequence[int] = ()
    d: Sequence[int] = ()
    t: Sequence[int | None] = (None,)
    f: Sequence[int | None] = (None,)
    p: Sequence[int] = (1,)
    s: Sequence[int | None] = (None,)
    q: Sequence[int] = ()
    m: Sequence[int] = ()
    z: float | None = None
    strategy: str = "auto"
    mode: str = "exhaustive"
    seed: int = 0
    trials: int = 1000
    cap: int = ad.EXHAUSTIVE_CAP
    max_attempts: int = 1000
    workers: int = 1
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown sweep kind {self.kind!r}; choose from {KINDS}")
        if self.strategy not in STRATEGIES:
            raise DomainError(f"unknown strategy {self.strategy!r}")
        if self.mode not in ("exhaustive", "sampled"):
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.format not in ("json", "csv"):
            raise DomainError(f"unknown format {self.format!r}")

    def points(self) -> list[tuple[str, dict]]:
        """Grid points in order, each as (row builder name, kwargs); invalid ones are skipped."""
        out = []
        common = {"mode": self.mode, "seed": self.seed, "trials": self.trials, "cap": self.cap}
        if self.kind == "adaptive":
            for n, d, t, f in itertools.product(self.n, self.d, self.t, self.f):
                if not n >= d >= 1:
                    log.info("skip n=%s d=%s: need n >= d >= 1", n, d)
                    continue
                if self.strategy == "auto" and t is None:
                    log.info("skip n=%s d=%s: strategy auto needs t", n, d)
                    continue
                if self.strategy == "staged" and f is None:
                    log.info("skip n=%s d=%s: staged needs f", n, d)
                    continue
                out.append(("adaptive", dict(common, n=n, d=d, t=t, f=f, strategy=self.strategy)))
        elif self.kind == "explicit":
            for d, q, m in itertools.product(self.d, self.q, self.m):
                if q < 2 * d + 2:
                    log.info("skip d=%s q=%s: need q >= 2d+2", d, q)
                    continue
                out.append(("explicit", dict(common, d=d, q=q, m=m)))
        else:
            for t, n, d, p, s in itertools.product(self.t, self.n, self.d, self.p, self.s):
                if t is None or (s is not None and s > t):
                    log.info("skip t=%s s=%s: need s <= t", t, s)
                    continue
                out.append(("random", dict(common, t=t, n=n, d=d, p=p, s=s, z=self.z,
                                           max_attempts=self.max_attempts)))
        return out


_BUILDERS = {"adaptive": adaptive_row, "explicit": explicit_row, "random": random_row}


def _run_point(point) -> ConformanceRow:
    name, kwargs = point
    try:
        return _BUILDERS[name](**kwargs)
    except Exception as e:  # a single bad point must not abort the sweep
        params = {k: v for k, v in kwargs.items() if k in PARAM_KEYS[name]}
        row = ConformanceRow(name, params, error=f"{type(e).__name__}: {e}")
        return row.finalize()


def sweep(spec: SweepSpec) -> list[ConformanceRow]:
    pts = spec.points()
    if spec.workers > 1 and len(pts) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as ex:
            return list(ex.map(_run_point, pts))  # map keeps grid order
    return [_run_point(pt) for pt in pts]


# reports ----------------------------------------------------------------------

def csv_header(kind: str) -> list[str]:
    return (list(PARAM_KEYS[kind]) + list(MEASURED_KEYS[kind]) + list(BOUND_KEYS[kind])
            + list(FLAG_RULES[kind]) + ["findings", "error"])


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "pass" if v else "fail"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def to_csv(rows: list[ConformanceRow], kind: str | None = None) -> str:
    kind = kind or (rows[0].kind if rows else "adaptive")
    header = csv_header(kind)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        values = dict(r.params, **r.measured, **r.bounds, **r.flags)
        values["findings"] = " | ".join(r.findings)
        values["error"] = r.error
        w.writerow([_cell(values.get(h)) for h in header])
    return buf.getvalue()


def _encode(x):
    """Infinite floats become "inf"/"-inf" so the output is standard JSON."""
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _encode(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_encode(v) for v in x]
    return x


def _decode(x):
    if x in ("inf", "-inf"):
        return float(x)
    if isinstance(x, dict):
        return {k: _decode(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_decode(v) for v in x]
    return x


def to_json(rows: list[ConformanceRow]) -> str:
    return json.dumps([_encode(r.to_dict()) for r in rows], indent=2, allow_nan=False) + "\n"


def from_json(text: str) -> list[ConformanceRow]:
    return [ConformanceRow.from_dict(_decode(d)) for d in json.loads(text)]


def report(rows: list[ConformanceRow], fmt: str = "json", path=None, kind: str | None = None) -> str:
    text = to_csv(rows, kind) if fmt == "csv" else to_json(rows)
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


# config files ---------------------------------------------------------------

_LIST_KEYS = {"n", "d", "t", "f", "p", "s", "q", "m"}
_INT_KEYS = {"seed", "trials", "cap", "max_attempts", "workers"}


def parse_int_list(text: str) -> list[int]:
    """'8,16' or '4..7' or a mix: '2,4..6' -> [2, 4, 5, 6]."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def parse_config(text: str) -> dict:
    """key = value lines; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config line {lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        value = value.strip('"').strip("'")
        if key in _LIST_KEYS:
            out[key] = parse_int_list(value)
        elif key in _INT_KEYS:
            out[key] = int(value)
        elif key == "z":
            out[key] = float(value)
        elif key in SweepSpec.__dataclass_fields__:
            out[key] = value
        else:
            raise DomainError(f"config line {lineno}: unknown key {key!r}")
    return out
