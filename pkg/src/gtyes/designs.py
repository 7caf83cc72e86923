"""Generators for union-bounded (p,d)-cover-free designs.

Two routes: a seeded Bernoulli sampler that retries until a draw verifies,
and an explicit reduction from a q-ary code with large distance.  Both
return only designs that passed the verifiers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from gtyes import verify
from gtyes.bounds import BoundQuery, cff_pd_exists
from gtyes.gfcodes import CODEWORD_CAP, ConstructionError, LinearCode, construct_code, distance_target, field_make
from gtyes.model import Design, DomainError, popcount
from gtyes.rng import uniform_block

# explicit designs: largest n with n * C(n-1, d) column-vs-union checks under this
EXPLICIT_CHECK_CAP = 10**6


class SamplingError(RuntimeError):
    def __init__(self, msg: str, log: list):
        super().__init__(msg)
        self.log = log


def default_z(t: int, d: int, p: int, s: int) -> float:
    """(1 - (s/(e t))^(s (p/d + 1)))^(1/d), the zero-probability of the existence proof."""
    return (1.0 - (s / (math.e * t)) ** (s * (p / d + 1))) ** (1.0 / d)


def failure_bound(t: int, n: int, d: int, p: int, s: int) -> float:
    """2 C(n,d+p) C(d+p,p) (s/(e t))^(s(p/d+1)) sum_{a<=s} C(t,a).

    Upper bound on the chance that a draw at the default z is not a
    union-bounded (p,d)-cover-free family, as stated by the existence proof.
    """
    tail = sum(comb(t, a) for a in range(s + 1))
    pairs = comb(n, d + p)
    if pairs == 0:
        return 0.0
    log2_val = (1 + math.log2(pairs) + math.log2(comb(d + p, p))
                + s * (p / d + 1) * math.log2(s / (math.e * t)) + math.log2(tail))
    return 2.0**log2_val


@dataclass(frozen=True)
class SamplerConfig:
    t: int
    n: int
    d: int
    p: int = 1
    s: int | None = None
    z: float | None = None
    seed: int = 0
    max_attempts: int = 1000

    def __post_init__(self):
        if self.t < 1 or self.n < 1 or self.d < 1 or self.p < 1:
            raise DomainError("t, n, d, p must be >= 1")
        if self.s is None:
            object.__setattr__(self, "s", self.t)
        if not 1 <= self.s <= self.t:
            raise DomainError(f"need 1 <= s <= t, got s={self.s} t={self.t}")
        if self.z is None:
            object.__setattr__(self, "z", default_z(self.t, self.d, self.p, self.s))
        if not 0 < self.z < 1:
            raise DomainError(f"z must lie in (0, 1), got {self.z}")
        if self.max_attempts < 1:
            raise DomainError("max_attempts must be >= 1")


def draw_matrix(cfg: SamplerConfig, attempt: int) -> Design:
    """Draw number ``attempt``: entry (i, j) uses counter attempt*t*n + i*n + j."""
    t, n = cfg.t, cfg.n
    u = uniform_block(cfg.seed, attempt * t * n, t * n).reshape(t, n)
    ones = (u >= cfg.z)  # entry = 0 iff u < z
    weights = 1 << np.arange(t, dtype=object)
    cols = tuple(int(x) for x in (ones.astype(object) * weights[:, None]).sum(axis=0))
    return Design(t, n, cols, {"d": cfg.d, "p": cfg.p, "s": cfg.s})


@dataclass
class SampleResult:
    design: Design
    attempts: int
    certificate: verify.Certificate
    log: list = field(default_factory=list)


def check_draw(design: Design, cfg: SamplerConfig) -> verify.PropertyReport | None:
    """First failing report for the draw, or None when it verifies."""
    for r in (verify.is_pd_cover_free(design, cfg.p, cfg.d), verify.is_union_bounded(design, cfg.d, cfg.s)):
        if not r.holds:
            return r
    return None


def sample_design(cfg: SamplerConfig) -> SampleResult:
    """Return the first verified draw; the log lists why earlier draws failed."""
    exists = cff_pd_exists(BoundQuery(n=cfg.n, d=cfg.d, t=cfg.t, p=cfg.p, s=cfg.s)).value
    if cfg.n > exists:
        warnings.warn(f"n={cfg.n} exceeds the existence bound {exists:.4g} for these parameters", stacklevel=2)
    log = []
    for attempt in range(cfg.max_attempts):
        design = draw_matrix(cfg, attempt)
        bad = check_draw(design, cfg)
        if bad is None:
            cert = verify.certify(design, cfg.p, cfg.d, cfg.s)
            return SampleResult(design, attempt + 1, cert, log)
        log.append({"attempt": attempt, "property": bad.property, "witness": bad.to_dict()["witness"]})
    raise SamplingError(f"no verified design in {cfg.max_attempts} attempts", log)


def failure_fraction(cfg: SamplerConfig, draws: int) -> tuple[float, list[int]]:
    """Fraction of the first ``draws`` attempts that fail verification."""
    failed = [a for a in range(draws) if check_draw(draw_matrix(cfg, a), cfg) is not None]
    return len(failed) / draws, failed


@dataclass(frozen=True)
class ReductionMap:
    """Injection (i, a) -> i*q + a from [m] x GF(q) onto the pools (0-indexed)."""

    m: int
    q: int

    def __call__(self, i: int, a: int) -> int:
        if not (0 <= i < self.m and 0 <= a < self.q):
            raise DomainError(f"({i}, {a}) outside [m] x [q]")
        return i * self.q + a

    def inverse(self, pool: int) -> tuple[int, int]:
        return divmod(pool, self.q)


def code_to_design(code: LinearCode, d: int) -> Design:
    f = ReductionMap(code.m, code.q)
    words = code.codewords()
    cols = tuple(sum(1 << f(i, int(a)) for i, a in enumerate(w)) for w in words)
    return Design(code.m * code.q, len(cols), cols, {"d": d, "p": 1, "s": d * code.m})


def _explicit_k(q: int, m: int, target: int, d: int) -> list[int]:
    """Candidate dimensions, largest first, within the codeword and check caps."""
    out = []
    for k in range(m - target + 1, 0, -1):  # Singleton: k <= m - D + 1
        n = q**k
        if n > CODEWORD_CAP or n * comb(n - 1, d) > EXPLICIT_CHECK_CAP:
            continue
        out.append(k)
    return out


def build_explicit(d: int, q: int, m: int, *, k: int | None = None, code: LinearCode | None = None) -> Design:
    """m-uniform d-cover-free design from an [m, k, ceil(d m/(d+1))]_q code.

    Column j is {f(i, c_j[i])}.  With ``k`` unset the largest dimension whose
    design is still exhaustively checkable is tried first.
    """
    if d < 1 or m < 1:
        raise DomainError("need d, m >= 1")
    field_make(q)  # rejects non prime powers
    if q < 2 * d + 2:
        raise DomainError(f"need q >= 2d+2 = {2 * d + 2}, got q={q}")
    delta = Fraction(d, d + 1)
    target = distance_target(m, delta)
    if code is None:
        ks = [k] if k is not None else _explicit_k(q, m, target, d)
        if not ks:
            raise DomainError(f"no dimension fits the check caps for q={q} m={m} d={d}")
        err = None
        for kk in ks:
            try:
                code = construct_code(q, m, kk, min_dist=target)
                break
            except ConstructionError as e:
                err = e
        if code is None:
            raise err
    elif code.q != q or code.m != m or code.min_dist < target:
        raise DomainError(f"code must be over GF({q}), length {m}, distance >= {target}")
    design = code_to_design(code, d)
    lam = m - target
    meta = dict(design.meta, lam=lam, k=code.k)
    design = Design(design.t, design.n, design.columns, meta)
    # re-verify everything the reduction promises
    if any(popcount(c) != m for c in design.columns):
        raise verify.VerificationError("a column does not have weight m")
    worst, pair = verify.max_pairwise_intersection(design)
    if worst > lam:
        raise verify.VerificationError(f"columns {pair} intersect in {worst} > {lam}")
    verify.certify(design, 1, d, d * m)
    if not union_floor_check(design, d, lam).holds:
        raise verify.VerificationError("union floor violated")
    return design


def union_floor_check(design: Design, d: int, lam: int, *, sample=False, seed=0,
                      cap=verify.WORK_CAP) -> verify.PropertyReport:
    """Every d-union has size >= sum of member sizes - C(d,2) lam."""
    worst, pair = verify.max_pairwise_intersection(design)
    if worst > lam:
        raise DomainError(f"pairwise intersection precondition fails: columns {pair[0] + 1},{pair[1] + 1} share {worst} > {lam}")
    k = min(d, design.n)
    cols = design.columns
    params = {"d": d, "lam": lam}
    it, total, sampled = verify._subsets(design.n, k, "union-floor", sample, seed, cap)
    work = 0
    for S in it:
        work += 1
        u = verify._union(cols, S)
        floor = sum(popcount(cols[j]) for j in S) - comb(len(S), 2) * lam
        if popcount(u) < floor:
            return verify._finish("union-floor", params, work, total, sampled, {"members": list(S)})
    return verify._finish("union-floor", params, work, total, sampled)
