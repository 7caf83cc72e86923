"""Exact verifiers for the combinatorial properties of pooling designs.

Every check enumerates column subsets in colexicographic order and stops at
the first violation, so witnesses are deterministic.  Columns are int
bitsets; union and cover tests are single big-int operations.

Above ``WORK_CAP`` subsets a check refuses unless sampling is requested, in
which case it examines seeded random subsets and labels a clean result
``probable``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator

from gtyes.model import Design, DomainError, covers, popcount
from gtyes.rng import Stream

WORK_CAP = 10**6


class VerificationError(DomainError):
    """A design failed a property it was required to have."""

    def __init__(self, msg: str, report: "PropertyReport | None" = None):
        super().__init__(msg)
        self.report = report


@dataclass
class PropertyReport:
    property: str
    holds: bool
    witness: dict | None = None
    work: int = 0
    probable: bool = False
    coverage: float = 1.0
    params: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        """JSON form; witness item indices are 1-indexed."""
        wit = None
        if self.witness is not None:
            wit = {k: [i + 1 for i in v] for k, v in self.witness.items()}
        return {
            "property": self.property,
            "holds": self.holds,
            "witness": wit,
            "work": self.work,
            "probable": self.probable,
            "coverage": self.coverage,
            "params": self.params,
        }


def colex(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """k-subsets of range(n) in colexicographic order."""
    if k == 0:
        yield ()
        return
    if k > n:
        return
    c = list(range(k))
    while True:
        yield tuple(c)
        j = 0
        while j < k - 1 and c[j] + 1 == c[j + 1]:
            j += 1
        if j == k - 1 and c[j] + 1 == n:
            return
        c[j] += 1
        for i in range(j):
            c[i] = i


def _random_subsets(n: int, k: int, seed: int, count: int) -> Iterator[tuple[int, ...]]:
    rng = Stream(seed)
    for _ in range(count):
        yield tuple(rng.sample(n, k))


def _subsets(n: int, k: int, prop: str, sample: bool, seed: int, cap: int):
    """(iterator, total, sampled) honoring the work cap."""
    total = comb(n, k)
    if total <= cap:
        return colex(n, k), total, False
    if not sample:
        raise DomainError(f"{prop}: {total} subsets exceed the work cap {cap}; pass sample=True")
    return _random_subsets(n, k, seed, cap), total, True


def _union(cols, idx) -> int:
    u = 0
    for j in idx:
        u |= cols[j]
    return u


def _finish(prop, params, work, total, sampled, witness=None) -> PropertyReport:
    return PropertyReport(
        prop,
        holds=witness is None,
        witness=witness,
        work=work,
        probable=sampled and witness is None,
        coverage=min(1.0, work / total) if total else 1.0,
        params=params,
    )


def is_union_bounded(design: Design, d: int, s: int, *, sample=False, seed=0, cap=WORK_CAP) -> PropertyReport:
    """Every union of at most d columns has weight at most s."""
    if d < 1:
        raise DomainError("d must be >= 1")
    k = min(d, design.n)
    cols = design.columns
    it, total, sampled = _subsets(design.n, k, "union-bounded", sample, seed, cap)
    work = 0
    for S in it:
        work += 1
        if popcount(_union(cols, S)) > s:
            return _finish("union-bounded", {"d": d, "s": s}, work, total, sampled, {"members": list(S)})
    return _finish("union-bounded", {"d": d, "s": s}, work, total, sampled)


def is_pd_cover_free(design: Design, p: int, d: int, *, sample=False, seed=0, cap=WORK_CAP) -> PropertyReport:
    """No union of p columns is covered by the union of d other columns.

    For each d-set S the outsiders covered by OR(S) are counted; p or more
    of them form a violation.  The witness is the first p covered outsiders
    (``p_set``) and S (``d_set``).
    """
    if p < 1 or d < 1:
        raise DomainError("p and d must be >= 1")
    name = "cover-free" if p == 1 else "pd-cover-free"
    params = {"p": p, "d": d}
    n = design.n
    if n < p:
        return _finish(name, params, 0, 0, False)
    k = min(d, n - p)  # with no others left, S is empty and only zero columns are covered
    cols = design.columns
    it, total, sampled = _subsets(n, k, name, sample, seed, cap)
    work = 0
    for S in it:
        work += 1
        u = _union(cols, S)
        inside = set(S)
        hit = []
        for j in range(n):
            if j not in inside and covers(u, cols[j]):
                hit.append(j)
                if len(hit) == p:
                    return _finish(name, params, work, total, sampled, {"p_set": hit, "d_set": list(S)})
    return _finish(name, params, work, total, sampled)


def is_cover_free(design: Design, d: int, **kw) -> PropertyReport:
    return is_pd_cover_free(design, 1, d, **kw)


def is_separable(design: Design, d: int, *, sample=False, seed=0, cap=WORK_CAP) -> PropertyReport:
    """Unions of all subsets of size <= d are pairwise distinct.

    The sampled variant draws random pairs of subsets of size <= d.
    """
    if d < 0:
        raise DomainError("d must be >= 0")
    n, cols = design.n, design.columns
    params = {"d": d}
    total = sum(comb(n, i) for i in range(min(d, n) + 1))
    if total <= cap:
        seen: dict[int, tuple[int, ...]] = {}
        work = 0
        for size in range(min(d, n) + 1):
            for S in colex(n, size):
                work += 1
                u = _union(cols, S)
                other = seen.get(u)
                if other is not None:
                    return _finish("separable", params, work, total, False, {"first": list(other), "second": list(S)})
                seen[u] = S
        return _finish("separable", params, work, total, False)
    if not sample:
        raise DomainError(f"separable: {total} subsets exceed the work cap {cap}; pass sample=True")
    rng = Stream(seed)
    seen = {}
    work = 0
    for _ in range(cap):
        S = tuple(rng.sample(n, rng.randbelow(min(d, n) + 1)))
        work += 1
        u = _union(cols, S)
        other = seen.get(u)
        if other is not None and other != S:
            return _finish("separable", params, work, total, True, {"first": list(other), "second": list(S)})
        seen[u] = S
    return _finish("separable", params, work, total, True)


def max_pairwise_intersection(design: Design) -> tuple[int, tuple[int, int] | None]:
    """Largest |c_i & c_j| over pairs, with the first pair attaining it."""
    best, pair = -1, None
    cols = design.columns
    for i, j in colex(design.n, 2):
        w = popcount(cols[i] & cols[j])
        if w > best:
            best, pair = w, (i, j)
    return max(best, 0), pair


def replay(design: Design, report: PropertyReport) -> bool:
    """Re-check that a false report's witness really is a violation."""
    from gtyes.model import respond

    w = report.witness
    if w is None:
        return False
    prop = report.property
    if prop == "union-bounded":
        return respond(design, w["members"]).weight > report.params["s"]
    if prop in ("cover-free", "pd-cover-free"):
        if set(w["p_set"]) & set(w["d_set"]) or len(w["p_set"]) != report.params["p"]:
            return False
        return covers(respond(design, w["d_set"]).bits, respond(design, w["p_set"]).bits)
    if prop == "separable":
        return set(w["first"]) != set(w["second"]) and respond(design, w["first"]) == respond(design, w["second"])
    raise DomainError(f"unknown property {prop!r}")


def lym_diagnostic(family: Iterable[Iterable[int]], ground: int) -> Fraction:
    """Sum of 1/C(ground, |G|) over a Sperner family; at most 1 by LYM."""
    sets = [frozenset(g) for g in family]
    for a in range(len(sets)):
        for b in range(len(sets)):
            if a != b and sets[a] <= sets[b]:
                raise DomainError(f"not Sperner: member {a + 1} is contained in member {b + 1}")
    return sum((Fraction(1, comb(ground, len(g))) for g in sets), Fraction(0))


PROPERTIES = ("union-bounded", "cover-free", "pd-cover-free", "separable")


def check(design: Design, prop: str, *, p=1, d=1, s=None, **kw) -> PropertyReport:
    if prop == "union-bounded":
        if s is None:
            raise DomainError("union-bounded needs s")
        return is_union_bounded(design, d, s, **kw)
    if prop == "cover-free":
        return is_cover_free(design, d, **kw)
    if prop == "pd-cover-free":
        return is_pd_cover_free(design, p, d, **kw)
    if prop == "separable":
        return is_separable(design, d, **kw)
    raise DomainError(f"unknown property {prop!r}; choose from {PROPERTIES}")


@dataclass(frozen=True)
class Certificate:
    """Proof that a design is a union-bounded (p,d)-cover-free family."""

    design: Design
    p: int
    d: int
    s: int
    reports: tuple[PropertyReport, ...]

    @property
    def exact(self) -> bool:
        return not any(r.probable for r in self.reports)


def certify(design: Design, p: int, d: int, s: int, **kw) -> Certificate:
    """Run the full suite for (p, d, s); raise VerificationError on a failure."""
    reports = (is_pd_cover_free(design, p, d, **kw), is_union_bounded(design, d, s, **kw))
    for r in reports:
        if not r.holds:
            raise VerificationError(f"design is not {r.property} for {r.params}: witness {r.witness}", r)
    return Certificate(design, p, d, s, reports)
