"""Adaptive strategies: individual testing, staged search, generalized binary splitting."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from gtyes.bounds import ceil_log2
from gtyes.model import DefectiveSet, DomainError, Transcript
from gtyes.rng import Stream

EXHAUSTIVE_CAP = 2_000_000


class InfeasibleError(DomainError):
    """No correct strategy exists within the test budget."""


class OracleFault(RuntimeError):
    """A strategy observed responses inconsistent with OR semantics."""


@dataclass
class OracleSession:
    """Answers pool tests about a hidden defective set and records them.

    Budget overruns are flagged, never enforced.
    """

    n: int
    hidden: DefectiveSet
    transcript: Transcript = field(default_factory=Transcript)
    budget: tuple[int | None, int | None] | None = None

    def __post_init__(self):
        if not isinstance(self.hidden, DefectiveSet):
            self.hidden = DefectiveSet(self.hidden)
        self.hidden.check(self.n)

    def test(self, pool: Iterable[int]) -> bool:
        pool = frozenset(pool)
        answer = not pool.isdisjoint(self.hidden.members)
        self.transcript.record(pool, answer)
        return answer

    @property
    def tests(self) -> int:
        return self.transcript.tests

    @property
    def yeses(self) -> int:
        return self.transcript.yeses

    @property
    def overrun(self) -> bool:
        if self.budget is None:
            return False
        t_max, y_max = self.budget
        return (t_max is not None and self.tests > t_max) or (y_max is not None and self.yeses > y_max)


@dataclass(frozen=True)
class StagePlan:
    k: tuple[int, ...]

    def __post_init__(self):
        if not self.k or self.k[-1] != 1:
            raise DomainError("a stage plan must end with group size 1")
        if any(a < b for a, b in zip(self.k, self.k[1:])):
            raise DomainError(f"group sizes must be nonincreasing: {self.k}")

    @property
    def f(self) -> int:
        return len(self.k)


def ceil_root(num: int, den: int, power: int, root: int) -> int:
    """Exact ceil((num/den) ** (power/root)) for positive integers."""
    if power == 0:
        return 1
    a, b = num**power, den**power
    k = max(1, math.ceil((num / den) ** (power / root)) - 1)
    while k**root * b < a:
        k += 1
    while k > 1 and (k - 1) ** root * b >= a:
        k -= 1
    return k


def plan_stages(n: int, d: int, f: int) -> StagePlan:
    """k_i = ceil((n/d)^((f-i)/f)) for i < f, k_f = 1."""
    if not n >= d >= 1 or f < 1:
        raise DomainError(f"need n >= d >= 1 and f >= 1, got n={n} d={d} f={f}")
    k = [ceil_root(n, d, f - i, f) for i in range(1, f)] + [1]
    for i in range(1, len(k)):
        k[i] = min(k[i], k[i - 1])
    return StagePlan(tuple(k))


def staged_test_bound(n: int, d: int, f: int) -> int:
    return f * d * ceil_root(n, d, 1, f) + f * d - 1


def run_individual(session: OracleSession) -> DefectiveSet:
    return DefectiveSet(j for j in range(session.n) if session.test([j]))


def run_staged(session: OracleSession, d: int, plan: StagePlan) -> DefectiveSet:
    """Partition, test each group, keep the positive ones; repeat per stage."""
    space = list(range(session.n))
    for k in plan.k:
        survivors = []
        for start in range(0, len(space), k):
            group = space[start:start + k]
            if session.test(group):
                survivors.extend(group)
        if not survivors and k != plan.k[0] and space:
            raise OracleFault("a positive group split into all-negative groups")
        space = survivors
        if not space:
            break
    return DefectiveSet(space)


def hwang_split_exponent(n_left: int, d_left: int) -> int:
    """alpha = max(0, floor(log2((n' - d' + 1) / d'))), computed exactly."""
    ratio = (n_left - d_left + 1) // d_left
    return max(0, ratio.bit_length() - 1) if ratio >= 1 else 0


def run_hwang(session: OracleSession, d: int) -> DefectiveSet:
    """Generalized binary splitting for up to ``d`` defectives.

    While more than 2d' - 2 items remain, test a group of 2^alpha items; on a
    positive, binary search it with alpha more tests to isolate a defective.
    Items cleared along the way are dropped.  The remainder is tested singly.
    """
    if d < 1:
        raise DomainError("d must be >= 1")
    remaining = list(range(session.n))
    found: list[int] = []
    d_left = d
    while remaining and d_left > 0:
        if len(remaining) <= 2 * d_left - 2:
            found.extend(j for j in remaining if session.test([j]))
            remaining = []
            break
        alpha = hwang_split_exponent(len(remaining), d_left)
        group = remaining[: 1 << alpha]
        if not session.test(group):
            remaining = remaining[len(group):]
            continue
        # group holds a defective; halve until one item is left
        cleared: list[int] = []
        while len(group) > 1:
            half = group[: len(group) // 2]
            if session.test(half):
                group = half
            else:
                cleared.extend(half)
                group = group[len(group) // 2:]
        x = group[0]
        found.append(x)
        drop = set(cleared) | {x}
        remaining = [j for j in remaining if j not in drop]
        d_left -= 1
    return DefectiveSet(found)


@dataclass(frozen=True)
class Strategy:
    kind: str  # "individual" | "staged" | "hwang"
    d: int
    plan: StagePlan | None = None

    @property
    def f(self) -> int | None:
        return self.plan.f if self.plan else None

    def run(self, session: OracleSession) -> DefectiveSet:
        if self.kind == "individual":
            return run_individual(session)
        if self.kind == "staged":
            return run_staged(session, self.d, self.plan)
        if self.kind == "hwang":
            return run_hwang(session, self.d)
        raise DomainError(f"unknown strategy kind {self.kind!r}")

    def describe(self) -> dict:
        out = {"kind": self.kind, "d": self.d}
        if self.plan:
            out["f"] = self.plan.f
            out["k"] = list(self.plan.k)
        return out


def staged(n: int, d: int, f: int) -> Strategy:
    return Strategy("staged", d, plan_stages(n, d, f))


def choose_strategy(n: int, d: int, t: int) -> Strategy:
    """Fewest-yes strategy the test budget allows.

    t >= n: individual testing.  Otherwise the smallest stage count f whose
    test bound fits in t, provided its f*d yeses stay within t/3; failing
    that, generalized binary splitting.
    """
    if not n >= d >= 1:
        raise DomainError(f"need n >= d >= 1, got n={n} d={d}")
    if t < ceil_log2(comb(n, d)):
        raise InfeasibleError(f"t={t} is below ceil(log2 C({n},{d}))")
    if t >= n:
        return Strategy("individual", d)
    for f in range(1, max(2, n.bit_length() + 1)):
        if staged_test_bound(n, d, f) <= t:
            if 3 * f * d <= t:
                return staged(n, d, f)
            break
    return Strategy("hwang", d)


def hidden_sets(n: int, d: int) -> Iterable[tuple[int, ...]]:
    for size in range(d + 1):
        yield from itertools.combinations(range(n), size)


def count_hidden_sets(n: int, d: int) -> int:
    return sum(comb(n, i) for i in range(d + 1))


def sampled_hidden_sets(n: int, d: int, seed: int, trials: int) -> Iterable[tuple[int, ...]]:
    rng = Stream(seed)
    for _ in range(trials):
        size = rng.randbelow(min(d, n) + 1)
        yield tuple(rng.sample(n, size))


@dataclass
class Measurement:
    max_yes: int = 0
    max_tests: int = 0
    instances: int = 0
    wrong: list = field(default_factory=list)
    worst_tests: tuple[int, ...] | None = None

    @property
    def correct(self) -> bool:
        return not self.wrong


def measure_max_yes(
    strategy: Strategy,
    n: int,
    d: int,
    mode: str = "exhaustive",
    *,
    seed: int = 0,
    trials: int = 1000,
    cap: int = EXHAUSTIVE_CAP,
    hidden: Sequence[tuple[int, ...]] | None = None,
    on_instance=None,
) -> Measurement:
    """Run the strategy against every hidden set of size <= d (or a sample).

    ``on_instance(hidden, session, found)`` is called after each run.
    """
    if hidden is None:
        if mode == "exhaustive":
            total = count_hidden_sets(n, d)
            if total > cap:
                raise DomainError(f"{total} hidden sets exceed the exhaustive cap {cap}")
            hidden = hidden_sets(n, d)
        elif mode == "sampled":
            hidden = sampled_hidden_sets(n, d, seed, trials)
        else:
            raise DomainError(f"unknown mode {mode!r}")
    m = Measurement()
    for h in hidden:
        session = OracleSession(n, DefectiveSet(h))
        found = strategy.run(session)
        m.instances += 1
        m.max_yes = max(m.max_yes, session.yeses)
        if session.tests > m.max_tests:
            m.max_tests = session.tests
            m.worst_tests = tuple(h)
        if found.members != session.hidden.members:
            m.wrong.append(tuple(h))
        if on_instance is not None:
            on_instance(h, session, found)
    return m
