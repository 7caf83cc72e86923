"""Closed-form evaluators for the yes-response and family-size bounds.

All logarithms are base 2.  Binomial cases use exact integers.  When an
expression degenerates (a log argument <= 1 in a denominator, say), upper
bounds evaluate to ``+inf`` and lower-bound terms to ``-inf``; the evaluators
never raise for that.

Theorems whose case split depends on the yes budget itself (y, y~, y^) pick
the case from the caller-supplied ``y``.  Without ``y`` both branch values are
reported and ``value`` is the one that holds in either case (the larger branch
for an upper bound, the smaller for a lower bound).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from math import comb, e, log2

from gtyes.model import DomainError

INF = math.inf

THEOREMS = (
    "min-yes-exact",
    "adaptive-lower",
    "adaptive-upper",
    "cff-pd-size-upper",
    "cff-size-upper",
    "sep-size-upper",
    "nonadaptive-lower",
    "cff-pd-exists",
    "cff-exists",
    "nonadaptive-upper",
    "twostage-upper",
    "twostage-upper-pd",
)


@dataclass(frozen=True)
class BoundQuery:
    n: int
    d: int
    t: int
    y: float | None = None
    p: int | None = None
    s: int | None = None

    def __post_init__(self):
        if not self.n >= self.d >= 1:
            raise DomainError(f"need n >= d >= 1, got n={self.n} d={self.d}")
        if self.t < 1:
            raise DomainError(f"need t >= 1, got t={self.t}")
        if self.s is not None and not 1 <= self.s <= self.t:
            raise DomainError(f"need 1 <= s <= t, got s={self.s}")
        if self.p is not None and self.p < 1:
            raise DomainError(f"need p >= 1, got p={self.p}")
        if self.y is not None and not 0 <= self.y <= self.t:
            raise DomainError(f"need 0 <= y <= t, got y={self.y}")


@dataclass(frozen=True)
class BoundReport:
    theorem_id: str
    value: float
    case_taken: str
    inputs: BoundQuery
    branches: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["inputs"] = {k: v for k, v in out["inputs"].items() if v is not None}
        return out


def _need(q: BoundQuery, *names: str) -> None:
    missing = [k for k in names if getattr(q, k) is None]
    if missing:
        raise DomainError(f"query is missing {', '.join(missing)}")


def _div(num: float, den: float, degenerate: float = INF) -> float:
    if not den > 0:
        return degenerate
    return num / den


def _log2(x: float) -> float:
    return log2(x) if x > 0 else -INF


def ceil_log2(x: int) -> int:
    """Exact ceil(log2 x) for a positive integer."""
    if x < 1:
        raise DomainError("ceil_log2 needs x >= 1")
    return (x - 1).bit_length()


# entropy -----------------------------------------------------------------

def binary_entropy(x: float) -> float:
    if not 0 < x < 1:
        raise DomainError(f"binary entropy needs 0 < x < 1, got {x}")
    return -x * log2(x) - (1 - x) * log2(1 - x)


def entropy_upper_bound(a: int, b: int) -> float:
    """(a/b) log(e b / a), which dominates H(a/b)."""
    if not 0 < a < b:
        raise DomainError(f"need 0 < a < b, got a={a} b={b}")
    return a / b * log2(e * b / a)


# adaptive ----------------------------------------------------------------

def min_yes_exact(n: int, d: int, t: int) -> int | None:
    """Smallest y with sum_{i<=y} C(t, i) >= C(n, d); None if infeasible."""
    BoundQuery(n, d, t)
    target = comb(n, d)
    acc = 0
    for y in range(t + 1):
        acc += comb(t, y)
        if acc >= target:
            return y
    return None


def _report_min_yes(q: BoundQuery) -> BoundReport:
    y = min_yes_exact(q.n, q.d, q.t)
    if y is None:
        return BoundReport("min-yes-exact", INF, "infeasible: 2^t < C(n,d)", q)
    return BoundReport("min-yes-exact", y, "feasible", q)


def adaptive_yes_lower(q: BoundQuery) -> BoundReport:
    """max{d, d log(n/d) / log alpha}, alpha = 4 (y > t/2) or e t / y (y <= t/2).

    The branch ``alpha-closed`` uses the y-free bound on alpha,
    e t log(e t / d) / (d log(n/d)), in the y <= t/2 case.
    """
    n, d, t = q.n, q.d, q.t
    info = d * log2(n / d)

    def term(alpha):
        return max(d, _div(info, _log2(alpha), -INF)) if info > 0 else float(d)

    closed_alpha = _div(e * t * log2(e * t / d), info)
    branches = {"y>t/2": term(4.0), "alpha-closed": term(closed_alpha)}
    if q.y is None:
        return BoundReport("adaptive-lower", min(branches.values()), "unresolved", q, branches)
    if q.y > t / 2:
        return BoundReport("adaptive-lower", branches["y>t/2"], "y>t/2", q, branches)
    alpha = e * t / q.y if q.y > 0 else INF
    branches["y<=t/2"] = term(alpha)
    return BoundReport("adaptive-lower", branches["y<=t/2"], "y<=t/2", q, branches)


def adaptive_yes_upper(q: BoundQuery) -> BoundReport:
    """d (t >= n); ceil(log C(n,d)) + d (y > t/3); d log(n/d) / log gamma (y <= t/3).

    gamma = (t+1)/y - 1.  Branch ``gamma-closed`` uses the y-free lower bound
    (t+1)/(d log(n/d)) - 1 on gamma.
    """
    n, d, t = q.n, q.d, q.t
    if t >= n:
        return BoundReport("adaptive-upper", float(d), "t=n", q)
    info = d * log2(n / d)
    hwang = float(ceil_log2(comb(n, d)) + d)
    gamma_closed = _div(t + 1, info) - 1
    branches = {
        "t<n,y>t/3": hwang,
        "gamma-closed": _div(info, _log2(gamma_closed)),
    }
    if q.y is None:
        return BoundReport("adaptive-upper", max(branches.values()), "unresolved", q, branches)
    if q.y > t / 3:
        return BoundReport("adaptive-upper", hwang, "t<n,y>t/3", q, branches)
    gamma = (t + 1) / q.y - 1 if q.y > 0 else INF
    branches["t<n,y<=t/3"] = _div(info, _log2(gamma))
    return BoundReport("adaptive-upper", branches["t<n,y<=t/3"], "t<n,y<=t/3", q, branches)


# family sizes ------------------------------------------------------------

def cff_pd_size_upper(q: BoundQuery) -> BoundReport:
    """Upper bound on the size of a union-bounded (p,d)-cover-free family."""
    _need(q, "s")
    d, t, s = q.d, q.t, q.s
    p = q.p if q.p is not None else 1
    if d == 1 and p == 1:
        if t < 2 * s:
            return BoundReport("cff-pd-size-upper", comb(t, -(-t // 2)), "d=1,p=1,t<2s", q)
        return BoundReport("cff-pd-size-upper", comb(t, s), "d=1,p=1,t>=2s", q)
    if d < 2 * p:
        if t < 2 * s:
            return BoundReport("cff-pd-size-upper", (p + d - 1) * 2.0 ** (t / d), "d<2p,t<2s", q)
        v = (p + d - 1) * (e * t / s) ** (s / d)
        return BoundReport("cff-pd-size-upper", v, "d<2p,t>=2s", q)
    r = d // (2 * p)
    expo = -(-s // (p * r * r + r))
    v = p * (e * t * d * (d + 2) / (4 * p * s)) ** expo + d / 2 + 2 * p - 2
    return BoundReport("cff-pd-size-upper", v, "d>=2p", q)


def cff_size_upper(q: BoundQuery) -> BoundReport:
    """The p = 1 specialisation, written out from its own statement."""
    _need(q, "s")
    d, t, s = q.d, q.t, q.s
    if d == 1:
        if t < 2 * s:
            return BoundReport("cff-size-upper", comb(t, -(-t // 2)), "d=1,t<2s", q)
        return BoundReport("cff-size-upper", comb(t, s), "d=1,t>=2s", q)
    h = d // 2
    v = (e * t * d * (d + 2) / (4 * s)) ** (-(-s // (h * h + h))) + d / 2
    return BoundReport("cff-size-upper", v, "d>=2", q)


def sep_size_upper(q: BoundQuery) -> BoundReport:
    """Upper bound on the size of a union-bounded d-separable family."""
    _need(q, "s")
    d, t, s = q.d, q.t, q.s
    if d == 1:
        if t < 2 * s:
            return BoundReport("sep-size-upper", 2 ** (2 * s - 1), "d=1,t<2s", q)
        return BoundReport("sep-size-upper", 2.0 ** (s * log2(e * t / s)), "d=1,t>=2s", q)
    if d == 2:
        if t < 2 * s:
            return BoundReport("sep-size-upper", 2.0 ** ((t + 1) / 2) + 1, "d=2,t<2s", q)
        v = 2.0 ** (s / 2 * log2(e * t / s) + 0.5) + 1
        return BoundReport("sep-size-upper", v, "d=2,t>=2s", q)
    h = (d - 1) // 2
    v = (e * t * (d * d - 1) / (4 * s)) ** (-(-s // (h * h + h))) + (d - 1) / 2
    return BoundReport("sep-size-upper", v, "d>=3", q)


def nonadaptive_yes_lower(q: BoundQuery) -> BoundReport:
    """max{d, beta}; in the y~ <= t/2 cases the y~-free right-hand forms are used."""
    n, d, t = q.n, q.d, q.t
    et = e * t
    if d == 1:
        ln = _log2(n)
        hi = _log2(n + 1) / 2
        lo = _div(ln, _log2(_div(et * log2(et), ln)), -INF) if n > 1 else -INF
    elif d == 2:
        hi = _log2(n - 1)
        a = 2 * _log2(n - 1) - 1
        lo = _div(a, _log2(_div(et * log2(et / 2), a)), -INF) if a > 0 else -INF
    else:
        h = (d - 1) // 2
        w = h * h + h
        lg = _log2(n - d / 2 + 0.5)
        lc = log2(et * d / 4)
        hi = w * (_div(lg, _log2(e * (d - 1) ** 2 / 2), -INF) - 1)
        eta = _div(2 * et * lc, lg - lc)
        lo = w * (_div(lg, _log2(eta), -INF) - 1) if eta != INF else -INF
    branches = {"y>t/2": max(d, hi), "y<=t/2": max(d, lo)}
    if q.y is None:
        return BoundReport("nonadaptive-lower", min(branches.values()), "unresolved", q, branches)
    case = "y>t/2" if q.y > t / 2 else "y<=t/2"
    return BoundReport("nonadaptive-lower", branches[case], f"d={min(d, 3)}{'+' if d >= 3 else ''},{case}", q, branches)


def _exists_exponent_base(d: int, p: int, s_term: float) -> float:
    return (p / (d * (d + p))) * (s_term - d * log2(e * (d + p) / p) - d / p)


def cff_pd_exists(q: BoundQuery) -> BoundReport:
    """Size attainable by a union-bounded (p,d)-cover-free family (probabilistic method)."""
    _need(q, "s")
    d, t, s = q.d, q.t, q.s
    p = q.p if q.p is not None else 1
    if t < 2 * s:
        v = (p + d) / e * 2.0 ** _exists_exponent_base(d, p, s)
        return BoundReport("cff-pd-exists", v, "t<2s", q)
    v = (p + d) / e * 2.0 ** _exists_exponent_base(d, p, s * log2(e * t / s))
    return BoundReport("cff-pd-exists", v, "t>=2s", q)


def cff_exists(q: BoundQuery) -> BoundReport:
    """The p = 1 existence statement, written out from its own formula."""
    _need(q, "s")
    d, t, s = q.d, q.t, q.s
    lead = s if t < 2 * s else s * log2(e * t / s)
    v = (d + 1) / e * 2.0 ** ((lead - d * log2(e * (d + 1)) - d) / (d * (d + 1)))
    return BoundReport("cff-exists", v, "t<2s" if t < 2 * s else "t>=2s", q)


def nonadaptive_yes_upper(q: BoundQuery) -> BoundReport:
    """Yes budget attainable non-adaptively.

    The y~-free form divides by log2 of
    e t log(2e) / (d(d+1)(log(en/(d+1)) + log(2 sqrt e))), the quantity the
    derivation produces after substituting y~ <= t/2.
    """
    n, d, t = q.n, q.d, q.t
    core = log2(e * n / (d + 1))
    hi = d * (d + 1) * core + d * log2(e * (d + 1)) + d
    tail = core + (log2(e * (d + 1)) + 1) / (d + 1)
    mu_arg = e * t * log2(2 * e) / (d * (d + 1) * (core + log2(2 * math.sqrt(e))))
    closed = _div(d * (d + 1) * tail, _log2(mu_arg))
    branches = {"t<2y": hi, "mu-closed": closed}
    if q.y is None:
        return BoundReport("nonadaptive-upper", max(branches.values()), "unresolved", q, branches)
    if t < 2 * q.y:
        return BoundReport("nonadaptive-upper", hi, "t<2y", q, branches)
    branches["t>=2y"] = _div(d * (d + 1) * tail, _log2(e * t / q.y)) if q.y > 0 else 0.0
    return BoundReport("nonadaptive-upper", branches["t>=2y"], "t>=2y", q, branches)


def _twostage_check(n, d, t, p):
    if t < d + p or n < d + p:
        raise DomainError(f"two-stage bound needs t, n >= d + p (d={d}, p={p}, t={t}, n={n})")


def twostage_yes_upper(q: BoundQuery) -> BoundReport:
    """Yes budget of the trivial two-stage strategy built on a (p,d)-CFF."""
    n, d, t = q.n, q.d, q.t
    p = q.p if q.p is not None else d
    _twostage_check(n, d, t, p)
    dp = d + p
    a = d * dp / p * log2(e * n / dp) + d * log2(e * dp / p) + d / p
    t1 = t - d - p + 1
    chi = e * t1 * log2(2 * e) / (d * dp / p * (log2(e * n / dp) + log2(e * math.sqrt(2))))
    branches = {"y>(t+d-p+1)/2": a + d, "chi-closed": _div(a, _log2(chi)) + d}
    if q.y is None:
        return BoundReport("twostage-upper", max(branches.values()), "unresolved", q, branches)
    if q.y > (t + d - p + 1) / 2:
        return BoundReport("twostage-upper", a + d, "y>(t+d-p+1)/2", q, branches)
    arg = e * t1 / (q.y - d) if q.y > d else INF
    branches["y<=(t+d-p+1)/2"] = _div(a, _log2(arg)) + d
    return BoundReport("twostage-upper", branches["y<=(t+d-p+1)/2"], "y<=(t+d-p+1)/2", q, branches)


def twostage_yes_upper_pd(q: BoundQuery) -> BoundReport:
    """The p = d corollary, written out from its own statement."""
    n, d, t = q.n, q.d, q.t
    _twostage_check(n, d, t, d)
    a = 2 * d * log2(e * n / (2 * d)) + d * log2(2 * e) + 1
    chi = e * (t - 2 * d + 1) * log2(2 * e) / (2 * d * (log2(e * n / (2 * d)) + log2(e * math.sqrt(2))))
    branches = {"y>t/2": a + d, "chi-closed": _div(a, _log2(chi)) + d}
    if q.y is None:
        return BoundReport("twostage-upper-pd", max(branches.values()), "unresolved", q, branches)
    if q.y > t / 2:
        return BoundReport("twostage-upper-pd", a + d, "y>t/2", q, branches)
    arg = e * (t - 2 * d + 1) / (q.y - d) if q.y > d else INF
    branches["y<=t/2"] = _div(a, _log2(arg)) + d
    return BoundReport("twostage-upper-pd", branches["y<=t/2"], "y<=t/2", q, branches)


EVALUATORS = {
    "min-yes-exact": _report_min_yes,
    "adaptive-lower": adaptive_yes_lower,
    "adaptive-upper": adaptive_yes_upper,
    "cff-pd-size-upper": cff_pd_size_upper,
    "cff-size-upper": cff_size_upper,
    "sep-size-upper": sep_size_upper,
    "nonadaptive-lower": nonadaptive_yes_lower,
    "cff-pd-exists": cff_pd_exists,
    "cff-exists": cff_exists,
    "nonadaptive-upper": nonadaptive_yes_upper,
    "twostage-upper": twostage_yes_upper,
    "twostage-upper-pd": twostage_yes_upper_pd,
}


def evaluate(theorem_id: str, q: BoundQuery) -> BoundReport:
    try:
        fn = EVALUATORS[theorem_id]
    except KeyError:
        raise DomainError(f"unknown theorem {theorem_id!r}; choose from {', '.join(THEOREMS)}") from None
    return fn(q)
