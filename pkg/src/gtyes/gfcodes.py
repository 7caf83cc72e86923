"""Finite fields GF(q) and greedy construction of q-ary linear codes.

Field elements are integers 0..q-1.  For q = p^r the integer
``sum c_i p^i`` stands for the polynomial ``sum c_i x^i`` reduced modulo the
Conway polynomial of degree r over GF(p); for prime q this is plain residue
arithmetic.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from gtyes.model import DomainError

MAX_Q = 1 << 16
TABLE_Q = 1024
CODEWORD_CAP = 1 << 20


class ConstructionError(RuntimeError):
    def __init__(self, msg: str, best_distance: int | None = None):
        super().__init__(msg)
        self.best_distance = best_distance


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int) -> tuple[int, int]:
    """(p, r) with q = p^r, or DomainError."""
    if q < 2:
        raise DomainError(f"q={q} is not a prime power")
    f = _factor(q)
    if len(f) != 1:
        raise DomainError(f"q={q} is not a prime power")
    (p, r), = f.items()
    return p, r


# polynomials over GF(p): coefficient lists, lowest degree first -----------

def _pmulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    r = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for i in range(len(prod) - 1, r - 1, -1):
        c = prod[i]
        if c:
            for j in range(r + 1):
                prod[i - r + j] = (prod[i - r + j] - c * mod[j]) % p
    out = prod[:r] + [0] * (r - len(prod))
    return out


def _ppowmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    r = len(mod) - 1
    result = [1] + [0] * (r - 1)
    b = (base + [0] * r)[:r]
    while e:
        if e & 1:
            result = _pmulmod(result, b, mod, p)
        b = _pmulmod(b, b, mod, p)
        e >>= 1
    return result


def _is_primitive(poly: list[int], p: int) -> bool:
    """Whether x has multiplicative order p^r - 1 modulo the monic ``poly``."""
    r = len(poly) - 1
    if poly[0] == 0:
        return False
    order = p**r - 1
    x = [0, 1] + [0] * (r - 2) if r >= 2 else [(-poly[0]) % p]
    one = [1] + [0] * (r - 1)
    if _ppowmod(x, order, poly, p) != one:
        return False
    return all(_ppowmod(x, order // f, poly, p) != one for f in _factor(order))


def _candidates(p: int, r: int):
    """Monic degree-r polynomials in Conway order.

    The polynomial x^r - a_{r-1} x^{r-1} + a_{r-2} x^{r-2} - ... is ranked by
    the word (a_{r-1}, ..., a_0) lexicographically.
    """
    total = p**r
    for code in range(total):
        a = []
        c = code
        for _ in range(r):
            a.append(c % p)
            c //= p
        a.reverse()  # a[0] = a_{r-1}, ..., a[r-1] = a_0
        coeffs = [0] * (r + 1)
        coeffs[r] = 1
        for i in range(r):
            power = r - 1 - i
            sign = -1 if (r - power) % 2 else 1
            coeffs[power] = (sign * a[i]) % p
        yield coeffs


@functools.lru_cache(maxsize=None)
def conway_polynomial(p: int, r: int) -> tuple[int, ...]:
    """Conway polynomial of degree r over GF(p), coefficients lowest first."""
    subs = [m for m in range(1, r) if r % m == 0]
    sub_polys = {m: conway_polynomial(p, m) for m in subs}
    for poly in _candidates(p, r):
        if not _is_primitive(poly, p):
            continue
        ok = True
        for m in subs:
            # x^((p^r-1)/(p^m-1)) must be a root of the degree-m Conway polynomial
            root = _ppowmod([0, 1] if r > 1 else [0], (p**r - 1) // (p**m - 1), poly, p)
            acc = [0] * r
            power = [1] + [0] * (r - 1)
            for c in sub_polys[m]:
                if c:
                    acc = [(u + c * v) % p for u, v in zip(acc, power)]
                power = _pmulmod(power, root, poly, p)
            if any(acc):
                ok = False
                break
        if ok:
            return tuple(poly)
    raise AssertionError(f"no Conway polynomial found for p={p} r={r}")


class Field:
    """GF(q) with log/antilog tables and, for small q, full add/mul tables."""

    def __init__(self, q: int):
        if q > MAX_Q:
            raise DomainError(f"q={q} exceeds {MAX_Q}")
        self.q = q
        self.p, self.degree = prime_power(q)
        self.modulus = conway_polynomial(self.p, self.degree)
        p, r = self.p, self.degree
        # digits[e][i]: i-th coefficient of element e
        idx = np.arange(q)
        self._digits = np.stack([(idx // p**i) % p for i in range(r)], axis=1)
        self._weights = p ** np.arange(r)
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        if r == 1:
            g = (-self.modulus[0]) % p  # the root of x - g is a primitive root
            v = 1
            for k in range(q - 1):
                exp[k] = v
                log[v] = k
                v = v * g % p
        else:
            cur = [1] + [0] * (r - 1)
            xpoly = [0, 1] + [0] * (r - 2)
            for k in range(q - 1):
                e = sum(c * p**i for i, c in enumerate(cur))
                exp[k] = e
                log[e] = k
                cur = _pmulmod(cur, xpoly, list(self.modulus), p)
        exp[q - 1:] = exp[: q - 1]
        self._exp, self._log = exp, log
        self.add_table = self.mul_table = None
        if q <= TABLE_Q:
            a, b = np.meshgrid(idx, idx, indexing="ij")
            self.add_table = self.add_vec(a, b)
            self.mul_table = self.mul_vec(a, b)

    def __repr__(self):
        return f"Field(q={self.q})"

    def add_vec(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        if self.degree == 1:
            return (a + b) % self.p
        s = (self._digits[a] + self._digits[b]) % self.p
        return s @ self._weights

    def mul_vec(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        zero = (a == 0) | (b == 0)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where(zero, 0, out)

    def add(self, a: int, b: int) -> int:
        return int(self.add_vec(a, b))

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_vec(a, b))

    def neg(self, a: int) -> int:
        if self.degree == 1:
            return (-a) % self.p
        return int(((-self._digits[a]) % self.p) @ self._weights)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)])


@functools.lru_cache(maxsize=None)
def field_make(q: int) -> Field:
    return Field(q)


def qary_entropy(q: int, x: float) -> float:
    """H_q(x) = x log_q((q-1)/x) + (1-x) log_q(1/(1-x))."""
    if q < 2 or not 0 < x < 1:
        raise DomainError(f"q-ary entropy needs q >= 2 and 0 < x < 1, got q={q} x={x}")
    return (x * math.log((q - 1) / x) + (1 - x) * math.log(1 / (1 - x))) / math.log(q)


def gv_dimension(q: int, m: int, delta: float) -> int:
    """floor((1 - H_q(delta)) m), the dimension the GV condition guarantees."""
    if not 0 < delta <= 1 - 1 / q:
        raise DomainError(f"delta must lie in (0, 1 - 1/q], got {delta}")
    return max(0, math.floor((1 - qary_entropy(q, delta)) * m + 1e-12))


def distance_target(m: int, delta) -> int:
    """ceil(delta * m), exact for Fractions and tolerant of float noise."""
    if isinstance(delta, Fraction):
        return math.ceil(delta * m)
    return math.ceil(delta * m - 1e-9)


@dataclass(frozen=True)
class LinearCode:
    field: Field
    m: int
    k: int
    generator: tuple[tuple[int, ...], ...]  # k rows of length m
    min_dist: int

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def size(self) -> int:
        return self.field.q**self.k

    def codewords(self) -> np.ndarray:
        return encode_all(self.field, np.array(self.generator, dtype=np.int64).reshape(self.k, self.m))

    def to_text(self) -> str:
        lines = [f"{self.q} {self.m} {self.k} {self.min_dist}"]
        lines += [" ".join(str(x) for x in row) for row in self.generator]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LinearCode":
        lines = text.strip("\n").split("\n")
        q, m, k, dist = (int(x) for x in lines[0].split())
        rows = tuple(tuple(int(x) for x in line.split()) for line in lines[1:1 + k])
        if len(rows) != k or any(len(r) != m for r in rows):
            raise DomainError("generator shape does not match the header")
        fld = field_make(q)
        if any(not 0 <= x < q for r in rows for x in r):
            raise DomainError("generator entry outside the field")
        actual = min_distance(fld, np.array(rows, dtype=np.int64).reshape(k, m))
        if actual != dist:
            raise DomainError(f"declared distance {dist} but code has {actual}")
        return cls(fld, m, k, rows, dist)


def messages(q: int, k: int) -> np.ndarray:
    """All q^k messages as rows of base-q digits, most significant first."""
    idx = np.arange(q**k, dtype=np.int64)
    return np.stack([(idx // q ** (k - 1 - i)) % q for i in range(k)], axis=1) if k else np.zeros((1, 0), np.int64)


def encode_all(fld: Field, gen: np.ndarray) -> np.ndarray:
    k, m = gen.shape
    if fld.q**k > CODEWORD_CAP:
        raise DomainError(f"q^k = {fld.q ** k} exceeds the codeword cap {CODEWORD_CAP}")
    msgs = messages(fld.q, k)
    words = np.zeros((len(msgs), m), dtype=np.int64)
    for i in range(k):
        words = fld.add_vec(words, fld.mul_vec(msgs[:, i:i + 1], gen[i:i + 1, :]))
    return words


def min_distance(fld: Field, gen: np.ndarray) -> int:
    """Minimum weight over all nonzero codewords (= distance, by linearity)."""
    words = encode_all(fld, gen)
    if len(words) <= 1:
        return gen.shape[1]
    return int((words[1:] != 0).sum(axis=1).min())


def _tail_below(m_left: int, q: int, max_extra: int) -> np.ndarray:
    """P[Bin(r, (q-1)/q) < j] for r = 0..m_left, j = 0..max_extra (as table[r, j])."""
    pnz = (q - 1) / q
    table = np.zeros((m_left + 1, max_extra + 1))
    for r in range(m_left + 1):
        pmf = [comb(r, i) * pnz**i * (1 - pnz) ** (r - i) for i in range(r + 1)]
        cdf = np.concatenate([[0.0], np.cumsum(pmf)])
        for j in range(max_extra + 1):
            table[r, j] = cdf[min(j, r + 1)]
    return table


def _greedy_generator(fld: Field, m: int, k: int, target: int) -> np.ndarray:
    """Fix generator entries one at a time by conditional expectations.

    The potential is the expected number of nonzero messages whose codeword
    weight stays below ``target`` when the unfixed entries are uniform.
    Ties go to the smallest field element.
    """
    q = fld.q
    msgs = messages(q, k)[1:]  # nonzero messages
    tail = _tail_below(m, q, target)
    pnz = (q - 1) / q
    weight = np.zeros(len(msgs), dtype=np.int64)
    gen = np.zeros((k, m), dtype=np.int64)
    values = np.arange(q)[None, :]
    for col in range(m):
        r_after = m - col - 1
        partial = np.zeros(len(msgs), dtype=np.int64)
        need = target - weight  # weight still required per message
        p_if_nz = tail[r_after, np.clip(need - 1, 0, target)][:, None]
        p_if_z = tail[r_after, np.clip(need, 0, target)][:, None]
        rnd = pnz * p_if_nz + (1 - pnz) * p_if_z
        for row in range(k):
            free_after = (msgs[:, row + 1:] != 0).any(axis=1)[:, None]
            prods = fld.mul_vec(msgs[:, row:row + 1], values)  # (M, q)
            val = fld.add_vec(partial[:, None], prods)
            det = np.where(val != 0, p_if_nz, p_if_z)
            scores = np.where(free_after, rnd, det).sum(axis=0)
            best = scores.min()
            a = int(np.flatnonzero(scores <= best + 1e-12 * max(1.0, best))[0])
            gen[row, col] = a
            partial = fld.add_vec(partial, prods[:, a])
        weight += partial != 0
    return gen


def _column_search(fld: Field, m: int, k: int, target: int, node_cap: int) -> np.ndarray | None:
    """Depth-first search over multisets of generator columns.

    Column order does not change the distance, so columns are chosen in
    nondecreasing index order.  ``node_cap`` bounds the candidate evaluations.
    """
    q = fld.q
    msgs = messages(q, k)[1:]
    cols = messages(q, k)[1:]  # every nonzero column, as a k-vector
    # contrib[c, u] = 1 if message u has a nonzero symbol in column c
    prods = np.zeros((len(cols), len(msgs)), dtype=np.int64)
    for i in range(k):
        prods = fld.add_vec(prods, fld.mul_vec(cols[:, i:i + 1], msgs[None, :, i]))
    contrib = (prods != 0).astype(np.int64)
    nodes = 0
    chosen: list[int] = []

    def dfs(weight: np.ndarray, col: int, start: int) -> bool:
        nonlocal nodes
        if col == m:
            return bool((weight >= target).all())
        for c in range(start, len(cols)):
            nodes += 1
            if nodes > node_cap:
                return False
            w = weight + contrib[c]
            if (w + (m - col - 1) < target).any():
                continue
            chosen.append(c)
            if dfs(w, col + 1, c):
                return True
            chosen.pop()
        return False

    if dfs(np.zeros(len(msgs), dtype=np.int64), 0, 0):
        return cols[chosen].T.copy()
    return None


def construct_code(q: int, m: int, k: int, delta=None, *, min_dist: int | None = None,
                   search: bool = True, node_cap: int = 20_000) -> LinearCode:
    """Deterministic [m, k, >= ceil(delta m)]_q code.

    Greedy conditional expectations first; if that misses the target and
    ``search`` is set, a bounded depth-first column search.  The distance is
    verified by enumerating every codeword before returning.
    """
    fld = field_make(q)
    if k < 1 or m < 1:
        raise DomainError("need m, k >= 1")
    if fld.q**k > CODEWORD_CAP:
        raise DomainError(f"q^k = {q ** k} exceeds the codeword cap {CODEWORD_CAP}")
    if min_dist is None:
        if delta is None:
            raise DomainError("give delta or min_dist")
        min_dist = distance_target(m, delta)
    if not 1 <= min_dist <= m:
        raise DomainError(f"distance target {min_dist} outside [1, {m}]")
    gen = _greedy_generator(fld, m, k, min_dist)
    dist = min_distance(fld, gen)
    best = dist
    if dist < min_dist and search and min_dist <= m - k + 1:
        found = _column_search(fld, m, k, min_dist, node_cap)
        if found is not None:
            gen, dist = found, min_distance(fld, found)
    if dist < min_dist:
        raise ConstructionError(
            f"no [{m},{k},{min_dist}]_{q} code found (best distance {best})", best_distance=best)
    return LinearCode(fld, m, k, tuple(tuple(int(x) for x in row) for row in gen), dist)
