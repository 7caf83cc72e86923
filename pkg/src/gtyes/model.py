"""Core domain types: designs, defective sets, response vectors, transcripts.

Items and pools are 0-indexed everywhere in the Python API.  The text format
and every JSON report use 1-indexed items, matching ``[n]`` and ``[t]``.

A column is a Python ``int`` used as a bit-vector: bit ``i`` set means the
item belongs to pool ``i``.  Ints give word-parallel OR/AND/popcount for free.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class DomainError(ValueError):
    """An argument is outside the domain of the operation."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def covers(u: int, v: int) -> bool:
    """True when every 1 of ``v`` is a 1 of ``u``."""
    return v & ~u == 0


@dataclass(frozen=True)
class Design:
    """A t x n binary incidence matrix stored column-wise.

    ``meta`` carries the declared parameters (any of ``d``, ``p``, ``s``).
    """

    t: int
    n: int
    columns: tuple[int, ...]
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.t < 1 or self.n < 1:
            raise DomainError(f"design needs t >= 1 and n >= 1, got t={self.t} n={self.n}")
        if len(self.columns) != self.n:
            raise DomainError(f"expected {self.n} columns, got {len(self.columns)}")
        limit = 1 << self.t
        for j, c in enumerate(self.columns):
            if c < 0 or c >= limit:
                raise DomainError(f"column {j + 1} does not fit in {self.t} bits")

    @classmethod
    def from_columns(cls, cols: Sequence[str | Iterable[int]], t: int | None = None, **meta) -> "Design":
        """Build from column strings like ``"110"`` or from pool-index sets.

        For strings, character ``i`` is pool ``i``.  Sets need ``t``.
        """
        packed = []
        for c in cols:
            if isinstance(c, str):
                if t is None:
                    t = len(c)
                if len(c) != t or set(c) - {"0", "1"}:
                    raise DomainError(f"bad column string {c!r}")
                packed.append(sum(1 << i for i, ch in enumerate(c) if ch == "1"))
            else:
                if t is None:
                    raise DomainError("t is required for set-valued columns")
                packed.append(sum(1 << i for i in set(c)))
        return cls(t, len(packed), tuple(packed), dict(meta))

    @classmethod
    def from_rows(cls, rows: Sequence[str], **meta) -> "Design":
        if not rows:
            raise DomainError("no rows")
        n = len(rows[0])
        cols = [0] * n
        for i, row in enumerate(rows):
            if len(row) != n or set(row) - {"0", "1"}:
                raise DomainError(f"bad row {i + 1}: {row!r}")
            for j, ch in enumerate(row):
                if ch == "1":
                    cols[j] |= 1 << i
        return cls(len(rows), n, tuple(cols), dict(meta))

    @classmethod
    def from_matrix(cls, matrix, **meta) -> "Design":
        """From a t x n array-like of 0/1 entries."""
        rows = ["".join("1" if x else "0" for x in row) for row in matrix]
        return cls.from_rows(rows, **meta)

    @classmethod
    def identity(cls, n: int, **meta) -> "Design":
        return cls(n, n, tuple(1 << j for j in range(n)), dict(meta))

    def column_str(self, j: int) -> str:
        c = self.columns[j]
        return "".join("1" if c >> i & 1 else "0" for i in range(self.t))

    def column_set(self, j: int) -> frozenset[int]:
        c = self.columns[j]
        return frozenset(i for i in range(self.t) if c >> i & 1)

    def pool(self, i: int) -> frozenset[int]:
        """Items in pool ``i`` (the set T_i)."""
        return frozenset(j for j, c in enumerate(self.columns) if c >> i & 1)

    def rows(self) -> list[str]:
        return [
            "".join("1" if c >> i & 1 else "0" for c in self.columns)
            for i in range(self.t)
        ]

    def to_text(self) -> str:
        lines = [f"{self.t} {self.n}"]
        if self.meta:
            parts = [f"{k}={self.meta[k]}" for k in ("d", "p", "s") if k in self.meta]
            lines.append("# " + " ".join(parts))
        lines.extend(self.rows())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Design":
        if not text.endswith("\n"):
            raise DomainError("design text must end with a newline")
        lines = text[:-1].split("\n")
        m = re.fullmatch(r"(\d+) (\d+)", lines[0])
        if not m:
            raise DomainError(f"bad header line {lines[0]!r}")
        t, n = int(m.group(1)), int(m.group(2))
        body = lines[1:]
        meta = {}
        if body and body[0].startswith("#"):
            hm = re.fullmatch(r"# ?((?:[dps]=\d+ ?)*)", body[0])
            if not hm:
                raise DomainError(f"bad metadata line {body[0]!r}")
            for part in hm.group(1).split():
                k, v = part.split("=")
                meta[k] = int(v)
            body = body[1:]
        if len(body) != t:
            raise DomainError(f"expected {t} rows, got {len(body)}")
        for i, row in enumerate(body):
            if len(row) != n or not re.fullmatch(r"[01]*", row):
                raise DomainError(f"bad row {i + 1}")
        return cls.from_rows(body, **meta)

    def save(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "Design":
        with open(path, newline="") as fh:
            return cls.from_text(fh.read())


@dataclass(frozen=True)
class DefectiveSet:
    """Hidden defective items (0-indexed)."""

    members: frozenset[int] = frozenset()

    def __init__(self, members: Iterable[int] = ()):
        object.__setattr__(self, "members", frozenset(members))

    @classmethod
    def from_external(cls, items: Iterable[int]) -> "DefectiveSet":
        """From 1-indexed item labels."""
        return cls(i - 1 for i in items)

    def external(self) -> list[int]:
        return [i + 1 for i in sorted(self.members)]

    def check(self, n: int) -> None:
        for j in self.members:
            if not 0 <= j < n:
                raise DomainError(f"item {j + 1} outside [1..{n}]")

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    def __contains__(self, j):
        return j in self.members


@dataclass(frozen=True)
class ResponseVector:
    bits: int
    t: int

    @classmethod
    def from_str(cls, s: str) -> "ResponseVector":
        if set(s) - {"0", "1"}:
            raise DomainError(f"bad response string {s!r}")
        return cls(sum(1 << i for i, ch in enumerate(s) if ch == "1"), len(s))

    @property
    def weight(self) -> int:
        return popcount(self.bits)

    def __str__(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.t))


@dataclass
class Transcript:
    """Ordered (pool, response) record with running counters."""

    steps: list[tuple[frozenset[int], bool]] = field(default_factory=list)
    tests: int = 0
    yeses: int = 0

    def record(self, pool: Iterable[int], response: bool) -> None:
        self.steps.append((frozenset(pool), bool(response)))
        self.tests += 1
        self.yeses += bool(response)


def _union(design: Design, members: Iterable[int]) -> int:
    u = 0
    for j in members:
        if not 0 <= j < design.n:
            raise DomainError(f"item {j + 1} outside [1..{design.n}]")
        u |= design.columns[j]
    return u


def respond(design: Design, defectives: DefectiveSet | Iterable[int]) -> ResponseVector:
    """OR of the defective columns: bit i is set iff pool i holds a defective."""
    members = defectives.members if isinstance(defectives, DefectiveSet) else defectives
    return ResponseVector(_union(design, members), design.t)


def yes_count(design: Design, defectives: DefectiveSet | Iterable[int]) -> int:
    return respond(design, defectives).weight
