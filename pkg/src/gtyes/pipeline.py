"""Non-adaptive decoding and the trivial two-stage strategy."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from gtyes.adaptive import OracleSession
from gtyes.model import DefectiveSet, Design, DomainError, ResponseVector, covers
from gtyes.verify import WORK_CAP, Certificate, colex


class InconsistentResponse(DomainError):
    """No set of at most d items explains the response."""


class NotSeparable(DomainError):
    def __init__(self, msg: str, witness: tuple):
        super().__init__(msg)
        self.witness = witness


def _check_len(design: Design, response: ResponseVector) -> None:
    if response.t != design.t:
        raise DomainError(f"response has {response.t} bits, design has {design.t} pools")


def decode_cover(design: Design, response: ResponseVector) -> frozenset[int]:
    """Items whose column is covered by the response."""
    _check_len(design, response)
    return frozenset(j for j, c in enumerate(design.columns) if covers(response.bits, c))


def decode_separable(design: Design, response: ResponseVector, d: int, *, cap: int = WORK_CAP) -> DefectiveSet:
    """The unique set of size <= d whose union equals the response.

    Only columns covered by the response can take part, so the scan runs
    over subsets of the cover candidates.
    """
    _check_len(design, response)
    cand = sorted(decode_cover(design, response))
    total = sum(comb(len(cand), i) for i in range(min(d, len(cand)) + 1))
    if total > cap:
        raise DomainError(f"{total} candidate subsets exceed the work cap {cap}")
    found = None
    for size in range(min(d, len(cand)) + 1):
        for idx in colex(len(cand), size):
            u = 0
            for i in idx:
                u |= design.columns[cand[i]]
            if u == response.bits:
                S = tuple(cand[i] for i in idx)
                if found is not None:
                    raise NotSeparable(f"sets {found} and {S} give the same response", (found, S))
                found = S
    if found is None:
        raise InconsistentResponse(f"no set of at most {d} items yields {response}")
    return DefectiveSet(found)


@dataclass(frozen=True)
class TwoStageOutcome:
    candidates: frozenset[int]
    confirmed: DefectiveSet
    stage1_yeses: int
    stage2_yeses: int
    stage1_tests: int
    stage2_tests: int

    @property
    def total_tests(self) -> int:
        return self.stage1_tests + self.stage2_tests

    @property
    def total_yeses(self) -> int:
        return self.stage1_yeses + self.stage2_yeses


def _pools(design: Design) -> list[frozenset[int]]:
    return [design.pool(i) for i in range(design.t)]


def run_two_stage(cert: Certificate, session: OracleSession) -> TwoStageOutcome:
    """Pool all t rows of the certified design, then test each cover candidate alone."""
    if not isinstance(cert, Certificate):
        raise DomainError("stage 1 needs a verified design certificate; call verify.certify first")
    design = cert.design
    if session.n != design.n:
        raise DomainError(f"session has n={session.n}, design has n={design.n}")
    bits = 0
    y0 = session.yeses
    for pool_i, pool in enumerate(_pools(design)):
        if session.test(pool):
            bits |= 1 << pool_i
    stage1_yeses = session.yeses - y0
    candidates = decode_cover(design, ResponseVector(bits, design.t))
    confirmed = [j for j in sorted(candidates) if session.test([j])]
    return TwoStageOutcome(
        candidates=candidates,
        confirmed=DefectiveSet(confirmed),
        stage1_yeses=stage1_yeses,
        stage2_yeses=len(confirmed),
        stage1_tests=design.t,
        stage2_tests=len(candidates),
    )
