"""Exhaustive cross-checks of the closed-form estimators against enumeration."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from camw.domain import Movement, SlotInfo
from camw.estimator import (
    AlignmentView,
    enumerate_expected_pass,
    enumerate_expected_pass_queue2,
    expected_pass_queue1,
    expected_pass_queue2,
    pass_count_distribution,
)

PRIORS = (0.1, 0.3, 0.5, 0.7, 0.9)
ORACLE_TOL = 1e-9
DISTRIBUTION_TOL = 1e-12


@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    max_error: float = 0.0
    tolerance: float = ORACLE_TOL
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, error: float, label) -> None:
        self.cases += 1
        self.max_error = max(self.max_error, error)
        if not error <= self.tolerance and len(self.failures) < 20:
            self.failures.append(f"{label}: error {error:.3e}")

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"[{verdict}] {self.name}: {self.cases} cases, max error {self.max_error:.2e} "
            f"(tol {self.tolerance:g}), {self.seconds:.1f}s"
        )


def comm_patterns(m: int):
    """Every assignment of silent / aligned / misaligned to positions ``1..m``."""
    for pattern in itertools.product((None, True, False), repeat=m):
        yield tuple((pos, a) for pos, a in enumerate(pattern, start=1) if a is not None)


def queue1_equivalence(horizons: Sequence[int] = range(1, 9), priors: Sequence[float] = PRIORS) -> SuiteReport:
    report = SuiteReport("single-lane closed form vs enumeration")
    start = time.perf_counter()
    for m in horizons:
        for comm in comm_patterns(m):
            for p in priors:
                view = AlignmentView(m, comm, p)
                err = abs(expected_pass_queue1(view) - enumerate_expected_pass(view))
                report.record(err, view)
    report.seconds = time.perf_counter() - start
    return report


def distribution_sanity(horizons: Sequence[int] = range(1, 9), priors: Sequence[float] = PRIORS) -> SuiteReport:
    """Non-negativity, normalization, structural zeros and mean agreement."""
    report = SuiteReport("pass-count distribution sanity", tolerance=DISTRIBUTION_TOL)
    start = time.perf_counter()
    for m in horizons:
        for comm in comm_patterns(m):
            for p in priors:
                view = AlignmentView(m, comm, p)
                cut = view.truncated()
                probs = pass_count_distribution(cut)
                err = abs(probs.sum() - 1.0)
                if probs.min() < 0:
                    err = max(err, -probs.min())
                for pos, _ in cut.comm:
                    err = max(err, abs(probs[pos - 1]))
                mean = float(np.dot(np.arange(cut.m + 1), probs))
                err = max(err, abs(mean - expected_pass_queue1(view)))
                report.record(err, view)
    report.seconds = time.perf_counter() - start
    return report


def queue2_cases(n: int):
    """Refill-consistent pocket states and shared-lane patterns for green duration ``n``.

    Shared positions beyond ``n - 1`` can never depart, so lanes of length up
    to ``n - 1`` are enumerated exhaustively and one extra silent vehicle is
    appended to exercise the horizon cut.
    """
    for movement in Movement:
        for left, straight in itertools.product((False, True), repeat=2):
            info = SlotInfo.from_flags(left, straight)
            for s in range(0, n + 1):
                if info.count == 0 and s > 0:
                    continue  # a refill never leaves both pockets empty in front of a queue
                exhaustive = min(s, n - 1)
                head_options: Optional[Tuple] = None
                if info.count == 1 and s > 0:
                    pinned = Movement.LEFT if left else Movement.STRAIGHT
                    head_options = (None, pinned is movement)
                for pattern in itertools.product((None, True, False), repeat=exhaustive):
                    if head_options is not None and pattern and pattern[0] not in head_options:
                        continue
                    comm = tuple((pos, a) for pos, a in enumerate(pattern, start=1) if a is not None)
                    yield movement, info, s, comm


def queue2_equivalence(durations: Sequence[int] = range(1, 9), priors: Sequence[float] = PRIORS) -> SuiteReport:
    report = SuiteReport("pocketed closed form vs replay enumeration")
    start = time.perf_counter()
    for n in durations:
        for movement, info, s, comm in queue2_cases(n):
            m = min(n, s)
            visible = tuple((pos, a) for pos, a in comm if pos <= m)
            for p in priors:
                closed = expected_pass_queue2(info, AlignmentView(m, visible, p), n, movement)
                oracle = enumerate_expected_pass_queue2(info, s, comm, n, movement, p)
                report.record(abs(closed - oracle), (n, movement.name, info, s, comm, p))
    report.seconds = time.perf_counter() - start
    return report


def run_all() -> List[SuiteReport]:
    return [queue1_equivalence(), distribution_sanity(), queue2_equivalence()]
