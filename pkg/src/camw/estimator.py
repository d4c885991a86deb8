"""Expected number of vehicles that clear the stop line during one green phase.

A green of ``n`` slots releases consecutive vehicles from the lane head for
as long as each one wants the released movement. The controller knows the
direction of communicating vehicles and treats every other vehicle as
aligned with probability ``p_a``. The number of departures ``J`` then
follows a geometric law that restarts at every known-aligned vehicle, and
its mean has the closed form implemented in :func:`expected_pass_queue1`.

Two exhaustive oracles live here as well. They share no code with the
closed form and exist only to check it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from camw.domain import CommView, EstimatorParams, Movement, SlotInfo

MAX_ENUMERATION_HORIZON = 20


@dataclass(frozen=True)
class AlignmentView:
    """A lane seen relative to one served movement.

    ``m`` is the number of lane positions that can possibly depart,
    ``comm`` holds ``(position, aligned)`` for communicating vehicles within
    the first ``m`` positions, and ``p_a`` is the prior that a silent vehicle
    is aligned.
    """

    m: int
    comm: Tuple[Tuple[int, bool], ...] = ()
    p_a: float = 0.5

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("horizon m must be non-negative")
        if not 0.0 <= self.p_a <= 1.0:
            raise ValueError("p_a must lie in [0, 1]")
        previous = 0
        for pos, _ in self.comm:
            if pos <= previous or pos > self.m:
                raise ValueError(f"communicating position {pos} outside 1..{self.m} or unordered")
            previous = pos

    @property
    def p_b(self) -> float:
        return 1.0 - self.p_a

    @classmethod
    def build(
        cls,
        queue_length: int,
        n: int,
        comm_positions: Iterable[Tuple[int, Movement]],
        movement: Movement,
        p_a: float,
    ) -> "AlignmentView":
        """Horizon ``min(n, queue_length)``; communicating vehicles beyond it are dropped."""
        m = max(0, min(n, queue_length))
        comm = tuple((pos, d is movement) for pos, d in comm_positions if pos <= m)
        return cls(m, comm, p_a)

    def first_misaligned(self) -> Optional[int]:
        """Index (0-based, into ``comm``) of the first communicating vehicle that blocks."""
        for k, (_, aligned) in enumerate(self.comm):
            if not aligned:
                return k
        return None

    def truncated(self) -> "AlignmentView":
        """Cut the lane just in front of the first known blocker.

        Nothing behind a known misaligned vehicle can depart, so the result
        is an all-aligned view with horizon ``v_L - 1``.
        """
        k = self.first_misaligned()
        if k is None:
            return self
        return AlignmentView(self.comm[k][0] - 1, self.comm[:k], self.p_a)


def pass_count_distribution(view: AlignmentView) -> np.ndarray:
    """``P[J = j]`` for ``j = 0..m`` when every communicating vehicle is aligned.

    Raises ``ValueError`` if the view contains a known blocker; truncate first.
    """
    if view.first_misaligned() is not None:
        raise ValueError("view has a misaligned communicating vehicle; call truncated() first")
    known = {pos for pos, _ in view.comm}
    p, q = view.p_a, view.p_b
    probs = np.zeros(view.m + 1)
    unknown_before = 0  # silent vehicles among positions 1..j
    for j in range(view.m):
        # J = j: the first j vehicles pass and vehicle j+1 refuses
        if (j + 1) not in known:
            probs[j] = p**unknown_before * q
            unknown_before += 1
    probs[view.m] = p**unknown_before
    return probs


def _closed_form_all_aligned(m: int, positions: Sequence[int], p: float, tail: float) -> float:
    q = 1.0 - p
    v = [1, *positions, m + 1]  # sentinels v_0 = 1 and v_{T+1} = m + 1
    total = 0.0
    for l in range(len(positions) + 1):
        a, b = v[l], v[l + 1]
        total += (p ** (1 - l) / q) * ((p + q * a) * p ** (a - 1) + (1 - 2 * p - q * b) * p ** (b - 2))
    return total + tail


@lru_cache(maxsize=65536)
def expected_pass_queue1(view: AlignmentView) -> float:
    """Expected departures from a single mixed lane under one green.

    Uses the block-geometric closed form. A known blocker at ``v_L`` cuts the
    horizon to ``v_L - 1``. Degenerate priors ``p_a`` in ``{0, 1}`` fall back
    to the distribution mean, which is the continuous limit.
    """
    cut = view.truncated()
    p = view.p_a
    if cut.m == 0:
        return 0.0
    if p <= 0.0 or p >= 1.0:
        return float(np.dot(np.arange(cut.m + 1), pass_count_distribution(cut)))
    positions = [pos for pos, _ in cut.comm]
    tail = cut.m * p ** (cut.m - len(positions))
    value = _closed_form_all_aligned(cut.m, positions, p, tail)
    return min(max(value, 0.0), float(cut.m))


def enumerate_expected_pass(view: AlignmentView) -> float:
    """Brute-force expectation over every direction assignment of silent vehicles."""
    if view.m > MAX_ENUMERATION_HORIZON:
        raise ValueError(f"horizon {view.m} too large for enumeration (max {MAX_ENUMERATION_HORIZON})")
    known = dict(view.comm)
    unknown = [pos for pos in range(1, view.m + 1) if pos not in known]
    expectation = 0.0
    for bits in itertools.product((True, False), repeat=len(unknown)):
        weight = 1.0
        aligned = dict(known)
        for pos, b in zip(unknown, bits):
            aligned[pos] = b
            weight *= view.p_a if b else view.p_b
        passed = 0
        for pos in range(1, view.m + 1):
            if not aligned[pos]:
                break
            passed += 1
        expectation += weight * passed
    return expectation


def guaranteed_departures(slot_info: SlotInfo, shared_length: int, movement: Movement) -> Tuple[int, int]:
    """Departures certain from pocket sensing alone, and shared-lane vehicles they consume.

    After a boundary refill an empty pocket means the shared head (if any)
    wants the occupied pocket's movement. So with only the served pocket
    occupied and a non-empty shared lane, two vehicles are certain and the
    shared head is one of them.
    """
    if not slot_info.occupied(movement):
        return 0, 0
    if not slot_info.occupied(movement.other) and shared_length > 0:
        return 2, 1
    return 1, 0


def expected_pass_queue2(
    slot_info: SlotInfo,
    shared_view: AlignmentView,
    n: int,
    movement: Movement,
) -> float:
    """Expected departures from a pocketed approach.

    ``shared_view`` describes the shared lane (positions counted from the
    shared head) relative to ``movement``; its horizon is the number of
    shared vehicles considered. The certain departures are added to the
    single-lane expectation of the sub-queue left behind them.
    """
    if n < 1:
        raise ValueError("green duration n must be a positive integer")
    g, consumed = guaranteed_departures(slot_info, shared_view.m, movement)
    if g == 0:
        return 0.0
    g = min(g, n)
    sub_m = max(0, min(n - g, shared_view.m - consumed))
    sub_comm = tuple(
        (pos - consumed, aligned) for pos, aligned in shared_view.comm if consumed < pos <= consumed + sub_m
    )
    return g + expected_pass_queue1(AlignmentView(sub_m, sub_comm, shared_view.p_a))


def shared_alignment_view(view: CommView, params: EstimatorParams, movement: Movement) -> AlignmentView:
    """Shared-lane view for a Queue II approach, capped at ``n`` vehicles."""
    return AlignmentView.build(
        view.shared_length, params.n, view.comm_positions, movement, params.p_aligned(movement)
    )


def enumerate_expected_pass_queue2(
    slot_info: SlotInfo,
    shared_length: int,
    shared_comm: Sequence[Tuple[int, bool]],
    n: int,
    movement: Movement,
    p_a: float,
) -> float:
    """Oracle for pocketed approaches: replay ``n`` green slots for every hidden assignment.

    ``shared_comm`` gives ``(position, aligned)`` for communicating shared
    vehicles. When a pocket is empty and the shared lane is not, the shared
    head is pinned to the occupied pocket's movement, which is the only state
    a boundary refill can leave behind.
    """
    if shared_length > MAX_ENUMERATION_HORIZON:
        raise ValueError("shared lane too long for enumeration")
    known = {pos: (movement if aligned else movement.other) for pos, aligned in shared_comm}
    if shared_length and slot_info.count == 1:
        pinned = Movement.LEFT if slot_info.left is not None else Movement.STRAIGHT
        if known.get(1, pinned) is not pinned:
            raise ValueError("shared head contradicts pocket occupancy")
        known[1] = pinned
    unknown = [pos for pos in range(1, shared_length + 1) if pos not in known]
    expectation = 0.0
    for bits in itertools.product((True, False), repeat=len(unknown)):
        weight = 1.0
        lane = dict(known)
        for pos, b in zip(unknown, bits):
            lane[pos] = movement if b else movement.other
            weight *= p_a if b else 1.0 - p_a
        pockets = {Movement.LEFT: slot_info.left is not None, Movement.STRAIGHT: slot_info.straight is not None}
        head = 1
        departed = 0
        for _ in range(n):
            if pockets[movement]:
                departed += 1
                pockets[movement] = False
            if head <= shared_length and not pockets[movement] and lane[head] is movement:
                pockets[movement] = True
                head += 1
        expectation += weight * departed
    return expectation
