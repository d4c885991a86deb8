"""Phase selection policies and the blocking memory used by CAMW."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Set, Tuple

import numpy as np

from camw.domain import (
    PHASES,
    Approach,
    CommView,
    EstimatorParams,
    Movement,
    Phase,
    QueueModel,
    TieBreak,
    phase_by_id,
)
from camw.estimator import AlignmentView, expected_pass_queue1, expected_pass_queue2, shared_alignment_view

# relative slack under which two phase weights count as tied
TIE_RTOL = 1e-12


@dataclass
class LearnedState:
    """Per-approach memory of phases that were observed to block.

    A green that serves ``(approach, movement)`` on a non-empty queue and
    releases nobody proves the head wants the other movement. The memory for
    an approach is wiped the moment any vehicle leaves it.
    """

    blocked: Set[Tuple[Approach, Movement]] = field(default_factory=set)
    inferred: Dict[Approach, Movement] = field(default_factory=dict)

    def is_blocked(self, approach: Approach, movement: Movement) -> bool:
        return (approach, movement) in self.blocked

    def inferred_head(self, approach: Approach) -> Optional[Movement]:
        return self.inferred.get(approach)

    def block(self, approach: Approach, movement: Movement) -> None:
        self.blocked.add((approach, movement))
        self.inferred[approach] = movement.other

    def clear(self, approach: Approach) -> None:
        self.blocked.discard((approach, Movement.STRAIGHT))
        self.blocked.discard((approach, Movement.LEFT))
        self.inferred.pop(approach, None)

    def flags(self, approach: Approach) -> str:
        return "".join(m.short for m in Movement if self.is_blocked(approach, m))

    def is_empty(self) -> bool:
        return not self.blocked and not self.inferred


def update_learning(
    learned: LearnedState,
    approach: Approach,
    movement: Movement,
    departures: int,
    queue_before: int,
) -> LearnedState:
    """Fold the outcome of one green (or a single departure) into ``learned``.

    Mutates and returns ``learned``.
    """
    if departures > 0:
        learned.clear(approach)
    elif queue_before > 0:
        learned.block(approach, movement)
    return learned


def effective_estimate(
    view: CommView,
    phase: Phase,
    params: EstimatorParams,
    learned: Optional[LearnedState] = None,
    inference: bool = True,
) -> float:
    """Learned estimate of departures from one approach under ``phase``."""
    if not phase.serves(view.approach):
        return 0.0
    movement = phase.movement
    p_a = params.p_aligned(movement)
    if view.slot_info is not None:
        shared = shared_alignment_view(view, params, movement)
        return expected_pass_queue2(view.slot_info, shared, params.n, movement)

    comm = view.comm_positions
    if learned is not None:
        if learned.is_blocked(view.approach, movement):
            return 0.0
        head = learned.inferred_head(view.approach)
        if inference and head is not None and view.head_direction is None and view.queue_length > 0:
            comm = ((1, head),) + tuple(comm)
    return expected_pass_queue1(AlignmentView.build(view.queue_length, params.n, comm, movement, p_a))


def _by_approach(views: Sequence[CommView]) -> Dict[Approach, CommView]:
    table = {v.approach: v for v in views}
    if len(table) != len(Approach) or len(views) != len(Approach):
        raise ValueError("expected exactly one view per approach")
    return table


def camw_weights(
    views: Sequence[CommView],
    params: EstimatorParams,
    learned: Optional[LearnedState] = None,
    inference: bool = True,
) -> Tuple[float, ...]:
    """Per-phase objective: queue length times learned expected departures."""
    table = _by_approach(views)
    return tuple(
        sum(
            table[a].queue_length * effective_estimate(table[a], phase, params, learned, inference)
            for a in phase.approaches
        )
        for phase in PHASES
    )


def maxweight_indicator(view: CommView, phase: Phase) -> int:
    """Connectivity-dependent 0/1 service indicator used by the max-weight baseline."""
    if not phase.serves(view.approach) or view.queue_length == 0:
        return 0
    if view.slot_info is not None:
        return int(view.slot_info.occupied(phase.movement))
    head = view.head_direction
    if head is None:
        return 1
    return int(head is phase.movement)


def maxweight_weights(views: Sequence[CommView]) -> Tuple[int, ...]:
    table = _by_approach(views)
    return tuple(
        sum(table[a].queue_length * maxweight_indicator(table[a], phase) for a in phase.approaches)
        for phase in PHASES
    )


def select_phase(
    weights: Sequence[float],
    tie_break: TieBreak = TieBreak.LOWEST_PHASE_INDEX,
    rng: Optional[np.random.Generator] = None,
) -> Phase:
    """Argmax over phases with the configured tie rule."""
    best = max(weights)
    slack = TIE_RTOL * max(1.0, abs(best))
    tied = [k for k, w in enumerate(weights) if best - w <= slack]
    if tie_break is TieBreak.SEEDED_RANDOM and len(tied) > 1:
        if rng is None:
            raise ValueError("SeededRandom tie-breaking needs an rng")
        return PHASES[tied[int(rng.integers(len(tied)))]]
    return PHASES[tied[0]]


def decide_phase_camw(
    views: Sequence[CommView],
    params: EstimatorParams,
    learned: Optional[LearnedState] = None,
    tie_break: TieBreak = TieBreak.LOWEST_PHASE_INDEX,
    rng: Optional[np.random.Generator] = None,
    inference: bool = True,
) -> Phase:
    return select_phase(camw_weights(views, params, learned, inference), tie_break, rng)


def decide_phase_maxweight(
    views: Sequence[CommView],
    model: Optional[QueueModel] = None,
    tie_break: TieBreak = TieBreak.LOWEST_PHASE_INDEX,
    rng: Optional[np.random.Generator] = None,
) -> Phase:
    """Max-weight with the connectivity-aware indicator.

    ``model`` is only used to check the views; the indicator reads the
    queue model off each view.
    """
    if model is not None:
        expect_slots = model is QueueModel.QUEUE_II
        if any((v.slot_info is not None) != expect_slots for v in views):
            raise ValueError(f"views do not match queue model {model.value}")
    return select_phase(maxweight_weights(views), tie_break, rng)


def decide_phase_fixed(slot: int, cycle: Sequence, n: int = 1) -> Phase:
    """Pre-timed round robin: each entry of ``cycle`` holds for ``n`` slots."""
    if not cycle:
        raise ValueError("cycle must be non-empty")
    entry = cycle[(slot // n) % len(cycle)]
    return entry if isinstance(entry, Phase) else phase_by_id(int(entry))
