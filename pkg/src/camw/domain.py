"""Core data model: movements, approaches, phases, vehicles and approach queues.

The traffic light never sees a :class:`Vehicle` directly. Everything a
scheduler is allowed to know about an approach goes through
:func:`make_comm_view`, which projects the hidden queue state onto a
:class:`CommView`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from itertools import islice
from typing import Deque, Optional, Tuple, Union


class Movement(Enum):
    """Intended movement of a vehicle. Right turns are folded into STRAIGHT."""

    STRAIGHT = "straight"
    LEFT = "left"

    @property
    def other(self) -> "Movement":
        return Movement.LEFT if self is Movement.STRAIGHT else Movement.STRAIGHT

    @property
    def short(self) -> str:
        return "S" if self is Movement.STRAIGHT else "L"


class Approach(IntEnum):
    """Incoming approach; the integer value is the queue index 1..4."""

    NS = 1
    SN = 2
    EW = 3
    WE = 4


APPROACHES: Tuple[Approach, ...] = tuple(Approach)


class QueueModel(Enum):
    QUEUE_I = "QueueI"
    QUEUE_II = "QueueII"


class Scheduler(Enum):
    CAMW = "CAMW"
    MAX_WEIGHT = "MaxWeight"
    FIXED_TIME = "FixedTime"


class TieBreak(Enum):
    LOWEST_PHASE_INDEX = "LowestPhaseIndex"
    SEEDED_RANDOM = "SeededRandom"


@dataclass(frozen=True)
class Phase:
    """One signal phase: a pair of opposing approaches released for one movement."""

    id: int
    approaches: Tuple[Approach, Approach]
    movement: Movement

    @property
    def served(self) -> frozenset:
        return frozenset((a, self.movement) for a in self.approaches)

    def serves(self, approach: Approach) -> bool:
        return approach in self.approaches

    def __str__(self) -> str:
        return f"phase {self.id}"


# Only phase 1 (north/south straight) is pinned down by the source model. The
# remaining assignments are a convention and every module reads them from here.
PHASES: Tuple[Phase, ...] = (
    Phase(1, (Approach.NS, Approach.SN), Movement.STRAIGHT),
    Phase(2, (Approach.NS, Approach.SN), Movement.LEFT),
    Phase(3, (Approach.EW, Approach.WE), Movement.STRAIGHT),
    Phase(4, (Approach.EW, Approach.WE), Movement.LEFT),
)


def phase_by_id(phase_id: int) -> Phase:
    if not 1 <= phase_id <= len(PHASES):
        raise ValueError(f"unknown phase id {phase_id}")
    return PHASES[phase_id - 1]


def phase_for(approach: Approach, movement: Movement) -> Phase:
    """The unique phase releasing ``movement`` on ``approach``."""
    for phase in PHASES:
        if phase.serves(approach) and phase.movement is movement:
            return phase
    raise LookupError((approach, movement))  # unreachable with the fixed table


@dataclass(frozen=True)
class Vehicle:
    direction: Movement
    communicating: bool
    arrival_slot: int = 0


@dataclass
class ApproachQueueI:
    """Single mixed lane. Only the head vehicle may leave."""

    approach: Approach = Approach.NS
    lane: Deque[Vehicle] = field(default_factory=deque)

    def __post_init__(self):
        self.lane = deque(self.lane)

    def __len__(self) -> int:
        return len(self.lane)

    def vehicles(self):
        return list(self.lane)

    def push(self, vehicle: Vehicle) -> None:
        self.lane.append(vehicle)

    def serve(self, movement: Movement, absorb: bool = False) -> Optional[Vehicle]:
        """Release the head vehicle if it wants ``movement``; otherwise it blocks."""
        if self.lane and self.lane[0].direction is movement:
            return self.lane.popleft()
        return None


@dataclass
class ApproachQueueII:
    """Shared lane feeding a left pocket and a straight pocket of capacity one each."""

    approach: Approach = Approach.NS
    left_slot: Optional[Vehicle] = None
    straight_slot: Optional[Vehicle] = None
    shared: Deque[Vehicle] = field(default_factory=deque)

    def __post_init__(self):
        self.shared = deque(self.shared)
        if self.left_slot is not None and self.left_slot.direction is not Movement.LEFT:
            raise ValueError("left slot holds a straight-going vehicle")
        if self.straight_slot is not None and self.straight_slot.direction is not Movement.STRAIGHT:
            raise ValueError("straight slot holds a left-turning vehicle")

    def __len__(self) -> int:
        return (self.left_slot is not None) + (self.straight_slot is not None) + len(self.shared)

    def vehicles(self):
        slots = [v for v in (self.left_slot, self.straight_slot) if v is not None]
        return slots + list(self.shared)

    def slot(self, movement: Movement) -> Optional[Vehicle]:
        return self.straight_slot if movement is Movement.STRAIGHT else self.left_slot

    def _set_slot(self, movement: Movement, vehicle: Optional[Vehicle]) -> None:
        if movement is Movement.STRAIGHT:
            self.straight_slot = vehicle
        else:
            self.left_slot = vehicle

    def push(self, vehicle: Vehicle) -> None:
        self.shared.append(vehicle)

    def _advance(self, movement: Movement) -> bool:
        if self.shared and self.slot(movement) is None and self.shared[0].direction is movement:
            self._set_slot(movement, self.shared.popleft())
            return True
        return False

    def refill(self) -> None:
        """Move shared-lane heads into their pockets until the head's pocket is taken."""
        while self.shared:
            if not self._advance(self.shared[0].direction):
                break

    def serve(self, movement: Movement, absorb: bool = False) -> Optional[Vehicle]:
        """One green slot for ``movement``.

        The pocket for ``movement`` discharges, then the shared head may pull
        forward into that pocket. With ``absorb`` the head may instead fill
        whichever pocket matches it, mid-phase.
        """
        departed = self.slot(movement)
        self._set_slot(movement, None)
        if absorb:
            self.refill()
        else:
            self._advance(movement)
        return departed


ApproachQueue = Union[ApproachQueueI, ApproachQueueII]


@dataclass(frozen=True)
class SlotInfo:
    """Pocket occupancy sensed at the stop line. A pocket's lane reveals its direction."""

    left: Optional[Movement] = None
    straight: Optional[Movement] = None

    def __post_init__(self):
        if self.left not in (None, Movement.LEFT):
            raise ValueError("left slot can only hold a left-turning vehicle")
        if self.straight not in (None, Movement.STRAIGHT):
            raise ValueError("straight slot can only hold a straight-going vehicle")

    @classmethod
    def from_flags(cls, left: bool, straight: bool) -> "SlotInfo":
        return cls(Movement.LEFT if left else None, Movement.STRAIGHT if straight else None)

    def occupied(self, movement: Movement) -> bool:
        return (self.straight if movement is Movement.STRAIGHT else self.left) is not None

    @property
    def count(self) -> int:
        return (self.left is not None) + (self.straight is not None)


@dataclass(frozen=True)
class CommView:
    """What the controller may observe about one approach.

    ``comm_positions`` lists ``(position, direction)`` for communicating
    vehicles, 1-based. For Queue II the positions index the shared lane only,
    and ``slot_info`` carries the pocket occupancy.
    """

    approach: Approach
    queue_length: int
    comm_positions: Tuple[Tuple[int, Movement], ...] = ()
    slot_info: Optional[SlotInfo] = None

    def __post_init__(self):
        if self.queue_length < 0:
            raise ValueError("queue_length must be non-negative")
        limit = self.shared_length
        previous = 0
        for pos, _ in self.comm_positions:
            if pos <= previous or pos > limit:
                raise ValueError(f"invalid communicating position {pos}")
            previous = pos

    @property
    def shared_length(self) -> int:
        if self.slot_info is None:
            return self.queue_length
        return self.queue_length - self.slot_info.count

    @property
    def head_direction(self) -> Optional[Movement]:
        """Direction of the lane head if it communicates (Queue I sense)."""
        if self.comm_positions and self.comm_positions[0][0] == 1:
            return self.comm_positions[0][1]
        return None


def make_comm_view(queue: ApproachQueue, depth: Optional[int] = None) -> CommView:
    """Project a queue onto the controller-visible surface.

    ``depth`` limits the reported communicating positions to the first
    ``depth`` lane vehicles; schedulers never look further than the green
    duration, and long unstable queues make the full scan expensive.
    """
    if isinstance(queue, ApproachQueueII):
        lane = queue.shared
        info = SlotInfo(
            left=None if queue.left_slot is None else Movement.LEFT,
            straight=None if queue.straight_slot is None else Movement.STRAIGHT,
        )
    else:
        lane = queue.lane
        info = None
    head = lane if depth is None else islice(lane, depth)
    comm = tuple((k, v.direction) for k, v in enumerate(head, start=1) if v.communicating)
    return CommView(queue.approach, len(queue), comm, info)


@dataclass(frozen=True)
class EstimatorParams:
    """Green duration ``n`` and the direction prior for silent vehicles."""

    n: int
    p1: float
    p2: Optional[float] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("green duration n must be a positive integer")
        if self.p2 is None:
            object.__setattr__(self, "p2", 1.0 - self.p1)
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise ValueError("prior probabilities must lie in [0, 1]")
        if abs(self.p1 + self.p2 - 1.0) > 1e-12:
            raise ValueError("p1 + p2 must equal 1")

    def p_aligned(self, movement: Movement) -> float:
        return self.p1 if movement is Movement.STRAIGHT else self.p2


@dataclass(frozen=True)
class SimConfig:
    model: QueueModel = QueueModel.QUEUE_I
    rho: float = 1.0
    lambda1: float = 0.18
    lambda2: float = 0.12
    n: int = 2
    horizon: int = 10_000
    seed: int = 0
    scheduler: Scheduler = Scheduler.CAMW
    tie_break: TieBreak = TieBreak.LOWEST_PHASE_INDEX
    prior_override: Optional[Tuple[float, float]] = None
    # inject the inferred head direction after a blocked phase (CAMW, Queue I)
    learning_inference: bool = True
    # Queue II: let the shared head enter either pocket mid-phase
    physical_absorption: bool = False
    fixed_cycle: Tuple[int, ...] = (1, 2, 3, 4)

    def __post_init__(self):
        for name in ("rho", "lambda1", "lambda2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.lambda1 + self.lambda2 > 1.0 + 1e-12:
            raise ValueError("lambda1 + lambda2 exceeds 1")
        if self.n < 1:
            raise ValueError("green duration n must be a positive integer")
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if not self.fixed_cycle or any(not 1 <= p <= len(PHASES) for p in self.fixed_cycle):
            raise ValueError("fixed_cycle must be a non-empty list of phase ids")
        if self.prior_override is not None:
            EstimatorParams(self.n, *self.prior_override)

    def estimator_params(self) -> EstimatorParams:
        if self.prior_override is not None:
            return EstimatorParams(self.n, *self.prior_override)
        total = self.lambda1 + self.lambda2
        if total == 0:
            return EstimatorParams(self.n, 0.5, 0.5)
        p1 = self.lambda1 / total
        return EstimatorParams(self.n, p1, 1.0 - p1)
