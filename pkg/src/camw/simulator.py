"""Slotted-time intersection simulator.

Every ``n`` slots the configured scheduler picks a phase from the
controller-visible views. Within a slot, service happens before arrivals,
so a vehicle never departs in the slot it arrived in.

Randomness is split into independent streams keyed by purpose and approach:
arrival classes and communication flags are drawn from separate streams, so
a change of ``rho`` leaves the arrival sequence untouched and the
max-weight baseline on Queue II replays exactly the same trace.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Protocol

import numpy as np

from camw.controller import (
    LearnedState,
    decide_phase_camw,
    decide_phase_fixed,
    decide_phase_maxweight,
    update_learning,
)
from camw.domain import (
    APPROACHES,
    Approach,
    ApproachQueue,
    ApproachQueueI,
    ApproachQueueII,
    CommView,
    Movement,
    Phase,
    QueueModel,
    Scheduler,
    SimConfig,
    Vehicle,
    make_comm_view,
)

logger = logging.getLogger(__name__)

STREAM_ARRIVAL = 0
STREAM_COMM = 1
STREAM_TIE = 2

_CHUNK = 4096


class SimulationError(RuntimeError):
    """Raised when a run breaks one of its bookkeeping invariants."""


def stream(seed: int, purpose: int, approach: int = 0) -> np.random.Generator:
    """Independent generator for one (purpose, approach) pair of a run seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(purpose, approach)))


class ArrivalProcess(Protocol):
    def sample(self, approach: Approach, slot: int) -> Optional[Vehicle]:
        ...


class BernoulliArrivals:
    """At most one arrival per approach and slot: straight w.p. ``lambda1``, left w.p. ``lambda2``.

    Slots must be sampled in increasing order per approach.
    """

    def __init__(self, lambda1: float, lambda2: float, rho: float, seed: int):
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.rho = rho
        self._class_rng = {a: stream(seed, STREAM_ARRIVAL, int(a)) for a in APPROACHES}
        self._comm_rng = {a: stream(seed, STREAM_COMM, int(a)) for a in APPROACHES}
        self._buffers: Dict[Approach, tuple] = {}
        self._offset: Dict[Approach, int] = {a: -_CHUNK for a in APPROACHES}

    def _draws(self, approach: Approach, slot: int):
        base = self._offset[approach]
        if slot < base:
            raise ValueError("arrival slots must be sampled in order")
        while slot >= base + _CHUNK:
            base += _CHUNK
            self._buffers[approach] = (
                self._class_rng[approach].random(_CHUNK),
                self._comm_rng[approach].random(_CHUNK),
            )
        self._offset[approach] = base
        u_class, u_comm = self._buffers[approach]
        return u_class[slot - base], u_comm[slot - base]

    def sample(self, approach: Approach, slot: int) -> Optional[Vehicle]:
        u_class, u_comm = self._draws(approach, slot)
        if u_class < self.lambda1:
            direction = Movement.STRAIGHT
        elif u_class < self.lambda1 + self.lambda2:
            direction = Movement.LEFT
        else:
            return None
        return Vehicle(direction, bool(u_comm < self.rho), slot)


@dataclass
class TraceRecord:
    slot: int
    phase: int
    queues: tuple
    departures: tuple
    blocked: tuple


@dataclass
class Metrics:
    """Per-slot series and cumulative counters of one run.

    Series are indexed by slot; entry ``t`` is the state after slot ``t``
    has been served and has received its arrivals.
    """

    horizon: int
    queue_total: np.ndarray
    cum_arrivals: np.ndarray
    cum_departures: np.ndarray
    cum_blocking: np.ndarray
    arrivals_by_approach: Dict[Approach, int]
    departures_by_approach: Dict[Approach, int]
    trace: Optional[List[TraceRecord]] = None

    @property
    def total_arrivals(self) -> int:
        return sum(self.arrivals_by_approach.values())

    @property
    def total_departures(self) -> int:
        return sum(self.departures_by_approach.values())

    @property
    def blocking_events(self) -> int:
        return int(self.cum_blocking[-1]) if self.horizon else 0

    @property
    def efficiency(self) -> float:
        if self.total_arrivals == 0:
            return 1.0
        return self.total_departures / self.total_arrivals

    @property
    def average_queue(self) -> float:
        """Time average over the horizon of the per-approach mean queue size."""
        if self.horizon == 0:
            return 0.0
        return float(self.queue_total.mean()) / len(Approach)

    @property
    def final_queue(self) -> float:
        """Per-approach mean queue size after the last slot."""
        if self.horizon == 0:
            return 0.0
        return float(self.queue_total[-1]) / len(Approach)


@dataclass
class IntersectionState:
    queues: Dict[Approach, ApproachQueue]
    t: int = 0
    phase: Optional[Phase] = None
    remaining: int = 0
    learned: LearnedState = field(default_factory=LearnedState)


class Simulation:
    """One deterministic run of a :class:`SimConfig`."""

    def __init__(
        self,
        config: SimConfig,
        trace: bool = False,
        arrivals: Optional[ArrivalProcess] = None,
    ):
        self.config = config
        self.params = config.estimator_params()
        self.arrivals = arrivals or BernoulliArrivals(config.lambda1, config.lambda2, config.rho, config.seed)
        self.tie_rng = stream(config.seed, STREAM_TIE)
        queue_cls = ApproachQueueII if config.model is QueueModel.QUEUE_II else ApproachQueueI
        self.state = IntersectionState({a: queue_cls(approach=a) for a in APPROACHES})
        self._arrived = {a: 0 for a in APPROACHES}
        self._departed = {a: 0 for a in APPROACHES}
        self._blocking = 0
        self._trace: Optional[List[TraceRecord]] = [] if trace else None
        # the estimators never look further than n vehicles into a lane
        self._view_depth = config.n + 1

    @property
    def pocketed(self) -> bool:
        return self.config.model is QueueModel.QUEUE_II

    def views(self) -> List[CommView]:
        return [make_comm_view(self.state.queues[a], self._view_depth) for a in APPROACHES]

    def arrivals_step(self) -> None:
        t = self.state.t
        for a in APPROACHES:
            vehicle = self.arrivals.sample(a, t)
            if vehicle is not None:
                self.state.queues[a].push(vehicle)
                self._arrived[a] += 1

    def serve_slot(self, approach: Approach, movement: Movement) -> bool:
        vehicle = self.state.queues[approach].serve(movement, absorb=self.config.physical_absorption)
        if vehicle is None:
            return False
        self._departed[approach] += 1
        if not self.pocketed:
            self.state.learned.clear(approach)
        return True

    def refill_boundary(self) -> None:
        if self.pocketed:
            for queue in self.state.queues.values():
                queue.refill()

    def decide(self) -> Phase:
        cfg = self.config
        if cfg.scheduler is Scheduler.FIXED_TIME:
            return decide_phase_fixed(self.state.t, cfg.fixed_cycle, cfg.n)
        views = self.views()
        if cfg.scheduler is Scheduler.MAX_WEIGHT:
            return decide_phase_maxweight(views, cfg.model, cfg.tie_break, self.tie_rng)
        return decide_phase_camw(
            views, self.params, self.state.learned, cfg.tie_break, self.tie_rng, cfg.learning_inference
        )

    def _check_conservation(self) -> None:
        for a, queue in self.state.queues.items():
            if self._arrived[a] != self._departed[a] + len(queue):
                raise SimulationError(f"conservation broken on {a.name} at slot {self.state.t}")

    def _close_phase(self, phase: Phase, queue_before: Dict[Approach, int], served: Dict[Approach, int]) -> None:
        for a in phase.approaches:
            if served[a] == 0 and queue_before[a] > 0:
                self._blocking += 1
            if not self.pocketed:
                update_learning(self.state.learned, a, phase.movement, served[a], queue_before[a])

    def run(self) -> Metrics:
        cfg = self.config
        horizon = cfg.horizon
        queue_total = np.zeros(horizon, dtype=np.int64)
        cum_arr = np.zeros(horizon, dtype=np.int64)
        cum_dep = np.zeros(horizon, dtype=np.int64)
        cum_blk = np.zeros(horizon, dtype=np.int64)
        state = self.state
        while state.t < horizon:
            self.refill_boundary()
            phase = self.decide()
            state.phase = phase
            state.remaining = min(cfg.n, horizon - state.t)
            queue_before = {a: len(state.queues[a]) for a in phase.approaches}
            served = {a: 0 for a in phase.approaches}
            while state.remaining:
                slot_departures = {a: 0 for a in APPROACHES}
                for a in phase.approaches:
                    if self.serve_slot(a, phase.movement):
                        served[a] += 1
                        slot_departures[a] = 1
                self.arrivals_step()
                self._check_conservation()
                state.remaining -= 1
                if state.remaining == 0:
                    self._close_phase(phase, queue_before, served)
                t = state.t
                lengths = [len(state.queues[a]) for a in APPROACHES]
                queue_total[t] = sum(lengths)
                cum_arr[t] = sum(self._arrived.values())
                cum_dep[t] = sum(self._departed.values())
                cum_blk[t] = self._blocking
                if self._trace is not None:
                    self._trace.append(
                        TraceRecord(
                            t,
                            phase.id,
                            tuple(lengths),
                            tuple(slot_departures[a] for a in APPROACHES),
                            tuple(state.learned.flags(a) for a in APPROACHES),
                        )
                    )
                state.t += 1
        logger.debug("run finished: seed=%s horizon=%s blocking=%s", cfg.seed, horizon, self._blocking)
        return Metrics(
            horizon,
            queue_total,
            cum_arr,
            cum_dep,
            cum_blk,
            dict(self._arrived),
            dict(self._departed),
            self._trace,
        )


def arrivals_step(sim: Simulation) -> Simulation:
    sim.arrivals_step()
    return sim


def serve_slot(sim: Simulation, approach: Approach, movement: Movement) -> bool:
    return sim.serve_slot(approach, movement)


def refill_boundary(sim: Simulation) -> Simulation:
    sim.refill_boundary()
    return sim


def run(config: SimConfig, trace: bool = False) -> Metrics:
    """Simulate ``config`` and return its metrics; deterministic in ``config.seed``."""
    return Simulation(config, trace=trace).run()
