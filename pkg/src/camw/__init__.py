"""Connectivity-aware max-weight phase scheduling for a four-way intersection."""

from camw.domain import (
    Approach,
    CommView,
    EstimatorParams,
    Movement,
    PHASES,
    Phase,
    QueueModel,
    ApproachQueueI,
    ApproachQueueII,
    Scheduler,
    SimConfig,
    SlotInfo,
    TieBreak,
    Vehicle,
    make_comm_view,
)
from camw.estimator import (
    AlignmentView,
    enumerate_expected_pass,
    enumerate_expected_pass_queue2,
    expected_pass_queue1,
    expected_pass_queue2,
    pass_count_distribution,
)
from camw.controller import (
    LearnedState,
    decide_phase_camw,
    decide_phase_fixed,
    decide_phase_maxweight,
    effective_estimate,
    update_learning,
)
from camw.simulator import Metrics, Simulation, run

__version__ = "0.1.0"

__all__ = [
    "AlignmentView",
    "Approach",
    "ApproachQueueI",
    "ApproachQueueII",
    "CommView",
    "EstimatorParams",
    "LearnedState",
    "Metrics",
    "Movement",
    "PHASES",
    "Phase",
    "QueueModel",
    "Scheduler",
    "SimConfig",
    "Simulation",
    "SlotInfo",
    "TieBreak",
    "Vehicle",
    "decide_phase_camw",
    "decide_phase_fixed",
    "decide_phase_maxweight",
    "effective_estimate",
    "enumerate_expected_pass",
    "enumerate_expected_pass_queue2",
    "expected_pass_queue1",
    "expected_pass_queue2",
    "make_comm_view",
    "pass_count_distribution",
    "run",
    "update_learning",
]
