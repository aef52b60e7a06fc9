"""Simulation laboratory for self-organising traffic signals.

A stochastic cell-based road-grid simulation, an interval-valued microscopic
prediction model, five per-intersection signal controllers, two vehicle
detection scenarios, and a batch experiment harness with CSV output.
"""

from .intervals import Interval
from .network import (
    FAST,
    GREEN,
    NS,
    SETUP,
    SLOW,
    WE,
    Network,
    NetworkConfig,
    Vehicle,
)
from .sensing import Detection, SensorFrame, build_frame, observe_rvd, observe_vsn
from .prediction import (
    IntersectionModel,
    IntervalLane,
    IntervalVehicle,
    predict_cost,
    predict_green_time,
    predict_time_window,
    predict_waiting_count,
)
from .controllers import (
    CONTROLLERS,
    ControllerParams,
    expected_delay_cost,
    expected_delay_cost_interval,
    make_agent,
    queue_clear_time,
    select_by_center,
    select_interval,
)
from .harness import ExperimentPlan, RunResult, aggregate, run_cell, run_plan

__version__ = "0.1.0"

__all__ = [
    "Interval",
    "Network",
    "NetworkConfig",
    "Vehicle",
    "FAST",
    "SLOW",
    "NS",
    "WE",
    "GREEN",
    "SETUP",
    "Detection",
    "SensorFrame",
    "build_frame",
    "observe_rvd",
    "observe_vsn",
    "IntervalVehicle",
    "IntervalLane",
    "IntersectionModel",
    "predict_cost",
    "predict_green_time",
    "predict_time_window",
    "predict_waiting_count",
    "CONTROLLERS",
    "ControllerParams",
    "make_agent",
    "select_interval",
    "select_by_center",
    "expected_delay_cost",
    "expected_delay_cost_interval",
    "queue_clear_time",
    "ExperimentPlan",
    "RunResult",
    "run_cell",
    "run_plan",
    "aggregate",
]
