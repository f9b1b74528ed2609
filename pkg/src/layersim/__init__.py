"""Discrete-event simulation and energy accounting for edge/fog/cloud task placement."""

from .energy import EnergyReport, PowerSample, PowerTrace, integrate_trapezoid, makespan, task_energy
from .model import (
    ClusterState,
    Layer,
    NodeSpec,
    Objective,
    Placement,
    PowerModel,
    SecurityTag,
    TaskRecord,
    TaskSpec,
    validate_cluster,
)
from .sim import Scenario, SimulationResult, load_preset, load_scenario, run

__version__ = "0.1.0"

__all__ = [
    "ClusterState", "EnergyReport", "Layer", "NodeSpec", "Objective", "Placement", "PowerModel",
    "PowerSample", "PowerTrace", "Scenario", "SecurityTag", "SimulationResult", "TaskRecord",
    "TaskSpec", "integrate_trapezoid", "load_preset", "load_scenario", "makespan", "run",
    "task_energy", "validate_cluster",
]
